//! Finite-dimensional test spaces.
//!
//! A test space is `C^d` equipped with
//!
//! * an antilinear involution `J(f) = A·conj(f)` (so `A·conj(A) = I`), whose
//!   fixed points are the "real"/hermitian directions, and
//! * a bilinear two-point kernel `W₂(f,g) = fᵀ·K·g` (no conjugation on either
//!   slot).
//!
//! Compatibility between the two is positivity of the sesquilinear form
//!
//! ```text
//!     ⟨f,g⟩ = 2·W₂(J(f), g) = fᴴ·(2·Aᵀ·K)·g,
//! ```
//!
//! which must be Hermitian positive semidefinite. Its matrix `H = 2·Aᵀ·K` is
//! the one-particle form; a degenerate `H` is legal and flows into the
//! radical/null-space handling downstream.

use crate::linalg::{hermitian_eigenvalues, real_null_space, CMatrix, CVector, RMatrix};
use crate::{CcrError, Result};
use num_complex::Complex64;
use std::sync::Arc;

/// Relative tolerance used to decide whether a vector is fixed by `J`.
const HERMITIAN_GATE: f64 = 1e-8;

/// `C^d` with involution and two-point kernel. Construct through
/// [`TestSpace::new`] (general involution) or [`TestSpace::componentwise`]
/// (`A = I`), then check invariants with [`TestSpace::validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct TestSpace {
    dim: usize,
    involution: CMatrix,
    kernel: CMatrix,
    components: Option<Vec<String>>,
    /// One-particle form `H = 2·Aᵀ·K`.
    herm_form: CMatrix,
    /// Set when `A` has exactly one nonzero entry per column and row:
    /// `J(e_j) = phase·e_{row}`. Lets monomial star maps stay monomial, which
    /// the Wick pairing fast path relies on.
    monomial_star: Option<Vec<(usize, Complex64)>>,
}

/// Raw diagnostics from [`TestSpace::validate`].
#[derive(Debug, Clone)]
pub struct SpaceValidation {
    /// ‖A·conj(A) − I‖ (spectral).
    pub involution_defect: f64,
    /// ‖H − Hᴴ‖ (spectral).
    pub hermiticity_defect: f64,
    /// Extreme eigenvalues of (H + Hᴴ)/2.
    pub eig_min: f64,
    pub eig_max: f64,
}

impl SpaceValidation {
    /// All invariants hold at tolerance `tol`: `J` is an involution, the
    /// one-particle form is Hermitian, and it is PSD up to `−tol·λ_max`.
    pub fn passes(&self, tol: f64) -> bool {
        self.involution_defect <= tol
            && self.hermiticity_defect <= tol
            && self.eig_min >= -tol * self.eig_max.max(1.0)
    }
}

impl TestSpace {
    /// Build a space from an involution matrix and a two-point kernel.
    /// Only shapes are checked here; call [`validate`](Self::validate) for
    /// the actual invariants.
    pub fn new(
        involution: CMatrix,
        kernel: CMatrix,
        components: Option<Vec<String>>,
    ) -> Result<Arc<Self>> {
        let d = kernel.nrows();
        if d == 0 || kernel.ncols() != d {
            return Err(CcrError::DimensionMismatch {
                expected: d.max(1),
                got: kernel.ncols(),
            });
        }
        if involution.nrows() != d || involution.ncols() != d {
            return Err(CcrError::DimensionMismatch {
                expected: d,
                got: involution.nrows(),
            });
        }
        if let Some(labels) = &components {
            if labels.len() != d {
                return Err(CcrError::DimensionMismatch {
                    expected: d,
                    got: labels.len(),
                });
            }
        }
        let herm_form = involution.transpose() * &kernel * Complex64::new(2.0, 0.0);
        let monomial_star = monomial_star_structure(&involution);
        Ok(Arc::new(TestSpace {
            dim: d,
            involution,
            kernel,
            components,
            herm_form,
            monomial_star,
        }))
    }

    /// Space with the componentwise involution `J(f) = conj(f)`.
    pub fn componentwise(kernel: CMatrix) -> Result<Arc<Self>> {
        let d = kernel.nrows();
        TestSpace::new(CMatrix::identity(d, d), kernel, None)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kernel(&self) -> &CMatrix {
        &self.kernel
    }

    pub fn involution(&self) -> &CMatrix {
        &self.involution
    }

    pub fn components(&self) -> Option<&[String]> {
        self.components.as_deref()
    }

    /// One-particle form matrix `H = 2·Aᵀ·K`.
    pub fn herm_form(&self) -> &CMatrix {
        &self.herm_form
    }

    pub(crate) fn monomial_star(&self) -> Option<&[(usize, Complex64)]> {
        self.monomial_star.as_deref()
    }

    /// Standard basis vector `e_i`.
    pub fn basis_vector(&self, i: usize) -> CVector {
        let mut v = CVector::zeros(self.dim);
        v[i] = Complex64::new(1.0, 0.0);
        v
    }

    /// `J(f) = A·conj(f)`.
    pub fn conjugate(&self, f: &CVector) -> CVector {
        &self.involution * f.map(|z| z.conj())
    }

    /// Bilinear two-point value `W₂(f,g) = fᵀ·K·g`.
    pub fn two_point(&self, f: &CVector, g: &CVector) -> Complex64 {
        (f.transpose() * &self.kernel * g)[(0, 0)]
    }

    /// Sesquilinear one-particle form `⟨f,g⟩ = 2·W₂(J(f), g) = fᴴ·H·g`.
    pub fn one_particle_form(&self, f: &CVector, g: &CVector) -> Complex64 {
        (f.adjoint() * &self.herm_form * g)[(0, 0)]
    }

    /// Relative distance of `f` from the `J`-fixed (hermitian) subspace.
    pub fn hermitian_defect(&self, f: &CVector) -> f64 {
        (self.conjugate(f) - f).norm() / (1.0 + f.norm())
    }

    fn require_hermitian(&self, f: &CVector) -> Result<()> {
        let defect = self.hermitian_defect(f);
        if defect > HERMITIAN_GATE {
            return Err(CcrError::NotHermitian { defect });
        }
        Ok(())
    }

    /// Symplectic form `σ(f,g) = 2·Im W₂(f,g)` on hermitian vectors.
    /// Rejects arguments that are not fixed by `J`.
    pub fn sigma(&self, f: &CVector, g: &CVector) -> Result<f64> {
        self.require_hermitian(f)?;
        self.require_hermitian(g)?;
        Ok(2.0 * self.two_point(f, g).im)
    }

    /// Check the space invariants; see [`SpaceValidation`].
    pub fn validate(&self) -> SpaceValidation {
        let id = CMatrix::identity(self.dim, self.dim);
        let inv_defect =
            crate::linalg::spectral_norm(&(&self.involution * self.involution.map(|z| z.conj()) - id));
        let herm_defect = crate::linalg::hermiticity_defect(&self.herm_form);
        let eigs = hermitian_eigenvalues(&self.herm_form);
        SpaceValidation {
            involution_defect: inv_defect,
            hermiticity_defect: herm_defect,
            eig_min: eigs[eigs.len() - 1],
            eig_max: eigs[0],
        }
    }

    /// Real basis of the `J`-fixed subspace. Always has `d` elements for a
    /// genuine antilinear involution (the fixed space of an antiunitary
    /// involution on `C^d` has real dimension `d`).
    ///
    /// For the componentwise involution this is the standard basis; otherwise
    /// the fixed space is computed as the kernel of `R − I`, where `R` is the
    /// real-linear matrix of `J` on `R^{2d}`.
    pub fn hermitian_basis(&self) -> Result<Vec<CVector>> {
        let d = self.dim;
        if self.involution == CMatrix::identity(d, d) {
            return Ok((0..d).map(|i| self.basis_vector(i)).collect());
        }
        // J(x + iy) = A(x − iy) = (Ar·x + Ai·y) + i(Ai·x − Ar·y).
        let mut r = RMatrix::zeros(2 * d, 2 * d);
        for i in 0..d {
            for j in 0..d {
                let a = self.involution[(i, j)];
                r[(i, j)] = a.re;
                r[(i, j + d)] = a.im;
                r[(i + d, j)] = a.im;
                r[(i + d, j + d)] = -a.re;
            }
        }
        let fixed = real_null_space(&(r - RMatrix::identity(2 * d, 2 * d)), HERMITIAN_GATE);
        if fixed.ncols() != d {
            let v = self.validate();
            return Err(CcrError::InvalidInvolution {
                defect: v.involution_defect,
            });
        }
        Ok((0..d)
            .map(|k| {
                CVector::from_iterator(
                    d,
                    (0..d).map(|i| Complex64::new(fixed[(i, k)], fixed[(i + d, k)])),
                )
            })
            .collect())
    }

    /// Real coordinates (x; y) of `f = x + iy`, used for radical span
    /// comparisons.
    pub fn real_embedding(&self, f: &CVector) -> nalgebra::DVector<f64> {
        let d = self.dim;
        nalgebra::DVector::from_iterator(
            2 * d,
            (0..d).map(|i| f[i].re).chain((0..d).map(|i| f[i].im)),
        )
    }
}

/// Detect "monomial" involutions: exactly one nonzero per column and per row.
/// Entries are compared against exact zero — configs carrying permutations or
/// the identity store exact zeros, and anything fuzzier takes the dense path.
fn monomial_star_structure(a: &CMatrix) -> Option<Vec<(usize, Complex64)>> {
    let d = a.nrows();
    let mut cols = Vec::with_capacity(d);
    let mut row_used = vec![false; d];
    for j in 0..d {
        let mut hit = None;
        for i in 0..d {
            let v = a[(i, j)];
            if v != Complex64::new(0.0, 0.0) {
                if hit.is_some() {
                    return None;
                }
                hit = Some((i, v));
            }
        }
        let (i, v) = hit?;
        if row_used[i] {
            return None;
        }
        row_used[i] = true;
        cols.push((i, v));
    }
    Some(cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// d=2, K = (1/2)·[[1, i], [−i, 1]], componentwise involution.
    fn cfg1() -> Arc<TestSpace> {
        let k = CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.0, 0.5), c(0.0, -0.5), c(0.5, 0.0)]);
        TestSpace::componentwise(k).unwrap()
    }

    #[test]
    fn componentwise_conjugation() {
        let s = cfg1();
        let f = CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 1.0)]);
        let jf = s.conjugate(&f);
        assert_eq!(jf[0], c(1.0, 0.0));
        assert_eq!(jf[1], c(0.0, -1.0));
        // J is an involution.
        assert!((s.conjugate(&jf) - &f).norm() < 1e-15);
    }

    #[test]
    fn swap_involution_conjugation() {
        let a = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let k = CMatrix::identity(2, 2).scale(0.5);
        let s = TestSpace::new(a, k, None).unwrap();
        let f = CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 1.0)]);
        let jf = s.conjugate(&f);
        assert_eq!(jf[0], c(0.0, -1.0));
        assert_eq!(jf[1], c(1.0, 0.0));
    }

    #[test]
    fn cfg1_validates_with_rank_one_form() {
        let s = cfg1();
        let v = s.validate();
        assert!(v.passes(1e-10));
        // H = 2K has eigenvalues {2, 0}.
        assert_relative_eq!(v.eig_max, 2.0, epsilon = 1e-12);
        assert_relative_eq!(v.eig_min, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn invalid_involution_is_flagged() {
        let a = CMatrix::from_row_slice(1, 1, &[c(2.0, 0.0)]);
        let k = CMatrix::from_row_slice(1, 1, &[c(0.5, 0.0)]);
        let s = TestSpace::new(a, k, None).unwrap();
        let v = s.validate();
        assert!(v.involution_defect > 1.0);
        assert!(!v.passes(1e-10));
    }

    #[test]
    fn negative_kernel_fails_positivity() {
        let k = CMatrix::from_row_slice(1, 1, &[c(-1.0, 0.0)]);
        let s = TestSpace::componentwise(k).unwrap();
        let v = s.validate();
        assert!(v.eig_min < -1.0);
        assert!(!v.passes(1e-10));
    }

    #[test]
    fn sigma_on_cfg1_basis() {
        let s = cfg1();
        let e1 = s.basis_vector(0);
        let e2 = s.basis_vector(1);
        assert_relative_eq!(s.sigma(&e1, &e2).unwrap(), 1.0, epsilon = 1e-14);
        assert_relative_eq!(s.sigma(&e2, &e1).unwrap(), -1.0, epsilon = 1e-14);
        assert_relative_eq!(s.sigma(&e1, &e1).unwrap(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn sigma_vanishes_for_real_kernel() {
        let k = CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.25, 0.0), c(0.25, 0.0), c(0.5, 0.0)]);
        let s = TestSpace::componentwise(k).unwrap();
        let e1 = s.basis_vector(0);
        let e2 = s.basis_vector(1);
        assert_eq!(s.sigma(&e1, &e2).unwrap(), 0.0);
    }

    #[test]
    fn sigma_rejects_non_hermitian_input() {
        let s = cfg1();
        let f = CVector::from_vec(vec![c(0.0, 1.0), c(0.0, 0.0)]);
        let e2 = s.basis_vector(1);
        assert!(matches!(
            s.sigma(&f, &e2),
            Err(CcrError::NotHermitian { .. })
        ));
    }

    #[test]
    fn one_particle_form_values_on_cfg1() {
        let s = cfg1();
        let e1 = s.basis_vector(0);
        let val = s.one_particle_form(&e1, &e1);
        assert_relative_eq!(val.re, 1.0, epsilon = 1e-14);
        assert_relative_eq!(val.im, 0.0, epsilon = 1e-14);
        // K annihilates e1 + i·e2, so that direction is null for ⟨·,·⟩.
        let null = CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 1.0)]);
        let nval = s.one_particle_form(&null, &null);
        assert!(nval.norm() < 1e-14);
        // ... and the conjugate direction is not (norm² = 4).
        let notnull = CVector::from_vec(vec![c(1.0, 0.0), c(0.0, -1.0)]);
        assert_relative_eq!(s.one_particle_form(&notnull, &notnull).re, 4.0, epsilon = 1e-12);
    }

    #[test]
    fn hermitian_basis_componentwise_is_standard() {
        let s = cfg1();
        let basis = s.hermitian_basis().unwrap();
        assert_eq!(basis.len(), 2);
        assert_eq!(basis[0], s.basis_vector(0));
        assert_eq!(basis[1], s.basis_vector(1));
    }

    #[test]
    fn hermitian_basis_swap_involution_spans_expected_plane() {
        let a = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let k = CMatrix::identity(2, 2).scale(0.5);
        let s = TestSpace::new(a, k, None).unwrap();
        let basis = s.hermitian_basis().unwrap();
        assert_eq!(basis.len(), 2);
        // Each element is fixed by J ...
        for b in &basis {
            assert!(s.hermitian_defect(b) < 1e-10);
        }
        // ... and lies in span_R{(1,1)/√2, (i,−i)/√2}.
        let r = 1.0 / 2.0f64.sqrt();
        let ref1 = CVector::from_vec(vec![c(r, 0.0), c(r, 0.0)]);
        let ref2 = CVector::from_vec(vec![c(0.0, r), c(0.0, -r)]);
        for b in &basis {
            // Real inner products in the R^{2d} picture.
            let e = s.real_embedding(b);
            let p1 = e.dot(&s.real_embedding(&ref1));
            let p2 = e.dot(&s.real_embedding(&ref2));
            let proj = s.real_embedding(&ref1) * p1 + s.real_embedding(&ref2) * p2;
            assert!((proj - e).norm() < 1e-10);
        }
    }

    #[test]
    fn monomial_star_detection() {
        let s = cfg1();
        assert!(s.monomial_star().is_some());
        // Dense involution: A = U·Uᵀ for a non-trivial unitary U is symmetric
        // unitary, hence a valid involution without monomial structure.
        let th: f64 = 0.3;
        let u = CMatrix::from_row_slice(
            2,
            2,
            &[
                c(th.cos(), 0.0),
                c(-th.sin(), 0.0),
                c(th.sin(), 0.0),
                c(th.cos(), 0.0),
            ],
        ) * CMatrix::from_diagonal(&CVector::from_vec(vec![
            Complex64::from_polar(1.0, 0.4),
            Complex64::from_polar(1.0, -0.9),
        ]));
        let a = &u * u.transpose();
        // Kernel value is irrelevant for involution checks.
        let sp = TestSpace::new(a, CMatrix::identity(2, 2).scale(0.5), None).unwrap();
        assert!(sp.monomial_star().is_none());
        assert!(sp.validate().involution_defect < 1e-12);
        let basis = sp.hermitian_basis().unwrap();
        assert_eq!(basis.len(), 2);
        for b in &basis {
            assert!(sp.hermitian_defect(b) < 1e-8);
        }
    }
}
