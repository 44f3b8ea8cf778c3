//! GNS construction at a fixed truncation degree.
//!
//! Orthonormalizing the monomial Gram matrix realizes the quotient of the
//! truncated algebra by the null space of `⟨·,·⟩_W` as a concrete
//! finite-dimensional Hilbert space of rank `r`:
//!
//! * `transform` (`Λ^{−1/2}·V_rᴴ`) sends monomial coefficient vectors to
//!   orthonormal coordinates; `transform · G · transformᴴ = I`.
//! * `isometric` (`Λ^{1/2}·V_rᴴ`) sends a polynomial `u` to the coordinates
//!   of its class `q(u)`; inner products of coordinate vectors reproduce
//!   `⟨u,v⟩_W` exactly on the retained span.
//!
//! Field operators are compressions `Φ_N(h) = P_N Φ(h) P_N` computed from
//! exact moment data of depth `2N+1`; Weyl operators come from the exact
//! Hermitian eigendecomposition, so the one-parameter group law holds to
//! roundoff. Two defects quantify what truncation does and does not cost:
//!
//! * the canonical commutation relation `[Φ(f),Φ(h)] = i·σ(f,h)` holds
//!   **exactly** on the image of degree ≤ N−2 monomials (compression cannot
//!   disturb matrix elements whose intermediate degrees stay ≤ N), and
//! * the Weyl composition law `U_f·U_h = e^{−iσ(f,h)/2}·U_{f+h}` holds only
//!   in the limit — its defect against a low-degree probe projector shrinks
//!   as N grows.

use crate::linalg::{
    hermitian_eigen, real_null_space, span_projector, spectral_norm, unitary_exp_i, CMatrix,
    CVector, RMatrix,
};
use crate::space::TestSpace;
use crate::tensor::TensorPoly;
use crate::wightman::WightmanFunctional;
use crate::{CcrError, Result};
use num_complex::Complex64;
use std::sync::Arc;

/// Default relative eigenvalue cut separating the quotient null space.
pub const DEFAULT_NULL_CUT: f64 = 1e-10;

/// Finite-difference defects below this floor are roundoff; no convergence
/// order can be read off them.
pub const GENERATOR_FLOOR: f64 = 1e-13;

/// What a represented matrix stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    Field,
    Weyl,
}

/// An operator compressed onto the GNS space, in orthonormal coordinates.
#[derive(Debug, Clone)]
pub struct RepresentedOperator {
    pub matrix: CMatrix,
    pub kind: OperatorKind,
}

/// Report of the finite-difference generator check.
#[derive(Debug, Clone)]
pub struct GeneratorCheck {
    /// ‖(U_δ − U_{−δ})/(2δ) − i·Φ‖ on the degree ≤ N−1 image, at step δ.
    pub defect: f64,
    /// Same at step δ/2.
    pub defect_half: f64,
    /// Observed Richardson order log₂(defect/defect_half); `None` when both
    /// defects sit below [`GENERATOR_FLOOR`] (nothing to measure — this
    /// happens legitimately, e.g. for fields in the radical).
    pub order: Option<f64>,
}

/// The truncated GNS space: quotient + completion shadow of the tensor
/// algebra at degree `N` under the quasi-free functional.
#[derive(Debug)]
pub struct GnsSpace {
    functional: Arc<WightmanFunctional>,
    degree: usize,
    epsilon: f64,
    basis: Vec<Vec<usize>>,
    gram: CMatrix,
    rank: usize,
    /// r×M: monomial coefficients → orthonormal coordinates (`Λ^{−1/2}V_rᴴ`).
    transform: CMatrix,
    /// r×M: polynomial `u` ↦ coordinates of `q(u)` (`Λ^{1/2}V_rᴴ`).
    isometric: CMatrix,
}

/// Eigendecompose the Gram matrix at truncation `degree` and keep eigenpairs
/// above `epsilon · λ_max`. Needs moment tables of depth ≥ 2N (fields need
/// 2N+1; [`GnsSpace::represent_field`] checks that itself).
pub fn build_gns(
    functional: &Arc<WightmanFunctional>,
    degree: usize,
    epsilon: f64,
) -> Result<GnsSpace> {
    let g = functional.gram(degree)?;
    let m = g.basis.len();
    let (vals, vecs) = hermitian_eigen(&g.matrix);
    let lmax = vals[0];
    if !(lmax > 0.0) || !lmax.is_finite() {
        return Err(CcrError::DegenerateGram);
    }
    let rank = vals.iter().filter(|&&l| l > epsilon * lmax).count();
    let mut transform = CMatrix::zeros(rank, m);
    let mut isometric = CMatrix::zeros(rank, m);
    for i in 0..rank {
        let root = vals[i].sqrt();
        for a in 0..m {
            let v = vecs[(a, i)].conj();
            transform[(i, a)] = v / root;
            isometric[(i, a)] = v * root;
        }
    }
    Ok(GnsSpace {
        functional: Arc::clone(functional),
        degree,
        epsilon,
        basis: g.basis,
        gram: g.matrix,
        rank,
        transform,
        isometric,
    })
}

impl GnsSpace {
    pub fn functional(&self) -> &Arc<WightmanFunctional> {
        &self.functional
    }

    pub fn space(&self) -> &Arc<TestSpace> {
        self.functional.space()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn basis(&self) -> &[Vec<usize>] {
        &self.basis
    }

    pub fn gram(&self) -> &CMatrix {
        &self.gram
    }

    pub fn transform(&self) -> &CMatrix {
        &self.transform
    }

    /// ‖transform·G·transformᴴ − I‖ — orthonormality of the quotient basis.
    pub fn orthonormality_defect(&self) -> f64 {
        let probe = &self.transform * &self.gram * self.transform.adjoint();
        spectral_norm(&(probe - CMatrix::identity(self.rank, self.rank)))
    }

    /// Monomial coefficient vector of a polynomial in the Gram basis order.
    fn monomial_coefficients(&self, u: &TensorPoly) -> Result<CVector> {
        if !(Arc::ptr_eq(u.space(), self.space()) || **u.space() == **self.space()) {
            return Err(CcrError::SpaceMismatch);
        }
        if u.max_degree() > self.degree {
            return Err(CcrError::TruncationTooSmall {
                need: u.max_degree(),
                got: self.degree,
            });
        }
        let mut c = CVector::zeros(self.basis.len());
        let mut pos = 0;
        for n in 0..=u.max_degree() {
            for &z in u.level(n) {
                c[pos] = z;
                pos += 1;
            }
        }
        Ok(c)
    }

    /// Orthonormal coordinates of the class `q(u)`.
    pub fn coord(&self, u: &TensorPoly) -> Result<CVector> {
        Ok(&self.isometric * self.monomial_coefficients(u)?)
    }

    /// Coordinates of the vacuum `q(1)` (unit norm by `W₀ = 1`).
    pub fn vacuum(&self) -> CVector {
        self.isometric.column(0).into_owned()
    }

    /// `⟨Ω, M Ω⟩` for an operator in orthonormal coordinates.
    pub fn vacuum_expectation(&self, m: &CMatrix) -> Complex64 {
        let v = self.vacuum();
        (v.adjoint() * m * &v)[(0, 0)]
    }

    /// Orthogonal projector onto the image of monomials of degree ≤ `p`.
    pub fn degree_projector(&self, p: usize) -> Result<CMatrix> {
        if p > self.degree {
            return Err(CcrError::TruncationTooSmall {
                need: p,
                got: self.degree,
            });
        }
        let m_p = self.basis.iter().take_while(|idx| idx.len() <= p).count();
        let sub = self.isometric.columns(0, m_p).into_owned();
        // Eigenvalue cut ε on the Gram becomes a √ε cut on singular values.
        Ok(span_projector(&sub, self.epsilon.max(1e-14).sqrt()))
    }

    /// Compression `Φ_N(h) = P_N Φ(h) P_N` in orthonormal coordinates.
    /// `h` need not be hermitian; for hermitian `h` the result is Hermitian.
    pub fn represent_field(&self, h: &CVector) -> Result<RepresentedOperator> {
        let d = self.space().dim();
        if h.len() != d {
            return Err(CcrError::DimensionMismatch {
                expected: d,
                got: h.len(),
            });
        }
        let m = self.basis.len();
        let mut x = CMatrix::zeros(m, m);
        let mut prefixed: Vec<usize> = Vec::with_capacity(self.degree + 1);
        for (b_idx, b) in self.basis.iter().enumerate() {
            for i in 0..d {
                if h[i] == Complex64::new(0.0, 0.0) {
                    continue;
                }
                prefixed.clear();
                prefixed.push(i);
                prefixed.extend_from_slice(b);
                for (a_idx, a) in self.basis.iter().enumerate() {
                    let w = self.functional.monomial_pairing(a, &prefixed)?;
                    x[(a_idx, b_idx)] += h[i] * w;
                }
            }
        }
        let matrix = &self.transform * x * self.transform.adjoint();
        Ok(RepresentedOperator {
            matrix,
            kind: OperatorKind::Field,
        })
    }

    fn require_hermitian(&self, h: &CVector) -> Result<()> {
        let defect = self.space().hermitian_defect(h);
        if defect > 1e-8 {
            return Err(CcrError::NotHermitian { defect });
        }
        Ok(())
    }

    /// `U_{th} = exp(i·t·Φ_N(h))` for hermitian `h`; exactly unitary up to
    /// roundoff.
    pub fn weyl_operator(&self, h: &CVector, t: f64) -> Result<RepresentedOperator> {
        self.require_hermitian(h)?;
        let phi = self.represent_field(h)?;
        Ok(RepresentedOperator {
            matrix: unitary_exp_i(&phi.matrix, t),
            kind: OperatorKind::Weyl,
        })
    }

    /// Central difference of the Weyl group against `i·Φ_N(h)`, probed on the
    /// degree ≤ N−1 image at steps `δ` and `δ/2`.
    pub fn generator_check(&self, h: &CVector, delta: f64) -> Result<GeneratorCheck> {
        self.require_hermitian(h)?;
        let phi = self.represent_field(h)?.matrix;
        let pi = self.degree_projector(self.degree.saturating_sub(1))?;
        let defect_at = |step: f64| -> f64 {
            let plus = unitary_exp_i(&phi, step);
            let minus = unitary_exp_i(&phi, -step);
            let diff = (plus - minus).scale(1.0 / (2.0 * step));
            let ideal = phi.clone() * Complex64::i();
            spectral_norm(&((diff - ideal) * &pi))
        };
        let defect = defect_at(delta);
        let defect_half = defect_at(delta / 2.0);
        let order = if defect < GENERATOR_FLOOR && defect_half < GENERATOR_FLOOR {
            None
        } else {
            Some((defect / defect_half).log2())
        };
        Ok(GeneratorCheck {
            defect,
            defect_half,
            order,
        })
    }

    /// ‖Π_{N−2}·([Φ(f),Φ(h)] − i·σ(f,h)·I)·Π_{N−2}‖.
    ///
    /// Zero up to roundoff: for inputs of degree ≤ N−2 both field factors act
    /// without clipping, so the compressed commutator agrees with the exact
    /// one there, and the exact one is `i·σ` by the quasi-free structure.
    pub fn commutator_defect(&self, f: &CVector, h: &CVector) -> Result<f64> {
        if self.degree < 2 {
            return Err(CcrError::TruncationTooSmall {
                need: 2,
                got: self.degree,
            });
        }
        let sigma = self.space().sigma(f, h)?;
        let pf = self.represent_field(f)?.matrix;
        let ph = self.represent_field(h)?.matrix;
        let comm = &pf * &ph - &ph * &pf
            - CMatrix::identity(self.rank, self.rank) * Complex64::new(0.0, sigma);
        let pi = self.degree_projector(self.degree - 2)?;
        Ok(spectral_norm(&(&pi * comm * &pi)))
    }

    /// ‖(U_f·U_h − e^{−iσ(f,h)/2}·U_{f+h})·Π_P‖ — the Weyl composition
    /// defect against the degree ≤ P probe. Exact only in the completed
    /// space; at truncation it decreases as N grows at fixed P.
    pub fn weyl_defect(&self, f: &CVector, h: &CVector, p: usize) -> Result<f64> {
        if p + 2 > self.degree {
            return Err(CcrError::TruncationTooSmall {
                need: p + 2,
                got: self.degree,
            });
        }
        let sigma = self.space().sigma(f, h)?;
        let uf = self.weyl_operator(f, 1.0)?.matrix;
        let uh = self.weyl_operator(h, 1.0)?.matrix;
        let sum = f + h;
        let ufh = self.weyl_operator(&sum, 1.0)?.matrix;
        let phase = (Complex64::i() * (-sigma / 2.0)).exp();
        let pi = self.degree_projector(p)?;
        Ok(spectral_norm(&((uf * uh - ufh * phase) * pi)))
    }
}

/// Basis of `N_σ = {f hermitian : σ(g,f) = 0 for all hermitian g}`: the null
/// space of the real antisymmetric matrix of σ over the hermitian basis.
pub fn sigma_radical(space: &Arc<TestSpace>) -> Result<Vec<CVector>> {
    let basis = space.hermitian_basis()?;
    let d = basis.len();
    let mut m = RMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            m[(i, j)] = space.sigma(&basis[i], &basis[j])?;
        }
    }
    let null = real_null_space(&m, 1e-8);
    Ok(combine_basis(&basis, &null))
}

/// Basis of `{f hermitian : Φ_N(f) = 0}`: the joint null space of the
/// real-linear map `f ↦ Φ_N(f)` over the hermitian basis.
pub fn field_radical(gns: &GnsSpace) -> Result<Vec<CVector>> {
    let basis = gns.space().hermitian_basis()?;
    let r = gns.rank();
    let mut m = RMatrix::zeros(2 * r * r, basis.len());
    for (i, b) in basis.iter().enumerate() {
        let phi = gns.represent_field(b)?.matrix;
        for col in 0..r {
            for row in 0..r {
                let z = phi[(row, col)];
                let flat = col * r + row;
                m[(flat, i)] = z.re;
                m[(r * r + flat, i)] = z.im;
            }
        }
    }
    let null = real_null_space(&m, 1e-8);
    Ok(combine_basis(&basis, &null))
}

/// Real span matrix (2d×k) of a set of vectors, for principal-angle
/// comparisons between radicals.
pub fn radical_span(space: &TestSpace, vecs: &[CVector]) -> RMatrix {
    let d = space.dim();
    let mut m = RMatrix::zeros(2 * d, vecs.len());
    for (k, v) in vecs.iter().enumerate() {
        let e = space.real_embedding(v);
        for i in 0..2 * d {
            m[(i, k)] = e[i];
        }
    }
    m
}

fn combine_basis(basis: &[CVector], coeffs: &RMatrix) -> Vec<CVector> {
    let dim = basis.first().map(|b| b.len()).unwrap_or(0);
    (0..coeffs.ncols())
        .map(|k| {
            let mut v = CVector::zeros(dim);
            for (i, b) in basis.iter().enumerate() {
                v += b * Complex64::new(coeffs[(i, k)], 0.0);
            }
            v
        })
        .collect()
}
