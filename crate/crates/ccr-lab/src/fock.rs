//! Independent Fock-space route: Segal quantization over the one-particle
//! space, used as a cross-oracle for the GNS construction.
//!
//! The one-particle space is the range of the one-particle form `H` (rank
//! `p`), embedded isometrically by `v = Λ_p^{1/2}·V_pᴴ` so that
//! `⟨v(f), v(g)⟩ = fᴴHg`. On the bosonic occupation basis with total number
//! ≤ N the Segal field is
//!
//! ```text
//!     Φ_F(f) = ( a(v(J f)) + a†(v(f)) ) / √2,
//! ```
//!
//! the unique normalization with vacuum two-point match
//! `⟨Ω, Φ_F(f)Φ_F(g)Ω⟩ = W₂(f,g)` **and** canonical commutators
//! `[Φ_F(f),Φ_F(g)] = i·σ(f,g)` on the protected degrees. None of this code
//! touches the moment tables, which is exactly what makes the intertwiner
//! comparison against the GNS side meaningful.

use crate::gns::GnsSpace;
use crate::linalg::{hermitian_eigen, spectral_norm, unitary_exp_i, CMatrix, CVector};
use crate::space::TestSpace;
use crate::{CcrError, Result};
use num_complex::Complex64;
use std::collections::HashMap;
use std::sync::Arc;

/// Cap on the occupation-basis dimension.
pub const FOCK_CAP: usize = 4096;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Truncated bosonic Fock space over the one-particle space of a test space.
#[derive(Debug)]
pub struct FockSpace {
    space: Arc<TestSpace>,
    max_total: usize,
    /// One-particle rank (modes).
    rank: usize,
    /// p×d embedding: `v(f) = embed·f`, linear, `⟨v(f),v(g)⟩ = fᴴHg`.
    embedding: CMatrix,
    /// Occupation vectors (length `rank`), ordered by total then lex.
    states: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
}

/// Comparison of the GNS and Fock constructions.
#[derive(Debug, Clone)]
pub struct IntertwinerReport {
    /// F×r matrix sending GNS coordinates to Fock vectors,
    /// `q(e_{a₁}⊗…⊗e_{a_j}) ↦ Φ_F(e_{a₁})···Φ_F(e_{a_j})·Ω`.
    pub matrix: CMatrix,
    /// ‖Π(TᴴT − I)Π‖ on the degree ≤ N−1 image.
    pub isometry_defect: f64,
    /// ‖(T·Φ_N(b) − Φ_F(b)·T)·Π_{N−2}‖ per hermitian basis element `b`.
    pub intertwining_defects: Vec<f64>,
    pub fock_dim: usize,
    pub gns_rank: usize,
}

/// Build the truncated Fock space. Rank 0 (zero kernel) is legal and yields
/// the vacuum line. `epsilon` is the relative eigenvalue cut on the
/// one-particle form; eigenvalues below `−epsilon·λ_max` are a positivity
/// violation.
pub fn build_fock(space: &Arc<TestSpace>, max_total: usize, epsilon: f64) -> Result<FockSpace> {
    let d = space.dim();
    let (vals, vecs) = hermitian_eigen(space.herm_form());
    let lmax = vals[0].max(0.0);
    if vals[d - 1] < -epsilon * lmax.max(1.0) {
        return Err(CcrError::NotPositive {
            reason: format!("one-particle form has eigenvalue {:.3e}", vals[d - 1]),
        });
    }
    let rank = vals.iter().filter(|&&l| l > epsilon * lmax && l > 0.0).count();
    let mut embedding = CMatrix::zeros(rank, d);
    for i in 0..rank {
        let root = vals[i].sqrt();
        for a in 0..d {
            embedding[(i, a)] = vecs[(a, i)].conj() * root;
        }
    }
    // Occupation states with total ≤ N, ordered by total then lex.
    let mut states: Vec<Vec<usize>> = Vec::new();
    for total in 0..=max_total {
        push_compositions(rank, total, &mut Vec::with_capacity(rank), &mut states)?;
        if states.len() > FOCK_CAP {
            return Err(CcrError::CapacityExceeded {
                what: "occupation basis",
                needed: states.len(),
                cap: FOCK_CAP,
            });
        }
    }
    let index = states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i))
        .collect();
    Ok(FockSpace {
        space: Arc::clone(space),
        max_total,
        rank,
        embedding,
        states,
        index,
    })
}

/// All length-`p` occupation vectors with the exact total, in lex order.
fn push_compositions(
    p: usize,
    total: usize,
    prefix: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) -> Result<()> {
    if p == 0 {
        if total == 0 {
            out.push(prefix.clone());
        }
        return Ok(());
    }
    if prefix.len() == p - 1 {
        prefix.push(total);
        out.push(prefix.clone());
        prefix.pop();
        return Ok(());
    }
    for n in 0..=total {
        prefix.push(n);
        push_compositions(p, total - n, prefix, out)?;
        prefix.pop();
    }
    Ok(())
}

impl FockSpace {
    pub fn space(&self) -> &Arc<TestSpace> {
        &self.space
    }

    pub fn max_total(&self) -> usize {
        self.max_total
    }

    /// Number of one-particle modes (rank of the one-particle form).
    pub fn one_particle_rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[Vec<usize>] {
        &self.states
    }

    /// One-particle coordinates `v(f)` (linear in `f`).
    pub fn embed(&self, f: &CVector) -> Result<CVector> {
        if f.len() != self.space.dim() {
            return Err(CcrError::DimensionMismatch {
                expected: self.space.dim(),
                got: f.len(),
            });
        }
        Ok(&self.embedding * f)
    }

    /// Creation operator of one mode: `a†_i |…n_i…⟩ = √(n_i+1)|…n_i+1…⟩`,
    /// clipped at total = N (that clipping is the compression `P_N a† P_N`).
    fn creation_mode(&self, mode: usize) -> CMatrix {
        let f = self.dim();
        let mut m = CMatrix::zeros(f, f);
        let mut scratch = Vec::with_capacity(self.rank);
        for (col, s) in self.states.iter().enumerate() {
            let total: usize = s.iter().sum();
            if total >= self.max_total {
                continue;
            }
            scratch.clear();
            scratch.extend_from_slice(s);
            scratch[mode] += 1;
            let row = self.index[&scratch];
            m[(row, col)] = Complex64::new(((s[mode] + 1) as f64).sqrt(), 0.0);
        }
        m
    }

    /// `a†(w) = Σ_i w_i·a†_i` (linear in the one-particle vector).
    pub fn creator(&self, w: &CVector) -> CMatrix {
        let f = self.dim();
        let mut m = CMatrix::zeros(f, f);
        for i in 0..self.rank {
            if w[i] != ZERO {
                m += self.creation_mode(i) * w[i];
            }
        }
        m
    }

    /// `a(w) = Σ_i conj(w_i)·a_i` (antilinear in `w`); adjoint of `creator`.
    pub fn annihilator(&self, w: &CVector) -> CMatrix {
        self.creator(w).adjoint()
    }

    /// Segal field `Φ_F(f) = (a(v(Jf)) + a†(v(f)))/√2`, complex linear in
    /// `f` and Hermitian for hermitian `f`.
    pub fn segal_field(&self, f: &CVector) -> Result<CMatrix> {
        let vf = self.embed(f)?;
        let vjf = self.embed(&self.space.conjugate(f))?;
        let inv_sqrt2 = Complex64::new(1.0 / 2.0f64.sqrt(), 0.0);
        Ok((self.annihilator(&vjf) + self.creator(&vf)) * inv_sqrt2)
    }

    /// Projector onto occupation states with total ≤ `p` (diagonal 0/1).
    pub fn total_projector(&self, p: usize) -> CMatrix {
        let f = self.dim();
        let mut m = CMatrix::zeros(f, f);
        for (i, s) in self.states.iter().enumerate() {
            if s.iter().sum::<usize>() <= p {
                m[(i, i)] = Complex64::new(1.0, 0.0);
            }
        }
        m
    }

    /// `⟨Ω, exp(i·t·Φ_F(f)) Ω⟩` for hermitian `f`.
    pub fn vacuum_characteristic(&self, f: &CVector, t: f64) -> Result<Complex64> {
        let defect = self.space.hermitian_defect(f);
        if defect > 1e-8 {
            return Err(CcrError::NotHermitian { defect });
        }
        let phi = self.segal_field(f)?;
        let u = unitary_exp_i(&phi, t);
        Ok(u[(0, 0)])
    }
}

/// Build the GNS→Fock intertwiner and measure how far it is from a unitary
/// equivalence on the protected degrees. Requires the same space and the
/// same truncation on both sides.
pub fn intertwiner(gns: &GnsSpace, fock: &FockSpace) -> Result<IntertwinerReport> {
    let space = gns.space();
    if !(Arc::ptr_eq(space, fock.space()) || **space == **fock.space())
        || gns.degree() != fock.max_total()
    {
        return Err(CcrError::SpaceMismatch);
    }
    let d = space.dim();
    let n = gns.degree();
    let fdim = fock.dim();
    let fields: Vec<CMatrix> = (0..d)
        .map(|i| fock.segal_field(&space.basis_vector(i)))
        .collect::<Result<_>>()?;
    // Chains Φ_F(e_{a₁})···Φ_F(e_{a_j})·Ω, one column per monomial.
    let mut chains = CMatrix::zeros(fdim, gns.basis().len());
    for (col, idx) in gns.basis().iter().enumerate() {
        let mut v = CVector::zeros(fdim);
        v[0] = Complex64::new(1.0, 0.0);
        for &i in idx.iter().rev() {
            v = &fields[i] * v;
        }
        chains.set_column(col, &v);
    }
    let t = &chains * gns.transform().adjoint();
    let pi = gns.degree_projector(n.saturating_sub(1))?;
    let gram_probe = t.adjoint() * &t - CMatrix::identity(gns.rank(), gns.rank());
    let isometry_defect = spectral_norm(&(&pi * gram_probe * &pi));
    let pi2 = gns.degree_projector(n.saturating_sub(2))?;
    let mut intertwining_defects = Vec::new();
    for b in space.hermitian_basis()? {
        let phi_n = gns.represent_field(&b)?.matrix;
        let phi_f = fock.segal_field(&b)?;
        let defect = spectral_norm(&((&t * phi_n - phi_f * &t) * &pi2));
        intertwining_defects.push(defect);
    }
    Ok(IntertwinerReport {
        matrix: t,
        isometry_defect,
        intertwining_defects,
        fock_dim: fdim,
        gns_rank: gns.rank(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gns::{build_gns, DEFAULT_NULL_CUT};
    use crate::wightman::WightmanFunctional;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn line_space() -> Arc<TestSpace> {
        TestSpace::componentwise(CMatrix::from_row_slice(1, 1, &[c(0.5, 0.0)])).unwrap()
    }

    fn cfg1() -> Arc<TestSpace> {
        let k = CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.0, 0.5), c(0.0, -0.5), c(0.5, 0.0)]);
        TestSpace::componentwise(k).unwrap()
    }

    fn gns_for(space: &Arc<TestSpace>, n: usize) -> GnsSpace {
        let w = WightmanFunctional::new(space, 2 * n + 1).unwrap();
        build_gns(&w, n, DEFAULT_NULL_CUT).unwrap()
    }

    #[test]
    fn dimensions_count_occupation_states() {
        // CFG1: rank-1 form → single mode → N+1 states.
        let f = build_fock(&cfg1(), 3, 1e-10).unwrap();
        assert_eq!(f.one_particle_rank(), 1);
        assert_eq!(f.dim(), 4);
        // Full-rank 2×2 kernel → C(2+2,2) = 6 states at N=2.
        let full = TestSpace::componentwise(CMatrix::identity(2, 2).scale(0.5)).unwrap();
        let f2 = build_fock(&full, 2, 1e-10).unwrap();
        assert_eq!(f2.one_particle_rank(), 2);
        assert_eq!(f2.dim(), 6);
        // N=0 → vacuum only.
        assert_eq!(build_fock(&cfg1(), 0, 1e-10).unwrap().dim(), 1);
        // Zero kernel → rank 0, vacuum line, not an error.
        let zero = TestSpace::componentwise(CMatrix::zeros(2, 2)).unwrap();
        let fz = build_fock(&zero, 4, 1e-10).unwrap();
        assert_eq!(fz.one_particle_rank(), 0);
        assert_eq!(fz.dim(), 1);
    }

    #[test]
    fn negative_form_is_rejected() {
        let bad = TestSpace::componentwise(CMatrix::from_row_slice(1, 1, &[c(-1.0, 0.0)]))
            .unwrap();
        assert!(matches!(
            build_fock(&bad, 2, 1e-10),
            Err(CcrError::NotPositive { .. })
        ));
    }

    #[test]
    fn embedding_reproduces_the_one_particle_form() {
        let s = cfg1();
        let f = build_fock(&s, 2, 1e-10).unwrap();
        let x = CVector::from_vec(vec![c(0.3, -0.4), c(1.2, 0.1)]);
        let y = CVector::from_vec(vec![c(-0.5, 0.9), c(0.0, 0.7)]);
        let vx = f.embed(&x).unwrap();
        let vy = f.embed(&y).unwrap();
        let lhs = (vx.adjoint() * &vy)[(0, 0)];
        let rhs = s.one_particle_form(&x, &y);
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn segal_vacuum_two_point_matches_the_kernel() {
        let s = cfg1();
        let f = build_fock(&s, 3, 1e-10).unwrap();
        let p1 = f.segal_field(&s.basis_vector(0)).unwrap();
        let p2 = f.segal_field(&s.basis_vector(1)).unwrap();
        let m11 = (&p1 * &p1)[(0, 0)];
        let m12 = (&p1 * &p2)[(0, 0)];
        assert_relative_eq!(m11.re, 0.5, epsilon = 1e-13);
        assert_relative_eq!(m11.im, 0.0, epsilon = 1e-13);
        // ⟨Ω, Φ(e1)Φ(e2) Ω⟩ = W₂(e1,e2) = i/2.
        assert_relative_eq!(m12.re, 0.0, epsilon = 1e-13);
        assert_relative_eq!(m12.im, 0.5, epsilon = 1e-13);
    }

    #[test]
    fn segal_commutator_is_canonical_below_the_top() {
        let s = cfg1();
        let n = 4;
        let f = build_fock(&s, n, 1e-10).unwrap();
        let p1 = f.segal_field(&s.basis_vector(0)).unwrap();
        let p2 = f.segal_field(&s.basis_vector(1)).unwrap();
        let comm = &p1 * &p2 - &p2 * &p1;
        // σ(e1,e2) = 1 → commutator i·I on totals ≤ N−2.
        let ideal = CMatrix::identity(f.dim(), f.dim()) * c(0.0, 1.0);
        let pi = f.total_projector(n - 2);
        assert!(spectral_norm(&(&pi * (comm - ideal) * &pi)) < 1e-13);
    }

    #[test]
    fn segal_field_is_hermitian_and_graded() {
        let s = cfg1();
        let f = build_fock(&s, 3, 1e-10).unwrap();
        let h = s.basis_vector(0) + s.basis_vector(1).scale(0.4);
        let phi = f.segal_field(&h).unwrap();
        assert!(crate::linalg::hermiticity_defect(&phi) < 1e-13);
        // Entries connect only adjacent particle totals.
        for (r, sr) in f.states().iter().enumerate() {
            for (col, sc) in f.states().iter().enumerate() {
                let dt = (sr.iter().sum::<usize>() as i64 - sc.iter().sum::<usize>() as i64).abs();
                if dt != 1 {
                    assert!(phi[(r, col)].norm() < 1e-15, "entry ({r},{col})");
                }
            }
        }
        // Adjoint exchanges f and J(f): Φ(i·e1)ᴴ = Φ(−i·e1).
        let fi = f.segal_field(&(s.basis_vector(0) * c(0.0, 1.0))).unwrap();
        let fmi = f.segal_field(&(s.basis_vector(0) * c(0.0, -1.0))).unwrap();
        assert!(spectral_norm(&(fi.adjoint() - fmi)) < 1e-14);
        // Zero field → zero operator.
        assert_eq!(
            spectral_norm(&f.segal_field(&CVector::zeros(2)).unwrap()),
            0.0
        );
    }

    #[test]
    fn intertwiner_is_exact_at_desk_scale() {
        // d=1: both constructions produce the same chain of states.
        let s = line_space();
        let g = gns_for(&s, 3);
        let f = build_fock(&s, 3, 1e-10).unwrap();
        let rep = intertwiner(&g, &f).unwrap();
        assert_eq!(rep.fock_dim, rep.gns_rank);
        assert!(rep.isometry_defect < 1e-12);
        assert!(rep.intertwining_defects.iter().all(|&d| d < 1e-12));
        // CFG1 at N=4, including a degenerate one-particle form.
        let s2 = cfg1();
        let g2 = gns_for(&s2, 4);
        let f2 = build_fock(&s2, 4, 1e-10).unwrap();
        let rep2 = intertwiner(&g2, &f2).unwrap();
        assert_eq!(rep2.fock_dim, rep2.gns_rank);
        assert!(rep2.isometry_defect < 1e-12);
        assert!(rep2.intertwining_defects.iter().all(|&d| d < 1e-12));
        // The conjugated compression agrees with the Fock field outright:
        // both sides compress the same operator onto the same subspace.
        let phi_n = g2.represent_field(&s2.basis_vector(0)).unwrap().matrix;
        let phi_f = f2.segal_field(&s2.basis_vector(0)).unwrap();
        let conjugated = &rep2.matrix * phi_n * rep2.matrix.adjoint();
        assert!(spectral_norm(&(conjugated - phi_f)) < 1e-12);
    }

    #[test]
    fn intertwiner_at_degree_zero_is_the_unit() {
        let s = cfg1();
        let g = gns_for(&s, 0);
        let f = build_fock(&s, 0, 1e-10).unwrap();
        let rep = intertwiner(&g, &f).unwrap();
        assert_eq!(rep.matrix.nrows(), 1);
        assert_eq!(rep.matrix.ncols(), 1);
        assert_relative_eq!(rep.matrix[(0, 0)].norm(), 1.0, epsilon = 1e-13);
        assert!(rep.isometry_defect < 1e-13);
    }

    #[test]
    fn intertwiner_rejects_mismatched_truncations() {
        let s = cfg1();
        let g = gns_for(&s, 2);
        let f = build_fock(&s, 3, 1e-10).unwrap();
        assert!(matches!(
            intertwiner(&g, &f),
            Err(CcrError::SpaceMismatch)
        ));
    }

    #[test]
    fn characteristic_function_frozen_values() {
        let s = line_space();
        let f = build_fock(&s, 8, 1e-10).unwrap();
        let e = s.basis_vector(0);
        let at0 = f.vacuum_characteristic(&e, 0.0).unwrap();
        assert_relative_eq!(at0.re, 1.0, epsilon = 1e-15);
        assert_relative_eq!(at0.im, 0.0, epsilon = 1e-15);
        // Quasi-free value e^{−t²/4} at t=1, to truncation accuracy.
        let at1 = f.vacuum_characteristic(&e, 1.0).unwrap();
        assert!((at1.re - (-0.25f64).exp()).abs() < 1e-6, "re = {}", at1.re);
        assert!(at1.im.abs() < 1e-12);
        // |value| ≤ 1 (unitarity).
        for t in [0.3, 1.7, 4.2] {
            assert!(f.vacuum_characteristic(&e, t).unwrap().norm() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn gns_and_fock_characteristics_agree() {
        let s = line_space();
        let n = 5;
        let g = gns_for(&s, n);
        let f = build_fock(&s, n, 1e-10).unwrap();
        let e = s.basis_vector(0);
        let t = 0.8;
        let ug = g.weyl_operator(&e, t).unwrap().matrix;
        let from_gns = g.vacuum_expectation(&ug);
        let from_fock = f.vacuum_characteristic(&e, t).unwrap();
        assert!(
            (from_gns - from_fock).norm() < 1e-12,
            "{from_gns} vs {from_fock}"
        );
    }
}
