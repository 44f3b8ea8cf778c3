//! Dense linear-algebra helpers used throughout the crate.
//!
//! Everything here is a thin wrapper over nalgebra decompositions, with two
//! conventions baked in: Hermitian inputs are symmetrized before
//! eigendecomposition, and rank decisions are made relative to the largest
//! eigenvalue/singular value of the matrix at hand.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;
pub type RMatrix = DMatrix<f64>;

/// Indices whose row (equivalently, column — the input is Hermitian) is not
/// exactly zero.  Kernels with vanishing rows make Gram matrices where whole
/// families of monomials are exactly null; the QR iteration can emit
/// NaN/−inf on such heavily deflatable inputs, so we peel the trivial part
/// off first.  Only *exact* zeros qualify — nothing is truncated.
fn nonzero_rows(h: &CMatrix) -> Vec<usize> {
    let zero = Complex64::new(0.0, 0.0);
    (0..h.nrows())
        .filter(|&i| (0..h.ncols()).any(|j| h[(i, j)] != zero))
        .collect()
}

fn eigen_sorted(h: &CMatrix) -> (DVector<f64>, CMatrix) {
    let se = h.clone().symmetric_eigen();
    // nalgebra does not promise an eigenvalue order; fix one.
    let n = se.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[b].total_cmp(&se.eigenvalues[a]));
    let vals = DVector::from_iterator(n, order.iter().map(|&i| se.eigenvalues[i]));
    let vecs = CMatrix::from_columns(
        &order
            .iter()
            .map(|&i| se.eigenvectors.column(i).into_owned())
            .collect::<Vec<_>>(),
    );
    (vals, vecs)
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending.
///
/// The input is symmetrized as (M + Mᴴ)/2 first, so tiny asymmetries from
/// accumulated roundoff do not leak NaNs out of the QR iteration, and rows
/// that are exactly zero are deflated to (0, eᵢ) eigenpairs before the
/// iteration sees the matrix.
pub fn hermitian_eigen(m: &CMatrix) -> (DVector<f64>, CMatrix) {
    assert_eq!(m.nrows(), m.ncols(), "hermitian_eigen needs a square matrix");
    let h = (m + m.adjoint()).scale(0.5);
    let n = h.nrows();
    let active = nonzero_rows(&h);
    if active.len() == n {
        return eigen_sorted(&h);
    }
    let k = active.len();
    let sub = CMatrix::from_fn(k, k, |i, j| h[(active[i], active[j])]);
    let (svals, svecs) = if k > 0 {
        eigen_sorted(&sub)
    } else {
        (DVector::zeros(0), CMatrix::zeros(0, 0))
    };
    let mut is_active = vec![false; n];
    for &i in &active {
        is_active[i] = true;
    }
    let mut pairs: Vec<(f64, CVector)> = Vec::with_capacity(n);
    for c in 0..k {
        let mut v = CVector::zeros(n);
        for r in 0..k {
            v[active[r]] = svecs[(r, c)];
        }
        pairs.push((svals[c], v));
    }
    for (i, &act) in is_active.iter().enumerate() {
        if !act {
            let mut v = CVector::zeros(n);
            v[i] = Complex64::new(1.0, 0.0);
            pairs.push((0.0, v));
        }
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let vals = DVector::from_iterator(n, pairs.iter().map(|p| p.0));
    let vecs = CMatrix::from_columns(&pairs.into_iter().map(|p| p.1).collect::<Vec<_>>());
    (vals, vecs)
}

/// Eigenvalues only (skips accumulating the eigenvector matrix).
pub fn hermitian_eigenvalues(m: &CMatrix) -> DVector<f64> {
    let h = (m + m.adjoint()).scale(0.5);
    let n = h.nrows();
    let active = nonzero_rows(&h);
    let mut vals: Vec<f64> = if active.len() == n {
        h.symmetric_eigenvalues().as_slice().to_vec()
    } else if active.is_empty() {
        Vec::new()
    } else {
        let k = active.len();
        let sub = CMatrix::from_fn(k, k, |i, j| h[(active[i], active[j])]);
        sub.symmetric_eigenvalues().as_slice().to_vec()
    };
    vals.resize(n, 0.0);
    vals.sort_by(|a, b| b.total_cmp(a));
    DVector::from_vec(vals)
}

/// exp(i·t·H) for Hermitian H, via eigendecomposition.
///
/// Exactly unitary up to roundoff, which the group-law checks rely on;
/// scaling-and-squaring would not give that.
pub fn unitary_exp_i(h: &CMatrix, t: f64) -> CMatrix {
    let (vals, vecs) = hermitian_eigen(h);
    let phases = DMatrix::from_diagonal(&vals.map(|l| (Complex64::i() * (t * l)).exp()));
    &vecs * phases * vecs.adjoint()
}

/// Spectral norm (largest singular value). Zero-sized matrices have norm 0.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    let sv = m.clone().singular_values();
    sv.iter().fold(0.0f64, |a, &b| a.max(b))
}

/// Hermiticity defect ‖M − Mᴴ‖.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    spectral_norm(&(m - m.adjoint()))
}

/// Orthonormal basis (as columns) of the column span of `m`.
///
/// Columns of the result are the left singular vectors whose singular value
/// exceeds `rel_tol` times the largest one.
pub fn column_span_basis(m: &CMatrix, rel_tol: f64) -> CMatrix {
    if m.ncols() == 0 || m.nrows() == 0 {
        return CMatrix::zeros(m.nrows(), 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("svd with u requested");
    let smax = svd.singular_values.iter().fold(0.0f64, |a, &b| a.max(b));
    if smax <= 0.0 {
        return CMatrix::zeros(m.nrows(), 0);
    }
    let keep: Vec<_> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > rel_tol * smax)
        .map(|i| u.column(i).into_owned())
        .collect();
    if keep.is_empty() {
        CMatrix::zeros(m.nrows(), 0)
    } else {
        CMatrix::from_columns(&keep)
    }
}

/// Orthogonal projector onto the column span of `m`.
pub fn span_projector(m: &CMatrix, rel_tol: f64) -> CMatrix {
    let q = column_span_basis(m, rel_tol);
    if q.ncols() == 0 {
        return CMatrix::zeros(m.nrows(), m.nrows());
    }
    &q * q.adjoint()
}

/// Orthonormal basis of the null space of a real matrix, via the Gram matrix
/// MᵀM. Thin SVD would hide null directions of wide matrices; the Gram
/// eigenproblem sees all of them.
pub fn real_null_space(m: &RMatrix, rel_tol: f64) -> RMatrix {
    let n = m.ncols();
    if n == 0 {
        return RMatrix::zeros(0, 0);
    }
    let gram = m.transpose() * m;
    let se = gram.symmetric_eigen();
    let lmax = se.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b));
    let thr = rel_tol * rel_tol * lmax;
    let keep: Vec<_> = (0..n)
        .filter(|&i| lmax <= 0.0 || se.eigenvalues[i] <= thr)
        .map(|i| se.eigenvectors.column(i).into_owned())
        .collect();
    if keep.is_empty() {
        RMatrix::zeros(n, 0)
    } else {
        RMatrix::from_columns(&keep)
    }
}

/// Orthonormal basis of the column span of a real matrix (Gram route).
pub fn real_column_span(m: &RMatrix, rel_tol: f64) -> RMatrix {
    if m.ncols() == 0 {
        return RMatrix::zeros(m.nrows(), 0);
    }
    let gram = m.transpose() * m;
    let se = gram.symmetric_eigen();
    let lmax = se.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b));
    if lmax <= 0.0 {
        return RMatrix::zeros(m.nrows(), 0);
    }
    let keep: Vec<_> = (0..m.ncols())
        .filter(|&i| se.eigenvalues[i] > rel_tol * rel_tol * lmax)
        .map(|i| {
            let col = m * se.eigenvectors.column(i);
            let s = se.eigenvalues[i].sqrt();
            col / s
        })
        .collect();
    if keep.is_empty() {
        RMatrix::zeros(m.nrows(), 0)
    } else {
        RMatrix::from_columns(&keep)
    }
}

/// Largest principal angle (radians) between the column spans of two real
/// matrices. Returns 0 when both spans are zero-dimensional and π/2 when the
/// dimensions differ, so "same subspace" tests reduce to "defect small".
pub fn principal_angle_defect(a: &RMatrix, b: &RMatrix, rel_tol: f64) -> f64 {
    let qa = real_column_span(a, rel_tol);
    let qb = real_column_span(b, rel_tol);
    if qa.ncols() != qb.ncols() {
        return std::f64::consts::FRAC_PI_2;
    }
    if qa.ncols() == 0 {
        return 0.0;
    }
    let overlap = qa.transpose() * qb;
    let sv = overlap.singular_values();
    sv.iter()
        .map(|s| s.clamp(-1.0, 1.0).acos())
        .fold(0.0f64, f64::max)
}
