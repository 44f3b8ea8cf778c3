//! Truncated tensor algebra over a test space.
//!
//! A [`TensorPoly`] stores one dense complex coefficient tensor per degree
//! `0..=N` (degree `n` holds `d^n` entries, row-major with the **first**
//! tensor factor most significant). Products truncate at `N`; anything the
//! product pushes past the top degree is dropped, mirroring the compression
//! semantics used by the GNS construction.
//!
//! The star involution acts by
//!
//! ```text
//!     (f₁ ⊗ … ⊗ f_n)* = J(f_n) ⊗ … ⊗ J(f₁),
//! ```
//!
//! i.e. coefficient conjugation, index reversal, and the involution matrix
//! applied along every slot. Formal power series (exp, log(1+x)) evaluate
//! exactly on elements with zero scalar part because such elements are
//! nilpotent at truncation; that is what makes the logarithm route to the
//! Baker–Campbell–Hausdorff element terminate instead of being an
//! approximation.

use crate::linalg::{CMatrix, CVector};
use crate::space::TestSpace;
use crate::{CcrError, Result};
use num_complex::Complex64;
use std::sync::Arc;

/// Cumulative coefficient cap (all levels together) for one polynomial.
pub const TENSOR_CAP: usize = 1 << 23;

/// Cap on the size of an explicit monomial basis (Gram matrices etc.).
pub const MONOMIAL_CAP: usize = 4096;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Total coefficients of a degree-`N` truncated polynomial over `C^d`,
/// or `None` on overflow.
fn total_entries(d: usize, max_degree: usize) -> Option<usize> {
    let mut total = 0usize;
    let mut level = 1usize;
    for n in 0..=max_degree {
        total = total.checked_add(level)?;
        if n < max_degree {
            level = level.checked_mul(d)?;
        }
    }
    Some(total)
}

/// Flat index of a multi-index (first factor most significant).
pub fn flat_index(d: usize, indices: &[usize]) -> usize {
    indices.iter().fold(0, |acc, &i| acc * d + i)
}

/// Reverse the `n` base-`d` digits of a flat index.
fn reverse_index(d: usize, n: usize, idx: usize) -> usize {
    let mut rev = 0;
    let mut x = idx;
    for _ in 0..n {
        rev = rev * d + x % d;
        x /= d;
    }
    rev
}

/// All multi-indices of length `0..=max_degree` over `0..d`, ordered by
/// degree and lexicographically within a degree. Errors when the basis would
/// exceed [`MONOMIAL_CAP`].
pub fn monomial_basis(d: usize, max_degree: usize) -> Result<Vec<Vec<usize>>> {
    let needed = total_entries(d, max_degree).unwrap_or(usize::MAX);
    if needed > MONOMIAL_CAP {
        return Err(CcrError::CapacityExceeded {
            what: "monomial basis",
            needed,
            cap: MONOMIAL_CAP,
        });
    }
    let mut basis = Vec::with_capacity(needed);
    for n in 0..=max_degree {
        let len = d.pow(n as u32);
        for flat in 0..len {
            let mut idx = vec![0usize; n];
            let mut x = flat;
            for s in (0..n).rev() {
                idx[s] = x % d;
                x /= d;
            }
            basis.push(idx);
        }
    }
    Ok(basis)
}

/// A formal power series `Σ_k a_k x^k`, either a genuine polynomial or a
/// truncation of an infinite series. The distinction matters for
/// [`TensorPoly::apply_series`]: truncations are only exact on arguments with
/// zero scalar part.
#[derive(Debug, Clone)]
pub struct FormalSeries {
    coeffs: Vec<Complex64>,
    polynomial: bool,
}

impl FormalSeries {
    /// A genuine polynomial with the given coefficients (`coeffs[k]` on `x^k`).
    pub fn polynomial(coeffs: Vec<Complex64>) -> Self {
        FormalSeries {
            coeffs,
            polynomial: true,
        }
    }

    /// The first `degree + 1` coefficients of an infinite series.
    pub fn truncated(coeffs: Vec<Complex64>) -> Self {
        FormalSeries {
            coeffs,
            polynomial: false,
        }
    }

    /// `exp` up to `x^degree`: coefficients `1/k!`.
    pub fn exp(degree: usize) -> Self {
        let mut coeffs = Vec::with_capacity(degree + 1);
        let mut c = 1.0;
        for k in 0..=degree {
            if k > 0 {
                c /= k as f64;
            }
            coeffs.push(Complex64::new(c, 0.0));
        }
        FormalSeries::truncated(coeffs)
    }

    /// `log(1 + x)` up to `x^degree`: `0, 1, −1/2, 1/3, …`.
    pub fn log1p(degree: usize) -> Self {
        let mut coeffs = vec![ZERO];
        for k in 1..=degree {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            coeffs.push(Complex64::new(sign / k as f64, 0.0));
        }
        FormalSeries::truncated(coeffs)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_polynomial(&self) -> bool {
        self.polynomial
    }
}

/// Element of the tensor algebra truncated at `max_degree`.
#[derive(Debug, Clone)]
pub struct TensorPoly {
    space: Arc<TestSpace>,
    max_degree: usize,
    /// `levels[n]` holds the `d^n` coefficients of the degree-`n` component.
    levels: Vec<Vec<Complex64>>,
}

impl TensorPoly {
    /// The zero element. Errors when the dense storage would exceed
    /// [`TENSOR_CAP`] coefficients.
    pub fn zero(space: &Arc<TestSpace>, max_degree: usize) -> Result<Self> {
        let d = space.dim();
        let needed = total_entries(d, max_degree).unwrap_or(usize::MAX);
        if needed > TENSOR_CAP {
            return Err(CcrError::CapacityExceeded {
                what: "tensor algebra storage",
                needed,
                cap: TENSOR_CAP,
            });
        }
        let levels = (0..=max_degree)
            .map(|n| vec![ZERO; d.pow(n as u32)])
            .collect();
        Ok(TensorPoly {
            space: Arc::clone(space),
            max_degree,
            levels,
        })
    }

    /// The scalar `z` at degree 0.
    pub fn scalar(space: &Arc<TestSpace>, max_degree: usize, z: Complex64) -> Result<Self> {
        let mut p = TensorPoly::zero(space, max_degree)?;
        p.levels[0][0] = z;
        Ok(p)
    }

    /// The vector `f` as a degree-1 element.
    pub fn from_vector(space: &Arc<TestSpace>, max_degree: usize, f: &CVector) -> Result<Self> {
        if f.len() != space.dim() {
            return Err(CcrError::DimensionMismatch {
                expected: space.dim(),
                got: f.len(),
            });
        }
        if max_degree < 1 {
            return Err(CcrError::TruncationTooSmall {
                need: 1,
                got: max_degree,
            });
        }
        let mut p = TensorPoly::zero(space, max_degree)?;
        for i in 0..space.dim() {
            p.levels[1][i] = f[i];
        }
        Ok(p)
    }

    /// The basis monomial `e_{i₁} ⊗ … ⊗ e_{i_n}`.
    pub fn monomial(space: &Arc<TestSpace>, max_degree: usize, indices: &[usize]) -> Result<Self> {
        let d = space.dim();
        if indices.len() > max_degree {
            return Err(CcrError::TruncationTooSmall {
                need: indices.len(),
                got: max_degree,
            });
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= d) {
            return Err(CcrError::DimensionMismatch {
                expected: d,
                got: bad,
            });
        }
        let mut p = TensorPoly::zero(space, max_degree)?;
        let n = indices.len();
        let flat = flat_index(d, indices);
        p.levels[n][flat] = Complex64::new(1.0, 0.0);
        Ok(p)
    }

    #[cfg(test)]
    pub(crate) fn from_levels(
        space: &Arc<TestSpace>,
        max_degree: usize,
        levels: Vec<Vec<Complex64>>,
    ) -> Result<Self> {
        let mut p = TensorPoly::zero(space, max_degree)?;
        for (n, lv) in levels.into_iter().enumerate().take(max_degree + 1) {
            if lv.len() != p.levels[n].len() {
                return Err(CcrError::DimensionMismatch {
                    expected: p.levels[n].len(),
                    got: lv.len(),
                });
            }
            p.levels[n] = lv;
        }
        Ok(p)
    }

    pub fn space(&self) -> &Arc<TestSpace> {
        &self.space
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// Coefficients of the degree-`n` component.
    pub fn level(&self, n: usize) -> &[Complex64] {
        &self.levels[n]
    }

    /// Coefficient of the monomial with the given multi-index.
    pub fn coeff(&self, indices: &[usize]) -> Complex64 {
        let n = indices.len();
        if n > self.max_degree {
            return ZERO;
        }
        self.levels[n][flat_index(self.space.dim(), indices)]
    }

    pub fn set_coeff(&mut self, indices: &[usize], z: Complex64) {
        let n = indices.len();
        let flat = flat_index(self.space.dim(), indices);
        self.levels[n][flat] = z;
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.max_degree != other.max_degree
            || !(Arc::ptr_eq(&self.space, &other.space) || self.space == other.space)
        {
            return Err(CcrError::SpaceMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (lv, ov) in out.levels.iter_mut().zip(&other.levels) {
            for (a, b) in lv.iter_mut().zip(ov) {
                *a += b;
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (lv, ov) in out.levels.iter_mut().zip(&other.levels) {
            for (a, b) in lv.iter_mut().zip(ov) {
                *a -= b;
            }
        }
        Ok(out)
    }

    pub fn scale(&self, z: Complex64) -> Self {
        let mut out = self.clone();
        for lv in out.levels.iter_mut() {
            for a in lv.iter_mut() {
                *a *= z;
            }
        }
        out
    }

    /// Largest coefficient magnitude across all degrees.
    pub fn norm_max(&self) -> f64 {
        self.levels
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    fn level_is_zero(&self, n: usize) -> bool {
        self.levels[n].iter().all(|z| *z == ZERO)
    }

    /// Graded product truncated at `max_degree`:
    /// `(u ⊗ v)_n = Σ_{k=0..n} u_k ⊗ v_{n−k}`. Contributions that would land
    /// above the truncation are dropped.
    pub fn tensor_mul(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let mut out = TensorPoly::zero(&self.space, self.max_degree)?;
        for k in 0..=self.max_degree {
            if self.level_is_zero(k) {
                continue;
            }
            for m in 0..=(self.max_degree - k) {
                if other.level_is_zero(m) {
                    continue;
                }
                let a = &self.levels[k];
                let b = &other.levels[m];
                let w = &mut out.levels[k + m];
                for (i, &ai) in a.iter().enumerate() {
                    if ai == ZERO {
                        continue;
                    }
                    let base = i * b.len();
                    for (j, &bj) in b.iter().enumerate() {
                        w[base + j] += ai * bj;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Star involution: conjugate coefficients, reverse every multi-index,
    /// and apply the involution matrix `A` on every slot.
    pub fn star(&self) -> Self {
        let d = self.space.dim();
        let mut out = self.clone();
        for n in 0..=self.max_degree {
            let src = &self.levels[n];
            // Step 1: conjugation + index reversal.
            let mut tmp = vec![ZERO; src.len()];
            for (idx, &z) in src.iter().enumerate() {
                tmp[reverse_index(d, n, idx)] = z.conj();
            }
            // Step 2: A along every slot.
            if let Some(cols) = self.space.monomial_star() {
                // A is monomial: each basis index maps to a single target.
                let mut dst = vec![ZERO; src.len()];
                let top = src.len() / d.max(1); // d^{n−1} when n ≥ 1
                for (idx, &z) in tmp.iter().enumerate() {
                    if z == ZERO {
                        continue;
                    }
                    let mut target = 0usize;
                    let mut phase = Complex64::new(1.0, 0.0);
                    // Walk digits most-significant-first.
                    let mut pow = top;
                    let mut x = idx;
                    for _ in 0..n {
                        let (row, ph) = cols[x / pow];
                        target = target * d + row;
                        phase *= ph;
                        x %= pow;
                        pow = (pow / d).max(1);
                    }
                    dst[target] += phase * z;
                }
                out.levels[n] = dst;
            } else {
                for ax in 0..n {
                    tmp = ttm(self.space.involution(), &tmp, n, ax, d);
                }
                out.levels[n] = tmp;
            }
        }
        out
    }

    /// Creation-style field action: degree `n` of the result is
    /// `h ⊗ u_{n−1}`; degree 0 is zero. The boolean is the spillover flag —
    /// `true` when `u`'s top level was nonzero, i.e. `h ⊗ u_N` got dropped.
    pub fn field_action(&self, h: &CVector) -> Result<(Self, bool)> {
        let d = self.space.dim();
        if h.len() != d {
            return Err(CcrError::DimensionMismatch {
                expected: d,
                got: h.len(),
            });
        }
        let mut out = TensorPoly::zero(&self.space, self.max_degree)?;
        for n in 1..=self.max_degree {
            let prev = &self.levels[n - 1];
            let w = &mut out.levels[n];
            for i in 0..d {
                if h[i] == ZERO {
                    continue;
                }
                let base = i * prev.len();
                for (j, &p) in prev.iter().enumerate() {
                    w[base + j] = h[i] * p;
                }
            }
        }
        let spill = !self.level_is_zero(self.max_degree);
        Ok((out, spill))
    }

    /// Evaluate `F(u) = Σ_k a_k u^{⊗k}` (Horner form, truncated products).
    ///
    /// Exact whenever `u` has zero scalar part (then `u^{⊗k}` vanishes for
    /// `k > max_degree`); with a nonzero scalar part only genuine polynomials
    /// of degree ≤ `max_degree` are accepted.
    pub fn apply_series(&self, series: &FormalSeries) -> Result<Self> {
        if self.levels[0][0] != ZERO
            && !(series.is_polynomial() && series.degree() <= self.max_degree)
        {
            return Err(CcrError::NonzeroScalarPart {
                terms: series.coeffs.len(),
                truncation: self.max_degree,
            });
        }
        let mut acc = TensorPoly::scalar(
            &self.space,
            self.max_degree,
            *series.coeffs.last().unwrap_or(&ZERO),
        )?;
        for k in (0..series.coeffs.len().saturating_sub(1)).rev() {
            acc = self.tensor_mul(&acc)?;
            acc.levels[0][0] += series.coeffs[k];
        }
        Ok(acc)
    }

    /// Coefficientwise distance `‖self − other‖_max`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.norm_max())
    }
}

/// Apply matrix `a` along axis `ax` (0 = most significant) of an order-`n`
/// dense tensor over `C^d`.
fn ttm(a: &CMatrix, t: &[Complex64], n: usize, ax: usize, d: usize) -> Vec<Complex64> {
    let stride = d.pow((n - 1 - ax) as u32);
    let block = stride * d;
    let mut out = vec![ZERO; t.len()];
    let mut base = 0;
    while base < t.len() {
        for off in 0..stride {
            for i in 0..d {
                let mut acc = ZERO;
                for j in 0..d {
                    acc += a[(i, j)] * t[base + j * stride + off];
                }
                out[base + i * stride + off] = acc;
            }
        }
        base += block;
    }
    out
}

/// The exponential element `Σ_{k=0..N} t^k h^{⊗k} / k!`.
pub fn exp_field(
    space: &Arc<TestSpace>,
    h: &CVector,
    t: Complex64,
    max_degree: usize,
) -> Result<TensorPoly> {
    let d = space.dim();
    if h.len() != d {
        return Err(CcrError::DimensionMismatch {
            expected: d,
            got: h.len(),
        });
    }
    let mut p = TensorPoly::zero(space, max_degree)?;
    p.levels[0][0] = Complex64::new(1.0, 0.0);
    for k in 1..=max_degree {
        let scale = t / k as f64;
        let (head, tail) = p.levels.split_at_mut(k);
        let prev = &head[k - 1];
        let cur = &mut tail[0];
        for i in 0..d {
            let hi = h[i] * scale;
            if hi == ZERO {
                continue;
            }
            let base = i * prev.len();
            for (j, &pv) in prev.iter().enumerate() {
                cur[base + j] = hi * pv;
            }
        }
    }
    Ok(p)
}

/// The Baker–Campbell–Hausdorff element
/// `w = log(exp_field(f,t) ⊗ exp_field(g,t))`, computed by applying the
/// `log(1+x)` series to the product minus 1. The argument has zero scalar
/// part, so the series terminates exactly at the truncation: `exp(w)`
/// reproduces the product to machine precision.
pub fn bch_log(
    space: &Arc<TestSpace>,
    f: &CVector,
    g: &CVector,
    t: Complex64,
    max_degree: usize,
) -> Result<TensorPoly> {
    let ef = exp_field(space, f, t, max_degree)?;
    let eg = exp_field(space, g, t, max_degree)?;
    let mut z = ef.tensor_mul(&eg)?;
    z.levels[0][0] -= Complex64::new(1.0, 0.0);
    z.apply_series(&FormalSeries::log1p(max_degree))
}
