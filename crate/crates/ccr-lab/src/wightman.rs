//! The quasi-free (Wick) functional generated by the two-point kernel.
//!
//! All odd moments vanish; the even ones are sums over perfect matchings,
//!
//! ```text
//!     W_n(p₁,…,p_n) = Σ_{matchings M} Π_{(a,b) ∈ M, a<b} K[p_a][p_b],
//! ```
//!
//! computed here not by enumerating the `(n−1)!!` matchings but by the
//! first-slot recursion
//!
//! ```text
//!     W_n(p₁,…,p_n) = Σ_{j=2..n} K[p₁][p_j] · W_{n−2}(rest without p_j),
//! ```
//!
//! which fills one dense table per even degree in `O(n·dⁿ)`. The tables then
//! answer every smeared question: the sesquilinear pairing
//! `⟨u,v⟩ = W(u* ⊗ v)`, monomial pairings, and Gram matrices of the monomial
//! basis — the finite shadow of Wightman positivity.

use crate::linalg::CMatrix;
use crate::space::TestSpace;
use crate::tensor::{monomial_basis, TensorPoly};
use crate::{CcrError, Result};
use num_complex::Complex64;
use std::sync::Arc;

/// Total moment-table entries allowed for one functional.
pub const TABLE_CAP: usize = 1 << 23;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Moment tables of the quasi-free functional up to a fixed degree.
/// Immutable once built; shared via `Arc`.
#[derive(Debug)]
pub struct WightmanFunctional {
    space: Arc<TestSpace>,
    max_degree: usize,
    /// `tables[n]` has `d^n` entries for even `n`; odd levels stay empty.
    tables: Vec<Vec<Complex64>>,
}

/// Gram matrix of the monomial basis at a truncation degree.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    pub degree: usize,
    /// Multi-indices in the fixed basis order (degree-major, lex within).
    pub basis: Vec<Vec<usize>>,
    /// `matrix[(a,b)] = ⟨m_a, m_b⟩_W`.
    pub matrix: CMatrix,
}

/// Number of perfect matchings of `n` points: `(n−1)!!` for even `n`, zero
/// for odd `n`.
pub fn pairing_count(n: usize) -> u128 {
    if n % 2 == 1 {
        return 0;
    }
    (1..n).step_by(2).map(|k| k as u128).product()
}

impl WightmanFunctional {
    /// Build moment tables for all degrees `0..=max_degree`.
    pub fn new(space: &Arc<TestSpace>, max_degree: usize) -> Result<Arc<Self>> {
        let d = space.dim();
        // Capacity: only even tables are materialized.
        let mut needed = 0usize;
        for n in (0..=max_degree).step_by(2) {
            let len = d
                .checked_pow(n as u32)
                .ok_or(CcrError::CapacityExceeded {
                    what: "moment tables",
                    needed: usize::MAX,
                    cap: TABLE_CAP,
                })?;
            needed = needed
                .checked_add(len)
                .ok_or(CcrError::CapacityExceeded {
                    what: "moment tables",
                    needed: usize::MAX,
                    cap: TABLE_CAP,
                })?;
        }
        if needed > TABLE_CAP {
            return Err(CcrError::CapacityExceeded {
                what: "moment tables",
                needed,
                cap: TABLE_CAP,
            });
        }

        let k = space.kernel();
        let mut tables: Vec<Vec<Complex64>> = Vec::with_capacity(max_degree + 1);
        tables.push(vec![Complex64::new(1.0, 0.0)]); // W_0 = 1
        for n in 1..=max_degree {
            if n % 2 == 1 {
                tables.push(Vec::new());
                continue;
            }
            let len = d.pow(n as u32);
            let rest_len = d.pow((n - 1) as u32);
            let mut table = vec![ZERO; len];
            let prev = &tables[n - 2];
            for (idx, slot) in table.iter_mut().enumerate() {
                let p1 = idx / rest_len;
                let rest = idx % rest_len;
                let mut acc = ZERO;
                // Pair slot 1 with slot j (2-based); the partner digit sits
                // at 0-based position j−2 of `rest`, stride d^{n−j}.
                let mut stride = rest_len / d; // d^{n−2}
                for _ in 2..=n {
                    let dj = (rest / stride) % d;
                    let hi = rest / (stride * d);
                    let lo = rest % stride;
                    let sub = hi * stride + lo;
                    acc += k[(p1, dj)] * prev[sub];
                    stride = (stride / d).max(1);
                }
                *slot = acc;
            }
            tables.push(table);
        }
        Ok(Arc::new(WightmanFunctional {
            space: Arc::clone(space),
            max_degree,
            tables,
        }))
    }

    pub fn space(&self) -> &Arc<TestSpace> {
        &self.space
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// The n-point value `W_n(p₁,…,p_n)`; zero for odd length.
    pub fn n_point(&self, indices: &[usize]) -> Result<Complex64> {
        let n = indices.len();
        if n > self.max_degree {
            return Err(CcrError::MomentDepth {
                need: n,
                have: self.max_degree,
            });
        }
        let d = self.space.dim();
        if let Some(&bad) = indices.iter().find(|&&i| i >= d) {
            return Err(CcrError::DimensionMismatch {
                expected: d,
                got: bad,
            });
        }
        if n % 2 == 1 {
            return Ok(ZERO);
        }
        Ok(self.tables[n][crate::tensor::flat_index(d, indices)])
    }

    /// Sesquilinear pairing `⟨u,v⟩ = W(u* ⊗ v)` (antilinear in `u`).
    pub fn inner_w(&self, u: &TensorPoly, v: &TensorPoly) -> Result<Complex64> {
        if !(Arc::ptr_eq(u.space(), &self.space) || **u.space() == *self.space)
            || !(Arc::ptr_eq(v.space(), &self.space) || **v.space() == *self.space)
        {
            return Err(CcrError::SpaceMismatch);
        }
        let need = u.max_degree() + v.max_degree();
        if need > self.max_degree {
            return Err(CcrError::MomentDepth {
                need,
                have: self.max_degree,
            });
        }
        let su = u.star();
        let mut acc = ZERO;
        for j in 0..=u.max_degree() {
            let lu = su.level(j);
            if lu.iter().all(|z| *z == ZERO) {
                continue;
            }
            for k in 0..=v.max_degree() {
                if (j + k) % 2 == 1 {
                    continue;
                }
                let lv = v.level(k);
                let table = &self.tables[j + k];
                for (a, &za) in lu.iter().enumerate() {
                    if za == ZERO {
                        continue;
                    }
                    let base = a * lv.len();
                    for (b, &zb) in lv.iter().enumerate() {
                        if zb == ZERO {
                            continue;
                        }
                        acc += za * zb * table[base + b];
                    }
                }
            }
        }
        Ok(acc)
    }

    /// Pairing of two basis monomials, `⟨m_left, m_right⟩_W`.
    ///
    /// When the involution matrix is monomial (one nonzero per row/column)
    /// the star of a monomial is again a single monomial and the pairing is
    /// one table lookup; otherwise the star is expanded densely.
    pub fn monomial_pairing(&self, left: &[usize], right: &[usize]) -> Result<Complex64> {
        let d = self.space.dim();
        let (j, k) = (left.len(), right.len());
        if j + k > self.max_degree {
            return Err(CcrError::MomentDepth {
                need: j + k,
                have: self.max_degree,
            });
        }
        if let Some(&bad) = left.iter().chain(right).find(|&&i| i >= d) {
            return Err(CcrError::DimensionMismatch {
                expected: d,
                got: bad,
            });
        }
        if (j + k) % 2 == 1 {
            return Ok(ZERO);
        }
        let table = &self.tables[j + k];
        let right_flat = crate::tensor::flat_index(d, right);
        let right_len = d.pow(k as u32);
        if let Some(cols) = self.space.monomial_star() {
            // star(m_left) = (Π phases) · e_{row(a_j)} ⊗ … ⊗ e_{row(a_1)}.
            let mut phase = Complex64::new(1.0, 0.0);
            let mut alpha = 0usize;
            for &a in left.iter().rev() {
                let (row, ph) = cols[a];
                alpha = alpha * d + row;
                phase *= ph;
            }
            return Ok(phase * table[alpha * right_len + right_flat]);
        }
        // Dense star: (m_left*)[α] = Π_s A[α_s][left[j−1−s]].
        let a = self.space.involution();
        let mut acc = ZERO;
        let left_len = d.pow(j as u32);
        for alpha in 0..left_len {
            let mut coeff = Complex64::new(1.0, 0.0);
            let mut x = alpha;
            // Digits of α least-significant-first are slots s = j−1 … 0.
            for s in (0..j).rev() {
                coeff *= a[(x % d, left[j - 1 - s])];
                x /= d;
                if coeff == ZERO {
                    break;
                }
            }
            if coeff != ZERO {
                acc += coeff * table[alpha * right_len + right_flat];
            }
        }
        Ok(acc)
    }

    /// Gram matrix of the monomial basis at truncation `degree`.
    /// Needs moment tables of depth `2·degree`.
    pub fn gram(&self, degree: usize) -> Result<GramMatrix> {
        if 2 * degree > self.max_degree {
            return Err(CcrError::MomentDepth {
                need: 2 * degree,
                have: self.max_degree,
            });
        }
        let basis = monomial_basis(self.space.dim(), degree)?;
        let m = basis.len();
        let mut matrix = CMatrix::zeros(m, m);
        for (a, ia) in basis.iter().enumerate() {
            for (b, ib) in basis.iter().enumerate() {
                matrix[(a, b)] = self.monomial_pairing(ia, ib)?;
            }
        }
        Ok(GramMatrix {
            degree,
            basis,
            matrix,
        })
    }
}
