//! Independent oracles for the acceptance tests.
//!
//! Everything in this module recomputes expected values from first
//! principles — brute-force matching enumeration, explicit index sums,
//! explicit commutator coefficient formulas — sharing no code with the
//! library's recursions, so an agreement is evidence rather than tautology.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use ccr_lab::config::{load_config, RunConfig};
use ccr_lab::gns::{build_gns, GnsSpace};
use ccr_lab::linalg::{CMatrix, CVector};
use ccr_lab::wightman::WightmanFunctional;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

// ------------------------------------------------------------ Wick oracle

/// All perfect matchings of {0, …, n−1}, each as a list of (smaller, larger)
/// pairs.  Empty input has the one empty matching; odd input has none.
pub fn enumerate_matchings(n: usize) -> Vec<Vec<(usize, usize)>> {
    fn go(remaining: &[usize]) -> Vec<Vec<(usize, usize)>> {
        if remaining.is_empty() {
            return vec![Vec::new()];
        }
        let first = remaining[0];
        let mut out = Vec::new();
        for k in 1..remaining.len() {
            let partner = remaining[k];
            let mut rest: Vec<usize> = Vec::with_capacity(remaining.len() - 2);
            rest.extend_from_slice(&remaining[1..k]);
            rest.extend_from_slice(&remaining[k + 1..]);
            for mut tail in go(&rest) {
                tail.insert(0, (first, partner));
                out.push(tail);
            }
        }
        out
    }
    if n % 2 == 1 {
        return Vec::new();
    }
    let all: Vec<usize> = (0..n).collect();
    go(&all)
}

/// Brute-force Wick moment: Σ over perfect matchings of ∏ K[i_a][i_b],
/// factors ordered first-slot-first within each pair.
pub fn wick_value(kernel: &CMatrix, indices: &[usize]) -> Complex64 {
    let mut total = c(0.0, 0.0);
    for matching in enumerate_matchings(indices.len()) {
        let mut prod = c(1.0, 0.0);
        for (a, b) in matching {
            prod *= kernel[(indices[a], indices[b])];
        }
        total += prod;
    }
    if indices.is_empty() {
        c(1.0, 0.0)
    } else {
        total
    }
}

/// All index tuples of length `n` over {0, …, d−1}, lexicographic.
pub fn tuples(d: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * d);
        for t in &out {
            for i in 0..d {
                let mut t2 = t.clone();
                t2.push(i);
                next.push(t2);
            }
        }
        out = next;
    }
    out
}

fn flat(d: usize, idx: &[usize]) -> usize {
    idx.iter().fold(0, |acc, &i| acc * d + i)
}

/// Independent ⟨u, v⟩_W evaluator over dense level coefficients:
/// star the left argument by the explicit formula
/// `(u*)_j[α] = Σ_β conj(u_j[β]) · ∏_s A[α_s][β_{j−1−s}]`
/// then contract every pair of levels against brute-force Wick moments.
pub fn inner_w_brute(
    involution: &CMatrix,
    kernel: &CMatrix,
    u: &[Vec<Complex64>],
    v: &[Vec<Complex64>],
) -> Complex64 {
    let d = involution.nrows();
    let mut total = c(0.0, 0.0);
    for (ju, lu) in u.iter().enumerate() {
        // Starred coefficients of level ju.
        let alphas = tuples(d, ju);
        let mut starred = vec![c(0.0, 0.0); lu.len()];
        for alpha in &alphas {
            let mut acc = c(0.0, 0.0);
            for beta in &alphas {
                let mut prod = c(1.0, 0.0);
                for s in 0..ju {
                    prod *= involution[(alpha[s], beta[ju - 1 - s])];
                }
                acc += lu[flat(d, beta)].conj() * prod;
            }
            starred[flat(d, alpha)] = acc;
        }
        for (jv, lv) in v.iter().enumerate() {
            for alpha in &alphas {
                let ua = starred[flat(d, alpha)];
                if ua == c(0.0, 0.0) {
                    continue;
                }
                for beta in tuples(d, jv) {
                    let vb = lv[flat(d, &beta)];
                    if vb == c(0.0, 0.0) {
                        continue;
                    }
                    let mut joint = alpha.clone();
                    joint.extend_from_slice(&beta);
                    total += ua * vb * wick_value(kernel, &joint);
                }
            }
        }
    }
    total
}

// ---------------------------------------------------------- Dynkin oracle

/// Degree-3 coefficients (d³, row-major, first factor most significant) of
/// the Dynkin term (1/12)·([x,[x,y]] + [y,[y,x]]), written out entrywise:
/// [x,[x,y]] = xxy − 2·xyx + yxx and symmetrically for [y,[y,x]].
pub fn dynkin3(x: &CVector, y: &CVector) -> Vec<Complex64> {
    let d = x.len();
    let twelfth = c(1.0 / 12.0, 0.0);
    let two = c(2.0, 0.0);
    let mut out = vec![c(0.0, 0.0); d * d * d];
    for p in 0..d {
        for q in 0..d {
            for r in 0..d {
                let xxy = x[p] * x[q] * y[r] - two * x[p] * y[q] * x[r] + y[p] * x[q] * x[r];
                let yyx = y[p] * y[q] * x[r] - two * y[p] * x[q] * y[r] + x[p] * y[q] * y[r];
                out[(p * d + q) * d + r] = twelfth * (xxy + yyx);
            }
        }
    }
    out
}

// ------------------------------------------------- characteristic oracle

/// Moment series Σ_k (it)^k W_k / k! for the one-dimensional kernel
/// `K = [[k2]]`: W_k = (k−1)!!·k2^{k/2} for even k, 0 for odd k.  Terms are
/// generated by the exact recurrence a_{k+2} = a_k · (it)² · k2 / (k+2),
/// summed until they vanish.
pub fn scalar_characteristic_series(k2: f64, t: f64, max_terms: usize) -> Complex64 {
    let it2 = (Complex64::i() * t) * (Complex64::i() * t);
    let mut term = c(1.0, 0.0);
    let mut total = term;
    let mut k = 0usize;
    for _ in 0..max_terms {
        term = term * it2 * c(k2, 0.0) / c((k + 2) as f64, 0.0);
        total += term;
        k += 2;
        if term.norm() < 1e-18 {
            break;
        }
    }
    total
}

// ---------------------------------------------------- fixtures and cache

/// Directory holding the shipped configuration fixtures.
pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("..")
        .join("..")
        .join("configs")
}

pub fn load_fixture(name: &str) -> RunConfig {
    load_config(&fixture_dir().join(format!("{name}.json")))
        .unwrap_or_else(|e| panic!("fixture {name}: {e}"))
}

/// The shipped fixtures with the truncation degree the acceptance tests use
/// for GNS-level checks (capacity-bounded for the d=4 config: moment tables
/// of depth 2N+1 must stay within the dense-table budget).
pub const FIXTURES: [&str; 4] = ["cfg1", "scalar_real", "block_degenerate", "vector_field"];

static GNS_CACHE: OnceLock<Mutex<HashMap<(String, usize), Arc<GnsSpace>>>> = OnceLock::new();

/// GNS space for a fixture at a degree, built once and shared across the
/// acceptance tests (moment tables at depth 2N+1, rank cut 1e−10).
pub fn gns_for(name: &str, degree: usize) -> Arc<GnsSpace> {
    let cache = GNS_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap();
    let key = (name.to_string(), degree);
    if let Some(g) = map.get(&key) {
        return Arc::clone(g);
    }
    let cfg = load_fixture(name);
    let space = cfg.to_space().unwrap();
    let functional = WightmanFunctional::new(&space, 2 * degree + 1).unwrap();
    let gns = Arc::new(build_gns(&functional, degree, 1e-10).unwrap());
    map.insert(key, Arc::clone(&gns));
    gns
}
