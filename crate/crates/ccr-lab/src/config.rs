//! Run configuration: the JSON file format consumed by the `ccr-lab` binary.
//!
//! Complex matrices are split into real/imaginary parts so the file needs no
//! complex-literal convention.  The effective configuration (after any
//! command-line overrides) is hashed; the hash is stamped on every check
//! record so reports are traceable to their exact inputs.

use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::linalg::CMatrix;
use crate::space::TestSpace;
use crate::{CcrError, Result};

/// Largest accepted test-space dimension.
pub const MAX_DIM: usize = 64;
/// Largest accepted truncation degree.
pub const MAX_TRUNCATION: usize = 16;

fn default_tolerance() -> f64 {
    1e-10
}

/// A deserialized run configuration.  Unknown keys are rejected so typos
/// fail loudly instead of silently falling back to defaults.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Test-space dimension `d` (1 ..= [`MAX_DIM`]).
    pub dim: usize,
    /// Truncation degree `N` (1 ..= [`MAX_TRUNCATION`]).
    pub truncation: usize,
    /// Relative tolerance used for suite pass/fail thresholds.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Real part of the bilinear two-point kernel, row-major d×d.
    pub w2_real: Vec<Vec<f64>>,
    /// Imaginary part of the two-point kernel, row-major d×d.
    pub w2_imag: Vec<Vec<f64>>,
    /// Real part of the involution matrix `A` (`J(f) = A·conj(f)`).
    /// Omitted together with `involution_imag` ⇒ componentwise conjugation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub involution_real: Option<Vec<Vec<f64>>>,
    /// Imaginary part of the involution matrix (defaults to zero).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub involution_imag: Option<Vec<Vec<f64>>>,
    /// Optional component labels, one per basis index.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components: Option<Vec<String>>,
    /// Seed for the suites' deterministic probe vectors.
    #[serde(default)]
    pub seed: u64,
    /// Projector degree for the Weyl composition check.
    #[serde(default)]
    pub probe_degree: usize,
}

fn matrix_from_parts(
    name: &str,
    dim: usize,
    re: &[Vec<f64>],
    im: Option<&Vec<Vec<f64>>>,
) -> Result<CMatrix> {
    let bad = |msg: String| CcrError::Config(msg);
    if re.len() != dim {
        return Err(bad(format!(
            "{name}: expected {dim} rows, got {}",
            re.len()
        )));
    }
    if let Some(im) = im {
        if im.len() != dim {
            return Err(bad(format!(
                "{name}: real and imaginary parts have different shapes"
            )));
        }
    }
    let mut m = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        if re[i].len() != dim {
            return Err(bad(format!(
                "{name}: row {i} has {} entries, expected {dim}",
                re[i].len()
            )));
        }
        for j in 0..dim {
            let x = re[i][j];
            let y = match im {
                Some(im) => {
                    if im[i].len() != dim {
                        return Err(bad(format!(
                            "{name}: imaginary row {i} has {} entries, expected {dim}",
                            im[i].len()
                        )));
                    }
                    im[i][j]
                }
                None => 0.0,
            };
            if !x.is_finite() || !y.is_finite() {
                return Err(bad(format!("{name}: entry ({i},{j}) is not finite")));
            }
            m[(i, j)] = Complex64::new(x, y);
        }
    }
    Ok(m)
}

impl RunConfig {
    /// Check ranges, shapes and finiteness.  Matrix *contents* (involution,
    /// positivity) are the `validate` suite's business, not the parser's.
    pub fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(CcrError::Config(msg));
        if self.dim == 0 || self.dim > MAX_DIM {
            return bad(format!("dim must be in 1..={MAX_DIM}, got {}", self.dim));
        }
        if self.truncation == 0 || self.truncation > MAX_TRUNCATION {
            return bad(format!(
                "truncation must be in 1..={MAX_TRUNCATION}, got {}",
                self.truncation
            ));
        }
        if !self.tolerance.is_finite() || self.tolerance <= 0.0 {
            return bad(format!(
                "tolerance must be positive and finite, got {}",
                self.tolerance
            ));
        }
        if self.probe_degree > self.truncation {
            return bad(format!(
                "probe_degree {} exceeds truncation {}",
                self.probe_degree, self.truncation
            ));
        }
        if self.involution_imag.is_some() && self.involution_real.is_none() {
            return bad("involution_imag given without involution_real".into());
        }
        if let Some(labels) = &self.components {
            if labels.len() != self.dim {
                return bad(format!(
                    "components: expected {} labels, got {}",
                    self.dim,
                    labels.len()
                ));
            }
        }
        // Shape/finiteness of the matrices.
        self.kernel()?;
        self.involution()?;
        Ok(())
    }

    /// The two-point kernel as a complex matrix.
    pub fn kernel(&self) -> Result<CMatrix> {
        matrix_from_parts("w2", self.dim, &self.w2_real, Some(&self.w2_imag))
    }

    /// The involution matrix; identity when the config omits it.
    pub fn involution(&self) -> Result<CMatrix> {
        match &self.involution_real {
            None => Ok(CMatrix::identity(self.dim, self.dim)),
            Some(re) => matrix_from_parts("involution", self.dim, re, self.involution_imag.as_ref()),
        }
    }

    /// Build the test space this configuration describes.
    pub fn to_space(&self) -> Result<Arc<TestSpace>> {
        self.check()?;
        TestSpace::new(self.involution()?, self.kernel()?, self.components.clone())
    }

    /// SHA-256 of the canonical JSON form of the *effective* configuration
    /// (overrides already applied).  First 16 hex digits — plenty for
    /// traceability, short enough for a table column.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serialization cannot fail");
        let digest = Sha256::digest(canonical.as_bytes());
        let mut out = String::with_capacity(16);
        for byte in &digest[..8] {
            out.push_str(&format!("{byte:02x}"));
        }
        out
    }
}

/// Load and range-check a configuration file.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    let cfg: RunConfig = serde_json::from_str(&text)?;
    cfg.check()?;
    Ok(cfg)
}
