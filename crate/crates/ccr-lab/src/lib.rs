//! Desk-scale verification bench for bosonic field models built on truncated
//! tensor algebras over finite-dimensional test spaces.
//!
//! The pipeline, bottom to top:
//!
//! * [`space`] — the test space `C^d` with an antilinear involution `J` and a
//!   bilinear two-point kernel `K`.
//! * [`tensor`] — the truncated tensor algebra `T(S)`: dense complex
//!   coefficient tensors per degree, products, the star involution, field
//!   action and formal power series (exp / log, BCH).
//! * [`wightman`] — the quasi-free (Wick) functional generated by `K`:
//!   n-point moment tables, the sesquilinear pairing `⟨u,v⟩ = W(u*⊗v)` and
//!   Gram matrices over the monomial basis.
//! * [`gns`] — the GNS construction at truncation `N`: orthonormalization of
//!   the Gram matrix, compressed field operators, Weyl unitaries, commutation
//!   and composition defects, symplectic/field radicals.
//! * [`fock`] — the independent route: a bosonic Fock space over the
//!   one-particle space, Segal fields, and the intertwiner that compares the
//!   two constructions.
//! * [`config`] / [`report`] / [`suites`] — the `ccr-lab` command line:
//!   JSON run configs, check suites, human tables and JSONL machine reports.
//!
//! Everything is dense, double precision, and sized for a desk: `d ≤ 4`,
//! truncation `N ≤ 8` in practice.

pub mod config;
pub mod fock;
pub mod gns;
pub mod linalg;
pub mod report;
pub mod space;
pub mod suites;
pub mod tensor;
pub mod wightman;

/// Errors shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum CcrError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not an antilinear involution: |A·conj(A) − I| = {defect:.3e}")]
    InvalidInvolution { defect: f64 },
    #[error("two-point form violates positivity: {reason}")]
    NotPositive { reason: String },
    #[error("vector is not fixed by the involution (defect {defect:.3e})")]
    NotHermitian { defect: f64 },
    #[error("{what}: needs {needed}, cap is {cap}")]
    CapacityExceeded {
        what: &'static str,
        needed: usize,
        cap: usize,
    },
    #[error("series with {terms} coefficients applied to nonzero scalar part at truncation {truncation}")]
    NonzeroScalarPart { terms: usize, truncation: usize },
    #[error("Gram matrix is numerically zero")]
    DegenerateGram,
    #[error("truncation degree {got} too small, need at least {need}")]
    TruncationTooSmall { need: usize, got: usize },
    #[error("moment tables reach degree {have}, need degree {need}")]
    MomentDepth { need: usize, have: usize },
    #[error("operands belong to different spaces or truncations")]
    SpaceMismatch,
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("config is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, CcrError>;
