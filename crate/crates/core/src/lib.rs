//! Truncated Hardy-space toolkit for shift-invariant and nearly invariant
//! subspaces: series and vector lifts, Laurent matrices on the circle, span
//! frames, invariance checks, the Hitt decomposition and Blaschke transfers.

pub mod blaschke;
pub mod element;
pub mod error;
pub mod hitt;
pub mod invariance;
pub mod laurent;
pub mod par;
pub mod series;
pub mod subspaces;
pub mod veclift;

pub use blaschke::{BlaschkeProduct, Direction, Toeplitz, WoldFrame};
pub use element::HardyElement;
pub use error::{Error, Result};
pub use hitt::{build_j_map, certify_theta, extract_kernels, hitt_decompose, KernelColumn};
pub use invariance::{
    check_invariance, check_near_invariance, verify_theorem_pipeline, InvarianceReport,
    OperatorSpec, ShiftCondition, Verdict,
};
pub use laurent::{build_sigma, LaurentMatrix, LaurentPoly};
pub use series::{TaylorPoly, C64};
pub use subspaces::{MonomialSubspace, SpanSubspace, SubspaceModel};
pub use veclift::{t_m_apply, t_m_invert, VectorPoly};

/// Numerical thresholds shared by every check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Absolute residual allowed for subspace membership.
    pub membership: f64,
    /// Relative threshold for dropping dependent generators.
    pub rank: f64,
    /// Largest negative-index coefficient still counted as analytic.
    pub analyticity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            membership: 1e-8,
            rank: 1e-9,
            analyticity: 1e-10,
        }
    }
}
