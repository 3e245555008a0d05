//! Performance analytics for a reconfigurable-intelligent-surface (RIS) link
//! whose N reflector paths experience i.i.d. Fisher-Snedecor F composite
//! fading.
//!
//! The crate is organised bottom-up:
//!
//! - [`specfun`]: gamma family, error functions, Gauss hypergeometric and a
//!   numerical Meijer G evaluator (residue series / Mellin-Barnes contour).
//! - [`fading`]: single-branch F distribution and the N-branch sum model.
//! - [`metrics`]: exact and high-SNR closed forms for average capacity,
//!   average BER and outage probability.
//! - [`validation`]: independent quadrature and Monte-Carlo oracles, KS tests
//!   and the oracle-agreement grid.
//! - [`cli`]: configuration parsing, sweeps and CSV output behind the
//!   `ris-fading` binary.

/// |got − want| ≤ tol·|want|, with no absolute floor.
#[cfg(test)]
macro_rules! assert_rel {
    ($got:expr, $want:expr, $tol:expr) => {{
        let (g, w): (f64, f64) = ($got, $want);
        let r = (g - w).abs() / w.abs();
        assert!(r <= $tol, "got {g:e}, want {w:e}, rel {r:e} > {}", $tol);
    }};
}

pub mod cli;
pub mod error;
pub mod fading;
pub mod metrics;
pub mod specfun;
pub mod validation;

pub use error::{Error, Result};
pub use fading::{FadingParams, SampleMode, SumFadingModel};
pub use metrics::{LinkConfig, Method, MetricResult};
pub use specfun::{EvalMethod, EvalReport, MeijerGSpec};
