//! Double-precision special functions.
//!
//! Everything here is a pure function of its arguments. Gamma products are
//! carried in log space so parameters in the hundreds (N·m_s for large
//! surfaces) never overflow.

mod erf;
mod gamma;
mod hyper;
pub mod identities;
mod incbeta;
mod legendre;
mod meijer;

pub use erf::{erfc, ln_q_function, q_function};
pub use gamma::{beta, digamma, ln_beta, ln_gamma, ln_gamma_complex};
pub use hyper::{gauss_2f1, gauss_2f1_eval, gauss_2f1_via, Hyp2f1Eval, Hyp2f1Path};
pub use incbeta::beta_reg;
pub use meijer::{meijer_g, meijer_g_scaled, meijer_g_with, EvalMethod, EvalReport, MeijerGSpec};

pub(crate) use gamma::ln_gamma_unchecked;
