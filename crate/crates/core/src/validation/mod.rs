//! Independent oracles for the closed forms: adaptive quadrature, seeded
//! Monte-Carlo with standard errors, Kolmogorov-Smirnov distances, and the
//! grid that ties them together.

pub mod grid;
pub mod ks;
pub mod mc;
pub mod oracles;
pub mod quad;

pub use grid::{run_grid, GridPoint, GridSettings, Preset, ValidationReport};
pub use ks::{ks_critical_1pct, ks_statistic, ks_two_sample};
pub use mc::{derive_seed, draw_sums, mc_metric, mc_metrics, CiEstimate, McConfig, MetricKind};
pub use oracles::{quad_ber, quad_capacity, quad_outage};
pub use quad::{integrate, integrate_half_line, QuadResult, Tolerance};
