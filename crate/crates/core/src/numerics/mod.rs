//! Scalar numerical kernels shared by the rest of the crate.

mod quadrature;
mod quantile;
mod roots;
mod tail;

pub use quadrature::{
    integrate_log, log_window, LogIntegrand, LogWindow, DEFAULT_REL_TOL, TRUNCATION_NATS,
};
pub(crate) use quadrature::golden_max;
pub use quantile::{build_quantile_table, QuantileTable, DEFAULT_NODES};
pub use roots::{find_root, DEFAULT_ROOT_TOL};
pub use tail::{check_logconcave_tail, TailCheck, TailSide};

/// `ln` of the volume of the unit ball in `R^n`.
pub fn log_unit_ball_volume(n: usize) -> f64 {
    let n = n as f64;
    0.5 * n * std::f64::consts::PI.ln() - statrs::function::gamma::ln_gamma(0.5 * n + 1.0)
}
