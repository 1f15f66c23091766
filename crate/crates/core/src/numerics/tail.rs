//! Numerical check of the log-concave tail inequality.
//!
//! For a log-concave `g` maximized at `t0`, if `ln g(t0) - ln g((1±x) t0) >= psi`
//! then the mass of `g` beyond `(1+x) t0` (or below `(1-x) t0`) is at most
//! `x t0 g(t0) / (psi e^psi)`.

use super::quadrature::{integrate_log, LogIntegrand, DEFAULT_REL_TOL};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailSide {
    Outer,
    Inner,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailCheck {
    pub holds: bool,
    /// Logarithm of the tail mass.
    pub log_lhs: f64,
    /// Logarithm of `x t0 g(t0) / (psi e^psi)`.
    pub log_rhs: f64,
}

/// `g_log` is evaluated on `[0, ∞)` regardless of the domain it carries.
pub fn check_logconcave_tail<F: Fn(f64) -> f64>(
    g_log: &LogIntegrand<F>,
    t0: f64,
    x: f64,
    psi: f64,
    side: TailSide,
) -> Result<TailCheck> {
    if !(t0 > 0.0 && x > 0.0 && psi > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need t0, x, psi > 0 (got {t0}, {x}, {psi})"
        )));
    }
    let peak = g_log.eval(t0);
    let edge = match side {
        TailSide::Outer => (1.0 + x) * t0,
        TailSide::Inner => (1.0 - x) * t0,
    };
    let at_edge = if edge > 0.0 {
        g_log.eval(edge)
    } else {
        f64::NEG_INFINITY
    };
    let drop = peak - at_edge;
    if !(drop >= psi - 1e-12 * psi.max(1.0)) {
        return Err(Error::Precondition(format!(
            "log-drop {drop} at {edge} is below psi = {psi}"
        )));
    }
    let log_lhs = match side {
        TailSide::Outer => {
            let tail = LogIntegrand::new(|t| g_log.eval(t), edge, f64::INFINITY);
            integrate_log(&tail, DEFAULT_REL_TOL)?
        }
        TailSide::Inner if edge > 0.0 => {
            let tail = LogIntegrand::new(|t| g_log.eval(t), 0.0, edge);
            integrate_log(&tail, DEFAULT_REL_TOL)?
        }
        TailSide::Inner => f64::NEG_INFINITY,
    };
    let log_rhs = (x * t0).ln() + peak - psi.ln() - psi;
    Ok(TailCheck {
        holds: log_lhs <= log_rhs + 1e-6,
        log_lhs,
        log_rhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_two_outer_tail() {
        let g = LogIntegrand::new(|t: f64| t.ln() - t, 0.0, f64::INFINITY);
        let psi = 1.0 - 2f64.ln();
        let c = check_logconcave_tail(&g, 1.0, 1.0, psi, TailSide::Outer).unwrap();
        assert!((c.log_lhs.exp() - 3.0 * (-2f64).exp()).abs() < 1e-10);
        let rhs = (-1f64).exp() / (psi * psi.exp());
        assert!((c.log_rhs.exp() - rhs).abs() < 1e-12);
        assert!((c.log_rhs.exp() - 0.8819).abs() < 1e-3);
        assert!(c.holds);
    }

    #[test]
    fn rayleigh_outer_tail() {
        let g = LogIntegrand::new(|t: f64| t.ln() - 0.5 * t * t, 0.0, f64::INFINITY);
        let psi = -0.5 - (2f64.ln() - 2.0);
        let c = check_logconcave_tail(&g, 1.0, 1.0, psi, TailSide::Outer).unwrap();
        // closed form: ∫_2^∞ t e^{-t²/2} dt = e^{-2}
        assert!((c.log_lhs.exp() - (-2f64).exp()).abs() < 1e-10);
        assert!(c.holds && c.log_lhs < c.log_rhs);
    }

    #[test]
    fn inner_tail() {
        let g = LogIntegrand::new(|t: f64| 4.0 * t.ln() - t, 0.0, f64::INFINITY);
        let (t0, x) = (4.0, 0.5);
        let psi = g.eval(t0) - g.eval(t0 * (1.0 - x));
        let c = check_logconcave_tail(&g, t0, x, psi, TailSide::Inner).unwrap();
        assert!(c.holds, "{c:?}");
    }

    #[test]
    fn hypothesis_violation_is_reported() {
        let g = LogIntegrand::new(|t: f64| t.ln() - t, 0.0, f64::INFINITY);
        let r = check_logconcave_tail(&g, 1.0, 0.1, 5.0, TailSide::Outer);
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn holds_far_into_the_tail() {
        let g = LogIntegrand::new(|t: f64| t.ln() - t, 0.0, f64::INFINITY);
        for x in [1.0, 2.0, 4.0, 8.0, 16.0] {
            let psi = g.eval(1.0) - g.eval(1.0 + x);
            let c = check_logconcave_tail(&g, 1.0, x, psi, TailSide::Outer).unwrap();
            assert!(c.holds, "x={x} {c:?}");
        }
    }

    #[test]
    fn no_overflow_at_large_peaks() {
        // g = t^899 e^{-t}, peak value about e^{5200}
        let g = LogIntegrand::new(|t: f64| 899.0 * t.ln() - t, 0.0, f64::INFINITY);
        let t0 = 899.0;
        let x = 0.2;
        let psi = g.eval(t0) - g.eval(t0 * (1.0 + x));
        let c = check_logconcave_tail(&g, t0, x, psi, TailSide::Outer).unwrap();
        assert!(c.log_lhs.is_finite() && c.log_rhs.is_finite() && c.holds, "{c:?}");
    }
}
