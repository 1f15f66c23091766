use super::potential::RadialPotential;
use crate::error::{Error, Result};
use crate::numerics::{
    find_root, integrate_log, log_unit_ball_volume, LogIntegrand, DEFAULT_REL_TOL,
    DEFAULT_ROOT_TOL,
};

const MAX_DOUBLINGS: usize = 1000;

/// A rotation-invariant log-concave probability measure on `R^n` with density
/// `C_n exp(-φ(|y|))`.
#[derive(Debug, Clone)]
pub struct MeasureModel {
    n: usize,
    potential: RadialPotential,
}

/// Result of [`MeasureModel::solve_mu`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuSolution {
    pub mu: f64,
    /// The requested drop is not reached inside the support; `mu` is the
    /// support boundary.
    pub at_support: bool,
}

impl MeasureModel {
    pub fn new(n: usize, potential: RadialPotential) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "dimension must be at least 2, got {n}"
            )));
        }
        Ok(Self { n, potential })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn potential(&self) -> &RadialPotential {
        &self.potential
    }

    /// Upper limit of radial integrals.
    pub fn radial_upper(&self) -> f64 {
        self.potential.support_bound().unwrap_or(f64::INFINITY)
    }

    /// `ln g_k(t) = k ln t - φ(t)`.
    #[inline]
    pub fn log_g(&self, k: usize, t: f64) -> f64 {
        let phi = self.potential.value(t);
        if k == 0 {
            return -phi;
        }
        if t <= 0.0 {
            return f64::NEG_INFINITY;
        }
        k as f64 * t.ln() - phi
    }

    /// `ln J_k`, `J_k = ∫_0^∞ t^k e^{-φ(t)} dt`.
    pub fn log_moment(&self, k: usize) -> Result<f64> {
        let f = LogIntegrand::new(|t| self.log_g(k, t), 0.0, self.radial_upper());
        integrate_log(&f, DEFAULT_REL_TOL)
    }

    /// `ln C_n = -ln(n ν_n J_{n-1})`.
    pub fn log_norm_const(&self) -> Result<f64> {
        Ok(self.log_norm_const_from(self.log_moment(self.n - 1)?))
    }

    pub(crate) fn log_norm_const_from(&self, log_j_nm1: f64) -> f64 {
        -((self.n as f64).ln() + log_unit_ball_volume(self.n) + log_j_nm1)
    }

    /// The maximizer of `g_{n-1}`.
    ///
    /// With infinite support this is the root of `φ'(t) t = n - 1`; with a
    /// finite support bound the maximizer may sit on the boundary.
    pub fn solve_t0(&self) -> Result<f64> {
        let target = (self.n - 1) as f64;
        let h = |t: f64| self.potential.derivative(t) * t - target;
        if let Some(s) = self.potential.support_bound() {
            if h(s) <= 0.0 {
                return Ok(s);
            }
            return find_root(h, 0.0, s, DEFAULT_ROOT_TOL);
        }
        let mut hi = 1.0;
        for _ in 0..MAX_DOUBLINGS {
            if h(hi) >= 0.0 {
                return find_root(h, 0.0, hi, DEFAULT_ROOT_TOL);
            }
            hi *= 2.0;
        }
        Err(Error::Divergence(
            "φ'(t) t never reaches n - 1".into(),
        ))
    }

    /// Log-drop of `g_{n-1}` from `t0` to `t0 (1 + x)` (`sign = 1`) or
    /// `t0 (1 - x)` (`sign = -1`).
    fn radial_drop(&self, t0: f64, x: f64, sign: f64) -> f64 {
        let s = 1.0 + sign * x;
        if s <= 0.0 {
            return f64::INFINITY;
        }
        let phi = self.potential.value(t0 * s) - self.potential.value(t0);
        phi - (self.n - 1) as f64 * s.ln()
    }

    /// `(λ_i, λ_o, λ)`.
    ///
    /// `λ_o` solves `φ(t0(1+x)) - φ(t0) - (n-1) ln(1+x) = 1`; when `g_{n-1}`
    /// vanishes beyond a finite support the smallest `x >= 0` with
    /// `g((1+x) t0) <= g(t0)/e` is used instead, which can be 0.
    pub fn solve_lambda(&self, t0: f64) -> Result<(f64, f64, f64)> {
        let lambda_o = self.level_outer(t0, 1.0)?.mu;
        let lambda_i = find_root(
            |x| self.radial_drop(t0, x, -1.0) - 1.0,
            0.0,
            1.0,
            DEFAULT_ROOT_TOL,
        )?;
        Ok((lambda_i, lambda_o, lambda_i + lambda_o))
    }

    fn level_outer(&self, t0: f64, psi: f64) -> Result<MuSolution> {
        let g = |x: f64| self.radial_drop(t0, x, 1.0) - psi;
        if let Some(s) = self.potential.support_bound() {
            let edge = (s / t0 - 1.0).max(0.0);
            if edge == 0.0 {
                return Ok(MuSolution {
                    mu: 0.0,
                    at_support: true,
                });
            }
            if g(edge) < 0.0 {
                return Ok(MuSolution {
                    mu: edge,
                    at_support: true,
                });
            }
            let mu = find_root(g, 0.0, edge, DEFAULT_ROOT_TOL)?;
            return Ok(MuSolution {
                mu,
                at_support: false,
            });
        }
        let mut hi = 1.0;
        for _ in 0..MAX_DOUBLINGS {
            if g(hi) >= 0.0 {
                let mu = find_root(g, 0.0, hi, DEFAULT_ROOT_TOL)?;
                return Ok(MuSolution {
                    mu,
                    at_support: false,
                });
            }
            hi *= 2.0;
        }
        Err(Error::Divergence(format!(
            "radial log-drop never reaches {psi}"
        )))
    }

    /// Smallest `μ > 0` with `φ(t0(1+μ)) - φ(t0) - (n-1) ln(1+μ) >= psi`.
    pub fn solve_mu(&self, t0: f64, psi: f64) -> Result<MuSolution> {
        if !(psi >= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "psi must be at least 1, got {psi}"
            )));
        }
        self.level_outer(t0, psi)
    }

    /// `(E|X|, Var|X|, V)`.
    ///
    /// The variance is integrated in centred form, split at `E`, which avoids
    /// the cancellation in `E|X|² - (E|X|)²` at large `n`.
    pub fn norm_moments(&self) -> Result<(f64, f64, f64)> {
        let n = self.n;
        let log_j_nm1 = self.log_moment(n - 1)?;
        let mean = (self.log_moment(n)? - log_j_nm1).exp();
        let log_centered = |t: f64| {
            let d = (t - mean).abs();
            if d == 0.0 {
                f64::NEG_INFINITY
            } else {
                2.0 * d.ln() + self.log_g(n - 1, t)
            }
        };
        let upper = self.radial_upper();
        let left = integrate_log(
            &LogIntegrand::new(log_centered, 0.0, mean.min(upper)),
            DEFAULT_REL_TOL,
        )?;
        let right = if mean < upper {
            integrate_log(&LogIntegrand::new(log_centered, mean, upper), DEFAULT_REL_TOL)?
        } else {
            f64::NEG_INFINITY
        };
        let mut var = (left - log_j_nm1).exp() + (right - log_j_nm1).exp();
        if !(var >= 0.0) {
            log::warn!("negative variance {var} from rounding, clamped to 0");
            var = 0.0;
        }
        Ok((mean, var, var.sqrt() / mean))
    }

    /// `P(|X| <= r)`.
    pub fn radial_cdf(&self, r: f64) -> Result<f64> {
        self.radial_interval_mass(0.0, r)
    }

    /// `P(a < |X| <= b)`.
    pub fn radial_interval_mass(&self, a: f64, b: f64) -> Result<f64> {
        let a = a.max(0.0);
        let b = b.min(self.radial_upper());
        if !(b > a) {
            return Ok(0.0);
        }
        let k = self.n - 1;
        let log_j = self.log_moment(k)?;
        let part = integrate_log(&LogIntegrand::new(|t| self.log_g(k, t), a, b), DEFAULT_REL_TOL)?;
        Ok((part - log_j).exp().clamp(0.0, 1.0))
    }
}
