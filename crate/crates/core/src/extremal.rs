//! Random circumscribed polytopes: spherical caps, the choice of offset, and
//! the exact expected surface measure.

use rayon::prelude::*;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::measure::Measure;
use crate::numerics::{find_root, integrate_log, LogIntegrand, DEFAULT_REL_TOL, DEFAULT_ROOT_TOL};
use crate::polytope::Polytope;
use crate::random::derive_seed;
use crate::surface::{hyperplane_measure, log_slice_integral, log_slice_prefactor, SurfaceEstimator};

/// Header of the extremal sweep CSV.
pub const EXTREMAL_CSV_HEADER: &str = "family,n,K,rho,expected_exact,mc_mean,mc_stderr,lower_rhs";

/// Probability that a uniformly random unit normal `u` puts a fixed point at
/// radius `t` strictly beyond the hyperplane `<x, u> = rho`.
pub fn cap_probability(n: usize, t: f64, rho: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need n >= 2, got {n}")));
    }
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(format!("need t > 0, got {t}")));
    }
    if rho >= t {
        return Ok(0.0);
    }
    if rho < 0.0 {
        return Ok(1.0 - cap_probability(n, t, -rho)?);
    }
    let theta = (rho / t).acos();
    if n == 2 {
        return Ok(theta / std::f64::consts::PI);
    }
    let k = (n - 2) as f64;
    // ∫_0^π sin^{n-2}θ dθ = sqrt(π) Γ((n-1)/2) / Γ(n/2)
    let log_full = 0.5 * std::f64::consts::PI.ln() + ln_gamma(0.5 * (n as f64 - 1.0)) - ln_gamma(0.5 * n as f64);
    let f = LogIntegrand::new(
        |x: f64| if x <= 0.0 { f64::NEG_INFINITY } else { k * x.sin().ln() },
        0.0,
        theta,
    );
    let log_part = integrate_log(&f, DEFAULT_REL_TOL)?;
    Ok((log_part - log_full).exp().min(0.5))
}

/// Right side of the offset equation in log form:
/// `ln(t0/(sqrt(n) ρ)) + (n-3)/2 · ln(1 - ρ²/(t0²(1+λ)²))`.
pub fn log_rho_equation(measure: &Measure, rho: f64) -> f64 {
    let p = measure.params();
    let n = p.n as f64;
    let outer = p.t0 * (1.0 + p.lambda);
    let q = rho / outer;
    let head = (p.t0 / (n.sqrt() * rho)).ln();
    if p.n == 3 {
        head
    } else {
        head + 0.5 * (n - 3.0) * (-q * q).ln_1p()
    }
}

/// Offset at which a random circumscribed polytope with `k` facets is
/// extremal: the root of `log_rho_equation(ρ) = -ln K` on
/// `(t0/(K sqrt(n)), t0(1+λ))`.
pub fn solve_rho(measure: &Measure, k: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("need K >= 2, got {k}")));
    }
    let p = measure.params();
    let lnk = (k as f64).ln();
    let lo = p.t0 / (k as f64 * (p.n as f64).sqrt());
    let hi = p.t0 * (1.0 + p.lambda) * (1.0 - 1e-15);
    let g = |rho: f64| log_rho_equation(measure, rho) + lnk;
    let (g_lo, g_hi) = (g(lo), g(hi));
    if !(g_lo > 0.0 && g_hi < 0.0) {
        return Err(Error::Range(format!(
            "no offset for K = {k}: equation changes sign nowhere in ({lo}, {hi})"
        )));
    }
    let rho = find_root(g, lo, hi, DEFAULT_ROOT_TOL * p.t0)?;
    let ratio = rho / (p.t0 * lnk.sqrt() / (p.n as f64).sqrt());
    if !(0.3..=3.0).contains(&ratio) && p.facet_count_in_range(k, 1.0) {
        log::warn!("offset for K = {k} is {ratio:.3} times t0 sqrt(ln K / n)");
    }
    Ok(rho)
}

/// `E γ(∂P)` for `P` the intersection of `k` halfspaces at offset `rho` with
/// independent uniform normals.
///
/// A point on facet `i` at radius `t` lies on `∂P` iff none of the other
/// `k - 1` halfspaces cuts it off, so the expectation is
/// `k ∫_{H_ρ} (1 - p(t))^{k-1} dγ`.
pub fn expected_surface_exact(measure: &Measure, k: usize, rho: f64) -> Result<f64> {
    expected_surface_on(measure, k, rho, 0.0, f64::INFINITY)
}

/// As [`expected_surface_exact`], restricted to points with radius in
/// `[t0(1-λ), t0(1+λ)]`.
pub fn expected_surface_annulus(measure: &Measure, k: usize, rho: f64) -> Result<f64> {
    let p = measure.params();
    expected_surface_on(measure, k, rho, p.t0 * (1.0 - p.lambda), p.t0 * (1.0 + p.lambda))
}

fn expected_surface_on(measure: &Measure, k: usize, rho: f64, t_lo: f64, t_hi: f64) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::InvalidArgument(format!("need rho > 0, got {rho}")));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("need K >= 1".into()));
    }
    let n = measure.dim();
    let s_of = |t: f64| if t <= rho { 0.0 } else { (t * t - rho * rho).sqrt() };
    let (a, b) = (s_of(t_lo.max(0.0)), if t_hi.is_finite() { s_of(t_hi) } else { f64::INFINITY });
    let survivors = (k - 1) as f64;
    let log_int = log_slice_integral(measure, n - 2, rho, a, b, |t| {
        if k == 1 {
            return 0.0;
        }
        match cap_probability(n, t, rho) {
            Ok(p) => survivors * (-p).ln_1p(),
            Err(_) => f64::NAN,
        }
    })?;
    Ok(k as f64 * (log_slice_prefactor(measure) + log_int).exp())
}

/// `(sqrt(n)/t0) sqrt(ln K)`.
pub fn lower_bound_rhs(measure: &Measure, k: f64) -> f64 {
    measure.params().scale() * k.ln().sqrt()
}

/// One offset choice for the extremal construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremalConfig {
    pub k: usize,
    pub rho: f64,
    pub c_range: f64,
    /// `K <= exp(c_range / λ)`.
    pub in_range: bool,
}

impl ExtremalConfig {
    pub fn solve(measure: &Measure, k: usize, c_range: f64) -> Result<Self> {
        let rho = solve_rho(measure, k)?;
        Self::with_rho(measure, k, rho, c_range)
    }

    pub fn with_rho(measure: &Measure, k: usize, rho: f64, c_range: f64) -> Result<Self> {
        let p = measure.params();
        if k < 2 {
            return Err(Error::InvalidArgument(format!("need K >= 2, got {k}")));
        }
        if !(rho > 0.0 && rho < p.t0 * (1.0 + p.lambda)) {
            return Err(Error::Range(format!(
                "offset {rho} outside (0, {})",
                p.t0 * (1.0 + p.lambda)
            )));
        }
        let in_range = p.facet_count_in_range(k, c_range);
        if !in_range {
            log::warn!("K = {k} exceeds exp({c_range}/λ) for λ = {}", p.lambda);
        }
        Ok(Self {
            k,
            rho,
            c_range,
            in_range,
        })
    }
}

/// Sample budget of the Monte Carlo surface estimate of one polytope.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Allocation {
    /// This many samples on every facet.
    PerFacet(usize),
    /// This many samples in total, spread over facets by hyperplane measure.
    Pooled(usize),
}

/// Mean and standard error of the Monte Carlo surface over `trials`
/// independent random circumscribed polytopes.
pub fn random_polytope_surface_mc(
    measure: &Measure,
    k: usize,
    rho: f64,
    trials: usize,
    allocation: Allocation,
    seed: u64,
) -> Result<(f64, f64)> {
    if trials < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 trials, got {trials}")));
    }
    let n = measure.dim();
    let values = (0..trials)
        .into_par_iter()
        .map(|i| {
            let trial_seed = derive_seed(seed, i as u64);
            let p = Polytope::circumscribed_random(n, k, rho, trial_seed)?;
            let est = SurfaceEstimator::new(measure);
            match allocation {
                Allocation::PerFacet(s) => est.surface_mc(&p, s, trial_seed),
                Allocation::Pooled(s) => est.pooled_surface_mc(&p, s, trial_seed),
            }
            .map(|e| e.value)
        })
        .collect::<Result<Vec<_>>>()?;
    let m = trials as f64;
    let mean = values.iter().sum::<f64>() / m;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
    Ok((mean, (var / m).sqrt()))
}

/// One row of the extremal sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalRow {
    pub family: String,
    pub n: usize,
    pub k: usize,
    pub rho: f64,
    pub expected_exact: f64,
    pub mc_mean: f64,
    pub mc_stderr: f64,
    pub lower_rhs: f64,
    pub in_range: bool,
}

impl ExtremalRow {
    /// Solves the offset, the exact expectation and, when `trials > 0`, the
    /// Monte Carlo mean over sampled polytopes (NaN columns otherwise).
    pub fn compute(
        measure: &Measure,
        k: usize,
        c_range: f64,
        trials: usize,
        allocation: Allocation,
        seed: u64,
    ) -> Result<Self> {
        let cfg = ExtremalConfig::solve(measure, k, c_range)?;
        let expected_exact = expected_surface_exact(measure, k, cfg.rho)?;
        let (mc_mean, mc_stderr) = if trials > 0 {
            random_polytope_surface_mc(measure, k, cfg.rho, trials, allocation, seed)?
        } else {
            (f64::NAN, f64::NAN)
        };
        Ok(Self {
            family: measure.family(),
            n: measure.dim(),
            k,
            rho: cfg.rho,
            expected_exact,
            mc_mean,
            mc_stderr,
            lower_rhs: lower_bound_rhs(measure, k as f64),
            in_range: cfg.in_range,
        })
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.family, self.n, self.k, self.rho, self.expected_exact, self.mc_mean, self.mc_stderr, self.lower_rhs
        )
    }
}

/// `γ(H_ρ)`, the `K = 1` expectation.
pub fn single_facet_expectation(measure: &Measure, rho: f64) -> Result<f64> {
    Ok(hyperplane_measure(measure, rho)?.value)
}
