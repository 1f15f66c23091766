//! Closed-form evaluators of the surface-area bounds, all with unit constants.

use std::f64::consts::E;

use crate::error::{Error, Result};
use crate::numerics::{golden_max, LogIntegrand};
use crate::MeasureParams;

/// Header of the bounds CSV.
pub const BOUNDS_CSV_HEADER: &str = "bound_name,family,n,p,K,value,valid";

/// Inputs a bound was evaluated at; fields that do not apply are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BoundInputs {
    pub n: Option<usize>,
    pub k: Option<f64>,
    pub t0: Option<f64>,
    pub lambda: Option<f64>,
    pub mean_norm: Option<f64>,
    pub var_norm: Option<f64>,
    pub p: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub name: &'static str,
    pub value: f64,
    /// The range conditions of the bound hold.
    pub valid: bool,
    pub inputs: BoundInputs,
}

impl BoundReport {
    pub fn csv_row(&self, family: &str) -> String {
        let opt = |v: Option<String>| v.unwrap_or_default();
        format!(
            "{},{family},{},{},{},{},{}",
            self.name,
            opt(self.inputs.n.map(|n| n.to_string())),
            opt(self.inputs.p.map(|p| p.to_string())),
            opt(self.inputs.k.map(|k| k.to_string())),
            self.value,
            self.valid
        )
    }
}

fn params_inputs(params: &MeasureParams) -> BoundInputs {
    BoundInputs {
        n: Some(params.n),
        t0: Some(params.t0),
        lambda: Some(params.lambda),
        mean_norm: Some(params.mean_norm),
        var_norm: Some(params.var_norm),
        ..BoundInputs::default()
    }
}

fn check_k(k: f64) -> Result<()> {
    if k >= 2.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("need K >= 2, got {k}")))
    }
}

/// `sqrt(n) / (Var|X|^{1/4} sqrt(E|X|))`, valid for any number of facets.
pub fn general_upper(params: &MeasureParams) -> Result<BoundReport> {
    if !(params.var_norm > 0.0) {
        return Err(Error::Precondition(format!(
            "Var|X| must be positive, got {}",
            params.var_norm
        )));
    }
    Ok(BoundReport {
        name: "general_upper",
        value: (params.n as f64).sqrt() / (params.var_norm.powf(0.25) * params.mean_norm.sqrt()),
        valid: true,
        inputs: params_inputs(params),
    })
}

/// `(sqrt(n)/t0) sqrt(ln K) ln(1/(λ ln K))`, valid when `λ ln K <= 1/e` and
/// `K <= exp(c_range/λ)`.
pub fn thm_upper(params: &MeasureParams, k: f64, c_range: f64) -> Result<BoundReport> {
    check_k(k)?;
    let lnk = k.ln();
    let x = params.lambda * lnk;
    Ok(BoundReport {
        name: "thm_upper",
        value: params.scale() * lnk.sqrt() * (1.0 / x).ln(),
        valid: x <= (-1.0f64).exp() && lnk <= c_range / params.lambda,
        inputs: BoundInputs {
            k: Some(k),
            ..params_inputs(params)
        },
    })
}

/// `sqrt(ln K)`, the standard Gaussian bound.
pub fn nazarov_upper(k: f64) -> Result<BoundReport> {
    check_k(k)?;
    Ok(BoundReport {
        name: "nazarov_upper",
        value: k.ln().sqrt(),
        valid: true,
        inputs: BoundInputs {
            k: Some(k),
            ..BoundInputs::default()
        },
    })
}

/// `n^{1/2 - 1/p} sqrt(ln K)` for the density `∝ exp(-|x|^p / p)`.
pub fn gamma_p_upper(n: usize, p: f64, k: f64) -> Result<BoundReport> {
    check_k(k)?;
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!("need p >= 1, got {p}")));
    }
    Ok(BoundReport {
        name: "gamma_p_upper",
        value: (n as f64).powf(0.5 - 1.0 / p) * k.ln().sqrt(),
        valid: true,
        inputs: BoundInputs {
            n: Some(n),
            k: Some(k),
            p: Some(p),
            ..BoundInputs::default()
        },
    })
}

/// `R ln(1/(λR²)) + K e^{-R²}`.
pub fn r_objective(lambda: f64, k: f64, r: f64) -> f64 {
    r * (1.0 / (lambda * r * r)).ln() + k * (-r * r).exp()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ROptimum {
    pub r_star: f64,
    pub value: f64,
}

const R_GRID: usize = 2000;

/// Minimizes [`r_objective`] over `R ∈ (1, 1/(e sqrt(λ)))`.
pub fn optimize_r(lambda: f64, k: f64) -> Result<ROptimum> {
    check_k(k)?;
    if !(lambda > 0.0) {
        return Err(Error::InvalidArgument(format!("need λ > 0, got {lambda}")));
    }
    let hi = 1.0 / (E * lambda.sqrt());
    if !(hi > 1.0) {
        return Err(Error::Range(format!(
            "empty range for R: λ = {lambda} is not below e^-2"
        )));
    }
    let f = |r: f64| r_objective(lambda, k, r);
    let step = (hi - 1.0) / R_GRID as f64;
    let best = (0..=R_GRID)
        .map(|i| 1.0 + i as f64 * step)
        .min_by(|a, b| f(*a).total_cmp(&f(*b)))
        .expect("nonempty grid");
    let (a, b) = ((best - step).max(1.0), (best + step).min(hi));
    let (r, neg) = golden_max(&LogIntegrand::new(|r| -f(r), a, b), a, b)?;
    Ok(if -neg <= f(best) {
        ROptimum { r_star: r, value: -neg }
    } else {
        ROptimum { r_star: best, value: f(best) }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Measure;

    #[test]
    fn general_upper_gaussian_limit() {
        let m = Measure::from_spec("gaussian", 200).unwrap();
        let v = general_upper(m.params()).unwrap().value / 200f64.powf(0.25);
        assert!((v / 2f64.powf(0.25) - 1.0).abs() < 0.1, "{v}");
    }

    #[test]
    fn general_upper_scaling() {
        let m = Measure::from_spec("gaussian", 10).unwrap();
        let p = *m.params();
        let q = MeasureParams {
            n: 4 * p.n,
            mean_norm: 2.0 * p.mean_norm,
            ..p
        };
        let r = general_upper(&q).unwrap().value / general_upper(&p).unwrap().value;
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn general_upper_ball_order() {
        for n in [10usize, 40, 160] {
            let m = Measure::from_spec("ball", n).unwrap();
            // E = n/(n+1), Var = n/(n+2) - E² ~ 1/n²
            let nf = n as f64;
            let e = nf / (nf + 1.0);
            let var = nf / (nf + 2.0) - e * e;
            let want = nf.sqrt() / (var.powf(0.25) * e.sqrt());
            let got = general_upper(m.params()).unwrap().value;
            assert!((got / want - 1.0).abs() < 1e-6);
            assert!(got / nf > 0.25 && got / nf < 2.0);
        }
    }

    #[test]
    fn thm_upper_boundary_and_arithmetic() {
        let m = Measure::from_spec("gaussian", 10_000).unwrap();
        let p = *m.params();
        let k_edge = ((-1.0f64).exp() / p.lambda).exp();
        let r = thm_upper(&p, k_edge, 1.0).unwrap();
        assert!((r.value - p.scale() * k_edge.ln().sqrt()).abs() < 1e-9);
        let lnk = 16f64.ln();
        let want = 100.0 / p.t0 * lnk.sqrt() * (1.0 / (p.lambda * lnk)).ln();
        let got = thm_upper(&p, 16.0, 1.0).unwrap();
        assert!((got.value - want).abs() < 1e-12 * want);
        assert!(got.valid);
        assert!(!thm_upper(&p, k_edge * 1.5, 1.0).unwrap().valid);
    }

    #[test]
    fn thm_upper_increasing_below_e_minus_two() {
        let m = Measure::from_spec("gaussian", 10_000).unwrap();
        let p = *m.params();
        let lnk_max = (-2.0f64).exp() / p.lambda;
        let mut last = 0.0;
        for i in 1..=200 {
            let k = (lnk_max * i as f64 / 200.0).exp().max(2.0);
            let v = thm_upper(&p, k, 1.0).unwrap().value;
            assert!(v >= last);
            last = v;
        }
    }

    #[test]
    fn nazarov_and_gamma_p() {
        let e = std::f64::consts::E;
        assert!((nazarov_upper(e).unwrap().value - 1.0).abs() < 1e-15);
        assert!((nazarov_upper(e.powi(4)).unwrap().value - 2.0).abs() < 1e-15);
        for k in [2.0, 16.0, 4096.0] {
            assert_eq!(gamma_p_upper(37, 2.0, k).unwrap().value, nazarov_upper(k).unwrap().value);
        }
        let v = gamma_p_upper(100, 1.0, 16.0).unwrap().value;
        assert!((v - 16f64.ln().sqrt() / 10.0).abs() < 1e-14);
        assert!(gamma_p_upper(5, 0.5, 4.0).is_err());
        assert!(nazarov_upper(1.0).is_err());
    }

    #[test]
    fn gamma_p_matches_scaled_sqrt_log() {
        for p in [1.0, 1.5, 3.0, 4.0] {
            for n in [50usize, 200] {
                let m = Measure::from_spec(&format!("power:{p}"), n).unwrap();
                let ratio = gamma_p_upper(n, p, 64.0).unwrap().value
                    / (m.params().scale() * 64f64.ln().sqrt());
                assert!((0.9..=1.1).contains(&ratio), "p={p} n={n}: {ratio}");
            }
        }
    }

    #[test]
    fn r_optimum_against_grid() {
        for lambda in [1e-2, 1e-3, 1e-4] {
            for e in 4..=12 {
                let k = (1u64 << e) as f64;
                let opt = optimize_r(lambda, k).unwrap();
                let hi = 1.0 / (E * lambda.sqrt());
                let oracle = (0..=100_000)
                    .map(|i| r_objective(lambda, k, 1.0 + (hi - 1.0) * i as f64 / 100_000.0))
                    .fold(f64::INFINITY, f64::min);
                assert!(opt.value <= oracle + 1e-6 && opt.value >= oracle - 1e-6);
                assert!(opt.value <= r_objective(lambda, k, k.ln().sqrt().clamp(1.0, hi)) + 1e-12);
                let lnk = k.ln();
                let scaled = opt.value / (lnk.sqrt() * (1.0 / (lambda * lnk)).ln());
                assert!((0.2..=5.0).contains(&scaled), "λ={lambda} K={k}: {scaled}");
                if lnk <= 1.0 / (16.0 * lambda) {
                    assert!(opt.r_star >= 0.5 * lnk.sqrt() && opt.r_star <= 2.0 * lnk.sqrt());
                }
            }
        }
    }

    #[test]
    fn r_optimum_balance() {
        let (lambda, k) = (1e-4, 4096.0);
        let opt = optimize_r(lambda, k).unwrap();
        let r = opt.r_star;
        assert!(k * (-r * r).exp() <= r * (1.0 / (lambda * r * r)).ln() + 1e-6);
    }

    #[test]
    fn r_range_error() {
        assert!(matches!(optimize_r(0.2, 16.0), Err(Error::Range(_))));
    }

    #[test]
    fn csv_rows() {
        let row = nazarov_upper(16.0).unwrap().csv_row("gaussian");
        assert_eq!(row.split(',').count(), BOUNDS_CSV_HEADER.split(',').count());
        assert!(row.starts_with("nazarov_upper,gaussian,,,16,"));
    }
}
