//! Per-point quantities on the boundary of a polytope and the two pointwise
//! bounds on the surface density they control.

use crate::error::{Error, Result};
use crate::measure::Measure;
use crate::numerics::{golden_max, LogIntegrand};
use crate::polytope::{dot, Polytope};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryDiagnostics {
    /// Cosine between `y` and the outer normal at `y`.
    pub alpha: f64,
    /// `ln g_{n-1}(t0) - ln g_{n-1}(|y|)`.
    pub psi: f64,
    /// `(sqrt(n)/t0) · max(ρ, 0)`.
    pub r: f64,
}

const ON_FACET_TOL: f64 = 1e-8;

pub fn pointwise_diagnostics(
    measure: &Measure,
    p: &Polytope,
    facet: usize,
    y: &[f64],
) -> Result<BoundaryDiagnostics> {
    if y.len() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: y.len(),
        });
    }
    let h = p
        .halfspaces()
        .get(facet)
        .ok_or_else(|| Error::InvalidArgument(format!("facet index {facet} out of range")))?;
    let off = dot(h.normal(), y) - h.offset();
    if off.abs() > ON_FACET_TOL {
        return Err(Error::Precondition(format!(
            "point is {off:e} away from the hyperplane of facet {facet}"
        )));
    }
    let norm = dot(y, y).sqrt();
    let rho = h.offset();
    let alpha = if norm > 0.0 {
        (rho / norm).clamp(-1.0, 1.0)
    } else {
        1.0
    };
    let params = measure.params();
    let k = measure.dim() - 1;
    // ψ ≥ 0 up to rounding: t0 maximizes g_{n-1}
    let psi = (measure.log_g(k, params.t0) - measure.log_g(k, norm)).max(0.0);
    Ok(BoundaryDiagnostics {
        alpha,
        psi,
        r: params.scale() * rho.max(0.0),
    })
}

/// `(sqrt(n)/t0) · min(1/(λ r e^ψ), r ψ + sqrt(ψ))`; the first term is
/// dropped when `r = 0`.
pub fn pointwise_bound(measure: &Measure, diag: &BoundaryDiagnostics) -> f64 {
    let params = measure.params();
    let second = diag.r * diag.psi + diag.psi.sqrt();
    let value = if diag.r > 0.0 {
        let first = (-diag.psi).exp() / (params.lambda * diag.r);
        first.min(second)
    } else {
        second
    };
    params.scale() * value
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointwiseMin {
    pub psi_star: f64,
    pub value: f64,
    /// The a posteriori envelope `value <= 2 max(sqrt(ln(1/(λr))), r ln(1/(λr²)))`
    /// holds; `None` when `r` is outside `[1, 1/(e sqrt(λ))]`.
    pub envelope: Option<bool>,
}

fn pointwise_objective(lambda: f64, r: f64, psi: f64) -> f64 {
    (-psi).exp() / (lambda * r) + r * psi + psi.sqrt()
}

const GRID: usize = 400;

/// Minimizes `1/(λ r e^ψ) + r ψ + sqrt(ψ)` over `ψ ∈ [0, ln(1/λ) + 10]`.
pub fn minimize_pointwise(lambda: f64, r: f64) -> Result<PointwiseMin> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidArgument(format!("lambda must lie in (0,1), got {lambda}")));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(format!("r must be positive, got {r}")));
    }
    let hi = (1.0 / lambda).ln() + 10.0;
    let f = |psi: f64| pointwise_objective(lambda, r, psi);
    let step = hi / GRID as f64;
    let best = (0..=GRID)
        .map(|i| i as f64 * step)
        .min_by(|a, b| f(*a).total_cmp(&f(*b)))
        .expect("nonempty grid");
    let (a, b) = ((best - step).max(0.0), (best + step).min(hi));
    let (psi_star, neg) = golden_max(&LogIntegrand::new(|x| -f(x), a, b), a, b)?;
    let (psi_star, value) = if -neg <= f(best) {
        (psi_star, -neg)
    } else {
        (best, f(best))
    };
    let envelope = (r >= 1.0 && r <= 1.0 / (std::f64::consts::E * lambda.sqrt())).then(|| {
        let a = (1.0 / (lambda * r)).ln().max(0.0).sqrt();
        let b = r * (1.0 / (lambda * r * r)).ln();
        value <= 2.0 * a.max(b) * (1.0 + 1e-12)
    });
    Ok(PointwiseMin {
        psi_star,
        value,
        envelope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::Halfspace;

    fn brute_min(lambda: f64, r: f64) -> (f64, f64) {
        let hi = (1.0 / lambda).ln() + 10.0;
        let m = 2_000_000;
        (0..=m)
            .map(|i| {
                let psi = hi * i as f64 / m as f64;
                (psi, pointwise_objective(lambda, r, psi))
            })
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap()
    }

    fn facet_at(n: usize, rho: f64) -> Polytope {
        let mut u = vec![0.0; n];
        u[0] = 1.0;
        Polytope::new(n, vec![Halfspace::new(u, rho).unwrap()]).unwrap()
    }

    #[test]
    fn diagnostics_at_t0_and_outer_level() {
        let m = Measure::from_spec("gaussian", 30).unwrap();
        let pr = *m.params();
        let p = facet_at(30, 1.0);
        let mut y = vec![0.0; 30];
        y[0] = 1.0;
        for (t, want) in [(pr.t0, 0.0), (pr.t0 * (1.0 + pr.lambda_o), 1.0)] {
            y[1] = (t * t - 1.0).sqrt();
            let d = pointwise_diagnostics(&m, &p, 0, &y).unwrap();
            assert!((d.psi - want).abs() < 1e-9, "{d:?}");
            assert!((d.alpha - 1.0 / t).abs() < 1e-12);
            assert!((d.r - pr.scale()).abs() < 1e-12);
        }
    }

    #[test]
    fn foot_of_perpendicular() {
        let m = Measure::from_spec("power:3", 8).unwrap();
        let p = facet_at(8, 0.7);
        let mut y = vec![0.0; 8];
        y[0] = 0.7;
        let d = pointwise_diagnostics(&m, &p, 0, &y).unwrap();
        assert_eq!(d.alpha, 1.0);
        assert!(d.psi > 0.0);
        y[1] = 1e-3;
        y[0] = 0.70001;
        assert!(pointwise_diagnostics(&m, &p, 0, &y).is_err());
    }

    #[test]
    fn bound_arithmetic() {
        let m = Measure::from_spec("gaussian", 20).unwrap();
        let pr = *m.params();
        let d = BoundaryDiagnostics { alpha: 0.5, psi: 1.0, r: 1.0 };
        let want = pr.scale() * (1.0 / (pr.lambda * std::f64::consts::E)).min(2.0);
        assert!((pointwise_bound(&m, &d) - want).abs() < 1e-14);
        let zero = BoundaryDiagnostics { psi: 0.0, ..d };
        assert_eq!(pointwise_bound(&m, &zero), 0.0);
        let flat = BoundaryDiagnostics { r: 0.0, ..d };
        assert_eq!(pointwise_bound(&m, &flat), pr.scale());
        let far = BoundaryDiagnostics { psi: 60.0, ..d };
        assert!(pointwise_bound(&m, &far) < 1e-20);
    }

    #[test]
    fn minimum_matches_grid_oracle() {
        for (lambda, r) in [(1e-4, 1.0), (1e-4, 36.0), (0.05, 0.3), (0.3, 2.0), (1e-2, 3.0)] {
            let got = minimize_pointwise(lambda, r).unwrap();
            let (_, want) = brute_min(lambda, r);
            assert!(got.value <= want + 1e-6, "λ={lambda} r={r}: {got:?} vs {want}");
            assert!(got.value >= want - 1e-6);
        }
    }

    #[test]
    fn boundary_radius_envelope() {
        let lambda: f64 = 1e-4;
        let r = 1.0 / (std::f64::consts::E * lambda.sqrt());
        let got = minimize_pointwise(lambda, r).unwrap();
        let target = r * (1.0 / (lambda * r * r)).ln();
        assert!((target - 2.0 * r).abs() < 1e-9);
        assert!(got.value <= 2.0 * target && got.value >= 0.5 * target);
        assert_eq!(got.envelope, Some(true));
    }

    #[test]
    fn unit_radius_minimizer_near_log_inverse_lambda() {
        let lambda: f64 = 1e-4;
        let got = minimize_pointwise(lambda, 1.0).unwrap();
        let l = (1.0 / lambda).ln();
        assert!((got.psi_star - l).abs() < l.ln() + 1.0, "{got:?}");
    }

    #[test]
    fn nonincreasing_in_lambda() {
        let mut last = f64::INFINITY;
        for lambda in [1e-5, 1e-4, 1e-3, 1e-2, 0.1, 0.5] {
            let v = minimize_pointwise(lambda, 1.5).unwrap().value;
            assert!(v <= last + 1e-12);
            last = v;
        }
    }
}
