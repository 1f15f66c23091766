//! Deterministic surface integrals: whole hyperplanes and planar polygons.

use super::{Method, SurfaceEstimate};
use crate::error::{Error, Result};
use crate::measure::Measure;
use crate::numerics::{integrate_log, log_unit_ball_volume, LogIntegrand, DEFAULT_REL_TOL};
use crate::polytope::{dot, Polytope};

/// `ln[(n-1) ν_{n-1} C_n]`: the factor turning a radial slice integral into
/// the measure of a hyperplane.
pub(crate) fn log_slice_prefactor(measure: &Measure) -> f64 {
    let n = measure.dim();
    ((n - 1) as f64).ln() + log_unit_ball_volume(n - 1) + measure.params().log_c_n
}

/// Upper limit of `s` on the hyperplane at distance `rho` (support clipping).
pub(crate) fn slice_upper(measure: &Measure, rho: f64) -> f64 {
    match measure.model().potential().support_bound() {
        Some(r) if rho >= r => 0.0,
        Some(r) => (r * r - rho * rho).sqrt(),
        None => f64::INFINITY,
    }
}

/// `ln ∫_a^b s^{k} exp(-φ(sqrt(s² + ρ²)) + extra(t)) ds` with `t = sqrt(s² + ρ²)`.
pub(crate) fn log_slice_integral(
    measure: &Measure,
    k: usize,
    rho: f64,
    a: f64,
    b: f64,
    extra: impl Fn(f64) -> f64,
) -> Result<f64> {
    let b = b.min(slice_upper(measure, rho));
    if !(b > a) {
        return Ok(f64::NEG_INFINITY);
    }
    let pot = measure.model().potential();
    let f = LogIntegrand::new(
        |s: f64| {
            let t = s.hypot(rho);
            let base = -pot.value(t) + extra(t);
            if k == 0 {
                base
            } else if s <= 0.0 {
                f64::NEG_INFINITY
            } else {
                k as f64 * s.ln() + base
            }
        },
        a,
        b,
    );
    integrate_log(&f, DEFAULT_REL_TOL)
}

/// `γ(H_ρ)` for the hyperplane at distance `|rho|` from the origin.
///
/// Integrated over the in-plane radius `s`, with `t = sqrt(s² + ρ²)`:
/// `(n-1) ν_{n-1} C_n ∫_0^∞ s^{n-2} e^{-φ(t)} ds`, which is the polar form
/// `∫_ρ^∞ (t² - ρ²)^{(n-3)/2} t e^{-φ(t)} dt` without its endpoint singularity
/// at `n = 2`.
pub fn hyperplane_measure(measure: &Measure, rho: f64) -> Result<SurfaceEstimate> {
    let rho = rho.abs();
    let n = measure.dim();
    let log_int = log_slice_integral(measure, n - 2, rho, 0.0, f64::INFINITY, |_| 0.0)?;
    Ok(SurfaceEstimate::exact(
        (log_slice_prefactor(measure) + log_int).exp(),
        Method::Exact1d,
    ))
}

/// Active segment `[s_min, s_max]` of facet `i` of a planar polygon, in the
/// coordinate `x = ρ_i u_i + s v_i` with `v_i` the normal rotated by +90°.
pub fn polygon_facet_segment(p: &Polytope, i: usize) -> Option<(f64, f64)> {
    let hs = p.halfspaces();
    let u = hs[i].normal();
    let rho = hs[i].offset();
    let v = [-u[1], u[0]];
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for (j, h) in hs.iter().enumerate() {
        if j == i {
            continue;
        }
        // <ρ u + s v, u_j> <= ρ_j
        let base = rho * dot(u, h.normal()) - h.offset();
        let slope = dot(&v, h.normal());
        if slope.abs() < 1e-15 {
            if base > 0.0 {
                return None;
            }
        } else if slope > 0.0 {
            hi = hi.min(-base / slope);
        } else {
            lo = lo.max(-base / slope);
        }
    }
    (hi > lo).then_some((lo, hi))
}

/// Exact surface measure of a planar polygon.
pub fn polygon_exact_2d(measure: &Measure, p: &Polytope) -> Result<SurfaceEstimate> {
    if p.dim() != 2 || measure.dim() != 2 {
        return Err(Error::InvalidArgument(
            "the exact polygon integrator needs n = 2".into(),
        ));
    }
    let log_c = measure.params().log_c_n;
    let mut total = 0.0;
    for (i, h) in p.halfspaces().iter().enumerate() {
        let Some((lo, hi)) = polygon_facet_segment(p, i) else {
            continue;
        };
        let rho = h.offset().abs();
        // e^{-φ(sqrt(s² + ρ²))} is even in s: fold the segment onto s >= 0
        let mut pieces = Vec::with_capacity(2);
        if hi > 0.0 {
            pieces.push((lo.max(0.0), hi));
        }
        if lo < 0.0 {
            pieces.push(((-hi).max(0.0), -lo));
        }
        for (a, b) in pieces {
            let l = log_slice_integral(measure, 0, rho, a, b, |_| 0.0)?;
            total += (log_c + l).exp();
        }
    }
    Ok(SurfaceEstimate::exact(total, Method::Exact2d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::{Halfspace, StandardShape};

    const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

    #[test]
    fn gaussian_hyperplane_through_origin() {
        for n in [2usize, 3, 10, 50, 200] {
            let m = Measure::from_spec("gaussian", n).unwrap();
            let h = hyperplane_measure(&m, 0.0).unwrap();
            assert!((h.value - INV_SQRT_2PI).abs() < 1e-9, "n={n} {}", h.value);
            assert_eq!(h.stderr, 0.0);
        }
    }

    #[test]
    fn gaussian_hyperplane_offset_is_marginal_density() {
        let m = Measure::from_spec("gaussian", 7).unwrap();
        for rho in [0.3, 1.0, 2.5, -1.0] {
            let want = INV_SQRT_2PI * (-0.5 * rho * rho as f64).exp();
            let got = hyperplane_measure(&m, rho).unwrap().value;
            assert!((got - want).abs() < 1e-10 * want.max(1e-300) + 1e-14);
        }
        assert_eq!(hyperplane_measure(&m, 1e3).unwrap().value, 0.0);
    }

    #[test]
    fn ball_hyperplane() {
        let m = Measure::from_spec("ball", 3).unwrap();
        assert!((hyperplane_measure(&m, 0.0).unwrap().value - 0.75).abs() < 1e-10);
        // uniform density 3/(4π) times the disk area π(1 - ρ²)
        let got = hyperplane_measure(&m, 0.6).unwrap().value;
        assert!((got - 0.75 * 0.64).abs() < 1e-10);
        assert_eq!(hyperplane_measure(&m, 1.2).unwrap().value, 0.0);
    }

    #[test]
    fn polygon_line_and_square() {
        let m = Measure::from_spec("gaussian", 2).unwrap();
        let line = Polytope::new(2, vec![Halfspace::new(vec![0.0, 1.0], 0.0).unwrap()]).unwrap();
        let v = polygon_exact_2d(&m, &line).unwrap().value;
        assert!((v - INV_SQRT_2PI).abs() < 1e-10);

        let sq = Polytope::standard_shape(StandardShape::Cube, 2, 1.0).unwrap();
        let v = polygon_exact_2d(&m, &sq).unwrap().value;
        // each side: φ(1) (2Φ(1) - 1)
        let side = INV_SQRT_2PI * (-0.5f64).exp() * 0.682_689_492_137_085_9;
        assert!((v - 4.0 * side).abs() < 1e-10);
    }

    #[test]
    fn triangle_segments_end_at_vertices() {
        let p = Polytope::standard_shape(StandardShape::Simplex, 2, 1.0).unwrap();
        let hs = p.halfspaces();
        for i in 0..3 {
            let (lo, hi) = polygon_facet_segment(&p, i).unwrap();
            let u = hs[i].normal();
            let v = [-u[1], u[0]];
            for s in [lo, hi] {
                let x = [hs[i].offset() * u[0] + s * v[0], hs[i].offset() * u[1] + s * v[1]];
                // a vertex lies on exactly two of the three lines
                let on = hs.iter().filter(|h| h.violation(&x).abs() < 1e-10).count();
                assert_eq!(on, 2);
            }
        }
    }

    #[test]
    fn polygon_rejects_higher_dimensions() {
        let m = Measure::from_spec("gaussian", 3).unwrap();
        let c = Polytope::standard_shape(StandardShape::Cube, 3, 1.0).unwrap();
        assert!(polygon_exact_2d(&m, &c).is_err());
    }
}
