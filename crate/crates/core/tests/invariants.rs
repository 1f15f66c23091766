//! Property checks across measure families, dimensions and fixtures.

use polysurf_core::bounds::{gamma_p_upper, nazarov_upper, thm_upper};
use polysurf_core::extremal::{
    cap_probability, expected_surface_annulus, expected_surface_exact, solve_rho,
};
use polysurf_core::numerics::{
    check_logconcave_tail, integrate_log, LogIntegrand, TailSide, DEFAULT_REL_TOL,
};
use polysurf_core::random::chunk_stream;
use polysurf_core::surface::{hyperplane_measure, SurfaceEstimator};
use polysurf_core::{Halfspace, Measure, Polytope, StandardShape};
use rand::Rng;

const FAMILIES: [&str; 7] = ["gaussian", "power:1", "power:1.5", "power:2", "power:3", "power:4", "ball"];
const DIMS: [usize; 6] = [5, 10, 20, 50, 100, 200];

fn grid() -> impl Iterator<Item = (&'static str, usize, Measure)> {
    FAMILIES.into_iter().flat_map(|f| {
        DIMS.into_iter()
            .map(move |n| (f, n, Measure::from_spec(f, n).unwrap()))
    })
}

#[test]
fn radial_integral_windows() {
    for (f, n, m) in grid() {
        let p = *m.params();
        let nf = n as f64;
        let log_peak = m.log_g(n - 1, p.t0);
        let j = p.log_j_nm1;
        // g(t0) t0 / n <= J_{n-1} <= 1.1 sqrt(2π) g(t0) t0 / sqrt(n-1)
        assert!(log_peak + (p.t0 / nf).ln() <= j + 1e-12, "{f} {n}");
        let upper = log_peak + (p.t0 / (nf - 1.0).sqrt()).ln() + (1.1 * (2.0 * std::f64::consts::PI).sqrt()).ln();
        assert!(j <= upper, "{f} {n}");
        let r = (j - log_peak - (p.lambda * p.t0).ln()).exp();
        assert!((0.2..=5.0).contains(&r), "{f} {n}: {r}");
        let e = (p.log_j_n - j).exp();
        assert_eq!(e, p.mean_norm);
        assert!((0.5..=2.0).contains(&(e / p.t0)), "{f} {n}");
        assert!(p.norm_cv > 0.0 && p.norm_cv < 1.0);
        assert!(p.lambda_in_range(), "{f} {n}");
    }
}

#[test]
fn lambda_scaling() {
    for n in DIMS {
        let ball = Measure::from_spec("ball", n).unwrap();
        let s = ball.params().lambda * n as f64;
        assert!((0.5..=2.0).contains(&s), "ball {n}: {s}");
        let g = Measure::from_spec("gaussian", n).unwrap();
        let s = g.params().lambda * (n as f64).sqrt();
        assert!((1.0..=3.0).contains(&s), "gaussian {n}: {s}");
    }
}

#[test]
fn far_tail_is_negligible() {
    for (f, n, m) in grid() {
        let p = *m.params();
        let upper = m.model().radial_upper().max(5.0 * p.t0);
        let tail = integrate_log(
            &LogIntegrand::new(|t| m.log_g(n - 2, t), 5.0 * p.t0, upper),
            DEFAULT_REL_TOL,
        )
        .unwrap();
        assert!(tail <= -(n as f64) + p.log_j_nm2, "{f} {n}");
    }
}

#[test]
fn logconcave_tail_on_random_pairs() {
    let mut rng = chunk_stream(2024, 0, 0);
    for (f, n, m) in grid() {
        if f == "ball" {
            continue;
        }
        let t0 = m.params().t0;
        let g = LogIntegrand::new(|t| m.log_g(n - 1, t), 0.0, f64::INFINITY);
        let drop = |t: f64| m.log_g(n - 1, t0) - m.log_g(n - 1, t);
        for _ in 0..100 {
            let (side, x, edge) = if rng.random::<bool>() {
                let x = rng.random_range(0.01..1.0);
                (TailSide::Outer, x, t0 * (1.0 + x))
            } else {
                let x = rng.random_range(0.01..0.99);
                (TailSide::Inner, x, t0 * (1.0 - x))
            };
            let d = drop(edge);
            if d <= 0.0 {
                continue;
            }
            let psi = d * rng.random_range(0.05..1.0);
            let c = check_logconcave_tail(&g, t0, x, psi, side).unwrap();
            assert!(c.holds, "{f} {n} x={x} psi={psi}: {c:?}");
        }
    }
}

#[test]
fn potentials_are_convex_and_consistent() {
    for f in ["gaussian", "power:1", "power:1.5", "power:3", "power:4"] {
        let pot: polysurf_core::RadialPotential = f.parse().unwrap();
        assert_eq!(pot.value(0.0), 0.0);
        let h = 1e-3;
        let mut last_slope = f64::NEG_INFINITY;
        for i in 1..200 {
            let t = 0.05 * i as f64;
            let slope = (pot.value(t + h) - pot.value(t)) / h;
            assert!(slope >= last_slope - 1e-9, "{f} at {t}");
            last_slope = slope;
            let central = (pot.value(t + 1e-6) - pot.value(t - 1e-6)) / 2e-6;
            assert!((central - pot.derivative(t)).abs() <= 1e-6 * pot.derivative(t).abs().max(1.0));
        }
    }
}

#[test]
fn cap_probability_below_annulus_envelope() {
    for n in [10usize, 20, 50, 100] {
        let m = Measure::from_spec("gaussian", n).unwrap();
        let p = *m.params();
        for e in 2..=12 {
            let Ok(rho) = solve_rho(&m, 1 << e) else { continue };
            let env = 10.0 * (p.t0 / ((n as f64).sqrt() * rho))
                * (1.0 - (rho / (p.t0 * (1.0 + p.lambda))).powi(2)).powf(0.5 * (n as f64 - 3.0));
            for i in 0..=10 {
                let t = p.t0 * (1.0 - p.lambda + 0.2 * p.lambda * i as f64);
                let c = cap_probability(n, t, rho).unwrap();
                assert!(c <= env, "n={n} K=2^{e} t={t}: {c} > {env}");
            }
        }
    }
}

#[test]
fn expectation_sandwich() {
    for f in ["gaussian", "power:1", "power:3"] {
        let m = Measure::from_spec(f, 20).unwrap();
        for k in [4usize, 32, 256] {
            let rho = solve_rho(&m, k).unwrap();
            let exact = expected_surface_exact(&m, k, rho).unwrap();
            let restricted = expected_surface_annulus(&m, k, rho).unwrap();
            let ceiling = k as f64 * hyperplane_measure(&m, rho).unwrap().value;
            assert!(restricted <= exact && exact <= ceiling * (1.0 + 1e-10), "{f} {k}");
        }
    }
}

#[test]
fn oracle_agreement_small_fixtures() {
    for f in ["gaussian", "power:1", "power:3"] {
        for n in [3usize, 8] {
            let m = Measure::from_spec(f, n).unwrap();
            let s = m.params().t0 / (n as f64).sqrt();
            let est = SurfaceEstimator::new(&m);
            let shapes = [
                Polytope::standard_shape(StandardShape::Cube, n, s).unwrap(),
                Polytope::standard_shape(StandardShape::Simplex, n, s).unwrap(),
                Polytope::circumscribed_random(n, 6, 1.3 * s, 11).unwrap(),
            ];
            for p in &shapes {
                let a = est.surface_mc(p, 20_000, 5).unwrap();
                let b = est.shell_oracle_default(p, 50_000, 5).unwrap().estimate;
                assert!(
                    (a.value - b.value).abs() <= 4.0 * a.stderr.hypot(b.stderr),
                    "{f} n={n}: {a:?} {b:?}"
                );
            }
        }
    }
}

#[test]
fn adding_halfspaces_never_grows_volume() {
    let m = Measure::from_spec("gaussian", 4).unwrap();
    let est = SurfaceEstimator::new(&m);
    let mut hs = Vec::new();
    let mut last = 1.0;
    let mut rng = chunk_stream(3, 0, 0);
    for _ in 0..6 {
        let mut u = [0.0; 4];
        polysurf_core::random::uniform_direction(&mut rng, &mut u);
        hs.push(Halfspace::new(u.to_vec(), 0.8).unwrap());
        let v = est
            .volume_mc(&Polytope::new(4, hs.clone()).unwrap(), 40_000, 8)
            .unwrap();
        assert!(v.value <= last + 4.0 * v.stderr);
        last = v.value;
    }
}

#[test]
fn bounds_monotone_in_k() {
    let m = Measure::from_spec("gaussian", 10_000).unwrap();
    let p = *m.params();
    let ks: Vec<f64> = (1..=40).map(|i| 2f64.powf(0.25 * i as f64 + 1.0)).collect();
    for w in ks.windows(2) {
        assert!(nazarov_upper(w[1]).unwrap().value > nazarov_upper(w[0]).unwrap().value);
        assert!(gamma_p_upper(50, 3.0, w[1]).unwrap().value > gamma_p_upper(50, 3.0, w[0]).unwrap().value);
        let (a, b) = (thm_upper(&p, w[0], 1.0).unwrap(), thm_upper(&p, w[1], 1.0).unwrap());
        if p.lambda * w[1].ln() < (-2.0f64).exp() {
            assert!(b.value > a.value);
        }
    }
}

#[test]
fn estimates_ignore_thread_count() {
    let m = Measure::from_spec("power:3", 7).unwrap();
    let p = Polytope::circumscribed_random(7, 24, 0.9, 1).unwrap();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                let est = SurfaceEstimator::new(&m);
                (
                    est.pooled_surface_mc(&p, 30_000, 2).unwrap(),
                    est.volume_mc(&p, 30_000, 2).unwrap(),
                )
            })
    };
    assert_eq!(run(1), run(3));
}
