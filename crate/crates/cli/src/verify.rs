//! One-shot invariant suite behind `polysurf verify`.

use std::fmt;

use polysurf_core::bounds::{gamma_p_upper, nazarov_upper, thm_upper};
use polysurf_core::extremal::{expected_surface_exact, Allocation, random_polytope_surface_mc, solve_rho};
use polysurf_core::numerics::{integrate_log, LogIntegrand, DEFAULT_REL_TOL};
use polysurf_core::surface::{polygon_exact_2d, hyperplane_measure, SurfaceEstimate, SurfaceEstimator};
use polysurf_core::{Halfspace, Measure, Polytope};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::fixtures::standard_fixtures;
use crate::{ExperimentConfig, Result};

pub const WINDOW_FAMILIES: [&str; 7] =
    ["gaussian", "power:1", "power:1.5", "power:2", "power:3", "power:4", "ball"];
pub const WINDOW_DIMS: [usize; 6] = [5, 10, 20, 50, 100, 200];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Adds a polytope with a non-unit normal to the fixture set.
    pub inject_bad_normal: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail)?;
        }
        let passed = self.checks.iter().filter(|c| c.pass).count();
        writeln!(f, "{passed} of {} checks passed", self.checks.len())
    }
}

fn check(name: &'static str, pass: bool, detail: String) -> Check {
    Check { name, pass, detail }
}

/// Two estimates agree within `k` combined standard errors.
pub fn agree(a: &SurfaceEstimate, b: &SurfaceEstimate, k: f64) -> bool {
    (a.value - b.value).abs() <= k * a.stderr.hypot(b.stderr)
}

/// `φ(Φ⁻¹(v))`, the Gaussian isoperimetric profile.
pub fn isoperimetric_profile(v: f64) -> f64 {
    let z = Normal::standard();
    if v <= 0.0 || v >= 1.0 {
        return 0.0;
    }
    z.pdf(z.inverse_cdf(v))
}

/// Ratios of the radial windows over one measure: lower and upper radial
/// integral bounds, `J_{n-1}/(λ t0 g(t0))`, `J_n/(J_{n-1} t0)`, and the
/// family-specific λ scaling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialWindows {
    pub main_lower: f64,
    pub main_upper: f64,
    pub int_lambda: f64,
    pub moment: f64,
    pub lambda_scale: Option<f64>,
    /// `ln(∫_{5 t0}^∞ g_{n-2} / (e^{-n} J_{n-2}))`.
    pub log_tail_ratio: f64,
}

impl RadialWindows {
    pub fn compute(m: &Measure) -> polysurf_core::Result<Self> {
        let p = m.params();
        let n = p.n;
        let nf = n as f64;
        let lg = m.log_g(n - 1, p.t0);
        let j = p.log_j_nm1;
        let upper = m.model().radial_upper().max(5.0 * p.t0);
        let tail = integrate_log(
            &LogIntegrand::new(|t| m.log_g(n - 2, t), 5.0 * p.t0, upper),
            DEFAULT_REL_TOL,
        )?;
        let lambda_scale = match m.model().potential().family() {
            polysurf_core::measure::Family::Ball => Some(p.lambda * nf),
            polysurf_core::measure::Family::Gaussian => Some(p.lambda * nf.sqrt()),
            _ => None,
        };
        Ok(Self {
            main_lower: (lg + (p.t0 / nf).ln() - j).exp(),
            main_upper: (j - lg - (p.t0 / (nf - 1.0).sqrt()).ln()).exp()
                / ((2.0 * std::f64::consts::PI).sqrt() * 1.1),
            int_lambda: (j - lg - (p.lambda * p.t0).ln()).exp(),
            moment: p.mean_norm / p.t0,
            lambda_scale,
            log_tail_ratio: tail + nf - p.log_j_nm2,
        })
    }

    pub fn holds(&self, family: polysurf_core::measure::Family) -> bool {
        use polysurf_core::measure::Family;
        let scale_ok = match (family, self.lambda_scale) {
            (Family::Ball, Some(s)) => (0.5..=2.0).contains(&s),
            (Family::Gaussian, Some(s)) => (1.0..=3.0).contains(&s),
            _ => true,
        };
        self.main_lower <= 1.0 + 1e-9
            && self.main_upper <= 1.0
            && (0.2..=5.0).contains(&self.int_lambda)
            && (0.5..=2.0).contains(&self.moment)
            && self.log_tail_ratio <= 0.0
            && scale_ok
    }
}

pub fn cmd_verify(cfg: &ExperimentConfig, opts: VerifyOptions) -> Result<VerifyReport> {
    cfg.validate()?;
    let mut checks = Vec::new();

    let mut worst = 0.0f64;
    for n in 2..=200 {
        let m = Measure::from_spec("gaussian", n)?;
        let want = -0.5 * n as f64 * (2.0 * std::f64::consts::PI).ln();
        worst = worst.max((m.params().log_c_n / want - 1.0).abs());
    }
    checks.push(check(
        "measure.gaussian_normalization",
        worst <= 1e-10,
        format!("max relative error {worst:.3e} over n = 2..200"),
    ));

    let g = hyperplane_measure(&Measure::from_spec("gaussian", 20)?, 0.0)?.value;
    let b = hyperplane_measure(&Measure::from_spec("ball", 3)?, 0.0)?.value;
    checks.push(check(
        "surface.hyperplane_closed_form",
        (g - 0.398_942_280_401_432_7).abs() <= 1e-8 && (b - 0.75).abs() <= 1e-8,
        format!("gaussian {g:.10}, ball {b:.10}"),
    ));

    let mut t0_err = 0.0f64;
    let mut li_err = 0.0f64;
    for n in WINDOW_DIMS {
        let m = Measure::from_spec("gaussian", n)?;
        t0_err = t0_err.max((m.params().t0 - ((n - 1) as f64).sqrt()).abs());
        let ball = Measure::from_spec("ball", n)?;
        let want = 1.0 - (-1.0 / (n as f64 - 1.0)).exp();
        li_err = li_err.max((ball.params().lambda_i - want).abs());
    }
    checks.push(check(
        "measure.solvers",
        t0_err <= 1e-9 && li_err <= 1e-8,
        format!("gaussian t0 error {t0_err:.3e}, ball lambda_i error {li_err:.3e}"),
    ));

    let mut bad = Vec::new();
    for family in WINDOW_FAMILIES {
        for n in WINDOW_DIMS {
            let m = Measure::from_spec(family, n)?;
            if !RadialWindows::compute(&m)?.holds(m.model().potential().family()) {
                bad.push(format!("{family}/{n}"));
            }
        }
    }
    checks.push(check(
        "measure.lemma_windows",
        bad.is_empty(),
        if bad.is_empty() {
            format!("{} models", WINDOW_FAMILIES.len() * WINDOW_DIMS.len())
        } else {
            format!("violated for {}", bad.join(" "))
        },
    ));

    let mut fixtures: Vec<(usize, String, Polytope)> = Vec::new();
    for n in [2usize, 3, 8] {
        let m = Measure::from_spec("gaussian", n)?;
        for (name, p) in standard_fixtures(&m, cfg.seed)? {
            fixtures.push((n, name, p));
        }
    }
    if opts.inject_bad_normal {
        let p = Polytope::new(3, vec![Halfspace::unchecked(vec![1.5, 0.0, 0.0], 1.0)])?;
        fixtures.push((3, "injected".into(), p));
    }
    let defect = fixtures
        .iter()
        .map(|(_, _, p)| p.max_normal_defect())
        .fold(0.0, f64::max);
    let normals_ok = defect <= 1e-10;
    checks.push(check(
        "polytope.unit_normals",
        normals_ok,
        format!("max normal defect {defect:.3e}"),
    ));

    let mut oracle_bad = Vec::new();
    let mut iso_bad = Vec::new();
    let mut envelope_worst = 0.0f64;
    let mut measured = 0usize;
    for (n, name, p) in &fixtures {
        if p.max_normal_defect() > 1e-10 {
            continue;
        }
        let m = Measure::from_spec("gaussian", *n)?;
        let est = SurfaceEstimator::new(&m);
        let facet = est.surface_mc(p, cfg.samples, cfg.seed)?;
        let shell = est.shell_oracle_default(p, cfg.samples.max(10_000), cfg.seed)?.estimate;
        let mut ok = agree(&facet, &shell, 4.0);
        if *n == 2 {
            let exact = polygon_exact_2d(&m, p)?;
            ok &= agree(&facet, &exact, 4.0) && agree(&shell, &exact, 4.0);
        }
        if !ok {
            oracle_bad.push(format!("{name}/{n}"));
        }
        let vol = est.volume_mc(p, cfg.samples.max(10_000), cfg.seed)?;
        if facet.value + 4.0 * facet.stderr < isoperimetric_profile(vol.value) {
            iso_bad.push(format!("{name}/{n}"));
        }
        envelope_worst = envelope_worst.max(facet.value / (0.64 * (*n as f64).powf(0.25) * 1.05));
        measured += 1;
    }
    checks.push(check(
        "surface.oracle_agreement",
        oracle_bad.is_empty(),
        if oracle_bad.is_empty() {
            format!("{measured} fixtures within 4 combined stderr")
        } else {
            format!("disagreement on {}", oracle_bad.join(" "))
        },
    ));
    checks.push(check(
        "surface.gaussian_isoperimetry",
        iso_bad.is_empty(),
        if iso_bad.is_empty() {
            format!("{measured} fixtures above the profile")
        } else {
            format!("below the profile on {}", iso_bad.join(" "))
        },
    ));
    checks.push(check(
        "surface.gaussian_envelope",
        envelope_worst <= 1.0,
        format!("max ratio to 0.64 n^(1/4) (1.05) is {envelope_worst:.4}"),
    ));

    let m = Measure::from_spec("gaussian", 10)?;
    let rho = solve_rho(&m, 16)?;
    let exact = expected_surface_exact(&m, 16, rho)?;
    let (mean, se) = random_polytope_surface_mc(
        &m,
        16,
        rho,
        cfg.trials.max(20),
        Allocation::PerFacet(cfg.samples.min(5_000)),
        cfg.seed,
    )?;
    checks.push(check(
        "extremal.expectation_vs_mc",
        (mean - exact).abs() <= 4.0 * se,
        format!("exact {exact:.6}, mc {mean:.6} ± {se:.6}"),
    ));

    let mut gp_err = 0.0f64;
    for k in [2.0, 16.0, 4096.0] {
        gp_err = gp_err.max((gamma_p_upper(50, 2.0, k)?.value - nazarov_upper(k)?.value).abs());
    }
    checks.push(check(
        "bounds.gamma_p_consistency",
        gp_err == 0.0,
        format!("max difference {gp_err:.3e}"),
    ));

    let m = Measure::from_spec("gaussian", 200)?;
    let (mut lo, mut hi, mut count) = (f64::INFINITY, 0.0f64, 0);
    for e in 2..=12 {
        let k = 1usize << e;
        let t = thm_upper(m.params(), k as f64, cfg.c_range)?;
        if !t.valid {
            continue;
        }
        let rho = solve_rho(&m, k)?;
        let r = expected_surface_exact(&m, k, rho)? / t.value;
        lo = lo.min(r);
        hi = hi.max(r);
        count += 1;
    }
    checks.push(check(
        "bounds.thm_upper_window",
        count > 0 && lo >= 0.1 && hi <= 10.0,
        format!("ratio range [{lo:.4}, {hi:.4}] over {count} valid K"),
    ));

    Ok(VerifyReport { checks })
}
