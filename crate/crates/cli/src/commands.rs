use std::fmt::Write as _;

use polysurf_core::extremal::{Allocation, ExtremalRow, EXTREMAL_CSV_HEADER};
use polysurf_core::measure::PARAMS_CSV_HEADER;
use polysurf_core::surface::{
    default_shell_eps, hyperplane_measure, polygon_exact_2d, SurfaceEstimator, SURFACE_CSV_HEADER,
};
use polysurf_core::{Error as CoreError, Measure, Polytope};

use crate::fit::{fit_scaling, ScalingFit};
use crate::{ExperimentConfig, Result};

/// Parameter table, one row per requested `(family, n)`.
pub fn cmd_params(cfg: &ExperimentConfig) -> Result<String> {
    cfg.validate()?;
    let mut out = format!("{PARAMS_CSV_HEADER}\n");
    for family in &cfg.families {
        for &n in &cfg.n {
            let m = Measure::from_spec(family, n)?;
            if !m.params().lambda_in_range() {
                log::warn!("{family} n={n}: λ = {} outside the expected range", m.params().lambda);
            }
            out.push_str(&m.params().csv_row(&m.family()));
            out.push('\n');
        }
    }
    Ok(out)
}

/// All applicable estimators on one polytope given in the text format of
/// [`Polytope::parse`]. The dimension comes from the file; the family is the
/// first configured one.
pub fn cmd_surface(cfg: &ExperimentConfig, polytope_text: &str) -> Result<String> {
    cfg.validate()?;
    let (p, warnings) = Polytope::parse(polytope_text)?;
    for w in warnings {
        log::warn!("{w}");
    }
    let m = Measure::from_spec(&cfg.families[0], p.dim())?;
    let (n, k, seed) = (p.dim(), p.facet_count(), cfg.seed);
    let family = m.family();
    let est = SurfaceEstimator::new(&m);
    let mut out = format!("{SURFACE_CSV_HEADER}\n");
    let mut row = |e: polysurf_core::SurfaceEstimate| {
        out.push_str(&e.csv_row(&family, n, k, seed));
        out.push('\n');
    };
    row(est.surface_mc(&p, cfg.samples, seed)?);
    let (coarse, fine) = match cfg.epsilon {
        Some(e) => (2.0 * e, e),
        None => default_shell_eps(&m),
    };
    let shell = est.shell_oracle_mc(&p, coarse, fine, cfg.samples, seed)?;
    if shell.unreliable() {
        log::warn!(
            "shell estimate unreliable: {} of {} distances did not converge",
            shell.nonconverged,
            shell.candidates
        );
    }
    row(shell.estimate);
    if k == 1 {
        row(hyperplane_measure(&m, p.halfspaces()[0].offset())?);
    }
    if n == 2 {
        row(polygon_exact_2d(&m, &p)?);
    }
    Ok(out)
}

/// Sweep rows and fit for one `(family, n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSeries {
    pub family: String,
    pub n: usize,
    pub rows: Vec<ExtremalRow>,
    /// Fit of `expected_exact` over rows inside `K <= exp(c/λ)`.
    pub fit: Option<ScalingFit>,
    /// `K` values with no admissible offset.
    pub skipped: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub csv: String,
    pub series: Vec<SweepSeries>,
}

impl SweepOutput {
    /// Human-readable fit lines.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        for series in &self.series {
            let flagged: Vec<String> = series
                .rows
                .iter()
                .filter(|r| !r.in_range)
                .map(|r| r.k.to_string())
                .collect();
            let _ = match series.fit {
                Some(f) => write!(
                    s,
                    "{} n={}: exponent {:.4}, intercept {:.4}, residual {:.4} over {} points",
                    series.family, series.n, f.exponent, f.intercept, f.residual, f.points
                ),
                None => write!(s, "{} n={}: too few in-range points to fit", series.family, series.n),
            };
            if !flagged.is_empty() {
                let _ = write!(s, "; out of range K: {}", flagged.join(" "));
            }
            if !series.skipped.is_empty() {
                let skipped: Vec<String> = series.skipped.iter().map(|k| k.to_string()).collect();
                let _ = write!(s, "; no offset for K: {}", skipped.join(" "));
            }
            s.push('\n');
        }
        s
    }
}

/// For each `K`: the offset, the exact expected surface, and the Monte Carlo
/// mean over `trials` sampled polytopes, each estimated from `samples` pooled
/// facet points.
pub fn cmd_extremal_sweep(cfg: &ExperimentConfig) -> Result<SweepOutput> {
    cfg.validate()?;
    let mut csv = format!("{EXTREMAL_CSV_HEADER}\n");
    let mut series = Vec::new();
    for family in &cfg.families {
        for &n in &cfg.n {
            let m = Measure::from_spec(family, n)?;
            let mut rows = Vec::new();
            let mut skipped = Vec::new();
            for &k in &cfg.k_list {
                match ExtremalRow::compute(&m, k, cfg.c_range, cfg.trials, Allocation::Pooled(cfg.samples), cfg.seed) {
                    Ok(row) => {
                        csv.push_str(&row.csv_row());
                        csv.push('\n');
                        rows.push(row);
                    }
                    Err(CoreError::Range(msg) | CoreError::InvalidArgument(msg)) => {
                        log::warn!("{family} n={n} K={k}: {msg}");
                        skipped.push(k);
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            let points: Vec<(usize, f64)> = rows
                .iter()
                .filter(|r| r.in_range)
                .map(|r| (r.k, r.expected_exact))
                .collect();
            series.push(SweepSeries {
                family: m.family(),
                n,
                fit: fit_scaling(&points),
                rows,
                skipped,
            });
        }
    }
    Ok(SweepOutput { csv, series })
}
