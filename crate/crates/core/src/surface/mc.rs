//! Monte Carlo surface and volume estimators.
//!
//! Every estimator splits its samples into fixed-size chunks with one random
//! stream per chunk (see [`crate::random`]) and reduces integer counts, so a
//! given seed produces identical results for any number of worker threads.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rand::Rng;
use rayon::prelude::*;

use super::exact::{hyperplane_measure, slice_upper};
use super::{Method, SurfaceEstimate};
use crate::error::{Error, Result};
use crate::measure::Measure;
use crate::numerics::{build_quantile_table, LogIntegrand, QuantileTable, DEFAULT_NODES};
use crate::polytope::{dot, Polytope, DEFAULT_DISTANCE_TOL, DEFAULT_MAX_CYCLES};
use crate::random::{chunk_stream, chunks, uniform_direction};

const SHELL_LANE: u64 = u64::MAX - 1;
const VOLUME_LANE: u64 = u64::MAX - 2;
const POOLED_LANE: u64 = u64::MAX - 3;

/// Minimum sample counts accepted by the estimators.
pub const MIN_FACET_SAMPLES: usize = 1_000;
pub const MIN_SHELL_SAMPLES: usize = 10_000;

/// Surface estimators bound to one measure, caching the in-plane radial
/// samplers by hyperplane distance.
pub struct SurfaceEstimator<'a> {
    measure: &'a Measure,
    tables: Mutex<HashMap<u64, Arc<QuantileTable>>>,
}

/// Result of [`SurfaceEstimator::shell_oracle_mc`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShellReport {
    /// Richardson-extrapolated estimate.
    pub estimate: SurfaceEstimate,
    /// Raw shell quotients at the coarse and fine widths.
    pub coarse: f64,
    pub fine: f64,
    pub eps_coarse: f64,
    pub eps_fine: f64,
    /// Points that needed an exact distance, and how many of those did not
    /// converge within the cycle cap.
    pub candidates: u64,
    pub nonconverged: u64,
}

impl ShellReport {
    /// More than 0.1% of the exact-distance evaluations failed to converge.
    pub fn unreliable(&self) -> bool {
        self.nonconverged * 1000 > self.candidates
    }
}

/// A Monte Carlo estimate of a probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl MassEstimate {
    fn from_count(hits: u64, samples: usize) -> Self {
        let f = hits as f64 / samples as f64;
        Self {
            value: f,
            stderr: (f * (1.0 - f) / samples as f64).sqrt(),
            samples,
        }
    }
}

impl<'a> SurfaceEstimator<'a> {
    pub fn new(measure: &'a Measure) -> Self {
        Self {
            measure,
            tables: Mutex::new(HashMap::new()),
        }
    }

    pub fn measure(&self) -> &Measure {
        self.measure
    }

    /// Sampler of the in-plane radius on a hyperplane at distance `rho`:
    /// density `∝ s^{n-2} exp(-φ(sqrt(s² + ρ²)))`.
    fn slice_table(&self, rho: f64) -> Result<Arc<QuantileTable>> {
        let key = rho.to_bits();
        if let Some(t) = self.tables.lock().expect("table cache").get(&key) {
            return Ok(Arc::clone(t));
        }
        let m = self.measure;
        let k = m.dim() - 2;
        let pot = m.model().potential();
        let density = LogIntegrand::new(
            |s: f64| {
                let base = -pot.value(s.hypot(rho));
                if k == 0 {
                    base
                } else if s <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    k as f64 * s.ln() + base
                }
            },
            0.0,
            slice_upper(m, rho),
        );
        let table = Arc::new(build_quantile_table(&density, DEFAULT_NODES)?);
        self.tables
            .lock()
            .expect("table cache")
            .insert(key, Arc::clone(&table));
        Ok(table)
    }

    /// Measure of facet `i`: the hyperplane measure times the probability
    /// that a point drawn from the measure restricted to the hyperplane
    /// satisfies the other constraints.
    pub fn facet_measure_mc(
        &self,
        p: &Polytope,
        i: usize,
        samples: usize,
        seed: u64,
    ) -> Result<SurfaceEstimate> {
        check_dims(self.measure, p)?;
        if samples < MIN_FACET_SAMPLES {
            return Err(Error::InvalidArgument(format!(
                "facet estimator needs at least {MIN_FACET_SAMPLES} samples, got {samples}"
            )));
        }
        let h = p.halfspaces().get(i).ok_or_else(|| {
            Error::InvalidArgument(format!("facet index {i} out of range"))
        })?;
        let rho = h.offset().abs();
        let plane = hyperplane_measure(self.measure, rho)?.value;
        if plane == 0.0 {
            return Ok(SurfaceEstimate {
                value: 0.0,
                stderr: 0.0,
                samples,
                method: Method::FacetMc,
            });
        }
        if p.facet_count() == 1 {
            return Ok(SurfaceEstimate {
                value: plane,
                stderr: 0.0,
                samples,
                method: Method::FacetMc,
            });
        }
        let table = self.slice_table(rho)?;
        let n = p.dim();
        let u = h.normal();
        let foot: Vec<f64> = u.iter().map(|x| x * h.offset()).collect();
        let accepted: u64 = chunks(samples)
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|(c, len)| {
                let mut rng = chunk_stream(seed, i as u64, c);
                let mut w = vec![0.0; n];
                let mut x = vec![0.0; n];
                let mut hits = 0u64;
                for _ in 0..len {
                    in_plane_direction(&mut rng, u, &mut w);
                    let s = table.sample(&mut rng);
                    for j in 0..n {
                        x[j] = foot[j] + s * w[j];
                    }
                    if p.satisfies_except(&x, i) {
                        hits += 1;
                    }
                }
                hits
            })
            .sum();
        let f = accepted as f64 / samples as f64;
        Ok(SurfaceEstimate {
            value: plane * f,
            stderr: plane * (f * (1.0 - f) / samples as f64).sqrt(),
            samples,
            method: Method::FacetMc,
        })
    }

    /// Surface measure from one pool of `samples` points: the facet is drawn
    /// with probability proportional to its hyperplane measure, then a point
    /// on that hyperplane is accepted or rejected as in
    /// [`facet_measure_mc`](Self::facet_measure_mc). Costs `O(samples · K n)`
    /// instead of `O(samples · K² n)` when many facets are present.
    pub fn pooled_surface_mc(&self, p: &Polytope, samples: usize, seed: u64) -> Result<SurfaceEstimate> {
        check_dims(self.measure, p)?;
        if samples < MIN_FACET_SAMPLES {
            return Err(Error::InvalidArgument(format!(
                "pooled estimator needs at least {MIN_FACET_SAMPLES} samples, got {samples}"
            )));
        }
        let hs = p.halfspaces();
        let mut cumulative = Vec::with_capacity(hs.len());
        let mut tables = Vec::with_capacity(hs.len());
        let mut total = 0.0;
        for h in hs {
            let rho = h.offset().abs();
            let plane = hyperplane_measure(self.measure, rho)?.value;
            total += plane;
            cumulative.push(total);
            tables.push(if plane > 0.0 { Some(self.slice_table(rho)?) } else { None });
        }
        if total == 0.0 {
            return Ok(SurfaceEstimate {
                value: 0.0,
                stderr: 0.0,
                samples,
                method: Method::FacetMc,
            });
        }
        let n = p.dim();
        let accepted: u64 = chunks(samples)
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|(c, len)| {
                let mut rng = chunk_stream(seed, POOLED_LANE, c);
                let mut w = vec![0.0; n];
                let mut x = vec![0.0; n];
                let mut hits = 0u64;
                for _ in 0..len {
                    let target = rng.random::<f64>() * total;
                    let i = cumulative
                        .partition_point(|&c| c <= target)
                        .min(hs.len() - 1);
                    let Some(table) = &tables[i] else { continue };
                    let u = hs[i].normal();
                    in_plane_direction(&mut rng, u, &mut w);
                    let s = table.sample(&mut rng);
                    for j in 0..n {
                        x[j] = u[j] * hs[i].offset() + s * w[j];
                    }
                    if p.satisfies_except(&x, i) {
                        hits += 1;
                    }
                }
                hits
            })
            .sum();
        let f = accepted as f64 / samples as f64;
        Ok(SurfaceEstimate {
            value: total * f,
            stderr: total * (f * (1.0 - f) / samples as f64).sqrt(),
            samples,
            method: Method::FacetMc,
        })
    }

    /// Sum of facet estimates with standard errors combined in quadrature.
    pub fn surface_mc(&self, p: &Polytope, samples_per_facet: usize, seed: u64) -> Result<SurfaceEstimate> {
        let mut value = 0.0;
        let mut var = 0.0;
        for i in 0..p.facet_count() {
            let e = self.facet_measure_mc(p, i, samples_per_facet, seed)?;
            value += e.value;
            var += e.stderr * e.stderr;
        }
        Ok(SurfaceEstimate {
            value,
            stderr: var.sqrt(),
            samples: samples_per_facet * p.facet_count(),
            method: Method::FacetMc,
        })
    }

    /// Minkowski quotient `γ((P + εB) \ P) / ε` at two widths, combined by
    /// Richardson extrapolation `(ε₁ q(ε₂) - ε₂ q(ε₁)) / (ε₁ - ε₂)`, which is
    /// `2 q(ε₂) - q(ε₁)` for `ε₁ = 2 ε₂`.
    pub fn shell_oracle_mc(
        &self,
        p: &Polytope,
        eps_coarse: f64,
        eps_fine: f64,
        samples: usize,
        seed: u64,
    ) -> Result<ShellReport> {
        let m = self.measure;
        check_dims(m, p)?;
        let cap = m.params().t0 / (4.0 * (m.dim() as f64).sqrt());
        if !(eps_fine > 0.0 && eps_coarse > eps_fine && eps_coarse <= cap) {
            return Err(Error::InvalidArgument(format!(
                "need 0 < eps_fine < eps_coarse <= {cap}, got ({eps_coarse}, {eps_fine})"
            )));
        }
        if samples < MIN_SHELL_SAMPLES {
            return Err(Error::InvalidArgument(format!(
                "shell estimator needs at least {MIN_SHELL_SAMPLES} samples, got {samples}"
            )));
        }
        let table = m.radial_table()?;
        let n = m.dim();
        let counts = chunks(samples)
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|(c, len)| {
                let mut rng = chunk_stream(seed, SHELL_LANE, c);
                let mut x = vec![0.0; n];
                let mut acc = [0u64; 4];
                for _ in 0..len {
                    m.sample_point(table, &mut rng, &mut x);
                    let viol = p.max_violation_unchecked(&x);
                    if viol <= 0.0 || viol > eps_coarse {
                        continue;
                    }
                    let d = p
                        .distance(&x, DEFAULT_DISTANCE_TOL, DEFAULT_MAX_CYCLES)
                        .expect("dimension checked");
                    acc[2] += 1;
                    if !d.converged {
                        acc[3] += 1;
                    }
                    if d.value <= eps_fine {
                        acc[0] += 1;
                    } else if d.value <= eps_coarse {
                        acc[1] += 1;
                    }
                }
                acc
            })
            .reduce(|| [0u64; 4], |a, b| [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]);
        let [fine_hits, band_hits, candidates, nonconverged] = counts;
        let total = samples as f64;
        let (e1, e2) = (eps_coarse, eps_fine);
        let a = e1 / (e2 * (e1 - e2));
        let b = e2 / (e1 * (e1 - e2));
        let p_fine = fine_hits as f64 / total;
        let p_band = band_hits as f64 / total;
        let mean = (a - b) * p_fine - b * p_band;
        let second = (a - b) * (a - b) * p_fine + b * b * p_band;
        let var = (second - mean * mean).max(0.0);
        let report = ShellReport {
            estimate: SurfaceEstimate {
                value: mean.max(0.0),
                stderr: (var / total).sqrt(),
                samples,
                method: Method::ShellMc,
            },
            coarse: (p_fine + p_band) / e1,
            fine: p_fine / e2,
            eps_coarse,
            eps_fine,
            candidates,
            nonconverged,
        };
        if report.unreliable() {
            log::warn!(
                "shell estimator: {nonconverged} of {candidates} distance evaluations did not converge"
            );
        }
        Ok(report)
    }

    /// Shell estimate at the default widths `ε₂ = 0.01 t0 / sqrt(n)`, `ε₁ = 2 ε₂`.
    pub fn shell_oracle_default(&self, p: &Polytope, samples: usize, seed: u64) -> Result<ShellReport> {
        let (coarse, fine) = default_shell_eps(self.measure);
        self.shell_oracle_mc(p, coarse, fine, samples, seed)
    }

    /// `γ(P)` by direct sampling.
    pub fn volume_mc(&self, p: &Polytope, samples: usize, seed: u64) -> Result<MassEstimate> {
        let m = self.measure;
        check_dims(m, p)?;
        if samples == 0 {
            return Err(Error::InvalidArgument("volume estimator needs samples".into()));
        }
        let table = m.radial_table()?;
        let n = m.dim();
        let hits: u64 = chunks(samples)
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|(c, len)| {
                let mut rng = chunk_stream(seed, VOLUME_LANE, c);
                let mut x = vec![0.0; n];
                (0..len)
                    .filter(|_| {
                        m.sample_point(table, &mut rng, &mut x);
                        p.max_violation_unchecked(&x) <= 0.0
                    })
                    .count() as u64
            })
            .sum();
        Ok(MassEstimate::from_count(hits, samples))
    }
}

/// `(ε₁, ε₂)` with `ε₂ = 0.01 t0 / sqrt(n)` and `ε₁ = 2 ε₂`.
pub fn default_shell_eps(measure: &Measure) -> (f64, f64) {
    let fine = 0.01 * measure.params().t0 / (measure.dim() as f64).sqrt();
    (2.0 * fine, fine)
}

fn check_dims(m: &Measure, p: &Polytope) -> Result<()> {
    if m.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            got: p.dim(),
        });
    }
    Ok(())
}

/// Uniform unit vector orthogonal to the unit vector `u`.
fn in_plane_direction<R: rand::Rng + ?Sized>(rng: &mut R, u: &[f64], out: &mut [f64]) {
    loop {
        uniform_direction(rng, out);
        let c = dot(out, u);
        out.iter_mut().zip(u).for_each(|(x, v)| *x -= c * v);
        let l = dot(out, out).sqrt();
        if l > 1e-8 {
            out.iter_mut().for_each(|x| *x /= l);
            return;
        }
    }
}

pub fn facet_measure_mc(
    measure: &Measure,
    p: &Polytope,
    i: usize,
    samples: usize,
    seed: u64,
) -> Result<SurfaceEstimate> {
    SurfaceEstimator::new(measure).facet_measure_mc(p, i, samples, seed)
}

pub fn surface_mc(
    measure: &Measure,
    p: &Polytope,
    samples_per_facet: usize,
    seed: u64,
) -> Result<SurfaceEstimate> {
    SurfaceEstimator::new(measure).surface_mc(p, samples_per_facet, seed)
}

pub fn shell_oracle_mc(
    measure: &Measure,
    p: &Polytope,
    eps_coarse: f64,
    eps_fine: f64,
    samples: usize,
    seed: u64,
) -> Result<ShellReport> {
    SurfaceEstimator::new(measure).shell_oracle_mc(p, eps_coarse, eps_fine, samples, seed)
}

pub fn volume_mc(measure: &Measure, p: &Polytope, samples: usize, seed: u64) -> Result<MassEstimate> {
    SurfaceEstimator::new(measure).volume_mc(p, samples, seed)
}
