//! Tabulated inverse-CDF sampling for one-dimensional log-densities.

use rand::Rng;

use super::quadrature::{
    gauss_legendre_shifted, integrate_log, log_window, LogIntegrand, DEFAULT_REL_TOL,
};
use crate::error::{Error, Result};

/// Default number of nodes in a [`QuantileTable`].
pub const DEFAULT_NODES: usize = 4096;

const PILOT_FACTOR: usize = 4;

/// Monotone piecewise-linear CDF and its inverse on a node grid.
#[derive(Debug, Clone)]
pub struct QuantileTable {
    nodes: Vec<f64>,
    cdf: Vec<f64>,
}

/// Builds a table with `node_count` nodes placed at equal CDF increments.
///
/// A pilot grid equispaced over the 60-nat window of the density is
/// integrated cell by cell; the final nodes invert that pilot CDF, and the
/// CDF at each final node is then recomputed from the pilot cumulative sums
/// plus one Gauss-Legendre partial cell.
pub fn build_quantile_table<F: Fn(f64) -> f64>(
    density_log: &LogIntegrand<F>,
    node_count: usize,
) -> Result<QuantileTable> {
    if node_count < 64 {
        return Err(Error::InvalidArgument(format!(
            "node_count must be at least 64, got {node_count}"
        )));
    }
    let window = log_window(density_log)?.ok_or(Error::DegenerateDensity)?;
    let log_total = integrate_log(density_log, DEFAULT_REL_TOL)?;
    if log_total == f64::NEG_INFINITY {
        return Err(Error::DegenerateDensity);
    }
    let total = (log_total - window.log_max).exp();
    let shift = window.log_max;
    let (lo, hi) = (window.lower, window.upper);

    let pilot_cells = PILOT_FACTOR * node_count;
    let h = (hi - lo) / pilot_cells as f64;
    let mut pilot_t = Vec::with_capacity(pilot_cells + 1);
    let mut pilot_mass = Vec::with_capacity(pilot_cells + 1);
    pilot_t.push(lo);
    pilot_mass.push(0.0);
    let mut acc = 0.0;
    for i in 0..pilot_cells {
        let a = lo + h * i as f64;
        let b = if i + 1 == pilot_cells { hi } else { a + h };
        acc += gauss_legendre_shifted(density_log, shift, a, b)?;
        pilot_t.push(b);
        pilot_mass.push(acc);
    }
    if !(acc > 0.0) {
        return Err(Error::DegenerateDensity);
    }

    let mut nodes = Vec::with_capacity(node_count);
    let mut cdf = Vec::with_capacity(node_count);
    nodes.push(lo);
    cdf.push(0.0);
    let mut cell = 0usize;
    for j in 1..node_count - 1 {
        let target = acc * j as f64 / (node_count - 1) as f64;
        while cell + 1 < pilot_cells && pilot_mass[cell + 1] < target {
            cell += 1;
        }
        let (m0, m1) = (pilot_mass[cell], pilot_mass[cell + 1]);
        let (t0, t1) = (pilot_t[cell], pilot_t[cell + 1]);
        let frac = if m1 > m0 { (target - m0) / (m1 - m0) } else { 0.5 };
        let t = t0 + frac.clamp(0.0, 1.0) * (t1 - t0);
        if t <= *nodes.last().expect("nonempty") || t >= hi {
            continue;
        }
        let exact = m0 + gauss_legendre_shifted(density_log, shift, t0, t)?;
        let u = (exact / total).min(1.0);
        if u < *cdf.last().expect("nonempty") {
            continue;
        }
        nodes.push(t);
        cdf.push(u);
    }
    nodes.push(hi);
    cdf.push(1.0);
    Ok(QuantileTable { nodes, cdf })
}

impl QuantileTable {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn cdf_values(&self) -> &[f64] {
        &self.cdf
    }

    /// Inverse CDF; `u` is clamped to `[0, 1]`.
    pub fn quantile(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        let i = self.cdf.partition_point(|&c| c < u);
        if i == 0 {
            return self.nodes[0];
        }
        if i >= self.cdf.len() {
            return *self.nodes.last().expect("nonempty");
        }
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        let (t0, t1) = (self.nodes[i - 1], self.nodes[i]);
        if c1 <= c0 {
            return t1;
        }
        t0 + (u - c0) / (c1 - c0) * (t1 - t0)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let i = self.nodes.partition_point(|&t| t < x);
        if i == 0 {
            return 0.0;
        }
        if i >= self.nodes.len() {
            return 1.0;
        }
        let (t0, t1) = (self.nodes[i - 1], self.nodes[i]);
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        c0 + (x - t0) / (t1 - t0) * (c1 - c0)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.random::<f64>())
    }
}
