use std::sync::OnceLock;

use rand::Rng;

use super::model::{MeasureModel, MuSolution};
use crate::error::{Error, Result};
use crate::numerics::{build_quantile_table, LogIntegrand, QuantileTable, DEFAULT_NODES};
use crate::random::uniform_direction;

/// Scalar parameters of a measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureParams {
    pub n: usize,
    /// Maximizer of `g_{n-1}`.
    pub t0: f64,
    pub lambda_i: f64,
    pub lambda_o: f64,
    pub lambda: f64,
    /// `E|X|`.
    pub mean_norm: f64,
    /// `Var|X|`.
    pub var_norm: f64,
    /// `sqrt(Var|X|) / E|X|`.
    pub norm_cv: f64,
    /// `ln J_{n-2}`; equals `ln J_0` when `n = 2`.
    pub log_j_nm2: f64,
    pub log_j_nm1: f64,
    pub log_j_n: f64,
    pub log_j_np1: f64,
    pub log_c_n: f64,
}

/// Header of the parameter CSV export.
pub const PARAMS_CSV_HEADER: &str = "family,n,t0,lambda_i,lambda_o,lambda,E,V,log_J_nm1,log_C_n";

impl MeasureParams {
    pub fn compute(model: &MeasureModel) -> Result<Self> {
        let n = model.dim();
        let t0 = model.solve_t0()?;
        let (lambda_i, lambda_o, lambda) = model.solve_lambda(t0)?;
        let (mean_norm, var_norm, norm_cv) = model.norm_moments()?;
        let log_j_nm1 = model.log_moment(n - 1)?;
        Ok(Self {
            n,
            t0,
            lambda_i,
            lambda_o,
            lambda,
            mean_norm,
            var_norm,
            norm_cv,
            log_j_nm2: model.log_moment(n - 2)?,
            log_j_nm1,
            log_j_n: model.log_moment(n)?,
            log_j_np1: model.log_moment(n + 1)?,
            log_c_n: model.log_norm_const_from(log_j_nm1),
        })
    }

    /// `sqrt(n) / t0`, the scale of the measure of a hyperplane near the origin.
    pub fn scale(&self) -> f64 {
        (self.n as f64).sqrt() / self.t0
    }

    /// Range check `λ n >= 0.1` and `λ sqrt(n) <= 10`.
    pub fn lambda_in_range(&self) -> bool {
        let n = self.n as f64;
        self.lambda * n >= 0.1 && self.lambda * n.sqrt() <= 10.0
    }

    /// Whether `K <= exp(c / λ)`.
    pub fn facet_count_in_range(&self, k: usize, c_range: f64) -> bool {
        (k as f64).ln() <= c_range / self.lambda
    }

    pub fn csv_row(&self, family: &str) -> String {
        format!(
            "{family},{},{},{},{},{},{},{},{},{}",
            self.n,
            self.t0,
            self.lambda_i,
            self.lambda_o,
            self.lambda,
            self.mean_norm,
            self.norm_cv,
            self.log_j_nm1,
            self.log_c_n
        )
    }
}

/// A measure model together with its precomputed parameters and a lazily
/// built radial sampler.
#[derive(Debug)]
pub struct Measure {
    model: MeasureModel,
    params: MeasureParams,
    radial: OnceLock<QuantileTable>,
}

impl Measure {
    pub fn new(model: MeasureModel) -> Result<Self> {
        let params = MeasureParams::compute(&model)?;
        if !(params.mean_norm > 0.0 && params.norm_cv > 0.0 && params.norm_cv < 1.0) {
            return Err(Error::Divergence(format!(
                "degenerate norm moments E = {}, V = {}",
                params.mean_norm, params.norm_cv
            )));
        }
        Ok(Self {
            model,
            params,
            radial: OnceLock::new(),
        })
    }

    /// Parses a family string (`gaussian`, `power:<p>`, `ball`) for dimension `n`.
    pub fn from_spec(family: &str, n: usize) -> Result<Self> {
        Self::new(MeasureModel::new(n, family.parse()?)?)
    }

    pub fn model(&self) -> &MeasureModel {
        &self.model
    }

    pub fn params(&self) -> &MeasureParams {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    /// Family tag, e.g. `power:3`.
    pub fn family(&self) -> String {
        self.model.potential().to_string()
    }

    pub fn log_g(&self, k: usize, t: f64) -> f64 {
        self.model.log_g(k, t)
    }

    pub fn solve_mu(&self, psi: f64) -> Result<MuSolution> {
        self.model.solve_mu(self.params.t0, psi)
    }

    /// Inverse-CDF table of `|X|`.
    pub fn radial_table(&self) -> Result<&QuantileTable> {
        if let Some(t) = self.radial.get() {
            return Ok(t);
        }
        let k = self.dim() - 1;
        let density = LogIntegrand::new(|t| self.model.log_g(k, t), 0.0, self.model.radial_upper());
        let table = build_quantile_table(&density, DEFAULT_NODES)?;
        Ok(self.radial.get_or_init(|| table))
    }

    /// Draws `X ~ γ` into `out` (length `n`).
    pub fn sample_point<R: Rng + ?Sized>(
        &self,
        table: &QuantileTable,
        rng: &mut R,
        out: &mut [f64],
    ) {
        uniform_direction(rng, out);
        let r = table.sample(rng);
        out.iter_mut().for_each(|x| *x *= r);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::chunk_stream;

    #[test]
    fn gaussian_params_row() {
        let m = Measure::from_spec("gaussian", 101).unwrap();
        let p = m.params();
        assert!((p.t0 - 10.0).abs() < 1e-10);
        assert!(p.lambda_in_range());
        let row = p.csv_row(&m.family());
        assert!(row.starts_with("gaussian,101,"));
        assert_eq!(row.split(',').count(), PARAMS_CSV_HEADER.split(',').count());
    }

    #[test]
    fn sample_norm_mean_matches_e() {
        let m = Measure::from_spec("power:3", 6).unwrap();
        let table = m.radial_table().unwrap();
        let mut rng = chunk_stream(11, 0, 0);
        let mut x = vec![0.0; 6];
        let (mut s, mut s2) = (0.0, 0.0);
        let draws = 100_000;
        for _ in 0..draws {
            m.sample_point(table, &mut rng, &mut x);
            let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            s += r;
            s2 += r * r;
        }
        let mean = s / draws as f64;
        let sd = (s2 / draws as f64 - mean * mean).sqrt();
        let se = sd / (draws as f64).sqrt();
        assert!((mean - m.params().mean_norm).abs() < 4.0 * se);
    }

    #[test]
    fn facet_count_range() {
        let m = Measure::from_spec("gaussian", 50).unwrap();
        let p = m.params();
        assert!(p.facet_count_in_range(2, 1.0));
        assert!(!p.facet_count_in_range(1 << 12, 1.0));
    }
}
