use std::path::PathBuf;

use polysurf_core::RadialPotential;

use crate::{CliError, Result};

/// Settings shared by all commands. Read from `key = value` lines and
/// overridden by command-line flags.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Family tags such as `gaussian`, `power:3`, `ball`.
    pub families: Vec<String>,
    pub n: Vec<usize>,
    /// Sorted ascending.
    pub k_list: Vec<usize>,
    pub trials: usize,
    /// Samples per facet for the facet estimator, total samples for the shell
    /// estimator.
    pub samples: usize,
    pub seed: u64,
    /// Fine shell width; the coarse one is twice as wide.
    pub epsilon: Option<f64>,
    pub c_range: f64,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            families: vec!["gaussian".into()],
            n: vec![50],
            k_list: (2..=12).map(|e| 1usize << e).collect(),
            trials: 10,
            samples: 10_000,
            seed: 1,
            epsilon: None,
            c_range: 1.0,
            out: None,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| usage(format!("{key}: cannot parse '{s}'"))))
        .collect()
}

fn scalar<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| usage(format!("{key}: cannot parse '{value}'")))
}

impl ExperimentConfig {
    /// Parses `key = value` lines; blank lines and `#` comments are skipped.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| usage(format!("line {}: expected key = value", i + 1)))?;
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    /// Sets one field by name. Keys accept `-` and `_` interchangeably.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key.replace('-', "_").as_str() {
            "family" | "families" => {
                self.families = value.split(',').map(|s| s.trim().to_string()).collect()
            }
            "n" => self.n = list(key, value)?,
            "k_list" | "k" => self.k_list = list(key, value)?,
            "trials" => self.trials = scalar(key, value)?,
            "samples" => self.samples = scalar(key, value)?,
            "seed" => self.seed = scalar(key, value)?,
            "epsilon" => self.epsilon = Some(scalar(key, value)?),
            "c_range" => self.c_range = scalar(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            other => return Err(usage(format!("unknown setting '{other}'"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.families.is_empty() || self.n.is_empty() || self.k_list.is_empty() {
            return Err(usage("family, n and k_list must be nonempty"));
        }
        for f in &self.families {
            f.parse::<RadialPotential>()?;
        }
        if let Some(&n) = self.n.iter().find(|&&n| n < 2) {
            return Err(usage(format!("n must be at least 2, got {n}")));
        }
        if self.k_list.iter().any(|&k| k < 1) {
            return Err(usage("k_list entries must be positive"));
        }
        if self.k_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(usage("k_list must be strictly ascending"));
        }
        if self.trials < 2 || self.samples == 0 {
            return Err(usage("trials must be at least 2 and samples positive"));
        }
        if let Some(e) = self.epsilon {
            if !(e > 0.0) {
                return Err(usage(format!("epsilon must be positive, got {e}")));
            }
        }
        if !(self.c_range > 0.0) {
            return Err(usage(format!("c_range must be positive, got {}", self.c_range)));
        }
        Ok(())
    }
}
