//! Surface measure of polytopes: exact hyperplane and polygon integrals,
//! facet and shell Monte Carlo estimators, and per-point diagnostics.

mod diagnostics;
mod exact;
mod mc;

pub use diagnostics::{
    minimize_pointwise, pointwise_bound, pointwise_diagnostics, BoundaryDiagnostics, PointwiseMin,
};
pub(crate) use exact::{log_slice_integral, log_slice_prefactor};
pub use exact::{hyperplane_measure, polygon_exact_2d, polygon_facet_segment};
pub use mc::{
    default_shell_eps, facet_measure_mc, shell_oracle_mc, surface_mc, volume_mc, MassEstimate,
    ShellReport, SurfaceEstimator, MIN_FACET_SAMPLES, MIN_SHELL_SAMPLES,
};

use std::fmt;

/// Header of the surface CSV export.
pub const SURFACE_CSV_HEADER: &str = "method,family,n,K,value,stderr,samples,seed";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    FacetMc,
    ShellMc,
    Exact1d,
    Exact2d,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::FacetMc => "facet_mc",
            Method::ShellMc => "shell_mc",
            Method::Exact1d => "exact_1d",
            Method::Exact2d => "exact_2d",
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Method::Exact1d | Method::Exact2d)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A surface measure with its standard error.
///
/// Exact methods always carry `stderr = 0`; Monte Carlo estimates may too,
/// when every sample lands on the same side (e.g. a single facet).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: usize,
    pub method: Method,
}

impl SurfaceEstimate {
    pub fn exact(value: f64, method: Method) -> Self {
        Self {
            value,
            stderr: 0.0,
            samples: 0,
            method,
        }
    }

    pub fn csv_row(&self, family: &str, n: usize, k: usize, seed: u64) -> String {
        format!(
            "{},{family},{n},{k},{},{},{},{seed}",
            self.method, self.value, self.stderr, self.samples
        )
    }
}
