//! Rotation-invariant log-concave measures and their scalar parameters.

mod model;
mod params;
mod potential;

pub use model::{MeasureModel, MuSolution};
pub use params::{Measure, MeasureParams, PARAMS_CSV_HEADER};
pub use potential::{Family, RadialPotential};
