//! Surface area of convex polytopes under rotation-invariant log-concave
//! probability measures.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: log-domain quadrature, root finding, inverse-CDF tables.
//! * [`measure`]: radial potentials and the scalar parameters of a measure.
//! * [`polytope`]: halfspace intersections, distance, generators, text I/O.
//! * [`surface`]: exact and Monte Carlo surface-area estimators.
//! * [`extremal`]: the random circumscribed polytope and its expectation.
//! * [`bounds`]: closed-form evaluators of the upper and lower bounds.

pub mod error;
pub mod numerics;
pub mod random;

pub mod bounds;
pub mod extremal;
pub mod measure;
pub mod polytope;
pub mod surface;

pub use error::{Error, Result};
pub use measure::{Measure, MeasureModel, MeasureParams, RadialPotential};
pub use polytope::{Halfspace, Polytope, StandardShape};
pub use surface::{Method, SurfaceEstimate};
