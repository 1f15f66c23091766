//! Standard test polytopes scaled to a measure.

use polysurf_core::{Measure, Polytope, Result, StandardShape};

/// `t0 / sqrt(n)`, the per-coordinate scale of the measure.
pub fn coordinate_scale(measure: &Measure) -> f64 {
    measure.params().t0 / (measure.dim() as f64).sqrt()
}

/// Cube, simplex and two random circumscribed polytopes (`K = 4, 32`), plus a
/// regular pentagon in the plane, all scaled by [`coordinate_scale`].
pub fn standard_fixtures(measure: &Measure, seed: u64) -> Result<Vec<(String, Polytope)>> {
    let n = measure.dim();
    let s = coordinate_scale(measure);
    let mut out = vec![
        ("cube".to_string(), Polytope::standard_shape(StandardShape::Cube, n, s)?),
        ("simplex".to_string(), Polytope::standard_shape(StandardShape::Simplex, n, s)?),
    ];
    for k in [4usize, 32] {
        let rho = s * (k as f64).ln().sqrt();
        out.push((format!("random_k{k}"), Polytope::circumscribed_random(n, k, rho, seed ^ k as u64)?));
    }
    if n == 2 {
        out.push((
            "pentagon".to_string(),
            Polytope::standard_shape(StandardShape::RegularPolygon(5), 2, s)?,
        ));
    }
    Ok(out)
}
