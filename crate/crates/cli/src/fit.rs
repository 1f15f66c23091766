/// Least-squares line `ln(value) = exponent · ln(ln K) + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingFit {
    pub exponent: f64,
    pub intercept: f64,
    /// Root-mean-square residual in `ln(value)`.
    pub residual: f64,
    pub points: usize,
}

/// Fits `(K, value)` pairs with `K > e` and `value > 0`; `None` with fewer
/// than two usable points or no spread in `ln ln K`.
pub fn fit_scaling(points: &[(usize, f64)]) -> Option<ScalingFit> {
    let xy: Vec<(f64, f64)> = points
        .iter()
        .filter(|(k, v)| (*k as f64) > std::f64::consts::E && *v > 0.0 && v.is_finite())
        .map(|&(k, v)| ((k as f64).ln().ln(), v.ln()))
        .collect();
    if xy.len() < 2 {
        return None;
    }
    let m = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / m;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let ss: f64 = xy
        .iter()
        .map(|p| (p.1 - intercept - exponent * p.0).powi(2))
        .sum();
    Some(ScalingFit {
        exponent,
        intercept,
        residual: (ss / m).sqrt(),
        points: xy.len(),
    })
}
