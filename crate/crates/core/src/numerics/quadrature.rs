//! Log-domain adaptive Gauss-Legendre quadrature.
//!
//! Integrands are supplied as their natural logarithm. The integrator locates
//! the maximum of the log-integrand, truncates the domain where it has fallen
//! [`TRUNCATION_NATS`] below that maximum, and integrates `exp(f - f_max)` so
//! the result never overflows. The returned value is `f_max + ln(integral)`.

use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Depth of the window kept around the peak of a log-integrand.
pub const TRUNCATION_NATS: f64 = 60.0;

/// Default relative tolerance for [`integrate_log`].
pub const DEFAULT_REL_TOL: f64 = 1e-10;

const GL_ORDER: usize = 16;
const MAX_PANELS: usize = 4000;
const INITIAL_PANELS: usize = 8;
const MAX_DOUBLINGS: usize = 1100;

/// The natural log of a nonnegative integrand on `[lower, upper]`.
///
/// `upper` may be `f64::INFINITY`. The function may return `-inf` where the
/// integrand vanishes.
pub struct LogIntegrand<F> {
    f: F,
    lower: f64,
    upper: f64,
}

impl<F: Fn(f64) -> f64> LogIntegrand<F> {
    pub fn new(f: F, lower: f64, upper: f64) -> Self {
        Self { f, lower, upper }
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    fn checked(&self, t: f64) -> Result<f64> {
        let v = (self.f)(t);
        if v.is_nan() || v == f64::INFINITY {
            Err(Error::Domain { at: t, value: v })
        } else {
            Ok(v)
        }
    }
}

/// Peak location and the truncated window of a log-integrand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogWindow {
    pub peak: f64,
    pub log_max: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Returns `log ∫ exp(f)` over the integrand's domain, or `-inf` when the
/// integrand vanishes identically.
pub fn integrate_log<F: Fn(f64) -> f64>(f: &LogIntegrand<F>, rel_tol: f64) -> Result<f64> {
    if !(rel_tol > 0.0 && rel_tol <= 1e-3) {
        return Err(Error::InvalidArgument(format!(
            "rel_tol must lie in (0, 1e-3], got {rel_tol}"
        )));
    }
    let Some(window) = log_window(f)? else {
        return Ok(f64::NEG_INFINITY);
    };
    let shifted = integrate_shifted(f, &window, rel_tol)?;
    if shifted <= 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(window.log_max + shifted.ln())
}

/// Locates the peak and the 60-nat window. `None` means the integrand is
/// `-inf` everywhere it was probed.
pub fn log_window<F: Fn(f64) -> f64>(f: &LogIntegrand<F>) -> Result<Option<LogWindow>> {
    let (a, b) = (f.lower, f.upper);
    if !(a.is_finite() && b > a) {
        if a == b {
            return Ok(None);
        }
        return Err(Error::InvalidArgument(format!("bad interval [{a}, {b}]")));
    }
    let Some((peak, log_max)) = locate_peak(f)? else {
        return Ok(None);
    };
    let floor = log_max - TRUNCATION_NATS;
    let lower = if f.checked(a)? >= floor {
        a
    } else {
        crossing(f, peak, a, floor)?
    };
    let upper = if b.is_finite() && f.checked(b)? >= floor {
        b
    } else {
        crossing(f, peak, b, floor)?
    };
    Ok(Some(LogWindow {
        peak,
        log_max,
        lower,
        upper,
    }))
}

fn locate_peak<F: Fn(f64) -> f64>(f: &LogIntegrand<F>) -> Result<Option<(f64, f64)>> {
    let (a, b) = (f.lower, f.upper);
    let (lo, hi) = if b.is_finite() {
        const SCAN: usize = 64;
        let h = (b - a) / SCAN as f64;
        let mut best = (0usize, f64::NEG_INFINITY);
        for i in 0..=SCAN {
            let x = if i == SCAN { b } else { a + h * i as f64 };
            let v = f.checked(x)?;
            if v > best.1 {
                best = (i, v);
            }
        }
        if best.1 == f64::NEG_INFINITY {
            return Ok(None);
        }
        let i = best.0;
        (
            a + h * i.saturating_sub(1) as f64,
            (a + h * (i + 1) as f64).min(b),
        )
    } else {
        let mut prev_x = a;
        let mut prev_v = f.checked(a)?;
        let mut before = a;
        let mut step = 1.0_f64.max(a.abs() * 1e-3);
        let mut found = None;
        for _ in 0..MAX_DOUBLINGS {
            let x = prev_x + step;
            if !x.is_finite() {
                break;
            }
            let v = f.checked(x)?;
            if prev_v > f64::NEG_INFINITY && v < prev_v {
                found = Some((before, x));
                break;
            }
            before = prev_x;
            prev_x = x;
            prev_v = v;
            step *= 2.0;
        }
        match found {
            Some(bracket) => bracket,
            None if prev_v == f64::NEG_INFINITY => return Ok(None),
            None => {
                return Err(Error::Divergence(
                    "log-integrand has no finite maximum".into(),
                ))
            }
        }
    };
    let (x, v) = golden_max(f, lo, hi)?;
    // the scan may have already seen a better endpoint value
    let (ex, ev) = {
        let vl = f.checked(lo)?;
        let vh = f.checked(hi)?;
        if vl >= vh {
            (lo, vl)
        } else {
            (hi, vh)
        }
    };
    if ev > v {
        Ok(Some((ex, ev)))
    } else {
        Ok(Some((x, v)))
    }
}

/// Golden-section maximization of a unimodal function on `[lo, hi]`.
pub(crate) fn golden_max<F: Fn(f64) -> f64>(
    f: &LogIntegrand<F>,
    mut lo: f64,
    mut hi: f64,
) -> Result<(f64, f64)> {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f.checked(x1)?;
    let mut f2 = f.checked(x2)?;
    for _ in 0..200 {
        if (hi - lo) <= 1e-14 * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f.checked(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f.checked(x1)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

/// Finds where `f` falls to `floor` between `peak` and `toward` (which may be
/// infinite). Marches outward geometrically, then bisects.
fn crossing<F: Fn(f64) -> f64>(
    f: &LogIntegrand<F>,
    peak: f64,
    toward: f64,
    floor: f64,
) -> Result<f64> {
    let dir = if toward > peak { 1.0 } else { -1.0 };
    let limit = (toward - peak).abs();
    let mut inside = peak;
    let mut step = 1e-6 * peak.abs().max(1.0);
    let mut outside = None;
    for _ in 0..MAX_DOUBLINGS {
        let d = step.min(limit);
        let x = peak + dir * d;
        let v = f.checked(x)?;
        if v < floor {
            outside = Some(x);
            break;
        }
        inside = x;
        if d >= limit {
            return Ok(x);
        }
        step *= 2.0;
    }
    let Some(mut out) = outside else {
        return Err(Error::Divergence(
            "log-integrand does not decay away from its maximum".into(),
        ));
    };
    for _ in 0..100 {
        let mid = 0.5 * (inside + out);
        if mid == inside || mid == out {
            break;
        }
        if f.checked(mid)? >= floor {
            inside = mid;
        } else {
            out = mid;
        }
        if (out - inside).abs() <= 1e-9 * (1.0 + peak.abs()) {
            break;
        }
    }
    Ok(out)
}

fn gl_rule() -> &'static ([f64; GL_ORDER], [f64; GL_ORDER]) {
    static RULE: OnceLock<([f64; GL_ORDER], [f64; GL_ORDER])> = OnceLock::new();
    RULE.get_or_init(|| legendre_rule::<GL_ORDER>())
}

/// Nodes and weights on `[-1, 1]` by Newton iteration on `P_N`.
fn legendre_rule<const N: usize>() -> ([f64; N], [f64; N]) {
    let mut nodes = [0.0; N];
    let mut weights = [0.0; N];
    let n = N as f64;
    for i in 0..N {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=N {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Fixed-order Gauss-Legendre estimate of `∫ exp(f - shift)` over `[a, b]`.
pub(crate) fn gauss_legendre_shifted<F: Fn(f64) -> f64>(
    f: &LogIntegrand<F>,
    shift: f64,
    a: f64,
    b: f64,
) -> Result<f64> {
    let (nodes, weights) = gl_rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    let mut sum = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        let v = f.checked(mid + half * x)?;
        sum += w * (v - shift).exp();
    }
    Ok(sum * half)
}

#[derive(Debug)]
struct Panel {
    a: f64,
    b: f64,
    left: f64,
    right: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn make_panel<F: Fn(f64) -> f64>(
    f: &LogIntegrand<F>,
    shift: f64,
    a: f64,
    b: f64,
    whole: Option<f64>,
) -> Result<Panel> {
    let m = 0.5 * (a + b);
    let value = match whole {
        Some(v) => v,
        None => gauss_legendre_shifted(f, shift, a, b)?,
    };
    let left = gauss_legendre_shifted(f, shift, a, m)?;
    let right = gauss_legendre_shifted(f, shift, m, b)?;
    Ok(Panel {
        a,
        b,
        left,
        right,
        err: (left + right - value).abs(),
    })
}

/// Adaptive integration of `exp(f - log_max)` over the window.
pub(crate) fn integrate_shifted<F: Fn(f64) -> f64>(
    f: &LogIntegrand<F>,
    window: &LogWindow,
    rel_tol: f64,
) -> Result<f64> {
    let mut cuts = Vec::with_capacity(INITIAL_PANELS + 2);
    let (lo, hi, peak) = (window.lower, window.upper, window.peak);
    if hi <= lo {
        return Ok(0.0);
    }
    let half = INITIAL_PANELS / 2;
    if peak > lo && peak < hi {
        for i in 0..half {
            cuts.push(lo + (peak - lo) * i as f64 / half as f64);
        }
        for i in 0..=half {
            cuts.push(peak + (hi - peak) * i as f64 / half as f64);
        }
    } else {
        for i in 0..=INITIAL_PANELS {
            cuts.push(lo + (hi - lo) * i as f64 / INITIAL_PANELS as f64);
        }
    }
    let mut heap = BinaryHeap::new();
    for w in cuts.windows(2) {
        if w[1] > w[0] {
            heap.push(make_panel(f, window.log_max, w[0], w[1], None)?);
        }
    }
    loop {
        let (total, err) = heap
            .iter()
            .fold((0.0, 0.0), |(t, e), p| (t + p.left + p.right, e + p.err));
        if err <= rel_tol * total || heap.len() >= MAX_PANELS {
            if heap.len() >= MAX_PANELS && err > rel_tol * total {
                log::debug!(
                    "quadrature panel cap reached: estimated relative error {:.3e}",
                    err / total
                );
            }
            return Ok(total);
        }
        let worst = heap.pop().expect("nonempty panel heap");
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            // panel cannot be split further in floating point
            heap.push(Panel { err: 0.0, ..worst });
            continue;
        }
        heap.push(make_panel(f, window.log_max, worst.a, m, Some(worst.left))?);
        heap.push(make_panel(f, window.log_max, m, worst.b, Some(worst.right))?);
    }
}
