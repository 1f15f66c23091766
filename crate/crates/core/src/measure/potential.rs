use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Family tag of a radial potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// `φ(t) = t²/2`.
    Gaussian,
    /// `φ(t) = t^p / p`, `p >= 1`.
    Power(f64),
    /// `φ = 0` on `[0, 1]`, `+∞` beyond: the uniform measure on the unit ball.
    Ball,
    Custom,
}

/// Convex nondecreasing `φ: [0, ∞) → [0, ∞]` with `φ(0) = 0`.
///
/// The measure has density proportional to `exp(-φ(|y|))`.
#[derive(Clone)]
pub struct RadialPotential {
    family: Family,
    custom: Option<CustomPotential>,
}

#[derive(Clone)]
struct CustomPotential {
    name: String,
    value: ScalarFn,
    derivative: ScalarFn,
    support: Option<f64>,
}

impl RadialPotential {
    pub fn gaussian() -> Self {
        Self {
            family: Family::Gaussian,
            custom: None,
        }
    }

    pub fn power(p: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "power family needs p >= 1 for log-concavity, got {p}"
            )));
        }
        Ok(Self {
            family: Family::Power(p),
            custom: None,
        })
    }

    pub fn ball() -> Self {
        Self {
            family: Family::Ball,
            custom: None,
        }
    }

    /// A user-supplied potential. Shape is not checked here; call
    /// [`RadialPotential::check_shape`].
    pub fn custom(
        name: impl Into<String>,
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
        support: Option<f64>,
    ) -> Result<Self> {
        if let Some(s) = support {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::InvalidArgument(format!("bad support bound {s}")));
            }
        }
        Ok(Self {
            family: Family::Custom,
            custom: Some(CustomPotential {
                name: name.into(),
                value: Arc::new(value),
                derivative: Arc::new(derivative),
                support,
            }),
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn support_bound(&self) -> Option<f64> {
        match (&self.family, &self.custom) {
            (Family::Ball, _) => Some(1.0),
            (_, Some(c)) => c.support,
            _ => None,
        }
    }

    #[inline]
    pub fn value(&self, t: f64) -> f64 {
        match self.family {
            Family::Gaussian => 0.5 * t * t,
            Family::Power(p) => t.powf(p) / p,
            Family::Ball => {
                if t <= 1.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            Family::Custom => {
                let c = self.custom.as_ref().expect("custom potential");
                match c.support {
                    Some(s) if t > s => f64::INFINITY,
                    _ => (c.value)(t),
                }
            }
        }
    }

    #[inline]
    pub fn derivative(&self, t: f64) -> f64 {
        match self.family {
            Family::Gaussian => t,
            Family::Power(p) => t.powf(p - 1.0),
            Family::Ball => 0.0,
            Family::Custom => (self.custom.as_ref().expect("custom potential").derivative)(t),
        }
    }

    /// Spot-checks `φ(0) = 0`, monotonicity, convexity (nondecreasing secant
    /// slopes) and derivative consistency on a grid over `(0, upper]`.
    pub fn check_shape(&self, upper: f64) -> Result<()> {
        if self.value(0.0) != 0.0 {
            return Err(Error::InvalidArgument(format!(
                "φ(0) = {} but must be 0",
                self.value(0.0)
            )));
        }
        let upper = self.support_bound().map_or(upper, |s| s.min(upper));
        const POINTS: usize = 200;
        let grid: Vec<f64> = (0..=POINTS)
            .map(|i| upper * i as f64 / POINTS as f64)
            .collect();
        let values: Vec<f64> = grid.iter().map(|&t| self.value(t)).collect();
        let mut last_slope = f64::NEG_INFINITY;
        for i in 1..grid.len() {
            let slope = (values[i] - values[i - 1]) / (grid[i] - grid[i - 1]);
            if slope < -1e-12 {
                return Err(Error::InvalidArgument(format!(
                    "φ decreases near t = {}",
                    grid[i]
                )));
            }
            if slope < last_slope - 1e-9 * last_slope.abs().max(1.0) {
                return Err(Error::InvalidArgument(format!(
                    "φ is not convex near t = {}",
                    grid[i]
                )));
            }
            last_slope = slope;
        }
        for &t in grid.iter().skip(1) {
            let h = 1e-5 * t.max(1.0);
            if t + h > upper || t - h < 0.0 {
                continue;
            }
            let fd = (self.value(t + h) - self.value(t - h)) / (2.0 * h);
            let d = self.derivative(t);
            if (fd - d).abs() > 1e-6 * d.abs().max(fd.abs()).max(1.0) {
                return Err(Error::InvalidArgument(format!(
                    "φ' = {d} disagrees with central difference {fd} at t = {t}"
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Debug for RadialPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RadialPotential({self})")
    }
}

impl fmt::Display for RadialPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Gaussian => f.write_str("gaussian"),
            Family::Power(p) => write!(f, "power:{p}"),
            Family::Ball => f.write_str("ball"),
            Family::Custom => write!(
                f,
                "custom:{}",
                self.custom.as_ref().map_or("", |c| c.name.as_str())
            ),
        }
    }
}

/// Parses `gaussian`, `power:<p>` or `ball`.
impl FromStr for RadialPotential {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "gaussian" => Ok(Self::gaussian()),
            "ball" => Ok(Self::ball()),
            _ => match s.strip_prefix("power:") {
                Some(p) => {
                    let p: f64 = p.trim().parse().map_err(|_| {
                        Error::InvalidArgument(format!("bad exponent in '{s}'"))
                    })?;
                    Self::power(p)
                }
                None => Err(Error::InvalidArgument(format!(
                    "unknown family '{s}' (expected gaussian, power:<p> or ball)"
                ))),
            },
        }
    }
}
