//! Polytopes given as intersections of halfspaces `{x : <x, u> <= ρ}`.
//!
//! Polytopes may be unbounded and may carry redundant halfspaces.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::random::uniform_direction;

const UNIT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace {
    normal: Vec<f64>,
    offset: f64,
}

impl Halfspace {
    /// Requires `|normal| = 1` within `1e-10`.
    pub fn new(normal: Vec<f64>, offset: f64) -> Result<Self> {
        let norm = norm(&normal);
        if (norm - 1.0).abs() > UNIT_TOL || !offset.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "halfspace normal must be unit length (|u| = {norm}) with finite offset"
            )));
        }
        Ok(Self { normal, offset })
    }

    /// Rescales `normal` to unit length; zero or non-finite normals are rejected.
    pub fn normalized(mut normal: Vec<f64>, offset: f64) -> Result<Self> {
        let n = norm(&normal);
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::InvalidArgument("zero or non-finite normal".into()));
        }
        normal.iter_mut().for_each(|x| *x /= n);
        Self::new(normal, offset)
    }

    /// Builds a halfspace without the unit-length check. Only meant for
    /// fault-injection tests of downstream validators.
    #[doc(hidden)]
    pub fn unchecked(normal: Vec<f64>, offset: f64) -> Self {
        Self { normal, offset }
    }

    pub fn normal(&self) -> &[f64] {
        &self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    #[inline]
    pub fn violation(&self, x: &[f64]) -> f64 {
        dot(&self.normal, x) - self.offset
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    dim: usize,
    halfspaces: Vec<Halfspace>,
}

/// Result of [`Polytope::distance`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Distance {
    pub value: f64,
    pub converged: bool,
    pub cycles: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StandardShape {
    /// `[-s, s]^n`.
    Cube,
    /// Regular simplex with inradius `s`.
    Simplex,
    /// Regular `K`-gon in the plane with normals at angles `2πj/K`.
    RegularPolygon(usize),
}

pub const DEFAULT_DISTANCE_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_CYCLES: usize = 10_000;

impl Polytope {
    pub fn new(dim: usize, halfspaces: Vec<Halfspace>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidArgument(format!(
                "polytope dimension must be at least 2, got {dim}"
            )));
        }
        if halfspaces.is_empty() {
            return Err(Error::InvalidArgument("polytope needs at least one halfspace".into()));
        }
        for h in &halfspaces {
            if h.normal.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: h.normal.len(),
                });
            }
        }
        Ok(Self { dim, halfspaces })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn facet_count(&self) -> usize {
        self.halfspaces.len()
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    /// Largest deviation of any normal from unit length.
    pub fn max_normal_defect(&self) -> f64 {
        self.halfspaces
            .iter()
            .map(|h| (norm(&h.normal) - 1.0).abs())
            .fold(0.0, f64::max)
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(())
    }

    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        Ok(self.max_violation(x)? <= 0.0)
    }

    /// `max_i (<x, u_i> - ρ_i)`.
    pub fn max_violation(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.max_violation_unchecked(x))
    }

    #[inline]
    pub(crate) fn max_violation_unchecked(&self, x: &[f64]) -> f64 {
        self.halfspaces
            .iter()
            .map(|h| h.violation(x))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Whether `x` satisfies every constraint except `skip`.
    #[inline]
    pub(crate) fn satisfies_except(&self, x: &[f64], skip: usize) -> bool {
        self.halfspaces
            .iter()
            .enumerate()
            .all(|(j, h)| j == skip || h.violation(x) <= 0.0)
    }

    /// Euclidean distance from `x` to the polytope by Dykstra's cyclic
    /// projections onto the halfspaces.
    ///
    /// Stops once a full cycle moves the iterate by less than `tol`. The
    /// returned value is never below the largest single-constraint violation.
    pub fn distance(&self, x: &[f64], tol: f64, max_cycles: usize) -> Result<Distance> {
        self.check_dim(x)?;
        let viol = self.max_violation_unchecked(x);
        if viol <= 0.0 {
            return Ok(Distance {
                value: 0.0,
                converged: true,
                cycles: 0,
            });
        }
        let k = self.halfspaces.len();
        if k == 1 {
            return Ok(Distance {
                value: viol,
                converged: true,
                cycles: 0,
            });
        }
        let n = self.dim;
        let mut y = x.to_vec();
        let mut incr = vec![0.0; k * n];
        let mut z = vec![0.0; n];
        let mut cycles = 0;
        let mut converged = false;
        while cycles < max_cycles {
            cycles += 1;
            let mut moved2 = 0.0;
            for (i, h) in self.halfspaces.iter().enumerate() {
                let p = &mut incr[i * n..(i + 1) * n];
                for j in 0..n {
                    z[j] = y[j] + p[j];
                }
                let excess = dot(&h.normal, &z) - h.offset;
                for j in 0..n {
                    let proj = if excess > 0.0 {
                        z[j] - excess * h.normal[j]
                    } else {
                        z[j]
                    };
                    p[j] = z[j] - proj;
                    let d = proj - y[j];
                    moved2 += d * d;
                    y[j] = proj;
                }
            }
            if moved2.sqrt() < tol {
                converged = true;
                break;
            }
        }
        let d = y
            .iter()
            .zip(x)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        Ok(Distance {
            value: d.max(viol),
            converged,
            cycles,
        })
    }

    /// `K` halfspaces `<x, u_i> <= ρ` with `u_i` i.i.d. uniform on the sphere.
    pub fn circumscribed_random(n: usize, k: usize, rho: f64, seed: u64) -> Result<Self> {
        if k < 1 || !(rho > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "need K >= 1 and rho > 0 (got K = {k}, rho = {rho})"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let halfspaces = (0..k)
            .map(|_| {
                let mut u = vec![0.0; n];
                uniform_direction(&mut rng, &mut u);
                Halfspace { normal: u, offset: rho }
            })
            .collect();
        Self::new(n, halfspaces)
    }

    pub fn standard_shape(shape: StandardShape, n: usize, scale: f64) -> Result<Self> {
        if !(scale > 0.0) {
            return Err(Error::InvalidArgument(format!("scale must be positive, got {scale}")));
        }
        let halfspaces = match shape {
            StandardShape::Cube => (0..2 * n)
                .map(|i| {
                    let mut u = vec![0.0; n];
                    u[i / 2] = if i % 2 == 0 { 1.0 } else { -1.0 };
                    Halfspace { normal: u, offset: scale }
                })
                .collect(),
            StandardShape::Simplex => simplex_normals(n)
                .into_iter()
                .map(|u| Halfspace::normalized(u, scale))
                .collect::<Result<Vec<_>>>()?,
            StandardShape::RegularPolygon(k) => {
                if n != 2 || k < 3 {
                    return Err(Error::InvalidArgument(format!(
                        "regular polygon needs n = 2 and K >= 3 (got n = {n}, K = {k})"
                    )));
                }
                (0..k)
                    .map(|j| {
                        let a = 2.0 * std::f64::consts::PI * j as f64 / k as f64;
                        Halfspace {
                            normal: vec![a.cos(), a.sin()],
                            offset: scale,
                        }
                    })
                    .collect()
            }
        };
        Self::new(n, halfspaces)
    }

    /// Text form: a header line `n K`, then one line `u_1 … u_n rho` per
    /// halfspace, every number with 17 significant digits.
    pub fn serialize(&self) -> String {
        let mut out = format!("{} {}\n", self.dim, self.halfspaces.len());
        for h in &self.halfspaces {
            for u in &h.normal {
                let _ = write!(out, "{u:.16e} ");
            }
            let _ = writeln!(out, "{:.16e}", h.offset);
        }
        out
    }

    /// Parses the text form. Normals off unit length by more than `1e-10`
    /// are renormalized and reported in the returned warnings.
    pub fn parse(text: &str) -> Result<(Self, Vec<String>)> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (line_no, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "empty input".into(),
        })?;
        let head: Vec<&str> = header.split_whitespace().collect();
        let parse_count = |s: &str| {
            s.parse::<usize>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("expected an integer, found '{s}'"),
            })
        };
        if head.len() != 2 {
            return Err(Error::Parse {
                line: line_no,
                message: "header must be 'n K'".into(),
            });
        }
        let (n, k) = (parse_count(head[0])?, parse_count(head[1])?);
        let mut halfspaces = Vec::with_capacity(k);
        let mut warnings = Vec::new();
        for (line, body) in lines.by_ref().take(k) {
            let values = body
                .split_whitespace()
                .map(|s| {
                    s.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| Error::Parse {
                            line,
                            message: format!("bad number '{s}'"),
                        })
                })
                .collect::<Result<Vec<f64>>>()?;
            if values.len() != n + 1 {
                return Err(Error::Parse {
                    line,
                    message: format!("expected {} numbers, found {}", n + 1, values.len()),
                });
            }
            let normal = values[..n].to_vec();
            let len = norm(&normal);
            if (len - 1.0).abs() > UNIT_TOL {
                warnings.push(format!(
                    "line {line}: normal has length {len:.12}, renormalized"
                ));
                log::warn!("line {line}: normal has length {len}, renormalized");
            }
            let h = if (len - 1.0).abs() <= UNIT_TOL {
                Halfspace::new(normal, values[n])
            } else {
                Halfspace::normalized(normal, values[n])
            };
            let h = h.map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })?;
            halfspaces.push(h);
        }
        if halfspaces.len() != k {
            return Err(Error::Parse {
                line: line_no,
                message: format!("header announces {k} halfspaces, found {}", halfspaces.len()),
            });
        }
        if let Some((line, _)) = lines.next() {
            return Err(Error::Parse {
                line,
                message: "trailing content after the last halfspace".into(),
            });
        }
        Ok((Self::new(n, halfspaces)?, warnings))
    }
}

/// Outward normals of a regular simplex centred at the origin: the centred
/// standard basis of `R^{n+1}` expressed in an orthonormal basis of the
/// sum-zero hyperplane.
fn simplex_normals(n: usize) -> Vec<Vec<f64>> {
    let m = n + 1;
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut v = vec![0.0; m];
        v[i] = 1.0;
        v[i + 1] = -1.0;
        for b in &basis {
            let c = dot(&v, b);
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        let l = norm(&v);
        v.iter_mut().for_each(|x| *x /= l);
        basis.push(v);
    }
    (0..m)
        .map(|i| {
            let mut e = vec![-1.0 / m as f64; m];
            e[i] += 1.0;
            basis.iter().map(|b| dot(&e, b)).collect()
        })
        .collect()
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn square() -> Polytope {
        Polytope::standard_shape(StandardShape::Cube, 2, 1.0).unwrap()
    }

    #[test]
    fn membership() {
        let p = Polytope::circumscribed_random(4, 7, 0.3, 1).unwrap();
        assert!(p.contains(&[0.0; 4]).unwrap());
        let h = Polytope::new(2, vec![Halfspace::new(vec![0.6, 0.8], 2.0).unwrap()]).unwrap();
        let x = [0.6 * 3.0, 0.8 * 3.0];
        assert!((h.max_violation(&x).unwrap() - 1.0).abs() < 1e-12);
        assert!(!h.contains(&x).unwrap());
        assert!(matches!(
            h.contains(&[1.0, 2.0, 3.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn distances() {
        let h = Polytope::new(3, vec![Halfspace::new(vec![0.0, 0.0, 1.0], 0.5).unwrap()]).unwrap();
        let d = h.distance(&[3.0, -1.0, 2.0], 1e-12, 100).unwrap();
        assert_eq!(d.value, 1.5);
        let d = square().distance(&[2.0, 2.0], 1e-12, 10_000).unwrap();
        assert!(d.converged);
        assert!((d.value - 2f64.sqrt()).abs() < 1e-10);
        assert_eq!(square().distance(&[0.2, -0.9], 1e-12, 10).unwrap().value, 0.0);
    }

    #[test]
    fn distance_to_acute_wedge() {
        // wedge between two lines at a small angle; the nearest point is the apex
        let a = 0.2f64;
        let p = Polytope::new(
            2,
            vec![
                Halfspace::new(vec![a.sin(), a.cos()], 0.0).unwrap(),
                Halfspace::new(vec![a.sin(), -a.cos()], 0.0).unwrap(),
            ],
        )
        .unwrap();
        let d = p.distance(&[3.0, 0.0], 1e-13, 100_000).unwrap();
        assert!(d.converged);
        assert!((d.value - 3.0).abs() < 1e-8, "{d:?}");
    }

    #[test]
    fn circumscribed_is_reproducible() {
        let a = Polytope::circumscribed_random(5, 9, 1.2, 42).unwrap();
        let b = Polytope::circumscribed_random(5, 9, 1.2, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.halfspaces().iter().all(|h| h.offset() == 1.2));
        assert!(a.max_normal_defect() < 1e-12);
        let one = Polytope::circumscribed_random(5, 1, 1.2, 3).unwrap();
        assert_eq!(one.facet_count(), 1);
    }

    #[test]
    fn normals_average_to_zero() {
        let n = 3;
        let k = 100_000;
        let p = Polytope::circumscribed_random(n, k, 1.0, 9).unwrap();
        for j in 0..n {
            let mean: f64 = p.halfspaces().iter().map(|h| h.normal()[j]).sum::<f64>() / k as f64;
            // each coordinate has variance 1/n
            let se = (1.0 / n as f64 / k as f64).sqrt();
            assert!(mean.abs() < 4.0 * se);
        }
    }

    #[test]
    fn shapes() {
        let c = Polytope::standard_shape(StandardShape::Cube, 3, 1.0).unwrap();
        assert_eq!(c.facet_count(), 6);
        let sq = Polytope::standard_shape(StandardShape::RegularPolygon(4), 2, 1.0).unwrap();
        assert_eq!(sq.facet_count(), 4);
        assert!((sq.halfspaces()[0].normal()[0] - 1.0).abs() < 1e-15);
        assert!(sq.contains(&[1.0, 1.0]).unwrap());
        for n in [2usize, 3, 7] {
            let s = Polytope::standard_shape(StandardShape::Simplex, n, 0.7).unwrap();
            assert_eq!(s.facet_count(), n + 1);
            // inradius: the origin is at distance 0.7 from every facet and
            // pairwise normal products are -1/n
            let hs = s.halfspaces();
            for i in 0..hs.len() {
                assert!((norm(hs[i].normal()) - 1.0).abs() < 1e-12);
                for j in 0..i {
                    assert!((dot(hs[i].normal(), hs[j].normal()) + 1.0 / n as f64).abs() < 1e-12);
                }
            }
        }
        assert!(Polytope::standard_shape(StandardShape::RegularPolygon(5), 3, 1.0).is_err());
    }

    #[test]
    fn text_roundtrip_and_errors() {
        let p = Polytope::circumscribed_random(4, 6, 0.8, 5).unwrap();
        let (q, warnings) = Polytope::parse(&p.serialize()).unwrap();
        assert!(warnings.is_empty());
        assert_eq!(p, q);
        assert_eq!(q.facet_count(), 6);

        let (r, warnings) = Polytope::parse("2 1\n1.0001 0 0.5\n").unwrap();
        assert_eq!(warnings.len(), 1);
        assert!((norm(r.halfspaces()[0].normal()) - 1.0).abs() < 1e-15);

        assert!(matches!(Polytope::parse("2 1\n1 0\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(Polytope::parse("2 2\n1 0 1\n"), Err(Error::Parse { .. })));
        assert!(matches!(Polytope::parse("2 1\n0 0 1\n"), Err(Error::Parse { .. })));
        assert!(matches!(Polytope::parse("2 1\n1 x 1\n"), Err(Error::Parse { .. })));
        assert!(Polytope::parse("").is_err());
    }

    fn random_point(n: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-4.0f64..4.0, n)
    }

    proptest! {
        #[test]
        fn distance_is_sandwiched_and_lipschitz(
            seed in 0u64..1000,
            x in random_point(4),
            y in random_point(4),
        ) {
            let p = Polytope::circumscribed_random(4, 8, 1.0, seed).unwrap();
            let dx = p.distance(&x, 1e-13, 100_000).unwrap();
            let dy = p.distance(&y, 1e-13, 100_000).unwrap();
            let viol = p.max_violation(&x).unwrap().max(0.0);
            prop_assert!(dx.value >= viol);
            let origin_gap = norm(&x);
            prop_assert!(dx.value <= origin_gap + 1e-9);
            for h in p.halfspaces() {
                let v = h.violation(&x);
                prop_assert!(dx.value + 1e-9 >= v.max(0.0));
                // the foot on a facet hyperplane is a point of P whenever it
                // satisfies the other constraints
                let foot: Vec<f64> = x.iter().zip(h.normal()).map(|(a, u)| a - v * u).collect();
                if p.max_violation(&foot).unwrap() <= 1e-12 {
                    prop_assert!(dx.value <= v.abs() + 1e-9);
                }
            }
            prop_assert_eq!(dx.value == 0.0, p.contains(&x).unwrap());
            let gap: f64 = x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            if dx.converged && dy.converged {
                prop_assert!((dx.value - dy.value).abs() <= gap + 1e-7);
            }
        }

        #[test]
        fn text_roundtrip(seed in 0u64..10_000, n in 2usize..6, k in 1usize..12) {
            let p = Polytope::circumscribed_random(n, k, 0.5 + seed as f64 * 1e-3, seed).unwrap();
            let (q, w) = Polytope::parse(&p.serialize()).unwrap();
            prop_assert!(w.is_empty());
            prop_assert_eq!(p, q);
        }
    }
}
