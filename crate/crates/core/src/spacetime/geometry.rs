//! 1+1 Minkowski geometry with `c = 1`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacetimePoint {
    pub x: f64,
    pub t: f64,
}

impl SpacetimePoint {
    pub fn new(x: f64, t: f64) -> Self {
        Self { x, t }
    }

    /// Whether `self` lies in the causal past of `other`, light cone
    /// included.
    pub fn causally_precedes(&self, other: &SpacetimePoint) -> bool {
        other.t - self.t >= (other.x - self.x).abs()
    }

    pub fn is_spacelike_to(&self, other: &SpacetimePoint) -> bool {
        (other.t - self.t).abs() < (other.x - self.x).abs()
    }

    /// Coordinates in a frame moving with velocity `v` (|v| < 1).
    pub fn boosted(&self, v: f64) -> Self {
        let g = 1.0 / (1.0 - v * v).sqrt();
        Self { x: g * (self.x - v * self.t), t: g * (self.t - v * self.x) }
    }
}

/// Velocity `u` seen from a frame moving with `v`.
pub fn boost_velocity(u: f64, v: f64) -> f64 {
    (u - v) / (1.0 - u * v)
}

fn boost_slope(s: f64, v: f64) -> f64 {
    (s - v) / (1.0 - v * s)
}

/// Piecewise-linear surface `t = f(x)` through `knots`, continued beyond
/// the outer knots with the tail slopes (flat unless built otherwise).
///
/// Every slope must satisfy `|slope| < 1`. Surfaces assembled from past
/// light cones carry `lightlike_ok`, which admits `|slope| = 1` exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpacelikeSurface {
    knots: Vec<(f64, f64)>,
    left_slope: f64,
    right_slope: f64,
    lightlike_ok: bool,
}

const SLOPE_TOL: f64 = 1e-12;

impl SpacelikeSurface {
    /// `t = constant`.
    pub fn flat(t: f64) -> Self {
        Self { knots: vec![(0.0, t)], left_slope: 0.0, right_slope: 0.0, lightlike_ok: false }
    }

    pub fn from_knots(knots: Vec<(f64, f64)>) -> Result<Self> {
        Self::with_tails(knots, 0.0, 0.0)
    }

    pub fn with_tails(knots: Vec<(f64, f64)>, left_slope: f64, right_slope: f64) -> Result<Self> {
        let s = Self { knots, left_slope, right_slope, lightlike_ok: false };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        if self.knots.is_empty() {
            return Err(Error::InvalidParameter("surface needs at least one knot".into()));
        }
        if self.knots.iter().any(|(x, t)| !x.is_finite() || !t.is_finite()) {
            return Err(Error::InvalidParameter("surface knots must be finite".into()));
        }
        for w in self.knots.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::InvalidParameter("surface knots must have increasing x".into()));
            }
        }
        for slope in self.slopes() {
            let bad = if self.lightlike_ok { slope.abs() > 1.0 + SLOPE_TOL } else { slope.abs() >= 1.0 };
            if bad {
                return Err(Error::NotSpacelike { slope });
            }
        }
        Ok(())
    }

    fn slopes(&self) -> Vec<f64> {
        let mut out = vec![self.left_slope, self.right_slope];
        out.extend(self.knots.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)));
        out
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn tail_slopes(&self) -> (f64, f64) {
        (self.left_slope, self.right_slope)
    }

    pub fn lightlike_ok(&self) -> bool {
        self.lightlike_ok
    }

    pub fn eval(&self, x: f64) -> f64 {
        let first = self.knots[0];
        let last = *self.knots.last().expect("non-empty");
        if x <= first.0 {
            return first.1 + self.left_slope * (x - first.0);
        }
        if x >= last.0 {
            return last.1 + self.right_slope * (x - last.0);
        }
        let k = self.knots.partition_point(|(kx, _)| *kx <= x);
        let (a, b) = (self.knots[k - 1], self.knots[k]);
        a.1 + (b.1 - a.1) * (x - a.0) / (b.0 - a.0)
    }

    /// `self ≥ other` everywhere, tails included.
    pub fn dominates(&self, other: &SpacelikeSurface) -> bool {
        let at_knots = self.knots.iter().chain(&other.knots).all(|(x, _)| self.eval(*x) >= other.eval(*x) - 1e-12);
        at_knots && self.left_slope <= other.left_slope + 1e-15 && self.right_slope >= other.right_slope - 1e-15
    }

    /// The same surface in a frame moving with velocity `v`.
    pub fn boosted(&self, v: f64) -> Self {
        let knots = self
            .knots
            .iter()
            .map(|&(x, t)| {
                let p = SpacetimePoint::new(x, t).boosted(v);
                (p.x, p.t)
            })
            .collect();
        Self {
            knots,
            left_slope: boost_slope(self.left_slope, v),
            right_slope: boost_slope(self.right_slope, v),
            lightlike_ok: self.lightlike_ok,
        }
    }

    /// Lines (point, slope) making up the surface, tails included.
    fn pieces(&self) -> Vec<((f64, f64), f64)> {
        let mut out =
            vec![(self.knots[0], self.left_slope), (*self.knots.last().expect("non-empty"), self.right_slope)];
        out.extend(self.knots.windows(2).map(|w| (w[0], (w[1].1 - w[0].1) / (w[1].0 - w[0].0))));
        out
    }
}

/// `f₀(p.x) ≤ p.t < f(p.x)`: the point lies between the initial surface
/// (inclusive) and `sigma` (exclusive), so a point exactly on `sigma` has
/// not been crossed yet.
pub fn in_volume(p: &SpacetimePoint, sigma: &SpacelikeSurface, sigma0: &SpacelikeSurface) -> bool {
    sigma0.eval(p.x) <= p.t && p.t < sigma.eval(p.x)
}

/// `σ(P)`: the past light cone of `p` joined to the part of `sigma0`
/// outside it.
pub fn past_cone_surface(p: &SpacetimePoint, sigma0: &SpacelikeSurface) -> Result<SpacelikeSurface> {
    past_cone_union(std::slice::from_ref(p), sigma0)
}

/// Upper envelope of `sigma0` and the past light cones of all `points`.
pub fn past_cone_union(points: &[SpacetimePoint], sigma0: &SpacelikeSurface) -> Result<SpacelikeSurface> {
    for p in points {
        if p.t < sigma0.eval(p.x) {
            return Err(Error::BelowInitialSurface { x: p.x, t: p.t });
        }
    }
    let envelope = |x: f64| points.iter().map(|p| p.t - (x - p.x).abs()).fold(sigma0.eval(x), f64::max);
    let mut lines = sigma0.pieces();
    for p in points {
        lines.push(((p.x, p.t), 1.0));
        lines.push(((p.x, p.t), -1.0));
    }
    let mut xs: Vec<f64> = sigma0.knots.iter().map(|k| k.0).chain(points.iter().map(|p| p.x)).collect();
    for (i, &((x1, t1), s1)) in lines.iter().enumerate() {
        for &((x2, t2), s2) in &lines[i + 1..] {
            if (s1 - s2).abs() > 1e-15 {
                // t1 + s1 (x − x1) = t2 + s2 (x − x2)
                let x = (t2 - t1 + s1 * x1 - s2 * x2) / (s1 - s2);
                if x.is_finite() {
                    xs.push(x);
                }
            }
        }
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let mut knots: Vec<(f64, f64)> = xs.iter().map(|&x| (x, envelope(x))).collect();
    // Drop interior knots that sit on a straight line through their
    // neighbours.
    let mut k = 1;
    while k + 1 < knots.len() {
        let (a, b, c) = (knots[k - 1], knots[k], knots[k + 1]);
        let s1 = (b.1 - a.1) / (b.0 - a.0);
        let s2 = (c.1 - b.1) / (c.0 - b.0);
        if (s1 - s2).abs() < 1e-12 {
            knots.remove(k);
        } else {
            k += 1;
        }
    }
    let out =
        SpacelikeSurface { knots, left_slope: sigma0.left_slope, right_slope: sigma0.right_slope, lightlike_ok: true };
    out.validate()?;
    Ok(out)
}
