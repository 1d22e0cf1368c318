//! Hilbert metric on properly convex domains.
//!
//! A domain is known only through a membership oracle ([`ConvexDomain`]).
//! For two interior points `x ≠ y` the line through them meets the boundary in
//! `z₁` and `z₂`, ordered `z₁, x, y, z₂`, and
//!
//! ```text
//! d(x, y) = ½ log [z₁ : x : y : z₂],   [z₁ : x : y : z₂] = |z₁−y||x−z₂| / (|z₁−x||y−z₂|).
//! ```
//!
//! The boundary crossings are found in the affine chart `x_{n+1} = 1` by
//! marching outward with doubling steps until the oracle reports a
//! non-interior point, then bisecting.

use serde::{Deserialize, Serialize};

use crate::projlin::{act, inverse, ProjError, ProjMap, ProjPoint};

/// Where a point sits relative to a domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Location {
    Interior,
    Boundary,
    Exterior,
    OutsideChart,
}

/// Membership oracle of a convex domain in `P(ℝ^{n+1})`.
///
/// Convexity is a contract of the implementor; chords through interior
/// points that are found to leave the domain between them are reported as
/// [`HilbertError::NotConvex`].
pub trait ConvexDomain: Send + Sync {
    /// Projective dimension `n`.
    fn dim(&self) -> usize;

    fn classify(&self, p: &ProjPoint) -> Location;

    /// Classification of the chart point `[x : 1]`.
    fn classify_chart(&self, x: &[f64]) -> Location {
        self.classify(&ProjPoint::from_chart_f64(x))
    }
}

impl<D: ConvexDomain + ?Sized> ConvexDomain for &D {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn classify(&self, p: &ProjPoint) -> Location {
        (**self).classify(p)
    }
    fn classify_chart(&self, x: &[f64]) -> Location {
        (**self).classify_chart(x)
    }
}

impl<D: ConvexDomain + ?Sized> ConvexDomain for Box<D> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn classify(&self, p: &ProjPoint) -> Location {
        (**self).classify(p)
    }
    fn classify_chart(&self, x: &[f64]) -> Location {
        (**self).classify_chart(x)
    }
}

/// The open unit ball `|x| < 1` of the chart (the Klein model).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitBall {
    pub n: usize,
}

impl ConvexDomain for UnitBall {
    fn dim(&self) -> usize {
        self.n
    }

    fn classify(&self, p: &ProjPoint) -> Location {
        match p.chart_f64() {
            Some(x) => self.classify_chart(&x),
            None => Location::OutsideChart,
        }
    }

    fn classify_chart(&self, x: &[f64]) -> Location {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        if r2 < 1.0 {
            Location::Interior
        } else if r2 == 1.0 {
            Location::Boundary
        } else {
            Location::Exterior
        }
    }
}

/// A domain given by an arbitrary classification closure.
pub struct OracleDomain<F> {
    n: usize,
    oracle: F,
}

impl<F: Fn(&ProjPoint) -> Location + Send + Sync> OracleDomain<F> {
    pub fn new(n: usize, oracle: F) -> Self {
        OracleDomain { n, oracle }
    }
}

impl<F: Fn(&ProjPoint) -> Location + Send + Sync> ConvexDomain for OracleDomain<F> {
    fn dim(&self) -> usize {
        self.n
    }
    fn classify(&self, p: &ProjPoint) -> Location {
        (self.oracle)(p)
    }
}

/// The image `g·Ω` of a domain under a projective map; membership is tested
/// by pulling points back with `g⁻¹`.
pub struct Transformed<D> {
    inner: D,
    inv: ProjMap,
}

impl<D: ConvexDomain> Transformed<D> {
    pub fn new(inner: D, g: &ProjMap) -> Result<Self, ProjError> {
        if g.dim() != inner.dim() {
            return Err(ProjError::DimensionMismatch { left: inner.dim(), right: g.dim() });
        }
        Ok(Transformed { inner, inv: inverse(&g.to_float())? })
    }
}

impl<D: ConvexDomain> ConvexDomain for Transformed<D> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn classify(&self, p: &ProjPoint) -> Location {
        match act(&self.inv, p) {
            Ok(q) => self.inner.classify(&q),
            Err(_) => Location::Exterior,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HilbertError {
    #[error("point {which} is not interior ({location:?})")]
    NotInterior { which: &'static str, location: Location },
    #[error("points coincide; the chord is undefined")]
    CoincidentPoints,
    #[error("dimension mismatch: domain {domain}, point {point}")]
    DimensionMismatch { domain: usize, point: usize },
    #[error("chord leaves the affine chart on the {end:?} side (no boundary within {extent:e})")]
    UnboundedChord { end: ChordEnd, extent: f64 },
    #[error("domain failed the convexity contract along the chord")]
    NotConvex,
    #[error("points are not collinear (residual {residual:e})")]
    NotCollinear { residual: f64 },
    #[error("cross ratio undefined: a boundary point coincides with an interior point")]
    DegenerateCrossRatio,
    #[error("point outside the open unit ball")]
    OutsideBall,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChordEnd {
    /// Beyond `x`, away from `y`.
    Backward,
    /// Beyond `y`, away from `x`.
    Forward,
}

/// Search settings for [`chord_boundary_with`].
#[derive(Clone, Copy, Debug)]
pub struct ChordSearch {
    /// Largest chart distance from the starting point searched before the
    /// chord is declared unbounded.
    pub max_extent: f64,
    pub bisection_steps: usize,
}

impl Default for ChordSearch {
    fn default() -> Self {
        ChordSearch { max_extent: 1e9, bisection_steps: 200 }
    }
}

/// Boundary points of the chord through `x` and `y`, in the order `z₁, x, y, z₂`.
#[derive(Clone, Debug)]
pub struct ChordIntersection {
    pub z1: ProjPoint,
    pub z2: ProjPoint,
    /// Chord parameters of `z₁` and `z₂` along `x + τ (y − x)`; `τ₁ < 0 < 1 < τ₂`.
    pub tau1: f64,
    pub tau2: f64,
    /// Width of the final bisection brackets in chart units (the larger one).
    pub residual: f64,
}

fn chart_of(dom: &impl ConvexDomain, p: &ProjPoint, which: &'static str) -> Result<Vec<f64>, HilbertError> {
    if p.dim() != dom.dim() {
        return Err(HilbertError::DimensionMismatch { domain: dom.dim(), point: p.dim() });
    }
    let x = p.chart_f64().ok_or(HilbertError::NotInterior { which, location: Location::OutsideChart })?;
    match dom.classify_chart(&x) {
        Location::Interior => Ok(x),
        location => Err(HilbertError::NotInterior { which, location }),
    }
}

fn along(x: &[f64], d: &[f64], tau: f64) -> Vec<f64> {
    x.iter().zip(d).map(|(a, b)| a + tau * b).collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

pub fn chord_boundary(
    dom: &impl ConvexDomain,
    x: &ProjPoint,
    y: &ProjPoint,
) -> Result<ChordIntersection, HilbertError> {
    chord_boundary_with(dom, x, y, &ChordSearch::default())
}

pub fn chord_boundary_with(
    dom: &impl ConvexDomain,
    x: &ProjPoint,
    y: &ProjPoint,
    search: &ChordSearch,
) -> Result<ChordIntersection, HilbertError> {
    let xc = chart_of(dom, x, "x")?;
    let yc = chart_of(dom, y, "y")?;
    let d: Vec<f64> = yc.iter().zip(&xc).map(|(a, b)| a - b).collect();
    let len = norm(&d);
    if len == 0.0 {
        return Err(HilbertError::CoincidentPoints);
    }
    for tau in [0.25, 0.5, 0.75] {
        if dom.classify_chart(&along(&xc, &d, tau)) != Location::Interior {
            return Err(HilbertError::NotConvex);
        }
    }
    let (tau2, w2) = find_crossing(dom, &xc, &d, 1.0, 1.0, len, search, ChordEnd::Forward)?;
    let (tau1, w1) = find_crossing(dom, &xc, &d, 0.0, -1.0, len, search, ChordEnd::Backward)?;
    Ok(ChordIntersection {
        z1: ProjPoint::from_chart_f64(&along(&xc, &d, tau1)),
        z2: ProjPoint::from_chart_f64(&along(&xc, &d, tau2)),
        tau1,
        tau2,
        residual: w1.max(w2) * len,
    })
}

/// Starting from the interior parameter `start`, marches in direction `sign`
/// until the oracle leaves the interior, then bisects. Returns the crossing
/// parameter and the final bracket width (in τ units).
#[allow(clippy::too_many_arguments)]
fn find_crossing(
    dom: &impl ConvexDomain,
    x: &[f64],
    d: &[f64],
    start: f64,
    sign: f64,
    len: f64,
    search: &ChordSearch,
    end: ChordEnd,
) -> Result<(f64, f64), HilbertError> {
    let mut inside = start;
    let mut step = 1.0;
    let mut outside = start + sign * step;
    while dom.classify_chart(&along(x, d, outside)) == Location::Interior {
        inside = outside;
        step *= 2.0;
        outside = start + sign * step;
        if step * len > search.max_extent {
            return Err(HilbertError::UnboundedChord { end, extent: search.max_extent });
        }
    }
    for _ in 0..search.bisection_steps {
        let mid = 0.5 * (inside + outside);
        if mid == inside || mid == outside {
            break;
        }
        if dom.classify_chart(&along(x, d, mid)) == Location::Interior {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    // the midpoint of the final bracket
    Ok((0.5 * (inside + outside), (outside - inside).abs()))
}

/// Cross ratio from positions on a common affine line.
pub fn cross_ratio_affine(z1: f64, x: f64, y: f64, z2: f64) -> f64 {
    ((z1 - y) * (x - z2) / ((z1 - x) * (y - z2))).abs()
}

/// Cross ratio `[z₁ : x : y : z₂]` of four collinear projective points.
///
/// The points are written in an orthonormal basis of the plane of ℝ^{n+1}
/// they span; each 2×2 determinant `det(p, q)` is the chart difference
/// `q − p` up to factors that cancel, so the value does not depend on the
/// chart or on the representatives.
pub fn cross_ratio(z1: &ProjPoint, x: &ProjPoint, y: &ProjPoint, z2: &ProjPoint) -> Result<f64, HilbertError> {
    let n = z1.dim();
    for p in [x, y, z2] {
        if p.dim() != n {
            return Err(HilbertError::DimensionMismatch { domain: n, point: p.dim() });
        }
    }
    let unit = |p: &ProjPoint| {
        let v = p.to_f64();
        let s = norm(&v);
        v.into_iter().map(|a| a / s).collect::<Vec<f64>>()
    };
    let pts = [unit(z1), unit(x), unit(y), unit(z2)];
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
    let e = pts[0].clone();
    let (f, f_norm) = pts[1..]
        .iter()
        .map(|p| {
            let k = dot(p, &e);
            let r: Vec<f64> = p.iter().zip(&e).map(|(a, b)| a - k * b).collect();
            let s = norm(&r);
            (r, s)
        })
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("three points");
    if f_norm <= 1e-15 {
        return Err(HilbertError::DegenerateCrossRatio);
    }
    let f: Vec<f64> = f.iter().map(|a| a / f_norm).collect();
    let mut plane = Vec::with_capacity(4);
    let mut worst: f64 = 0.0;
    for p in &pts {
        let (a, b) = (dot(p, &e), dot(p, &f));
        let off: Vec<f64> = p.iter().zip(e.iter().zip(&f)).map(|(v, (ei, fi))| v - a * ei - b * fi).collect();
        worst = worst.max(norm(&off));
        plane.push((a, b));
    }
    if worst > 1e-9 {
        return Err(HilbertError::NotCollinear { residual: worst });
    }
    let det = |i: usize, j: usize| plane[i].0 * plane[j].1 - plane[i].1 * plane[j].0;
    let (den1, den2) = (det(0, 1), det(2, 3));
    if den1.abs() <= 1e-15 || den2.abs() <= 1e-15 {
        return Err(HilbertError::DegenerateCrossRatio);
    }
    Ok((det(0, 2) * det(1, 3) / (den1 * den2)).abs())
}

/// Hilbert distance, or the diagnostic that the chord has no boundary point
/// inside the chart.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Distance {
    Finite(f64),
    Infinite { end: ChordEnd },
}

impl Distance {
    /// The distance, `f64::INFINITY` for an unbounded chord.
    pub fn value(&self) -> f64 {
        match self {
            Distance::Finite(d) => *d,
            Distance::Infinite { .. } => f64::INFINITY,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Distance::Finite(_))
    }
}

pub fn hilbert_distance(dom: &impl ConvexDomain, x: &ProjPoint, y: &ProjPoint) -> Result<Distance, HilbertError> {
    hilbert_distance_with(dom, x, y, &ChordSearch::default())
}

pub fn hilbert_distance_with(
    dom: &impl ConvexDomain,
    x: &ProjPoint,
    y: &ProjPoint,
    search: &ChordSearch,
) -> Result<Distance, HilbertError> {
    match chord_boundary_with(dom, x, y, search) {
        Ok(chord) => {
            let cr = cross_ratio_affine(chord.tau1, 0.0, 1.0, chord.tau2);
            Ok(Distance::Finite(0.5 * cr.ln().max(0.0)))
        }
        Err(HilbertError::CoincidentPoints) => Ok(Distance::Finite(0.0)),
        Err(HilbertError::UnboundedChord { end, .. }) => Ok(Distance::Infinite { end }),
        Err(e) => Err(e),
    }
}

/// Distance in the Klein model of hyperbolic space (chart coordinates).
///
/// Equal to `arccosh((1 − x·y) / √((1−|x|²)(1−|y|²)))`, evaluated as
/// `artanh(√(|x−y|² − |x∧y|²) / (1 − x·y))`, which keeps full precision for
/// nearby points.
pub fn klein_distance(x: &[f64], y: &[f64]) -> Result<f64, HilbertError> {
    if x.len() != y.len() {
        return Err(HilbertError::DimensionMismatch { domain: x.len(), point: y.len() });
    }
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
    if dot(x, x) >= 1.0 || dot(y, y) >= 1.0 {
        return Err(HilbertError::OutsideBall);
    }
    let diff2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    let mut wedge2 = 0.0;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let w = x[i] * y[j] - x[j] * y[i];
            wedge2 += w * w;
        }
    }
    let num = (diff2 - wedge2).max(0.0).sqrt();
    Ok((num / (1.0 - dot(x, y))).atanh())
}
