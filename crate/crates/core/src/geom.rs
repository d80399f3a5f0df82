//! Euclidean primitives, polygonal curves and positions on them.
//!
//! Points carry a runtime dimension. Every curve operation checks that
//! its inputs agree on it and reports [`GeomError::DimensionMismatch`]
//! otherwise.

use std::cmp::Ordering;
use std::fmt;

use smallvec::SmallVec;

use crate::error::GeomError;

/// Absolute tolerance used by geometric predicates.
pub const ETA: f64 = 1e-9;

/// A point in `R^d`.
#[derive(Clone, PartialEq)]
pub struct Point {
    coords: SmallVec<[f64; 3]>,
}

impl Point {
    /// Builds a point; all coordinates must be finite and `d >= 1`.
    pub fn new(coords: &[f64]) -> Result<Self, GeomError> {
        if coords.is_empty() {
            return Err(GeomError::EmptyPoint);
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(GeomError::NonFinite);
        }
        Ok(Self {
            coords: SmallVec::from_slice(coords),
        })
    }

    /// Planar point shorthand. Panics on non-finite input.
    pub fn xy(x: f64, y: f64) -> Self {
        assert!(x.is_finite() && y.is_finite(), "non-finite coordinate");
        Self {
            coords: SmallVec::from_slice(&[x, y]),
        }
    }

    pub(crate) fn from_iter_unchecked<I: IntoIterator<Item = f64>>(it: I) -> Self {
        Self {
            coords: it.into_iter().collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dist2(&self, other: &Point) -> f64 {
        self.coords
            .iter()
            .zip(other.coords.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    pub fn dist(&self, other: &Point) -> f64 {
        self.dist2(other).sqrt()
    }

    /// `self + t (other - self)`, exact at `t = 0` and `t = 1`.
    pub fn lerp(&self, other: &Point, t: f64) -> Point {
        if t == 1.0 {
            return other.clone();
        }
        Point::from_iter_unchecked(
            self.coords
                .iter()
                .zip(other.coords.iter())
                .map(|(a, b)| a + t * (b - a)),
        )
    }

    pub fn sub(&self, other: &Point) -> Point {
        Point::from_iter_unchecked(
            self.coords
                .iter()
                .zip(other.coords.iter())
                .map(|(a, b)| a - b),
        )
    }

    pub fn add(&self, other: &Point) -> Point {
        Point::from_iter_unchecked(
            self.coords
                .iter()
                .zip(other.coords.iter())
                .map(|(a, b)| a + b),
        )
    }

    pub fn scale(&self, s: f64) -> Point {
        Point::from_iter_unchecked(self.coords.iter().map(|a| a * s))
    }

    pub fn dot(&self, other: &Point) -> f64 {
        self.coords
            .iter()
            .zip(other.coords.iter())
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    fn check_dim(&self, other: &Point) -> Result<(), GeomError> {
        if self.dim() != other.dim() {
            return Err(GeomError::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coords.iter()).finish()
    }
}

/// A directed segment; `a == b` is a degenerate segment.
#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub fn new(a: Point, b: Point) -> Result<Self, GeomError> {
        a.check_dim(&b)?;
        Ok(Self { a, b })
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn len(&self) -> f64 {
        self.a.dist(&self.b)
    }

    pub fn is_degenerate(&self) -> bool {
        self.a == self.b
    }

    pub fn at(&self, t: f64) -> Point {
        self.a.lerp(&self.b, t)
    }

    /// Parameter of the closest point on the segment to `p`, in `[0,1]`.
    pub fn project_param(&self, p: &Point) -> f64 {
        project_param(&self.a, &self.b, p)
    }
}

/// A polygonal curve with at least one vertex.
///
/// A single-vertex curve behaves as one zero-length edge.
#[derive(Clone, Debug, PartialEq)]
pub struct Polyline {
    vertices: Vec<Point>,
}

impl Polyline {
    pub fn new(vertices: Vec<Point>) -> Result<Self, GeomError> {
        let first = vertices.first().ok_or(GeomError::EmptyCurve)?;
        let d = first.dim();
        for v in &vertices {
            if v.dim() != d {
                return Err(GeomError::DimensionMismatch {
                    expected: d,
                    found: v.dim(),
                });
            }
        }
        Ok(Self { vertices })
    }

    /// Planar curve from coordinate pairs. Panics on empty or non-finite input.
    pub fn from_xy(pts: &[(f64, f64)]) -> Self {
        Self::new(pts.iter().map(|&(x, y)| Point::xy(x, y)).collect()).expect("nonempty curve")
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<Point> {
        self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].dim()
    }

    pub fn vertex(&self, i: usize) -> &Point {
        &self.vertices[i]
    }

    pub fn first(&self) -> &Point {
        &self.vertices[0]
    }

    pub fn last(&self) -> &Point {
        &self.vertices[self.vertices.len() - 1]
    }

    /// Number of edges; a single vertex counts as one degenerate edge.
    pub fn edge_count(&self) -> usize {
        self.vertices.len().saturating_sub(1).max(1)
    }

    /// Endpoints of edge `i`.
    pub fn edge_points(&self, i: usize) -> (&Point, &Point) {
        let a = &self.vertices[i];
        let b = &self.vertices[(i + 1).min(self.vertices.len() - 1)];
        (a, b)
    }

    pub fn edge(&self, i: usize) -> Segment {
        let (a, b) = self.edge_points(i);
        Segment {
            a: a.clone(),
            b: b.clone(),
        }
    }

    /// Point at index coordinate `x` in `[0, edge_count]`.
    pub fn at_param(&self, x: f64) -> Point {
        let (e, t) = self.split_param(x);
        let (a, b) = self.edge_points(e);
        a.lerp(b, t)
    }

    /// Splits an index coordinate into `(edge, t)`.
    pub fn split_param(&self, x: f64) -> (usize, f64) {
        let m = self.edge_count();
        let x = x.clamp(0.0, m as f64);
        let e = (x.floor() as usize).min(m - 1);
        (e, x - e as f64)
    }

    pub fn point_at(&self, pos: CurvePos) -> Point {
        let (a, b) = self.edge_points(pos.edge);
        a.lerp(b, pos.t)
    }

    pub fn start_pos(&self) -> CurvePos {
        CurvePos { edge: 0, t: 0.0 }
    }

    pub fn end_pos(&self) -> CurvePos {
        CurvePos {
            edge: self.edge_count() - 1,
            t: 1.0,
        }
    }

    /// Checks that `pos` names a valid location on this curve.
    pub fn check_pos(&self, pos: CurvePos) -> Result<(), GeomError> {
        if pos.edge >= self.edge_count() || !(0.0..=1.0).contains(&pos.t) {
            return Err(GeomError::InvalidPosition {
                edge: pos.edge,
                t: pos.t,
            });
        }
        Ok(())
    }

    /// The curve through the given vertex indices, in the given order.
    pub fn pick(&self, indices: &[usize]) -> Polyline {
        Polyline {
            vertices: indices.iter().map(|&i| self.vertices[i].clone()).collect(),
        }
    }

    /// Maximum distance between two vertices (the curve's diameter).
    pub fn diameter(&self) -> f64 {
        let mut best = 0.0f64;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                best = best.max(a.dist2(b));
            }
        }
        best.sqrt()
    }

    /// Total Euclidean length.
    pub fn length(&self) -> f64 {
        self.vertices.windows(2).map(|w| w[0].dist(&w[1])).sum()
    }
}

/// A location on a curve: an edge index and a fraction along that edge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvePos {
    pub edge: usize,
    pub t: f64,
}

impl CurvePos {
    pub fn new(edge: usize, t: f64) -> Self {
        Self { edge, t }
    }

    /// Position from an index coordinate on a curve with `edges` edges.
    pub fn from_param(x: f64, edges: usize) -> Self {
        let x = x.clamp(0.0, edges as f64);
        let e = (x.floor() as usize).min(edges - 1);
        Self {
            edge: e,
            t: x - e as f64,
        }
    }

    /// Index coordinate `edge + t`.
    pub fn param(&self) -> f64 {
        self.edge as f64 + self.t
    }

    /// Curve order; ties at shared vertices compare equal.
    pub fn order(&self, other: &CurvePos) -> Ordering {
        self.param()
            .partial_cmp(&other.param())
            .unwrap_or(Ordering::Equal)
    }
}

/// Parameter in `[0,1]` of the closest point on segment `ab` to `p`.
pub fn project_param(a: &Point, b: &Point, p: &Point) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for ((ai, bi), pi) in a.coords.iter().zip(b.coords.iter()).zip(p.coords.iter()) {
        let d = bi - ai;
        num += (pi - ai) * d;
        den += d * d;
    }
    if den == 0.0 {
        0.0
    } else {
        (num / den).clamp(0.0, 1.0)
    }
}

/// Distance from `p` to the segment `ab`.
pub fn point_segment_dist(p: &Point, a: &Point, b: &Point) -> f64 {
    let t = project_param(a, b, p);
    let mut s = 0.0;
    for ((ai, bi), pi) in a.coords.iter().zip(b.coords.iter()).zip(p.coords.iter()) {
        let q = ai + t * (bi - ai);
        s += (pi - q) * (pi - q);
    }
    s.sqrt()
}

/// Fréchet distance between two segments: the larger endpoint distance.
pub fn segment_frechet(s1: &Segment, s2: &Segment) -> Result<f64, GeomError> {
    s1.a.check_dim(&s2.a)?;
    Ok(s1.a.dist(&s2.a).max(s1.b.dist(&s2.b)))
}

/// Closest point on `s` to `p` and its distance.
pub fn point_segment_nearest(p: &Point, s: &Segment) -> Result<(Point, f64), GeomError> {
    p.check_dim(&s.a)?;
    let q = s.at(s.project_param(p));
    let d = p.dist(&q);
    Ok((q, d))
}

/// Parameter on `s` where the bisector of `u` and `v` crosses it.
///
/// If the whole segment lies on the bisector, returns the parameter
/// minimizing the common distance.
pub fn bisector_param(u: &Point, v: &Point, s: &Segment) -> Result<Option<f64>, GeomError> {
    u.check_dim(v)?;
    u.check_dim(&s.a)?;
    if u == v {
        return Err(GeomError::DegenerateBisector);
    }
    // |x-u|^2 = |x-v|^2  <=>  2 x.(v-u) = |v|^2 - |u|^2
    let w = v.sub(u);
    let c = v.dot(v) - u.dot(u);
    let d = s.b.sub(&s.a);
    let lhs0 = 2.0 * s.a.dot(&w) - c;
    let slope = 2.0 * d.dot(&w);
    let tol = ETA * (1.0 + c.abs() + lhs0.abs());
    if slope.abs() <= f64::EPSILON * (1.0 + d.norm() * w.norm()) {
        if lhs0.abs() <= tol {
            return Ok(Some(s.project_param(u)));
        }
        return Ok(None);
    }
    let t = -lhs0 / slope;
    let slack = ETA / (1.0 + s.len());
    if t < -slack || t > 1.0 + slack {
        return Ok(None);
    }
    Ok(Some(t.clamp(0.0, 1.0)))
}

/// Point where the bisector of `u`, `v` meets `s`, with the common distance.
pub fn bisector_segment_hit(
    u: &Point,
    v: &Point,
    s: &Segment,
) -> Result<Option<(Point, f64)>, GeomError> {
    Ok(bisector_param(u, v, s)?.map(|t| {
        let x = s.at(t);
        let r = x.dist(u).max(x.dist(v));
        (x, r)
    }))
}

/// The subcurve of `z` between positions `a <= b`.
pub fn subcurve(z: &Polyline, a: CurvePos, b: CurvePos) -> Result<Polyline, GeomError> {
    z.check_pos(a)?;
    z.check_pos(b)?;
    if a.order(&b) == Ordering::Greater {
        return Err(GeomError::PositionOrder);
    }
    if a.param() == b.param() {
        return Ok(Polyline {
            vertices: vec![z.point_at(a)],
        });
    }
    let mut out = vec![z.point_at(a)];
    for i in a.edge + 1..z.len() {
        if (i as f64) >= b.param() {
            break;
        }
        if (i as f64) > a.param() {
            out.push(z.vertex(i).clone());
        }
    }
    out.push(z.point_at(b));
    Ok(Polyline { vertices: out })
}

/// Subcurve between two index coordinates `a <= b`, without validation.
pub(crate) fn subcurve_param(z: &Polyline, a: f64, b: f64) -> Polyline {
    let mut out = vec![z.at_param(a)];
    if b > a {
        let lo = a.floor() as usize + 1;
        let hi = b.ceil() as usize;
        for i in lo..hi.min(z.len()) {
            if (i as f64) > a && (i as f64) < b {
                out.push(z.vertex(i).clone());
            }
        }
        out.push(z.at_param(b));
    }
    Polyline { vertices: out }
}

/// The segment joining a curve's endpoints.
pub fn spine(z: &Polyline) -> Segment {
    Segment {
        a: z.first().clone(),
        b: z.last().clone(),
    }
}
