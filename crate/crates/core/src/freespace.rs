//! Free-space diagram primitives and the classic Fréchet distance.
//!
//! Parametric coordinates are index coordinates: a value `x` in
//! `[0, edge_count]` names edge `floor(x)` at fraction `x - floor(x)`.
//! Cell `(i, j)` pairs edge `i` of the first curve with edge `j` of the
//! second.

use crate::geom::{bisector_param, point_segment_dist, Point, Polyline, Segment, ETA};

/// A point in the joint parametric space of two curves.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParamPoint {
    pub x: f64,
    pub y: f64,
}

impl ParamPoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// Side of a cell boundary carrying a free-space interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Bottom,
    Left,
    Top,
    Right,
}

/// A nonempty free-space interval on one side of a cell, in local `[0,1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FreeSpaceInterval {
    pub cell: (usize, usize),
    pub side: Side,
    pub lo: f64,
    pub hi: f64,
}

/// Free intervals on the four sides of one cell (local parameters).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CellIntervals {
    pub bottom: Option<(f64, f64)>,
    pub left: Option<(f64, f64)>,
    pub top: Option<(f64, f64)>,
    pub right: Option<(f64, f64)>,
}

/// Threshold inflated by the predicate tolerance.
#[inline]
pub(crate) fn inflate(delta: f64) -> f64 {
    delta + ETA * (1.0 + delta)
}

/// Parameters `t` in `[0,1]` with `|a + t (b - a) - c| <= r`.
pub fn ball_interval(a: &Point, b: &Point, c: &Point, r: f64) -> Option<(f64, f64)> {
    let ca = a.coords();
    let cb = b.coords();
    let cc = c.coords();
    let mut dd = 0.0;
    let mut num = 0.0;
    for k in 0..ca.len() {
        let d = cb[k] - ca[k];
        dd += d * d;
        num += (cc[k] - ca[k]) * d;
    }
    if dd == 0.0 {
        return if a.dist(c) <= r {
            Some((0.0, 1.0))
        } else {
            None
        };
    }
    let lambda = num / dd;
    let mut h2 = 0.0;
    for k in 0..ca.len() {
        let f = ca[k] + lambda * (cb[k] - ca[k]) - cc[k];
        h2 += f * f;
    }
    let r2 = r * r;
    if h2 > r2 {
        return None;
    }
    let w = ((r2 - h2) / dd).sqrt();
    let mut lo = lambda - w;
    let mut hi = lambda + w;
    if hi < -ETA || lo > 1.0 + ETA {
        return None;
    }
    if lo < ETA {
        lo = 0.0;
    }
    if hi > 1.0 - ETA {
        hi = 1.0;
    }
    lo = lo.clamp(0.0, 1.0);
    hi = hi.clamp(0.0, 1.0);
    if lo > hi {
        return None;
    }
    Some((lo, hi))
}

/// Distance between the points at `p` on two curves.
pub fn elevation(x: &Polyline, y: &Polyline, p: ParamPoint) -> f64 {
    x.at_param(p.x).dist(&y.at_param(p.y))
}

/// Free intervals on the four sides of the cell spanned by two edges.
///
/// Bottom and top are parameterized along `xedge`, left and right along
/// `yedge`.
pub fn cell_free_intervals(xedge: &Segment, yedge: &Segment, delta: f64) -> CellIntervals {
    CellIntervals {
        bottom: ball_interval(&xedge.a, &xedge.b, &yedge.a, delta),
        top: ball_interval(&xedge.a, &xedge.b, &yedge.b, delta),
        left: ball_interval(&yedge.a, &yedge.b, &xedge.a, delta),
        right: ball_interval(&yedge.a, &yedge.b, &xedge.b, delta),
    }
}

/// Intersects a free interval with `[s, 1]`.
#[inline]
pub(crate) fn clip_from(iv: Option<(f64, f64)>, s: f64) -> Option<(f64, f64)> {
    iv.and_then(|(lo, hi)| {
        let lo = lo.max(s);
        (lo <= hi).then_some((lo, hi))
    })
}

/// Decides whether the Fréchet distance of `x` and `y` is at most `delta`.
pub fn frechet_decide(x: &Polyline, y: &Polyline, delta: f64) -> bool {
    let d = inflate(delta);
    if x.first().dist(y.first()) > d || x.last().dist(y.last()) > d {
        return false;
    }
    let nx = x.edge_count();
    let ny = y.edge_count();
    let xv = x.vertices();
    let yv = y.vertices();
    let xp = |i: usize| &xv[i.min(xv.len() - 1)];
    let yp = |j: usize| &yv[j.min(yv.len() - 1)];

    // reachable part of the bottom boundary of row 0: a chain from (0,0)
    let mut bottom: Vec<Option<(f64, f64)>> = vec![None; nx];
    for (i, slot) in bottom.iter_mut().enumerate() {
        match ball_interval(xp(i), xp(i + 1), yp(0), d) {
            Some((0.0, hi)) => {
                *slot = Some((0.0, hi));
                if hi < 1.0 {
                    break;
                }
            }
            _ => break,
        }
    }
    let mut left_open = true;
    let mut corner = false;
    for j in 0..ny {
        let mut left = None;
        if left_open {
            match ball_interval(yp(j), yp(j + 1), xp(0), d) {
                Some((0.0, hi)) => {
                    left = Some((0.0, hi));
                    left_open = hi >= 1.0;
                }
                _ => left_open = false,
            }
        }
        #[allow(clippy::needless_range_loop)]
        for i in 0..nx {
            let b = bottom[i];
            if b.is_none() && left.is_none() {
                bottom[i] = None;
                continue;
            }
            let top_free = ball_interval(xp(i), xp(i + 1), yp(j + 1), d);
            let right_free = ball_interval(yp(j), yp(j + 1), xp(i + 1), d);
            let top = if left.is_some() {
                top_free
            } else {
                clip_from(top_free, b.map_or(2.0, |v| v.0))
            };
            let right = if b.is_some() {
                right_free
            } else {
                clip_from(right_free, left.map_or(2.0, |v| v.0))
            };
            if i == nx - 1 && j == ny - 1 {
                corner = top.is_some_and(|t| t.1 >= 1.0) || right.is_some_and(|r| r.1 >= 1.0);
            }
            bottom[i] = top;
            left = right;
        }
    }
    corner
}

/// Options for [`frechet_value_with`].
#[derive(Clone, Copy, Debug)]
pub struct FrechetOptions {
    /// Above this many total vertices the value is found by bisection.
    pub exact_cap: usize,
    /// Bisection tolerance.
    pub tol: f64,
}

impl Default for FrechetOptions {
    fn default() -> Self {
        Self {
            exact_cap: 400,
            tol: 1e-9,
        }
    }
}

/// The Fréchet distance of two curves.
pub fn frechet_value(x: &Polyline, y: &Polyline) -> f64 {
    frechet_value_with(x, y, FrechetOptions::default())
}

/// The Fréchet distance with an explicit exactness cap and tolerance.
pub fn frechet_value_with(x: &Polyline, y: &Polyline, opts: FrechetOptions) -> f64 {
    let e = x.first().dist(y.first()).max(x.last().dist(y.last()));
    if x.len() == 1 {
        return y
            .vertices()
            .iter()
            .map(|p| p.dist(x.first()))
            .fold(e, f64::max);
    }
    if y.len() == 1 {
        return x
            .vertices()
            .iter()
            .map(|p| p.dist(y.first()))
            .fold(e, f64::max);
    }
    if x.len() == 2 {
        return curve_segment_frechet_slice(y.vertices(), x.first(), x.last());
    }
    if y.len() == 2 {
        return curve_segment_frechet_slice(x.vertices(), y.first(), y.last());
    }
    if x.len() + y.len() <= opts.exact_cap {
        let cands = critical_values(x, y, e);
        let (mut lo, mut hi) = (0usize, cands.len() - 1);
        if frechet_decide(x, y, cands[hi]) {
            while lo < hi {
                let mid = (lo + hi) / 2;
                if frechet_decide(x, y, cands[mid]) {
                    hi = mid;
                } else {
                    lo = mid + 1;
                }
            }
            return cands[lo];
        }
    }
    bisect_value(x, y, e, opts.tol)
}

fn bisect_value(x: &Polyline, y: &Polyline, e: f64, tol: f64) -> f64 {
    if frechet_decide(x, y, e) {
        return e;
    }
    let mut hi = 0.0f64;
    for p in x.vertices() {
        for q in y.vertices() {
            hi = hi.max(p.dist2(q));
        }
    }
    let mut hi = hi.sqrt();
    let mut lo = e;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if frechet_decide(x, y, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Sorted candidate values not below `floor`: endpoint, vertex-edge and
/// monotonicity event radii.
fn critical_values(x: &Polyline, y: &Polyline, floor: f64) -> Vec<f64> {
    let mut out = vec![floor];
    let mut push = |v: f64| {
        if v > floor {
            out.push(v);
        }
    };
    for (a, b) in [(x, y), (y, x)] {
        for p in a.vertices() {
            for j in 0..b.edge_count() {
                let (s, t) = b.edge_points(j);
                push(point_segment_dist(p, s, t));
            }
        }
        let av = a.vertices();
        for j in 0..b.edge_count() {
            let seg = b.edge(j);
            for k in 0..av.len() {
                for l in k + 1..av.len() {
                    if av[k] == av[l] {
                        continue;
                    }
                    if let Ok(Some(t)) = bisector_param(&av[k], &av[l], &seg) {
                        let q = seg.at(t);
                        push(q.dist(&av[k]).max(q.dist(&av[l])));
                    }
                }
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// Exact Fréchet distance between a curve and a segment.
pub fn curve_segment_frechet(z: &Polyline, s: &Segment) -> f64 {
    curve_segment_frechet_slice(z.vertices(), &s.a, &s.b)
}

struct VertexProj {
    lambda: f64,
    h2: f64,
    clamped: f64,
}

/// Exact Fréchet distance between the curve through `z` and segment `ab`.
///
/// The value is the largest of the endpoint distances, the vertex
/// distances to the segment, and for every pair `i < j` whose projections
/// appear in reversed order, the smallest radius at which a common
/// parameter serves both. The pairs that matter are found by repeatedly
/// raising the radius to the worst violation of the monotone greedy scan.
pub(crate) fn curve_segment_frechet_slice(z: &[Point], a: &Point, b: &Point) -> f64 {
    let ends = z[0].dist(a).max(z[z.len() - 1].dist(b));
    let ell2 = a.dist2(b);
    if ell2 == 0.0 {
        return z.iter().map(|p| p.dist(a)).fold(ends, f64::max);
    }
    let proj: Vec<VertexProj> = z
        .iter()
        .map(|p| {
            let mut num = 0.0;
            for ((ai, bi), pi) in a.coords().iter().zip(b.coords()).zip(p.coords()) {
                num += (pi - ai) * (bi - ai);
            }
            let lambda = num / ell2;
            let mut h2 = 0.0;
            for ((ai, bi), pi) in a.coords().iter().zip(b.coords()).zip(p.coords()) {
                let f = ai + lambda * (bi - ai) - pi;
                h2 += f * f;
            }
            VertexProj {
                lambda,
                h2,
                clamped: lambda.clamp(0.0, 1.0),
            }
        })
        .collect();
    let mut delta = ends;
    for (p, vp) in z.iter().zip(&proj) {
        let q = a.lerp(b, vp.clamped);
        delta = delta.max(p.dist(&q));
    }
    let pair = |i: usize, j: usize| -> f64 {
        let (pi, pj) = (&proj[i], &proj[j]);
        if pi.clamped <= pj.clamped {
            return 0.0;
        }
        let ai2 = z[i].dist2(a);
        let aj2 = z[j].dist2(a);
        let t =
            ((ai2 - aj2) / (2.0 * ell2 * (pi.lambda - pj.lambda))).clamp(pj.clamped, pi.clamped);
        let q = a.lerp(b, t);
        q.dist(&z[i]).max(q.dist(&z[j]))
    };
    let inv_ell = 1.0 / ell2.sqrt();
    for _round in 0..z.len() + 8 {
        let d2 = delta * delta;
        let mut best_a = f64::NEG_INFINITY;
        let mut best_i = 0usize;
        let mut next = delta;
        for (j, vp) in proj.iter().enumerate() {
            let w = (d2 - vp.h2).max(0.0).sqrt() * inv_ell;
            let lo = (vp.lambda - w).max(0.0);
            let hi = (vp.lambda + w).min(1.0);
            if best_a > hi + 1e-12 {
                next = next.max(pair(best_i, j));
            }
            if lo > best_a {
                best_a = lo;
                best_i = j;
            }
        }
        if next <= delta * (1.0 + 1e-14) {
            return delta;
        }
        delta = next;
    }
    // pathological inputs: fall back to the full pairwise maximum
    for i in 0..z.len() {
        for j in i + 1..z.len() {
            delta = delta.max(pair(i, j));
        }
    }
    delta
}

/// Euclidean distance between segments `ab` and `cd`.
pub fn segment_segment_dist(a: &Point, b: &Point, c: &Point, d: &Point) -> f64 {
    let u = b.sub(a);
    let v = d.sub(c);
    let w = a.sub(c);
    let uu = u.dot(&u);
    let vv = v.dot(&v);
    let uv = u.dot(&v);
    let uw = u.dot(&w);
    let vw = v.dot(&w);
    let mut best = point_segment_dist(a, c, d)
        .min(point_segment_dist(b, c, d))
        .min(point_segment_dist(c, a, b))
        .min(point_segment_dist(d, a, b));
    let den = uu * vv - uv * uv;
    if den > 1e-18 * uu * vv && uu > 0.0 && vv > 0.0 {
        let s = (uv * vw - vv * uw) / den;
        let t = (uu * vw - uv * uw) / den;
        if (0.0..=1.0).contains(&s) && (0.0..=1.0).contains(&t) {
            best = best.min(a.lerp(b, s).dist(&c.lerp(d, t)));
        }
    }
    best
}

/// Number of cells whose free space at `delta` is nonempty.
pub fn relevant_complexity(x: &Polyline, y: &Polyline, delta: f64) -> usize {
    let d = inflate(delta);
    let mut count = 0;
    for i in 0..x.edge_count() {
        let (a, b) = x.edge_points(i);
        for j in 0..y.edge_count() {
            let (c, e) = y.edge_points(j);
            if segment_segment_dist(a, b, c, e) <= d {
                count += 1;
            }
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bump() -> (Polyline, Polyline) {
        (
            Polyline::from_xy(&[(0.0, 0.0), (4.0, 0.0)]),
            Polyline::from_xy(&[(0.0, 0.0), (2.0, 3.0), (4.0, 0.0)]),
        )
    }

    /// Brute-force segment Fréchet: maximum over all ordered pairs.
    fn pairwise_segment_frechet(z: &[Point], a: &Point, b: &Point) -> f64 {
        let mut best = z[0].dist(a).max(z[z.len() - 1].dist(b));
        for i in 0..z.len() {
            best = best.max(point_segment_dist(&z[i], a, b));
            for j in i + 1..z.len() {
                // min over t of max(|z_i - s(t')|, |z_j - s(t'')|), t' <= t''
                let n = 4000;
                let mut m = f64::INFINITY;
                let mut run = f64::INFINITY;
                // prefix minimum of g_i over t' <= t, combined with g_j at t
                for k in 0..=n {
                    let t = k as f64 / n as f64;
                    let q = a.lerp(b, t);
                    run = run.min(q.dist(&z[i]));
                    m = m.min(run.max(q.dist(&z[j])));
                }
                best = best.max(m);
            }
        }
        best
    }

    #[test]
    fn elevation_examples() {
        let x = Polyline::from_xy(&[(0.0, 0.0), (1.0, 0.0)]);
        let y = Polyline::from_xy(&[(0.0, 1.0), (1.0, 1.0)]);
        assert_eq!(elevation(&x, &x, ParamPoint::new(0.3, 0.3)), 0.0);
        assert!((elevation(&x, &y, ParamPoint::new(0.0, 1.0)) - 2f64.sqrt()).abs() < 1e-15);
        let (bx, by) = bump();
        // X(0.5 of 1 edge) = (2,0); Y at 0.5 of edge 0 = (1,1.5)
        let e = elevation(&bx, &by, ParamPoint::new(0.5, 0.5));
        assert!((e - (1.0f64 + 2.25).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn cell_interval_examples() {
        let s = Segment::new(Point::xy(0.0, 0.0), Point::xy(1.0, 0.0)).unwrap();
        let c = cell_free_intervals(&s, &s, 0.5);
        assert_eq!(c.top, Some((0.5, 1.0)));
        assert_eq!(c.bottom, Some((0.0, 0.5)));
        let far = Segment::new(Point::xy(0.0, 5.0), Point::xy(1.0, 5.0)).unwrap();
        assert_eq!(cell_free_intervals(&s, &far, 1.0), CellIntervals::default());
        let all = cell_free_intervals(&s, &far, 10.0);
        for iv in [all.top, all.bottom, all.left, all.right] {
            assert_eq!(iv, Some((0.0, 1.0)));
        }
    }

    #[test]
    fn decide_examples() {
        let x = Polyline::from_xy(&[(0.0, 0.0), (1.0, 0.0)]);
        let y = Polyline::from_xy(&[(0.0, 1.0), (1.0, 1.0)]);
        assert!(frechet_decide(&x, &x, 0.0));
        assert!(!frechet_decide(&x, &y, 0.99));
        assert!(frechet_decide(&x, &y, 1.0));
        let (bx, by) = bump();
        assert!(!frechet_decide(&bx, &by, 2.9));
        assert!(frechet_decide(&bx, &by, 3.0));
    }

    #[test]
    fn value_examples() {
        let x = Polyline::from_xy(&[(0.0, 0.0), (1.0, 0.0), (3.0, 1.0)]);
        assert_eq!(frechet_value(&x, &x), 0.0);
        let p = Polyline::from_xy(&[(0.0, 0.0), (1.0, 0.0)]);
        let q = Polyline::from_xy(&[(0.0, 1.0), (1.0, 1.0)]);
        assert_eq!(frechet_value(&p, &q), 1.0);
        let (bx, by) = bump();
        assert!((frechet_value(&bx, &by) - 3.0).abs() < 1e-12);
        assert!((curve_segment_frechet(&by, &bx.edge(0)) - 3.0).abs() < 1e-12);
        assert_eq!(curve_segment_frechet(&q, &p.edge(0)), 1.0);
        assert_eq!(curve_segment_frechet(&p, &p.edge(0)), 0.0);
    }

    #[test]
    fn backtracking_curve_against_segment() {
        // vertex order along the segment is reversed in the middle
        let z = Polyline::from_xy(&[(0.0, 0.0), (3.0, 1.0), (1.0, -1.0), (4.0, 0.0)]);
        let s = Segment::new(Point::xy(0.0, 0.0), Point::xy(4.0, 0.0)).unwrap();
        let exact = curve_segment_frechet(&z, &s);
        // common point between (3,1) and (1,-1) on the x-axis is x=2 -> sqrt(2)
        assert!((exact - 2f64.sqrt()).abs() < 1e-12);
        let general = frechet_value(&z, &Polyline::from_xy(&[(0.0, 0.0), (4.0, 0.0)]));
        assert!((general - exact).abs() < 1e-9);
        let brute = pairwise_segment_frechet(z.vertices(), &s.a, &s.b);
        assert!((brute - exact).abs() < 1e-3);
    }

    #[test]
    fn relevant_complexity_examples() {
        let s = Polyline::from_xy(&[(0.0, 0.0), (1.0, 0.0)]);
        assert_eq!(relevant_complexity(&s, &s, 10.0), 1);
        let far = Polyline::from_xy(&[(0.0, 5.0), (1.0, 5.0)]);
        assert_eq!(relevant_complexity(&s, &far, 1.0), 0);
        let (bx, by) = bump();
        // edge (0,0)-(2,3) touches X; so does (2,3)-(4,0)
        assert_eq!(relevant_complexity(&bx, &by, 1.0), 2);
    }

    #[test]
    fn segment_distance_crossing() {
        let d = segment_segment_dist(
            &Point::xy(0.0, -1.0),
            &Point::xy(0.0, 1.0),
            &Point::xy(-1.0, 0.0),
            &Point::xy(1.0, 0.0),
        );
        assert_eq!(d, 0.0);
        let d = segment_segment_dist(
            &Point::xy(0.0, 0.0),
            &Point::xy(1.0, 0.0),
            &Point::xy(0.5, 2.0),
            &Point::xy(0.5, 3.0),
        );
        assert_eq!(d, 2.0);
    }
}
