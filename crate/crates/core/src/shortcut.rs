//! Directed vertex-restricted shortcut Fréchet distance.
//!
//! A shortcut curve of `Y` replaces runs of `Y` between two of its
//! vertices by the segment joining them. In the free-space diagram of `X`
//! and `Y` (index coordinates, `x` along `X`, `y` along `Y`) such a segment
//! is a *tunnel* from a point on the line `y = u` to a point on the line
//! `y = v`; its price is the Fréchet distance between the covered piece of
//! `X` and the segment `Y_u Y_v`.
//!
//! [`decider_core`] sweeps the nonempty cells row by row, propagating
//! reachable intervals and testing one candidate tunnel per horizontal free
//! interval. [`decider`] wraps it with a simplification step, and
//! [`shortcut_frechet`] turns the decider into a `(3+ε)`-approximation via
//! two coarse search stages and a geometric refinement.

use std::cell::OnceCell;
use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use crate::error::GeomError;
use crate::freespace::{
    ball_interval, clip_from, curve_segment_frechet, curve_segment_frechet_slice, inflate,
    ParamPoint,
};
use crate::gateset::GateSet;
use crate::geom::{bisector_param, project_param, spine, subcurve_param, Point, Polyline};
use crate::segquery::SegQueryIndex;
use crate::simplify::simplify_mu;
use crate::spatial::{vertex_edge_pairs, wspd_distances, PairSide};

/// Tunnels spanning at most this many edges of `X` are priced exactly when
/// the factor-3 estimate is inconclusive.
const EXACT_TUNNEL_EDGES: f64 = 1024.0;

/// Relative size of the threshold below which the distance is reported as 0.
pub const ZERO_FLOOR: f64 = 1e-12;

/// A tunnel between two points of the parametric space with its price.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tunnel {
    pub start: ParamPoint,
    pub end: ParamPoint,
    pub price: f64,
}

impl Tunnel {
    /// Tunnel from `start` to `end` with its exact price.
    pub fn exact(
        x: &Polyline,
        y: &Polyline,
        start: ParamPoint,
        end: ParamPoint,
    ) -> Result<Self, GeomError> {
        check_params(x, y, start, end)?;
        Ok(Self {
            start,
            end,
            price: exact_price(x, y, start, end),
        })
    }
}

fn check_params(x: &Polyline, y: &Polyline, p: ParamPoint, q: ParamPoint) -> Result<(), GeomError> {
    let (nx, ny) = (x.edge_count() as f64, y.edge_count() as f64);
    for v in [p, q] {
        if !(0.0..=nx).contains(&v.x) {
            return Err(GeomError::OutOfRange {
                name: "x",
                value: v.x,
            });
        }
        if !(0.0..=ny).contains(&v.y) {
            return Err(GeomError::OutOfRange {
                name: "y",
                value: v.y,
            });
        }
    }
    if p.x > q.x {
        return Err(GeomError::PositionOrder);
    }
    Ok(())
}

/// Exact price of the tunnel from `p` to `q`: the Fréchet distance between
/// `X[x(p)..x(q)]` and the segment `Y(y(p)) Y(y(q))`. Requires
/// `x(p) <= x(q)`; the `y` order is free.
pub fn exact_price(x: &Polyline, y: &Polyline, p: ParamPoint, q: ParamPoint) -> f64 {
    let sub = subcurve_param(x, p.x, q.x);
    curve_segment_frechet_slice(sub.vertices(), &y.at_param(p.y), &y.at_param(q.y))
}

/// Price estimate `φ` with `φ <= price <= (1+ε) φ`, where `ε` is the
/// accuracy of `idx`, built over `X`. Exact when the covered piece of `X`
/// is straight.
pub fn tunnel_price(
    idx: &SegQueryIndex,
    y: &Polyline,
    p: ParamPoint,
    q: ParamPoint,
) -> Result<f64, GeomError> {
    check_params(idx.curve(), y, p, q)?;
    let (v, exact) = idx.query_flagged(p.x, q.x, &y.at_param(p.y), &y.at_param(q.y));
    Ok(if exact { v } else { v / (1.0 + idx.eps()) })
}

/// All tunnels from edge `e` to edge `e2` of `X` between vertices `u` and
/// `v` of `Y`, summarized by the canonical member.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TunnelFamily {
    pub e: usize,
    pub e2: usize,
    pub u: usize,
    pub v: usize,
    /// Smallest threshold at which some member has both endpoints free.
    pub min_radius: f64,
    /// `x` coordinates of the canonical tunnel's endpoints.
    pub canonical: (f64, f64),
}

impl TunnelFamily {
    pub fn start(&self) -> ParamPoint {
        ParamPoint::new(self.canonical.0, self.u as f64)
    }

    pub fn end(&self) -> ParamPoint {
        ParamPoint::new(self.canonical.1, self.v as f64)
    }

    /// Exact price of the canonical tunnel.
    pub fn price(&self, x: &Polyline, y: &Polyline) -> f64 {
        exact_price(x, y, self.start(), self.end())
    }
}

/// The canonical tunnel of the family `(e, e2, u, v)`.
///
/// Independent closest points are used when they respect the order along
/// `X`. Otherwise `e == e2` and both endpoints collapse onto the point of
/// the edge minimizing the larger of the two distances.
pub fn canonical_tunnel(
    x: &Polyline,
    y: &Polyline,
    e: usize,
    e2: usize,
    u: usize,
    v: usize,
) -> Result<TunnelFamily, GeomError> {
    if e2 >= x.edge_count() || e > e2 {
        return Err(GeomError::OutOfRange {
            name: "edge",
            value: e2 as f64,
        });
    }
    if u >= y.len() || v >= y.len() {
        return Err(GeomError::OutOfRange {
            name: "vertex",
            value: u.max(v) as f64,
        });
    }
    let (pu, pv) = (y.vertex(u), y.vertex(v));
    let (a, b) = x.edge_points(e);
    let (c, d) = x.edge_points(e2);
    let s = project_param(a, b, pu);
    let t = project_param(c, d, pv);
    if e < e2 || s <= t {
        let r = a.lerp(b, s).dist(pu).max(c.lerp(d, t).dist(pv));
        return Ok(TunnelFamily {
            e,
            e2,
            u,
            v,
            min_radius: r,
            canonical: (e as f64 + s, e2 as f64 + t),
        });
    }
    // reversed closest points on a single edge
    let g = |w: f64| {
        let p = a.lerp(b, w);
        p.dist(pu).max(p.dist(pv))
    };
    let mut best = (g(s), s);
    for w in [t] {
        if g(w) < best.0 {
            best = (g(w), w);
        }
    }
    if pu != pv {
        if let Ok(Some(w)) = bisector_param(pu, pv, &x.edge(e)) {
            let w = w.clamp(t, s);
            if g(w) < best.0 {
                best = (g(w), w);
            }
        }
    }
    let w = e as f64 + best.1;
    Ok(TunnelFamily {
        e,
        e2,
        u,
        v,
        min_radius: best.0,
        canonical: (w, w),
    })
}

/// Verdict of the decision procedure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Answer {
    /// The distance is at most `3(1+ε)δ`.
    Yes,
    /// The distance exceeds `δ`.
    No,
}

/// A shortcut curve of `Y` and the monotone path realizing it.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    /// Vertex indices of `Y` on the shortcut curve, increasing.
    pub vertices: Vec<usize>,
    /// Maximal runs `(first, last)` of consecutive kept vertices.
    pub kept_intervals: Vec<(usize, usize)>,
    /// Pairs of kept vertices joined by a shortcut segment.
    pub shortcuts: Vec<(usize, usize)>,
    /// Breakpoints of the matching in index coordinates of `X` and `Y`.
    pub matching_breakpoints: Vec<ParamPoint>,
}

impl Witness {
    pub fn from_vertices(vertices: Vec<usize>, matching_breakpoints: Vec<ParamPoint>) -> Self {
        let mut kept_intervals: Vec<(usize, usize)> = Vec::new();
        let mut shortcuts = Vec::new();
        for (k, &v) in vertices.iter().enumerate() {
            match kept_intervals.last_mut() {
                Some(run) if run.1 + 1 == v => run.1 = v,
                _ => kept_intervals.push((v, v)),
            }
            if k > 0 && vertices[k - 1] + 1 < v {
                shortcuts.push((vertices[k - 1], v));
            }
        }
        Self {
            vertices,
            kept_intervals,
            shortcuts,
            matching_breakpoints,
        }
    }

    /// All of `Y`, matched along the diagonal of its own index space.
    pub fn identity(n: usize) -> Self {
        let m = n.saturating_sub(1).max(1) as f64;
        Self::from_vertices(
            (0..n).collect(),
            vec![ParamPoint::new(0.0, 0.0), ParamPoint::new(m, m)],
        )
    }

    /// The shortcut curve of `y` described by this witness.
    pub fn curve(&self, y: &Polyline) -> Polyline {
        y.pick(&self.vertices)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeciderVerdict {
    pub answer: Answer,
    pub witness: Option<Witness>,
}

impl DeciderVerdict {
    fn no() -> Self {
        Self {
            answer: Answer::No,
            witness: None,
        }
    }

    pub fn is_yes(&self) -> bool {
        self.answer == Answer::Yes
    }
}

/// Duplicates the vertex of a single-vertex curve so that it has an edge.
fn padded(z: &Polyline) -> Polyline {
    if z.len() == 1 {
        Polyline::new(vec![z.first().clone(), z.first().clone()]).unwrap_or_else(|_| z.clone())
    } else {
        z.clone()
    }
}

/// Everything one decision run needs for tunnel tests.
struct TunnelCtx<'a> {
    x: &'a Polyline,
    y: &'a Polyline,
    eps: f64,
    d: f64,
    given: Option<&'a SegQueryIndex>,
    idx: OnceCell<Option<SegQueryIndex>>,
}

impl<'a> TunnelCtx<'a> {
    fn new(x: &'a Polyline, y: &'a Polyline, eps: f64, delta: f64) -> Self {
        Self {
            x,
            y,
            eps,
            d: inflate(delta),
            given: None,
            idx: OnceCell::new(),
        }
    }

    fn index(&self) -> Option<&SegQueryIndex> {
        if let Some(idx) = self.given {
            return Some(idx);
        }
        self.idx
            .get_or_init(|| SegQueryIndex::build(self.x, self.eps.clamp(1e-6, 1.0)).ok())
            .as_ref()
    }

    /// Accepts every tunnel of price at most `3δ`; accepted tunnels cost at
    /// most `3(1+ε)δ`.
    fn affordable(&self, g: ParamPoint, p: ParamPoint) -> bool {
        let limit = 3.0 * self.d;
        let (a, b) = (self.y.at_param(g.y), self.y.at_param(p.y));
        let Some(idx) = self.index() else {
            return exact_price(self.x, self.y, g, p) <= limit;
        };
        let (c, exact) = idx.const_flagged(g.x, p.x, &a, &b);
        if c <= limit {
            return true;
        }
        if exact || c > 3.0 * limit {
            return false;
        }
        if p.x.ceil() - g.x.floor() <= EXACT_TUNNEL_EDGES {
            return exact_price(self.x, self.y, g, p) <= limit;
        }
        idx.query_param(g.x, p.x, &a, &b) / (1.0 + idx.eps()) <= limit
    }

    /// Returns the gate and endpoint of an affordable tunnel into the free
    /// interval whose left gate is `p`, if one is found.
    fn procedure(&self, gates: &GateSet, p: ParamPoint) -> Option<(ParamPoint, ParamPoint)> {
        if let Some(g) = gates.max_x_below(p.x, p.y) {
            if self.affordable(g, p) {
                return Some((g, p));
            }
        }
        let nx = self.x.edge_count();
        let col = (p.x.floor() as usize).min(nx - 1);
        let g = gates.min_x_in_range(p.x, (col + 1) as f64, p.y)?;
        let v = ParamPoint::new(g.x, p.y);
        (self.x.at_param(v.x).dist(&self.y.at_param(v.y)) <= self.d).then_some((g, v))
    }
}

/// Runs the tunnel procedure for the free interval whose left gate is `p`
/// against the gate set `gates`, at threshold `delta`. `idx` must be built
/// over `x`; its accuracy is the procedure's `ε`.
pub fn tunnel_procedure(
    idx: &SegQueryIndex,
    y: &Polyline,
    gates: &GateSet,
    p: ParamPoint,
    delta: f64,
) -> Option<ParamPoint> {
    let ctx = TunnelCtx {
        given: Some(idx),
        ..TunnelCtx::new(idx.curve(), y, idx.eps(), delta)
    };
    ctx.procedure(gates, p).map(|(_, v)| v)
}

#[derive(Clone, Copy, Debug, Default)]
struct CellState {
    top: Option<(f64, f64)>,
    right: Option<(f64, f64)>,
    left_in: Option<f64>,
    bottom_in: Option<f64>,
    tunnel: Option<(ParamPoint, ParamPoint)>,
}

enum Trace {
    Top(usize, f64),
    Right(usize, f64),
    Chain(f64),
}

/// Decides the shortcut distance of the given curves without simplifying.
///
/// `Yes` guarantees a shortcut curve of `Y` within `3(1+ε)δ` of `X` (the
/// witness); `No` guarantees that every shortcut curve is farther than `δ`.
pub fn decider_core(x: &Polyline, y: &Polyline, eps: f64, delta: f64) -> DeciderVerdict {
    let d = inflate(delta);
    if x.first().dist(y.first()) > d || x.last().dist(y.last()) > d {
        return DeciderVerdict::no();
    }
    let xs = padded(x);
    let ys = padded(y);
    let nx = xs.edge_count();
    let ny = ys.edge_count();
    let ctx = TunnelCtx::new(&xs, &ys, eps, delta);

    // reachable columns along y = 0, starting from the origin
    let mut chain = 0usize;
    for i in 0..nx {
        match ball_interval(xs.vertex(i), xs.vertex(i + 1), ys.vertex(0), d) {
            Some((0.0, hi)) => {
                chain = i + 1;
                if hi < 1.0 {
                    break;
                }
            }
            _ => break,
        }
    }

    let mut heap: BinaryHeap<Reverse<usize>> = BinaryHeap::new();
    for pr in vertex_edge_pairs(&xs, &ys, delta) {
        match pr.side {
            PairSide::XVertex if pr.vertex >= 1 => heap.push(Reverse(pr.edge * nx + pr.vertex - 1)),
            PairSide::YVertex if pr.vertex >= 1 => {
                heap.push(Reverse((pr.vertex - 1) * nx + pr.edge))
            }
            _ => {}
        }
    }

    let origin = ParamPoint::new(0.0, 0.0);
    let mut gates = GateSet::new();
    gates.insert(origin);
    let mut gate_cell: HashMap<(u64, u64), usize> = HashMap::new();
    let mut cells: HashMap<usize, CellState> = HashMap::new();
    let mut last = usize::MAX;
    while let Some(Reverse(key)) = heap.pop() {
        if key == last {
            continue;
        }
        last = key;
        let (i, j) = (key % nx, key / nx);
        let (xa, xb) = (xs.vertex(i), xs.vertex(i + 1));
        let (ya, yb) = (ys.vertex(j), ys.vertex(j + 1));
        let top_free = ball_interval(xa, xb, yb, d);
        let right_free = ball_interval(ya, yb, xb, d);
        let left_in = if i > 0 {
            cells.get(&(key - 1)).and_then(|c| c.right).map(|r| r.0)
        } else {
            None
        };
        let bottom_in = if j == 0 {
            (i < chain).then_some(0.0)
        } else {
            cells.get(&(key - nx)).and_then(|c| c.top).map(|t| t.0)
        };
        let mut st = CellState {
            left_in,
            bottom_in,
            ..Default::default()
        };
        if let Some((lo, hi)) = top_free {
            let mut start = f64::INFINITY;
            if left_in.is_some() {
                start = lo;
            }
            if let Some(b) = bottom_in {
                let s = lo.max(b);
                if s <= hi {
                    start = start.min(s);
                }
            }
            if start > lo {
                let p = ParamPoint::new(i as f64 + lo, (j + 1) as f64);
                if let Some((g, v)) = ctx.procedure(&gates, p) {
                    let s = (v.x - i as f64).clamp(lo, hi);
                    if s < start {
                        start = s;
                        st.tunnel = Some((g, ParamPoint::new(i as f64 + s, v.y)));
                    }
                }
            }
            if start <= hi {
                st.top = Some((start, hi));
                let g = ParamPoint::new(i as f64 + start, (j + 1) as f64);
                gates.insert(g);
                gate_cell.insert((g.x.to_bits(), g.y.to_bits()), key);
            }
        }
        st.right = match (right_free, bottom_in, left_in) {
            (Some(rf), Some(_), _) => Some(rf),
            (rf, None, Some(l)) => clip_from(rf, l),
            _ => None,
        };
        if st.top.is_some() || st.right.is_some() {
            cells.insert(key, st);
        }
    }

    let last_key = (ny - 1) * nx + (nx - 1);
    let Some(fin) = cells.get(&last_key) else {
        return DeciderVerdict::no();
    };
    let mut trace = if fin.top.is_some_and(|t| t.1 >= 1.0) {
        Trace::Top(last_key, 1.0)
    } else if fin.right.is_some_and(|r| r.1 >= 1.0) {
        Trace::Right(last_key, 1.0)
    } else {
        return DeciderVerdict::no();
    };

    // backtrack a monotone path with its tunnels
    let tol = 1e-9;
    let mut path: Vec<ParamPoint> = Vec::new();
    let mut tunnels: Vec<(usize, usize)> = Vec::new();
    loop {
        match trace {
            Trace::Top(k, xl) => {
                let (i, j) = (k % nx, k / nx);
                let c = cells[&k];
                path.push(ParamPoint::new(i as f64 + xl, (j + 1) as f64));
                if let Some(l) = c.left_in {
                    trace = Trace::Right(k - 1, l);
                } else if let Some(b) = c.bottom_in.filter(|&b| b <= xl + tol) {
                    trace = if j == 0 {
                        Trace::Chain(i as f64 + b)
                    } else {
                        Trace::Top(k - nx, b)
                    };
                } else if let Some((g, v)) = c.tunnel {
                    path.push(v);
                    tunnels.push((g.y as usize, j + 1));
                    if g == origin {
                        trace = Trace::Chain(0.0);
                    } else {
                        let gk = gate_cell[&(g.x.to_bits(), g.y.to_bits())];
                        trace = Trace::Top(gk, g.x - (gk % nx) as f64);
                    }
                } else {
                    break;
                }
            }
            Trace::Right(k, yl) => {
                let (i, j) = (k % nx, k / nx);
                let c = cells[&k];
                path.push(ParamPoint::new((i + 1) as f64, j as f64 + yl));
                if let Some(b) = c.bottom_in {
                    trace = if j == 0 {
                        Trace::Chain(i as f64 + b)
                    } else {
                        Trace::Top(k - nx, b)
                    };
                } else if let Some(l) = c.left_in {
                    trace = Trace::Right(k - 1, l);
                } else {
                    break;
                }
            }
            Trace::Chain(x0) => {
                path.push(ParamPoint::new(x0, 0.0));
                path.push(origin);
                break;
            }
        }
    }
    path.reverse();
    path.dedup();
    let mut keep = vec![true; ny + 1];
    for &(a, b) in &tunnels {
        for flag in keep.iter_mut().take(b).skip(a + 1) {
            *flag = false;
        }
    }
    let mut vertices: Vec<usize> = (0..=ny)
        .filter(|&v| keep[v])
        .map(|v| v.min(y.len() - 1))
        .collect();
    vertices.dedup();
    DeciderVerdict {
        answer: Answer::Yes,
        witness: Some(Witness::from_vertices(vertices, path)),
    }
}

fn map_param(kept: &[usize], t: f64) -> f64 {
    if kept.len() < 2 {
        return 0.0;
    }
    let e = (t.floor() as usize).min(kept.len() - 2);
    let f = t - e as f64;
    kept[e] as f64 + f * (kept[e + 1] - kept[e]) as f64
}

/// Decision procedure on the original curves: simplifies both curves at
/// `μ = εδ/10` and decides the simplified pair at `(1+ε/5)δ`.
///
/// `Yes` guarantees distance at most `3(1+ε)δ` with a witness shortcut
/// curve of `Y`; `No` guarantees distance above `δ`.
pub fn decider(x: &Polyline, y: &Polyline, eps: f64, delta: f64) -> DeciderVerdict {
    if delta <= 0.0 {
        return decider_core(x, y, eps, 0.0);
    }
    let e1 = eps / 10.0;
    let mu = e1 * delta;
    let sx = simplify_mu(x, mu);
    let sy = simplify_mu(y, mu);
    let v = decider_core(&sx.curve, &sy.curve, e1, (1.0 + 2.0 * e1) * delta);
    let witness = v.witness.map(|w| {
        let vertices: Vec<usize> = w.vertices.iter().map(|&k| sy.kept_indices[k]).collect();
        let pts = w
            .matching_breakpoints
            .iter()
            .map(|p| {
                ParamPoint::new(
                    map_param(&sx.kept_indices, p.x),
                    map_param(&sy.kept_indices, p.y),
                )
            })
            .collect();
        Witness::from_vertices(vertices, pts)
    });
    DeciderVerdict {
        answer: v.answer,
        witness,
    }
}

/// Outcome of a two-call decision on an unsimplified pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Decision {
    /// The distance is at most `δ`.
    Less,
    /// The distance exceeds `δ`.
    Greater,
    /// The distance lies in `(lo, hi]`.
    Found(f64, f64),
}

/// Two core decisions at `δ/4` and `δ` with `ε = 1/3`.
pub fn exact_decision(x: &Polyline, y: &Polyline, delta: f64) -> Decision {
    if decider_core(x, y, 1.0 / 3.0, delta / 4.0).is_yes() {
        return Decision::Less;
    }
    if !decider_core(x, y, 1.0 / 3.0, delta).is_yes() {
        return Decision::Greater;
    }
    Decision::Found(delta / 4.0, 4.0 * delta)
}

/// A range believed to contain the distance of the simplified pair, free
/// of vertex-vertex and vertex-edge event radii.
#[derive(Clone, Debug)]
pub struct SearchInterval {
    pub lo: f64,
    pub hi: f64,
    pub x: Polyline,
    pub y: Polyline,
    /// Simplification threshold relating the attached curves to the input.
    pub mu: f64,
    /// Lower bound on the distance of the original pair.
    pub floor: f64,
}

/// Result of the first search stage.
#[derive(Clone, Debug)]
pub enum StageOutcome {
    /// A bracket `[lo, hi]` for the distance of the original curves.
    Approx {
        lo: f64,
        hi: f64,
    },
    Interval(SearchInterval),
}

fn endpoint_bound(x: &Polyline, y: &Polyline) -> f64 {
    x.first().dist(y.first()).max(x.last().dist(y.last()))
}

fn joint_diameter(x: &Polyline, y: &Polyline) -> f64 {
    let mut lo = x.first().coords().to_vec();
    let mut hi = lo.clone();
    for p in x.vertices().iter().chain(y.vertices()) {
        for (k, c) in p.coords().iter().enumerate() {
            lo[k] = lo[k].min(*c);
            hi[k] = hi[k].max(*c);
        }
    }
    lo.iter()
        .zip(&hi)
        .map(|(a, b)| (b - a) * (b - a))
        .sum::<f64>()
        .sqrt()
}

/// Index of the last "no" in `vals[lo..=hi]`, given `no(lo)` and
/// `yes(hi)`, found by bisection.
fn bisect<F: FnMut(f64) -> bool>(
    vals: &[f64],
    mut lo: usize,
    mut hi: usize,
    mut yes: F,
) -> (usize, usize) {
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if yes(vals[mid]) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

/// First search stage: brackets the distance between consecutive
/// well-separated pair distances, then between consecutive vertex-edge
/// event radii of a simplification.
pub fn first_stage(x: &Polyline, y: &Polyline, eps: f64) -> StageOutcome {
    let _ = eps;
    let third = 1.0 / 3.0;
    let e = endpoint_bound(x, y);
    let ub = curve_segment_frechet(x, &spine(y)).max(e);
    let floor = ZERO_FLOOR * joint_diameter(x, y);
    if ub <= floor || decider(x, y, third, floor).is_yes() {
        return StageOutcome::Approx { lo: 0.0, hi: 0.0 };
    }
    let yes = |d: f64| decider(x, y, third, d).is_yes();
    let lo0 = e.max(floor);
    if lo0 >= ub || yes(lo0) {
        return StageOutcome::Approx {
            lo: lo0,
            hi: 4.0 * lo0.max(floor),
        };
    }
    let pts: Vec<Point> = x.vertices().iter().chain(y.vertices()).cloned().collect();
    let mut u: Vec<f64> = vec![lo0];
    u.extend(
        wspd_distances(&pts)
            .into_iter()
            .filter(|&d| d > lo0 && d < ub),
    );
    u.push(ub);
    let (a, b) = bisect(&u, 0, u.len() - 1, yes);
    let (alpha, beta) = (u[a], u[b]);
    if 10.0 * alpha >= beta / 10.0 {
        return StageOutcome::Approx {
            lo: alpha,
            hi: 4.0 * beta,
        };
    }
    if yes(10.0 * alpha) {
        return StageOutcome::Approx {
            lo: alpha,
            hi: 40.0 * alpha,
        };
    }
    if !yes(beta / 10.0) {
        return StageOutcome::Approx {
            lo: beta / 10.0,
            hi: 4.0 * beta,
        };
    }
    // the distance lies in (10α, 0.4β]; simplify at μ = 3α
    let mu = 3.0 * alpha;
    let sx = simplify_mu(x, mu).curve;
    let sy = simplify_mu(y, mu).curve;
    let (a1, b1) = (10.0 * alpha - 2.0 * mu, 0.4 * beta + 2.0 * mu);
    let to_orig = |lo: f64, hi: f64| StageOutcome::Approx {
        lo: (lo - 2.0 * mu).max(lo0),
        hi: hi + 2.0 * mu,
    };
    let mut v: Vec<f64> = vec![a1];
    v.extend(
        vertex_edge_pairs(&sx, &sy, b1)
            .into_iter()
            .map(|p| p.dist)
            .filter(|&d| d > a1 && d < b1),
    );
    v.push(b1);
    v.sort_by(f64::total_cmp);
    v.dedup();
    let mut found = None;
    let (a2, b2) = bisect(&v, 0, v.len() - 1, |d| match exact_decision(&sx, &sy, d) {
        Decision::Less => true,
        Decision::Greater => false,
        Decision::Found(lo, hi) => {
            found.get_or_insert((lo, hi));
            true
        }
    });
    if let Some((lo, hi)) = found {
        return to_orig(lo, hi);
    }
    let (alpha2, beta2) = (v[a2], v[b2]);
    if 10.0 * alpha2 >= beta2 / 10.0 {
        return to_orig(alpha2, beta2);
    }
    match exact_decision(&sx, &sy, 10.0 * alpha2) {
        Decision::Less => return to_orig(alpha2, 10.0 * alpha2),
        Decision::Found(lo, hi) => return to_orig(lo, hi),
        Decision::Greater => {}
    }
    match exact_decision(&sx, &sy, beta2 / 10.0) {
        Decision::Greater => return to_orig(beta2 / 10.0, beta2),
        Decision::Found(lo, hi) => return to_orig(lo, hi),
        Decision::Less => {}
    }
    StageOutcome::Interval(SearchInterval {
        lo: 10.0 * alpha2,
        hi: beta2 / 10.0,
        x: sx,
        y: sy,
        mu,
        floor: lo0,
    })
}

/// Second search stage: selection over the implicit matrix of tunnel
/// prices between canonical gates, sorted by `x`, with rows searched as if
/// sorted. Returns a bracket for the distance of the original curves.
pub fn second_stage(iv: &SearchInterval, eps: f64) -> (f64, f64) {
    let _ = eps;
    let to_orig = |lo: f64, hi: f64| ((lo - 2.0 * iv.mu).max(iv.floor), hi + 2.0 * iv.mu);
    let (x, y) = (&iv.x, &iv.y);
    let mut gates: Vec<ParamPoint> = vec![
        ParamPoint::new(0.0, 0.0),
        ParamPoint::new(x.edge_count() as f64, y.edge_count() as f64),
    ];
    for p in vertex_edge_pairs(x, y, iv.hi) {
        if p.side == PairSide::YVertex {
            let (a, b) = x.edge_points(p.edge);
            let t = project_param(a, b, y.vertex(p.vertex));
            gates.push(ParamPoint::new(p.edge as f64 + t, p.vertex as f64));
        }
    }
    gates.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    gates.dedup();
    let m = gates.len();
    let Ok(idx) = SegQueryIndex::build(&padded(x), 1.0) else {
        return to_orig(iv.lo, iv.hi);
    };
    let val = |i: usize, k: usize| {
        let (p, q) = (gates[i], gates[i + k]);
        idx.query_const_param(p.x, q.x, &y.at_param(p.y), &y.at_param(q.y))
    };
    let mut rlo = vec![1usize; m];
    let mut rhi: Vec<usize> = (0..m).map(|i| m - 1 - i).collect();
    let (mut best_false, mut best_true) = (iv.lo, iv.hi);
    loop {
        let mut mids: Vec<(f64, usize, usize, usize)> = Vec::new();
        for i in 0..m {
            if rlo[i] <= rhi[i] {
                let k = (rlo[i] + rhi[i]) / 2;
                mids.push((val(i, k), rhi[i] - rlo[i] + 1, i, k));
            }
        }
        if mids.is_empty() {
            break;
        }
        let mut order: Vec<usize> = (0..mids.len()).collect();
        order.sort_by(|&a, &b| mids[a].0.total_cmp(&mids[b].0));
        let total: usize = mids.iter().map(|t| t.1).sum();
        let mut acc = 0;
        let mut v = mids[order[0]].0;
        for &o in &order {
            acc += mids[o].1;
            if 2 * acc >= total {
                v = mids[o].0;
                break;
            }
        }
        let truth = if v <= best_false {
            false
        } else if v >= best_true {
            true
        } else {
            match exact_decision(x, y, v) {
                Decision::Less => true,
                Decision::Greater => false,
                Decision::Found(lo, hi) => return to_orig(lo, hi),
            }
        };
        if truth {
            best_true = best_true.min(v);
        } else {
            best_false = best_false.max(v);
        }
        for &(w, _, i, k) in &mids {
            if truth && w >= v {
                rhi[i] = k - 1;
            } else if !truth && w <= v {
                rlo[i] = k + 1;
            }
        }
    }
    to_orig(best_false, best_true)
}

/// Approximate shortcut distance with its witness.
#[derive(Clone, Debug, PartialEq)]
pub struct ShortcutResult {
    /// `Δ` with `d_S <= Δ <= (3+ε) d_S`.
    pub value: f64,
    pub eps: f64,
    pub witness: Witness,
}

/// `(3+ε)`-approximation of the directed vertex-restricted shortcut
/// Fréchet distance from `x` to shortcut curves of `y`.
pub fn shortcut_frechet(x: &Polyline, y: &Polyline, eps: f64) -> Result<ShortcutResult, GeomError> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(GeomError::OutOfRange {
            name: "eps",
            value: eps,
        });
    }
    if x.dim() != y.dim() {
        return Err(GeomError::DimensionMismatch {
            expected: x.dim(),
            found: y.dim(),
        });
    }
    let e2 = eps.min(9.0) / 9.0;
    let diam = joint_diameter(x, y);
    let floor = ZERO_FLOOR * diam;
    if diam == 0.0 {
        return Ok(ShortcutResult {
            value: 0.0,
            eps,
            witness: Witness::identity(y.len()),
        });
    }
    let zero = decider(x, y, e2, floor);
    if let Some(w) = zero.witness {
        return Ok(ShortcutResult {
            value: 0.0,
            eps,
            witness: w,
        });
    }
    let (lo, hi) = match first_stage(x, y, eps) {
        StageOutcome::Approx { lo, hi } => (lo, hi),
        StageOutcome::Interval(iv) => second_stage(&iv, eps),
    };
    Ok(refine(x, y, eps, lo, hi))
}

/// Locates adjacent thresholds `δ_l < δ_h <= (1+ε/9) δ_l` with decider
/// answers no and yes, starting from the bracket `[lo, hi]`, and returns
/// `3(1+ε/9) δ_h` with the yes-witness.
pub fn refine(x: &Polyline, y: &Polyline, eps: f64, lo: f64, hi: f64) -> ShortcutResult {
    let e2 = eps.min(9.0) / 9.0;
    let rho = 1.0 + e2;
    let floor = ZERO_FLOOR * joint_diameter(x, y);
    let ub = curve_segment_frechet(x, &spine(y)).max(endpoint_bound(x, y));
    let mut lo = if lo.is_finite() { lo.max(floor) } else { floor };
    let mut hi = if hi.is_finite() && hi > lo {
        hi
    } else {
        (lo * rho).max(ub)
    };
    let mut witness = None;
    // lo must be a no, hi a yes
    loop {
        if lo <= floor {
            lo = floor;
            break;
        }
        let v = decider(x, y, e2, lo);
        if !v.is_yes() {
            break;
        }
        hi = lo;
        witness = v.witness;
        lo = (lo / 4.0).max(floor);
    }
    if witness.is_none() {
        loop {
            let v = decider(x, y, e2, hi);
            if v.is_yes() {
                witness = v.witness;
                break;
            }
            lo = hi;
            hi = if hi < ub {
                (hi * 4.0).min(ub)
            } else {
                hi * 4.0
            };
        }
    }
    let steps = ((hi / lo).ln() / rho.ln()).ceil().max(1.0) as usize;
    let grid = |k: usize| {
        if k >= steps {
            hi
        } else {
            lo * rho.powi(k as i32)
        }
    };
    let (mut a, mut b) = (0usize, steps);
    while b - a > 1 {
        let mid = (a + b) / 2;
        let v = decider(x, y, e2, grid(mid));
        if v.is_yes() {
            b = mid;
            witness = v.witness;
        } else {
            a = mid;
        }
    }
    let witness = witness.unwrap_or_else(|| Witness::identity(y.len()));
    ShortcutResult {
        value: 3.0 * (1.0 + e2) * grid(b),
        eps,
        witness,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freespace::frechet_value;
    use crate::oracle::brute_shortcut_frechet;

    fn line() -> Polyline {
        Polyline::from_xy(&[(0.0, 0.0), (4.0, 0.0)])
    }

    fn bump(dy: f64) -> Polyline {
        Polyline::from_xy(&[(0.0, dy), (1.0, dy), (2.0, 3.0 + dy), (3.0, dy), (4.0, dy)])
    }

    #[test]
    fn core_examples() {
        let x = bump(0.0);
        assert!(decider_core(&x, &x, 1.0 / 3.0, 0.0).is_yes());
        let v = decider_core(&line(), &bump(0.0), 1.0 / 3.0, 0.1);
        assert!(v.is_yes());
        let w = v.witness.unwrap();
        assert_eq!(w.shortcuts, vec![(1, 3)]);
        assert!(frechet_value(&line(), &w.curve(&bump(0.0))) <= 1e-9);
        assert!(!decider_core(&line(), &bump(2.0), 1.0 / 3.0, 1.0).is_yes());
    }

    #[test]
    fn wrapper_examples() {
        assert!(decider(&line(), &bump(0.0), 1.0 / 3.0, 0.1).is_yes());
        assert!(!decider(&line(), &bump(2.0), 1.0 / 3.0, 1.0).is_yes());
        let x = bump(0.0);
        assert!(decider(&x, &x, 1.0 / 3.0, 0.0).is_yes());
    }

    #[test]
    fn main_examples() {
        let x = bump(0.0);
        let r = shortcut_frechet(&x, &x, 0.5).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.witness.shortcuts.is_empty());
        let r = shortcut_frechet(&line(), &bump(0.5), 0.5).unwrap();
        assert!((0.5..=0.5 * 3.5 + 1e-9).contains(&r.value), "{}", r.value);
        assert!(frechet_value(&line(), &r.witness.curve(&bump(0.5))) <= r.value + 1e-9);
        let y = Polyline::from_xy(&[(0.0, 1.0), (4.0, 1.0)]);
        let r = shortcut_frechet(&line(), &y, 0.5).unwrap();
        assert!((1.0..=3.5 + 1e-9).contains(&r.value), "{}", r.value);
        let oracle = brute_shortcut_frechet(&line(), &bump(0.5), 1e-9).unwrap();
        assert!((oracle - 0.5).abs() < 1e-9);
    }

    #[test]
    fn tunnel_price_examples() {
        let x = bump(0.0);
        let y = Polyline::from_xy(&[(0.0, 0.0), (1.0, 5.0), (4.0, 0.0)]);
        let idx = SegQueryIndex::build(&x, 0.2).unwrap();
        let p = ParamPoint::new(1.5, 1.0);
        let e = x.at_param(1.5).dist(y.vertex(1));
        assert_eq!(tunnel_price(&idx, &y, p, p).unwrap(), e);
        let a = ParamPoint::new(0.25, 0.0);
        let b = ParamPoint::new(0.75, 2.0);
        let want = x
            .at_param(0.25)
            .dist(y.vertex(0))
            .max(x.at_param(0.75).dist(y.vertex(2)));
        assert_eq!(tunnel_price(&idx, &y, a, b).unwrap(), want);
        let (s, t) = (ParamPoint::new(0.0, 0.0), ParamPoint::new(4.0, 2.0));
        let exact = exact_price(&x, &y, s, t);
        assert!((exact - 3.0).abs() < 1e-12);
        let phi = tunnel_price(&idx, &y, s, t).unwrap();
        assert!(phi <= exact + 1e-9 && exact <= 1.2 * phi + 1e-9);
        assert!(tunnel_price(&idx, &y, t, s).is_err());
    }

    #[test]
    fn canonical_examples() {
        let x = Polyline::from_xy(&[(0.0, 0.0), (2.0, 0.0), (4.0, 0.0)]);
        let y = Polyline::from_xy(&[(0.5, 1.0), (3.0, 2.0), (1.5, 1.0)]);
        let f = canonical_tunnel(&x, &y, 0, 1, 0, 1).unwrap();
        assert_eq!(f.canonical, (0.25, 1.5));
        assert_eq!(f.min_radius, 2.0);
        let y = Polyline::from_xy(&[(2.0, 1.0), (0.0, 1.0)]);
        let f = canonical_tunnel(&x, &y, 0, 0, 0, 1).unwrap();
        assert!((f.min_radius - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(f.canonical, (0.5, 0.5));
        let y = Polyline::from_xy(&[(1.8, 0.5), (0.2, 0.1)]);
        let f = canonical_tunnel(&x, &y, 0, 0, 0, 1).unwrap();
        let mut best = f64::INFINITY;
        for k in 0..=10000 {
            let p = Point::xy(2.0 * k as f64 / 10000.0, 0.0);
            best = best.min(p.dist(y.vertex(0)).max(p.dist(y.vertex(1))));
        }
        assert!((f.min_radius - best).abs() < 1e-3);
        assert!(canonical_tunnel(&x, &y, 1, 0, 0, 1).is_err());
    }

    #[test]
    fn procedure_examples() {
        let x = Polyline::from_xy(&[(0.0, 0.0), (4.0, 0.0)]);
        let y = Polyline::from_xy(&[(0.0, 0.0), (1.0, 3.0), (4.0, 0.0)]);
        let idx = SegQueryIndex::build(&x, 0.2).unwrap();
        let p = ParamPoint::new(1.0, 2.0);
        assert_eq!(tunnel_procedure(&idx, &y, &GateSet::new(), p, 1.0), None);
        let mut gates = GateSet::new();
        gates.insert(ParamPoint::new(0.0, 0.0));
        assert_eq!(tunnel_procedure(&idx, &y, &gates, p, 1.0), Some(p));
    }

    #[test]
    fn vertical_tunnel_is_found() {
        // X runs along y = 0 and turns back; the direct tunnel to the left
        // gate is blocked by a far excursion, while a vertical tunnel from a
        // gate right of it is cheap.
        let x = Polyline::from_xy(&[(0.0, 0.0), (0.0, 10.0), (0.0, 0.0), (4.0, 0.0)]);
        let y = Polyline::from_xy(&[(2.0, 0.0), (2.0, 5.0), (2.5, 0.0)]);
        let idx = SegQueryIndex::build(&x, 0.2).unwrap();
        let mut gates = GateSet::new();
        gates.insert(ParamPoint::new(0.0, 0.0));
        gates.insert(ParamPoint::new(2.55, 0.0));
        let p = ParamPoint::new(2.5, 2.0);
        let got = tunnel_procedure(&idx, &y, &gates, p, 0.6).unwrap();
        assert_eq!(got, ParamPoint::new(2.55, 2.0));
    }
}
