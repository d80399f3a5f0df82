//! Segment-to-subcurve Fréchet queries.
//!
//! [`SegQueryIndex`] preprocesses a curve `Z` into a balanced tree over its
//! edges. Every node stores the exact Fréchet distance of its subcurve to
//! the segment joining the subcurve's endpoints (its spine) and an
//! exponential grid around the two endpoints.
//!
//! Three query levels are offered:
//!
//! * [`SegQueryIndex::query_const`]: a factor-3 answer from the spines of
//!   the canonical nodes covering the subcurve.
//! * [`SegQueryIndex::whole_query`]: a `(1+ε)` answer against one node's
//!   whole subcurve, via the node's grid.
//! * [`SegQueryIndex::query`]: a `(1+ε)` answer for any subcurve, as a
//!   bottleneck path over candidate breakpoints on the query segment.
//!
//! All answers of `query_const` and `query` are widths of explicit
//! matchings and therefore never below the true distance.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::sync::Mutex;

use smallvec::SmallVec;

use crate::error::GeomError;
use crate::freespace::{ball_interval, curve_segment_frechet_slice};
use crate::geom::{CurvePos, Point, Polyline, Segment};

/// Spacing constant of the breakpoint partition: spacing is `ε r / 9`.
const PARTITION_C: f64 = 9.0;

type GridKey = SmallVec<[i64; 4]>;

/// Exponential grids around a node's endpoints with a lazily filled table
/// of exact Fréchet distances between grid segments and the subcurve.
///
/// Rings have radii `r0 2^k` with `r0 = ε² L / 32`. Ring `k` is covered by
/// a lattice of spacing `(ε/4) r0 2^(k+1) / √d`, so a snapped point lies
/// within `(ε/4) |p - center|` of the original. Points closer than `r0`
/// snap to the center.
#[derive(Debug)]
pub struct ExpGridTable {
    pub center_u: Point,
    pub center_v: Point,
    pub l: f64,
    eps: f64,
    r0: f64,
    table: Mutex<HashMap<(GridKey, GridKey), f64>>,
}

impl ExpGridTable {
    fn new(center_u: Point, center_v: Point, l: f64, eps: f64) -> Self {
        Self {
            center_u,
            center_v,
            l,
            eps,
            r0: eps * eps * l / 32.0,
            table: Mutex::new(HashMap::new()),
        }
    }

    /// Accuracy parameter the grid was built for.
    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Smallest ring radius; closer points snap to the center.
    pub fn inner_radius(&self) -> f64 {
        self.r0
    }

    /// Number of table entries evaluated so far.
    pub fn evaluated(&self) -> usize {
        self.table.lock().map(|t| t.len()).unwrap_or(0)
    }

    /// Grid point representing `p` in the grid around `center`.
    pub fn snap(&self, center: &Point, p: &Point) -> (Point, GridKey) {
        let r = p.dist(center);
        if r < self.r0 || self.r0 == 0.0 {
            return (center.clone(), SmallVec::from_slice(&[i64::MIN]));
        }
        let k = (r / self.r0).log2().floor().max(0.0);
        let h = 0.25 * self.eps * self.r0 * 2f64.powf(k + 1.0) / (center.dim() as f64).sqrt();
        let mut key: GridKey = SmallVec::new();
        key.push(k as i64);
        let mut coords = Vec::with_capacity(center.dim());
        for (c, x) in center.coords().iter().zip(p.coords()) {
            let m = ((x - c) / h).round();
            key.push(m as i64);
            coords.push(c + m * h);
        }
        (Point::from_iter_unchecked(coords), key)
    }
}

/// A node of the edge tree.
#[derive(Debug)]
pub struct SpineNode {
    /// First and last vertex index of the node's subcurve.
    pub vertex_range: (usize, usize),
    pub spine: Segment,
    /// Exact Fréchet distance between the subcurve and its spine.
    pub fr_node: f64,
    pub children: Option<(usize, usize)>,
    pub grid: ExpGridTable,
}

/// Segment query structure over a fixed curve.
#[derive(Debug)]
pub struct SegQueryIndex {
    nodes: Vec<SpineNode>,
    root: usize,
    eps: f64,
    curve: Polyline,
}

#[derive(Clone, Copy, PartialEq)]
struct Key(f64);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Entry {
    Node { layer: usize, k: usize },
    Edge { layer: usize, k: usize, k2: usize },
}

/// A piece of the decomposed subcurve.
enum Piece {
    Segment(Point, Point),
    Node(usize),
}

/// Decomposition of `Z[u..v]` into a partial edge, canonical nodes, and a
/// partial edge.
struct Decomposition {
    /// Breakpoints `u = b_0, ..., b_m = v` on the curve.
    breaks: Vec<Point>,
    pieces: Vec<Piece>,
}

impl SegQueryIndex {
    /// Builds the structure for `z` with accuracy `eps` in `(0, 1]`.
    pub fn build(z: &Polyline, eps: f64) -> Result<Self, GeomError> {
        if z.len() < 2 {
            return Err(GeomError::TooFewVertices {
                needed: 2,
                found: z.len(),
            });
        }
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(GeomError::OutOfRange {
                name: "eps",
                value: eps,
            });
        }
        let mut idx = Self {
            nodes: Vec::with_capacity(2 * z.len()),
            root: 0,
            eps,
            curve: z.clone(),
        };
        idx.root = idx.build_node(0, z.len() - 1);
        Ok(idx)
    }

    fn build_node(&mut self, lo: usize, hi: usize) -> usize {
        let children = if hi - lo > 1 {
            let mid = (lo + hi) / 2;
            Some((self.build_node(lo, mid), self.build_node(mid, hi)))
        } else {
            None
        };
        let verts = &self.curve.vertices()[lo..=hi];
        let (a, b) = (verts[0].clone(), verts[verts.len() - 1].clone());
        let fr = if children.is_some() {
            curve_segment_frechet_slice(verts, &a, &b)
        } else {
            0.0
        };
        let grid = ExpGridTable::new(a.clone(), b.clone(), fr, self.eps / 3.0);
        self.nodes.push(SpineNode {
            vertex_range: (lo, hi),
            spine: Segment { a, b },
            fr_node: fr,
            children,
            grid,
        });
        self.nodes.len() - 1
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn curve(&self) -> &Polyline {
        &self.curve
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn node(&self, id: usize) -> &SpineNode {
        &self.nodes[id]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Number of edges on the longest root-to-leaf path.
    pub fn height(&self) -> usize {
        fn h(idx: &SegQueryIndex, id: usize) -> usize {
            match idx.nodes[id].children {
                Some((l, r)) => 1 + h(idx, l).max(h(idx, r)),
                None => 0,
            }
        }
        h(self, self.root)
    }

    /// Nodes whose vertex ranges tile `[first, last]`, in curve order.
    pub fn canonical_nodes(&self, first: usize, last: usize) -> Vec<usize> {
        let mut out = Vec::new();
        if first < last {
            self.collect(self.root, first, last, &mut out);
        }
        out
    }

    fn collect(&self, id: usize, first: usize, last: usize, out: &mut Vec<usize>) {
        let (lo, hi) = self.nodes[id].vertex_range;
        if last <= lo || hi <= first {
            return;
        }
        if first <= lo && hi <= last {
            out.push(id);
            return;
        }
        if let Some((l, r)) = self.nodes[id].children {
            self.collect(l, first, last, out);
            self.collect(r, first, last, out);
        }
    }

    fn check(&self, u: CurvePos, v: CurvePos, pq: &Segment) -> Result<(), GeomError> {
        self.curve.check_pos(u)?;
        self.curve.check_pos(v)?;
        if pq.dim() != self.curve.dim() {
            return Err(GeomError::DimensionMismatch {
                expected: self.curve.dim(),
                found: pq.dim(),
            });
        }
        if u.param() > v.param() {
            return Err(GeomError::PositionOrder);
        }
        Ok(())
    }

    fn decompose(&self, ux: f64, vx: f64) -> Decomposition {
        let pu = self.curve.at_param(ux);
        let pv = self.curve.at_param(vx);
        // interior vertices strictly between u and v
        let fi = ux.floor() as usize + 1;
        let li = (vx.ceil() as usize).saturating_sub(1);
        if vx <= ux || fi > li {
            return Decomposition {
                breaks: vec![pu.clone(), pv.clone()],
                pieces: vec![Piece::Segment(pu, pv)],
            };
        }
        let zf = self.curve.vertex(fi).clone();
        let zl = self.curve.vertex(li).clone();
        let mut breaks = vec![pu.clone(), zf.clone()];
        let mut pieces = vec![Piece::Segment(pu, zf)];
        for id in self.canonical_nodes(fi, li) {
            let (_, hi) = self.nodes[id].vertex_range;
            breaks.push(self.curve.vertex(hi).clone());
            pieces.push(Piece::Node(id));
        }
        breaks.push(pv.clone());
        pieces.push(Piece::Segment(zl, pv));
        Decomposition { breaks, pieces }
    }

    /// Factor-3 approximation `Δ` with `d* <= Δ <= 3 d*` for
    /// `d* = d_F(pq, Z[u..v])`.
    pub fn query_const(&self, u: CurvePos, v: CurvePos, pq: &Segment) -> Result<f64, GeomError> {
        self.check(u, v, pq)?;
        Ok(self.query_const_param(u.param(), v.param(), &pq.a, &pq.b))
    }

    pub(crate) fn query_const_param(&self, ux: f64, vx: f64, p: &Point, q: &Point) -> f64 {
        self.const_flagged(ux, vx, p, q).0
    }

    /// Factor-3 value and whether it is exact (every covering node
    /// coincides with its spine).
    pub(crate) fn const_flagged(&self, ux: f64, vx: f64, p: &Point, q: &Point) -> (f64, bool) {
        let dec = self.decompose(ux, vx);
        (self.const_from(&dec, p, q), self.is_exact(&dec))
    }

    fn is_exact(&self, dec: &Decomposition) -> bool {
        dec.pieces.iter().all(|pc| match pc {
            Piece::Node(id) => self.nodes[*id].fr_node == 0.0,
            Piece::Segment(..) => true,
        })
    }

    fn const_from(&self, dec: &Decomposition, p: &Point, q: &Point) -> f64 {
        if dec.breaks.len() == 2 {
            return dec.breaks[0].dist(p).max(dec.breaks[1].dist(q));
        }
        let d = curve_segment_frechet_slice(&dec.breaks, p, q);
        let m = dec
            .pieces
            .iter()
            .map(|pc| match pc {
                Piece::Node(id) => self.nodes[*id].fr_node,
                Piece::Segment(..) => 0.0,
            })
            .fold(0.0, f64::max);
        d + m
    }

    /// `(1+ε)`-approximation from below of `d_F(pq, subcurve of node)`.
    ///
    /// With `r = max(|p-u|, |q-v|)` for the node's endpoints `u, v` and
    /// `L = fr_node`: returns `L - r` when `r <= εL/4`, `r` when
    /// `r >= L/ε`, and otherwise the table value of the snapped segment
    /// minus the snapping error.
    pub fn whole_query(&self, node: usize, pq: &Segment) -> f64 {
        self.whole_query_pts(node, &pq.a, &pq.b)
    }

    fn whole_query_pts(&self, node: usize, p: &Point, q: &Point) -> f64 {
        let nd = &self.nodes[node];
        let g = &nd.grid;
        let r = p.dist(&g.center_u).max(q.dist(&g.center_v));
        let l = nd.fr_node;
        if l == 0.0 {
            return r;
        }
        if r <= g.eps * l / 4.0 {
            return l - r;
        }
        if r >= l / g.eps {
            return r;
        }
        let (ps, kp) = g.snap(&g.center_u, p);
        let (qs, kq) = g.snap(&g.center_v, q);
        let err = p.dist(&ps).max(q.dist(&qs));
        let key = (kp, kq);
        let cached = g.table.lock().ok().and_then(|t| t.get(&key).copied());
        let dval = match cached {
            Some(v) => v,
            None => {
                let (lo, hi) = nd.vertex_range;
                let v = curve_segment_frechet_slice(&self.curve.vertices()[lo..=hi], &ps, &qs);
                if let Ok(mut t) = g.table.lock() {
                    t.insert(key, v);
                }
                v
            }
        };
        dval - err
    }

    /// `(1+ε)`-approximation `Δ` with `d* <= Δ <= (1+ε) d*`.
    pub fn query(&self, u: CurvePos, v: CurvePos, pq: &Segment) -> Result<f64, GeomError> {
        self.check(u, v, pq)?;
        Ok(self.query_param(u.param(), v.param(), &pq.a, &pq.b))
    }

    pub(crate) fn query_param(&self, ux: f64, vx: f64, p: &Point, q: &Point) -> f64 {
        self.query_flagged(ux, vx, p, q).0
    }

    /// `(1+ε)` value and whether it is exact.
    pub(crate) fn query_flagged(&self, ux: f64, vx: f64, p: &Point, q: &Point) -> (f64, bool) {
        let dec = self.decompose(ux, vx);
        let r = self.const_from(&dec, p, q);
        if r == 0.0 || self.is_exact(&dec) {
            return (r, true);
        }
        (self.bottleneck(&dec, p, q, r).min(r), false)
    }

    /// Bottleneck path over breakpoint candidates placed on `pq`.
    fn bottleneck(&self, dec: &Decomposition, p: &Point, q: &Point, r: f64) -> f64 {
        let eps_w = self.eps / 3.0;
        let len = p.dist(q);
        let spacing = self.eps * r / PARTITION_C;
        let n = if len == 0.0 {
            0
        } else {
            (len / spacing).ceil() as usize
        };
        let at = |k: usize| {
            if n == 0 {
                p.clone()
            } else {
                p.lerp(q, k as f64 / n as f64)
            }
        };
        let layers = dec.breaks.len();
        // candidate index ranges per breakpoint
        let mut cand: Vec<(usize, usize)> = Vec::with_capacity(layers);
        for (i, b) in dec.breaks.iter().enumerate() {
            if i == 0 {
                cand.push((0, 0));
            } else if i + 1 == layers {
                cand.push((n, n));
            } else {
                let range = ball_interval(p, q, b, 2.0 * r).and_then(|(lo, hi)| {
                    let a = (lo * n as f64).ceil() as usize;
                    let z = ((hi * n as f64).floor() as usize).min(n);
                    (a <= z).then_some((a, z))
                });
                let range = range.unwrap_or_else(|| {
                    let t = crate::geom::project_param(p, q, b);
                    let k = (t * n as f64).round() as usize;
                    (k, k)
                });
                cand.push(range);
            }
        }
        let mut best: Vec<Vec<f64>> = cand
            .iter()
            .map(|&(a, z)| vec![f64::INFINITY; z - a + 1])
            .collect();
        let mut done: Vec<Vec<bool>> = cand.iter().map(|&(a, z)| vec![false; z - a + 1]).collect();
        let mut heap: BinaryHeap<(Key, Entry)> = BinaryHeap::new();
        best[0][0] = 0.0;
        heap.push((Key(0.0), Entry::Node { layer: 0, k: 0 }));
        let points: Vec<Point> = (0..=n).map(at).collect();
        while let Some((Key(b), e)) = heap.pop() {
            match e {
                Entry::Node { layer, k } => {
                    let slot = k - cand[layer].0;
                    if done[layer][slot] {
                        continue;
                    }
                    done[layer][slot] = true;
                    if layer + 1 == layers {
                        return b;
                    }
                    let (a2, z2) = cand[layer + 1];
                    for k2 in a2.max(k)..=z2 {
                        match &dec.pieces[layer] {
                            Piece::Segment(s, t) => {
                                let c = s.dist(&points[k]).max(t.dist(&points[k2]));
                                let nb = b.max(c);
                                let s2 = k2 - a2;
                                if nb < best[layer + 1][s2] {
                                    best[layer + 1][s2] = nb;
                                    heap.push((
                                        Key(nb),
                                        Entry::Node {
                                            layer: layer + 1,
                                            k: k2,
                                        },
                                    ));
                                }
                            }
                            Piece::Node(id) => {
                                let g = &self.nodes[*id];
                                let lb = points[k]
                                    .dist(&g.spine.a)
                                    .max(points[k2].dist(&g.spine.b))
                                    .max(g.fr_node / 2.0);
                                heap.push((Key(b.max(lb)), Entry::Edge { layer, k, k2 }));
                            }
                        }
                    }
                }
                Entry::Edge { layer, k, k2 } => {
                    let s2 = k2 - cand[layer + 1].0;
                    if done[layer + 1][s2] {
                        continue;
                    }
                    let id = match dec.pieces[layer] {
                        Piece::Node(id) => id,
                        Piece::Segment(..) => unreachable!("segment pieces are relaxed directly"),
                    };
                    let from = best[layer][k - cand[layer].0];
                    let c = (1.0 + eps_w) * self.whole_query_pts(id, &points[k], &points[k2]);
                    let nb = from.max(c);
                    if nb < best[layer + 1][s2] {
                        best[layer + 1][s2] = nb;
                        heap.push((
                            Key(nb),
                            Entry::Node {
                                layer: layer + 1,
                                k: k2,
                            },
                        ));
                    }
                }
            }
        }
        f64::INFINITY
    }
}
