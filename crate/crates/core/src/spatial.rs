//! Vertex-edge proximity pairs and well-separated pair distances.

use crate::freespace::inflate;
use crate::geom::{point_segment_dist, Point, Polyline};
use crate::simplify::simplify_mu;

const LEAF: usize = 4;

#[derive(Clone, Debug)]
struct BvhNode {
    lo: Vec<f64>,
    hi: Vec<f64>,
    /// Edge-index slice `[start, end)` into `EdgeBvh::edges`.
    start: usize,
    end: usize,
    children: Option<(usize, usize)>,
}

/// Bounding-volume hierarchy over the edges of a curve.
#[derive(Clone, Debug)]
pub struct EdgeBvh<'a> {
    curve: &'a Polyline,
    edges: Vec<usize>,
    nodes: Vec<BvhNode>,
}

fn box_dist2(lo: &[f64], hi: &[f64], p: &[f64]) -> f64 {
    let mut s = 0.0;
    for k in 0..p.len() {
        let d = if p[k] < lo[k] {
            lo[k] - p[k]
        } else if p[k] > hi[k] {
            p[k] - hi[k]
        } else {
            0.0
        };
        s += d * d;
    }
    s
}

impl<'a> EdgeBvh<'a> {
    pub fn new(curve: &'a Polyline) -> Self {
        let mut bvh = Self {
            curve,
            edges: (0..curve.edge_count()).collect(),
            nodes: Vec::new(),
        };
        let n = bvh.edges.len();
        bvh.build(0, n);
        bvh
    }

    fn bounds(&self, start: usize, end: usize) -> (Vec<f64>, Vec<f64>) {
        let d = self.curve.dim();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for &e in &self.edges[start..end] {
            let (a, b) = self.curve.edge_points(e);
            for p in [a, b] {
                for (k, c) in p.coords().iter().enumerate() {
                    lo[k] = lo[k].min(*c);
                    hi[k] = hi[k].max(*c);
                }
            }
        }
        (lo, hi)
    }

    fn build(&mut self, start: usize, end: usize) -> usize {
        let (lo, hi) = self.bounds(start, end);
        let children = if end - start > LEAF {
            let axis = (0..lo.len())
                .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])))
                .unwrap_or(0);
            let curve = self.curve;
            let key = |e: usize| {
                let (a, b) = curve.edge_points(e);
                a.coords()[axis] + b.coords()[axis]
            };
            let mid = (start + end) / 2;
            self.edges[start..end]
                .select_nth_unstable_by(mid - start, |&a, &b| key(a).total_cmp(&key(b)));
            Some((self.build(start, mid), self.build(mid, end)))
        } else {
            None
        };
        self.nodes.push(BvhNode {
            lo,
            hi,
            start,
            end,
            children,
        });
        self.nodes.len() - 1
    }

    /// Calls `f(edge, dist)` for every edge within distance `r` of `p`.
    pub fn within(&self, p: &Point, r: f64, mut f: impl FnMut(usize, f64)) {
        if self.nodes.is_empty() {
            return;
        }
        let r2 = r * r;
        let mut stack = vec![self.nodes.len() - 1];
        while let Some(id) = stack.pop() {
            let nd = &self.nodes[id];
            if box_dist2(&nd.lo, &nd.hi, p.coords()) > r2 {
                continue;
            }
            match nd.children {
                Some((l, rr)) => {
                    stack.push(rr);
                    stack.push(l);
                }
                None => {
                    for &e in &self.edges[nd.start..nd.end] {
                        let (a, b) = self.curve.edge_points(e);
                        let d = point_segment_dist(p, a, b);
                        if d <= r {
                            f(e, d);
                        }
                    }
                }
            }
        }
    }
}

/// Which curve supplies the vertex of a vertex-edge pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum PairSide {
    /// Vertex of the first curve, edge of the second.
    XVertex,
    /// Vertex of the second curve, edge of the first.
    YVertex,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VertexEdgePair {
    pub side: PairSide,
    pub vertex: usize,
    pub edge: usize,
    pub dist: f64,
}

/// All vertex-edge pairs of `x` and `y` at distance at most `delta`,
/// sorted by side, vertex, and edge.
pub fn vertex_edge_pairs(x: &Polyline, y: &Polyline, delta: f64) -> Vec<VertexEdgePair> {
    let r = inflate(delta);
    let mut out = Vec::new();
    for (side, a, b) in [(PairSide::XVertex, x, y), (PairSide::YVertex, y, x)] {
        let bvh = EdgeBvh::new(b);
        for (v, p) in a.vertices().iter().enumerate() {
            let start = out.len();
            bvh.within(p, r, |edge, dist| {
                out.push(VertexEdgePair {
                    side,
                    vertex: v,
                    edge,
                    dist,
                })
            });
            out[start..].sort_by_key(|q| q.edge);
        }
    }
    out
}

/// Simplified curves and their vertex-edge pairs within `delta`.
#[derive(Clone, Debug)]
pub struct CandidatePairs {
    pub x: Polyline,
    pub y: Polyline,
    pub x_kept: Vec<usize>,
    pub y_kept: Vec<usize>,
    pub pairs: Vec<VertexEdgePair>,
}

/// Simplifies both curves with `mu = eps * delta` and reports all
/// vertex-edge pairs of the simplified curves within `delta`.
pub fn candidate_vertex_edge_pairs(
    x: &Polyline,
    y: &Polyline,
    delta: f64,
    eps: f64,
) -> CandidatePairs {
    let sx = simplify_mu(x, eps * delta);
    let sy = simplify_mu(y, eps * delta);
    let pairs = vertex_edge_pairs(&sx.curve, &sy.curve, delta);
    CandidatePairs {
        x: sx.curve,
        y: sy.curve,
        x_kept: sx.kept_indices,
        y_kept: sy.kept_indices,
        pairs,
    }
}

#[derive(Debug)]
struct SplitNode {
    lo: Vec<f64>,
    hi: Vec<f64>,
    count: usize,
    children: Option<(usize, usize)>,
}

impl SplitNode {
    fn diam(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| (b - a) * (b - a))
            .sum::<f64>()
            .sqrt()
    }
}

fn box_box_dist(a: &SplitNode, b: &SplitNode) -> f64 {
    let mut s = 0.0;
    for k in 0..a.lo.len() {
        let d = (b.lo[k] - a.hi[k]).max(a.lo[k] - b.hi[k]).max(0.0);
        s += d * d;
    }
    s.sqrt()
}

fn split_tree(pts: &mut [Point], nodes: &mut Vec<SplitNode>) -> usize {
    let d = pts[0].dim();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for p in pts.iter() {
        for (k, c) in p.coords().iter().enumerate() {
            lo[k] = lo[k].min(*c);
            hi[k] = hi[k].max(*c);
        }
    }
    let axis = (0..d)
        .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])))
        .unwrap_or(0);
    let children = if pts.len() > 1 && hi[axis] > lo[axis] {
        let cut = 0.5 * (lo[axis] + hi[axis]);
        pts.sort_by(|a, b| a.coords()[axis].total_cmp(&b.coords()[axis]));
        let mut m = pts.partition_point(|p| p.coords()[axis] <= cut);
        if m == pts.len() {
            m -= 1;
        }
        let (l, r) = pts.split_at_mut(m.max(1));
        Some((split_tree(l, nodes), split_tree(r, nodes)))
    } else {
        None
    };
    nodes.push(SplitNode {
        lo,
        hi,
        count: pts.len(),
        children,
    });
    nodes.len() - 1
}

/// Distances covering every pairwise distance of `points` within a factor
/// of two: each distance `d` has a returned `u` with `u <= d <= 2u`.
///
/// Pairs come from a well-separated pair decomposition over a fair split
/// tree; a pair of boxes is accepted once their gap is at least the sum of
/// their diameters, and reports the gap. Sorted and deduplicated.
pub fn wspd_distances(points: &[Point]) -> Vec<f64> {
    if points.len() < 2 {
        return Vec::new();
    }
    let mut pts = points.to_vec();
    let mut nodes = Vec::with_capacity(2 * pts.len());
    split_tree(&mut pts, &mut nodes);
    let mut out = Vec::new();
    let mut work: Vec<(usize, usize)> = nodes.iter().filter_map(|nd| nd.children).collect();
    // a leaf holding several coincident points
    if nodes.iter().any(|nd| nd.children.is_none() && nd.count > 1) {
        out.push(0.0);
    }
    while let Some((a, b)) = work.pop() {
        let (na, nb) = (&nodes[a], &nodes[b]);
        let gap = box_box_dist(na, nb);
        let (da, db) = (na.diam(), nb.diam());
        if gap >= da + db {
            out.push(gap);
            continue;
        }
        let (split, keep) = if da >= db { (a, b) } else { (b, a) };
        match nodes[split].children {
            Some((l, r)) => {
                work.push((l, keep));
                work.push((r, keep));
            }
            None => match nodes[keep].children {
                Some((l, r)) => {
                    work.push((l, split));
                    work.push((r, split));
                }
                None => out.push(gap),
            },
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}
