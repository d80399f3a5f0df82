//! Universal vertex permutation and k-segment subcurve queries.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::GeomError;
use crate::freespace::frechet_value;
use crate::geom::{CurvePos, Point, Polyline};
use crate::segquery::SegQueryIndex;

/// Accuracy of the segment queries used as removal weights.
pub const WEIGHT_EPS: f64 = 0.1;

/// Vertex ordering whose prefixes span good simplifications.
///
/// `order[0]` and `order[1]` are the endpoints. `weights[i]` is the removal
/// weight of `order[i + 2]`.
#[derive(Clone, Debug)]
pub struct VertexPermutation {
    pub order: Vec<usize>,
    pub weights: Vec<f64>,
    rank: Vec<usize>,
    /// Sorted vertex indices of the prefixes of size 2, 4, 8, ... and n.
    ladder: Vec<Vec<usize>>,
    curve: Polyline,
}

/// A spine curve on a prefix of the permutation and its error bound.
#[derive(Clone, Debug, PartialEq)]
pub struct SpineExtraction {
    pub curve: Polyline,
    pub indices: Vec<usize>,
    pub delta: f64,
}

#[derive(PartialEq)]
struct HeapItem {
    w: f64,
    v: usize,
    version: u32,
}

impl Eq for HeapItem {}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapItem {
    // reversed: BinaryHeap pops the smallest weight, then the smallest index
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .w
            .total_cmp(&self.w)
            .then_with(|| other.v.cmp(&self.v))
    }
}

/// Greedily removes the interior vertex of least weight until only the
/// endpoints remain; the reversed removal order is the permutation.
pub fn build_permutation(z: &Polyline) -> Result<VertexPermutation, GeomError> {
    let n = z.len();
    if n < 2 {
        return Err(GeomError::TooFewVertices {
            needed: 2,
            found: n,
        });
    }
    let mut removed: Vec<(usize, f64)> = Vec::with_capacity(n.saturating_sub(2));
    if n > 2 {
        let idx = SegQueryIndex::build(z, WEIGHT_EPS)?;
        let weight =
            |a: usize, b: usize| idx.query_param(a as f64, b as f64, z.vertex(a), z.vertex(b));
        let mut prev: Vec<usize> = (0..n).map(|i| i.saturating_sub(1)).collect();
        let mut next: Vec<usize> = (0..n).map(|i| (i + 1).min(n - 1)).collect();
        let mut version = vec![0u32; n];
        let mut alive = vec![true; n];
        let mut heap = BinaryHeap::with_capacity(n);
        for v in 1..n - 1 {
            heap.push(HeapItem {
                w: weight(v - 1, v + 1),
                v,
                version: 0,
            });
        }
        while let Some(HeapItem { w, v, version: ver }) = heap.pop() {
            if !alive[v] || ver != version[v] {
                continue;
            }
            alive[v] = false;
            removed.push((v, w));
            let (a, b) = (prev[v], next[v]);
            next[a] = b;
            prev[b] = a;
            for x in [a, b] {
                if x != 0 && x != n - 1 {
                    version[x] += 1;
                    heap.push(HeapItem {
                        w: weight(prev[x], next[x]),
                        v: x,
                        version: version[x],
                    });
                }
            }
        }
    }
    let mut order = vec![0, n - 1];
    let mut weights = Vec::with_capacity(removed.len());
    for &(v, w) in removed.iter().rev() {
        order.push(v);
        weights.push(w);
    }
    let mut rank = vec![0; n];
    for (r, &v) in order.iter().enumerate() {
        rank[v] = r;
    }
    let mut ladder = Vec::new();
    let mut m = 2;
    while m < n {
        let mut pre = order[..m].to_vec();
        pre.sort_unstable();
        ladder.push(pre);
        m *= 2;
    }
    ladder.push((0..n).collect());
    Ok(VertexPermutation {
        order,
        weights,
        rank,
        ladder,
        curve: z.clone(),
    })
}

impl VertexPermutation {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn curve(&self) -> &Polyline {
        &self.curve
    }

    /// Weight of the `i`-th permutation vertex, 1-based; `None` for the
    /// endpoints and out-of-range ranks.
    pub fn weight(&self, i: usize) -> Option<f64> {
        i.checked_sub(3).and_then(|j| self.weights.get(j).copied())
    }

    /// Sorted vertex indices of the first `m` permutation vertices.
    pub fn prefix_indices(&self, m: usize) -> Vec<usize> {
        let m = m.clamp(2, self.len());
        let src = self
            .ladder
            .iter()
            .find(|l| l.len() >= m)
            .unwrap_or(&self.ladder[self.ladder.len() - 1]);
        src.iter().copied().filter(|&v| self.rank[v] < m).collect()
    }

    /// Spine curve on the first `min(n, 2k+1)` vertices with its bound.
    pub fn extract_spine(&self, k: usize) -> Result<SpineExtraction, GeomError> {
        if k < 2 {
            return Err(GeomError::OutOfRange {
                name: "k",
                value: k as f64,
            });
        }
        let n = self.len();
        let big_k = n.min(2 * k + 1);
        let indices = self.prefix_indices(big_k);
        let delta = if big_k == n {
            0.0
        } else {
            5.0 * self.weights[big_k - 2]
        };
        Ok(SpineExtraction {
            curve: self.curve.pick(&indices),
            indices,
            delta,
        })
    }
}

/// Free-function form of [`VertexPermutation::extract_spine`].
pub fn extract_spine(perm: &VertexPermutation, k: usize) -> Result<SpineExtraction, GeomError> {
    perm.extract_spine(k)
}

#[derive(Debug)]
struct KSegNode {
    range: (usize, usize),
    perm: VertexPermutation,
    children: Option<(usize, usize)>,
}

/// Balanced edge tree with a vertex permutation of every node's subcurve.
#[derive(Debug)]
pub struct KSegIndex {
    nodes: Vec<KSegNode>,
    root: usize,
    curve: Polyline,
}

pub fn kseg_build(z: &Polyline) -> Result<KSegIndex, GeomError> {
    if z.len() < 2 {
        return Err(GeomError::TooFewVertices {
            needed: 2,
            found: z.len(),
        });
    }
    let mut idx = KSegIndex {
        nodes: Vec::new(),
        root: 0,
        curve: z.clone(),
    };
    idx.root = idx.build_node(0, z.len() - 1)?;
    Ok(idx)
}

impl KSegIndex {
    fn build_node(&mut self, lo: usize, hi: usize) -> Result<usize, GeomError> {
        let children = if hi - lo > 1 {
            let mid = (lo + hi) / 2;
            Some((self.build_node(lo, mid)?, self.build_node(mid, hi)?))
        } else {
            None
        };
        let sub = Polyline::new(self.curve.vertices()[lo..=hi].to_vec())?;
        let perm = build_permutation(&sub)?;
        self.nodes.push(KSegNode {
            range: (lo, hi),
            perm,
            children,
        });
        Ok(self.nodes.len() - 1)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Vertex range and permutation of node `id`.
    pub fn node(&self, id: usize) -> ((usize, usize), &VertexPermutation) {
        (self.nodes[id].range, &self.nodes[id].perm)
    }

    fn collect(&self, id: usize, first: usize, last: usize, out: &mut Vec<usize>) {
        let (lo, hi) = self.nodes[id].range;
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

    /// Approximates `d_F(Q, Z[u..v])` within a factor of 23, from above.
    pub fn query(&self, u: CurvePos, v: CurvePos, q: &Polyline) -> Result<f64, GeomError> {
        let z = &self.curve;
        z.check_pos(u)?;
        z.check_pos(v)?;
        if q.dim() != z.dim() {
            return Err(GeomError::DimensionMismatch {
                expected: z.dim(),
                found: q.dim(),
            });
        }
        if q.len() < 2 {
            return Err(GeomError::TooFewVertices {
                needed: 2,
                found: q.len(),
            });
        }
        let (ux, vx) = (u.param(), v.param());
        if ux > vx {
            return Err(GeomError::PositionOrder);
        }
        let k = q.len();
        let mut pts: Vec<Point> = vec![z.at_param(ux)];
        let mut delta = 0.0f64;
        let fi = ux.floor() as usize + 1;
        let li = (vx.ceil() as usize).saturating_sub(1);
        if vx > ux && fi <= li {
            pts.push(z.vertex(fi).clone());
            let mut nodes = Vec::new();
            if fi < li {
                self.collect(self.root, fi, li, &mut nodes);
            }
            for id in nodes {
                let ext = self.nodes[id].perm.extract_spine(k)?;
                delta = delta.max(ext.delta);
                pts.extend(ext.curve.vertices()[1..].iter().cloned());
            }
        }
        pts.push(z.at_param(vx));
        let concat = Polyline::new(pts)?;
        Ok(frechet_value(&concat, q) + delta)
    }
}

/// Free-function form of [`KSegIndex::query`].
pub fn kseg_query(
    idx: &KSegIndex,
    u: CurvePos,
    v: CurvePos,
    q: &Polyline,
) -> Result<f64, GeomError> {
    idx.query(u, v, q)
}
