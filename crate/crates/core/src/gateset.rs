//! Insert-only point set answering the two gate queries of the tunnel
//! procedure.
//!
//! Points live in static blocks of sizes `2^k` (the logarithmic method).
//! A block stores its points sorted by `x` with a min-`y` tree on top, so
//! "extreme `x` in an `x`-range among points with `y < y0`" is a single
//! descent per block.

use crate::freespace::ParamPoint;

#[derive(Clone, Debug)]
struct Block {
    pts: Vec<ParamPoint>,
    /// Min-`y` tree over `pts`, 1-based heap layout with `size` leaves.
    tree: Vec<f64>,
    size: usize,
}

impl Block {
    fn new(mut pts: Vec<ParamPoint>) -> Self {
        pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        let size = pts.len().next_power_of_two();
        let mut tree = vec![f64::INFINITY; 2 * size];
        for (i, p) in pts.iter().enumerate() {
            tree[size + i] = p.y;
        }
        for v in (1..size).rev() {
            tree[v] = tree[2 * v].min(tree[2 * v + 1]);
        }
        Self { pts, tree, size }
    }

    /// Index range `[lo, hi)` of points with `x` in `[xa, xb]`.
    fn range(&self, xa: f64, xb: f64) -> (usize, usize) {
        let lo = self.pts.partition_point(|p| p.x < xa);
        let hi = self.pts.partition_point(|p| p.x <= xb);
        (lo, hi)
    }

    /// Rightmost (or leftmost) index in `[lo, hi)` with `y < y0`.
    fn extreme(&self, lo: usize, hi: usize, y0: f64, rightmost: bool) -> Option<usize> {
        if lo >= hi {
            return None;
        }
        self.descend(1, 0, self.size, lo, hi, y0, rightmost)
    }

    #[allow(clippy::too_many_arguments)]
    fn descend(
        &self,
        v: usize,
        nl: usize,
        nr: usize,
        lo: usize,
        hi: usize,
        y0: f64,
        right: bool,
    ) -> Option<usize> {
        if nr <= lo || hi <= nl || self.tree[v] >= y0 {
            return None;
        }
        if nr - nl == 1 {
            return Some(nl);
        }
        let mid = (nl + nr) / 2;
        let (first, second) = if right {
            ((2 * v + 1, mid, nr), (2 * v, nl, mid))
        } else {
            ((2 * v, nl, mid), (2 * v + 1, mid, nr))
        };
        self.descend(first.0, first.1, first.2, lo, hi, y0, right)
            .or_else(|| self.descend(second.0, second.1, second.2, lo, hi, y0, right))
    }
}

/// Insert-only set of gates.
#[derive(Clone, Debug, Default)]
pub struct GateSet {
    blocks: Vec<Option<Block>>,
    len: usize,
}

impl GateSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn insert(&mut self, p: ParamPoint) {
        let mut carry = vec![p];
        let mut k = 0;
        loop {
            if k == self.blocks.len() {
                self.blocks.push(None);
            }
            match self.blocks[k].take() {
                Some(b) => {
                    carry.extend(b.pts);
                    k += 1;
                }
                None => {
                    self.blocks[k] = Some(Block::new(carry));
                    break;
                }
            }
        }
        self.len += 1;
    }

    /// Gate with the largest `x` among gates with `x <= x0` and `y < y0`.
    pub fn max_x_below(&self, x0: f64, y0: f64) -> Option<ParamPoint> {
        self.best(f64::NEG_INFINITY, x0, y0, true)
    }

    /// Gate with the smallest `x` among gates with `x` in `[xa, xb]` and
    /// `y < y0`.
    pub fn min_x_in_range(&self, xa: f64, xb: f64, y0: f64) -> Option<ParamPoint> {
        self.best(xa, xb, y0, false)
    }

    fn best(&self, xa: f64, xb: f64, y0: f64, rightmost: bool) -> Option<ParamPoint> {
        let mut out: Option<ParamPoint> = None;
        for b in self.blocks.iter().flatten() {
            let (lo, hi) = b.range(xa, xb);
            if let Some(i) = b.extreme(lo, hi, y0, rightmost) {
                let p = b.pts[i];
                let better = match out {
                    None => true,
                    Some(q) if rightmost => p.x > q.x,
                    Some(q) => p.x < q.x,
                };
                if better {
                    out = Some(p);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn empty_set() {
        let g = GateSet::new();
        assert!(g.max_x_below(10.0, 10.0).is_none());
        assert!(g.min_x_in_range(0.0, 10.0, 10.0).is_none());
    }

    #[test]
    fn strict_y_bound() {
        let mut g = GateSet::new();
        g.insert(ParamPoint::new(1.0, 2.0));
        assert!(g.max_x_below(5.0, 2.0).is_none());
        assert_eq!(g.max_x_below(5.0, 2.5), Some(ParamPoint::new(1.0, 2.0)));
        assert_eq!(g.max_x_below(1.0, 2.5), Some(ParamPoint::new(1.0, 2.0)));
        assert!(g.max_x_below(0.5, 2.5).is_none());
    }

    #[test]
    fn matches_brute_force() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let mut g = GateSet::new();
        let mut all: Vec<ParamPoint> = Vec::new();
        for step in 0..600 {
            let p = ParamPoint::new(
                rng.gen_range(0..40) as f64 * 0.25,
                rng.gen_range(0..20) as f64,
            );
            g.insert(p);
            all.push(p);
            if step % 3 != 0 {
                continue;
            }
            let x0 = rng.gen_range(0.0..10.0);
            let y0 = rng.gen_range(0.0..20.0);
            let want = all
                .iter()
                .filter(|q| q.x <= x0 && q.y < y0)
                .map(|q| q.x)
                .fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.max(x))));
            assert_eq!(g.max_x_below(x0, y0).map(|q| q.x), want);
            let xa = rng.gen_range(0.0..10.0);
            let xb = xa + rng.gen_range(0.0..3.0);
            let want = all
                .iter()
                .filter(|q| q.x >= xa && q.x <= xb && q.y < y0)
                .map(|q| q.x)
                .fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.min(x))));
            assert_eq!(g.min_x_in_range(xa, xb, y0).map(|q| q.x), want);
        }
        assert_eq!(g.len(), 600);
    }
}
