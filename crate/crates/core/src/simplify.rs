//! Greedy distance-threshold simplification.

use crate::geom::Polyline;

/// A simplified curve together with the original indices it kept.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplificationResult {
    pub curve: Polyline,
    pub kept_indices: Vec<usize>,
}

/// Keeps the first vertex, then repeatedly the first vertex at distance
/// at least `mu` from the last kept one, and always the final vertex.
pub fn simplify_mu(z: &Polyline, mu: f64) -> SimplificationResult {
    let n = z.len();
    if n <= 2 {
        return SimplificationResult {
            curve: z.clone(),
            kept_indices: (0..n).collect(),
        };
    }
    let mu2 = mu * mu;
    let mut kept = vec![0usize];
    let mut cur = 0usize;
    for i in 1..n - 1 {
        if z.vertex(i).dist2(z.vertex(cur)) >= mu2 {
            kept.push(i);
            cur = i;
        }
    }
    kept.push(n - 1);
    SimplificationResult {
        curve: z.pick(&kept),
        kept_indices: kept,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_threshold_keeps_everything() {
        let z = Polyline::from_xy(&[(0.0, 0.0), (0.0, 0.0), (1.0, 0.0), (1.0, 1.0)]);
        let s = simplify_mu(&z, 0.0);
        assert_eq!(s.curve, z);
        assert_eq!(s.kept_indices, vec![0, 1, 2, 3]);
    }

    #[test]
    fn rule_trace() {
        let z = Polyline::from_xy(&[(0.0, 0.0), (0.5, 0.0), (1.0, 0.0)]);
        let s = simplify_mu(&z, 0.6);
        assert_eq!(s.kept_indices, vec![0, 2]);
        assert_eq!(s.curve, Polyline::from_xy(&[(0.0, 0.0), (1.0, 0.0)]));
    }

    #[test]
    fn large_threshold_keeps_endpoints() {
        let z = Polyline::from_xy(&[(0.0, 0.0), (1.0, 2.0), (2.0, -1.0), (3.0, 0.0)]);
        assert_eq!(simplify_mu(&z, 100.0).kept_indices, vec![0, 3]);
    }

    #[test]
    fn ties_mark_the_vertex() {
        let z = Polyline::from_xy(&[(0.0, 0.0), (0.5, 0.0), (1.0, 0.0)]);
        assert_eq!(simplify_mu(&z, 0.5).kept_indices, vec![0, 1, 2]);
    }

    #[test]
    fn vertex_count_is_not_monotone_in_mu() {
        let z = Polyline::from_xy(&[(0.0, 0.0), (1.0, 1.0), (1.0, 2.0), (1.0, 0.0), (0.0, 0.0)]);
        assert_eq!(simplify_mu(&z, 1.4).kept_indices, vec![0, 1, 4]);
        assert_eq!(simplify_mu(&z, 2.0).kept_indices, vec![0, 2, 3, 4]);
    }
}
