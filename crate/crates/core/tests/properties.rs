use proptest::prelude::*;

use frechet_core::freespace::{
    curve_segment_frechet, frechet_decide, frechet_value, relevant_complexity,
};
use frechet_core::geom::{point_segment_nearest, segment_frechet, spine, subcurve};
use frechet_core::oracle::{
    brute_opt_simplification, brute_shortcut_frechet, generate, Family, GeneratorConfig,
};
use frechet_core::permute::build_permutation;
use frechet_core::shortcut::{decider, shortcut_frechet};
use frechet_core::simplify::simplify_mu;
use frechet_core::{CurvePos, Point, Polyline, Segment};

const FAMILIES: [Family; 5] = [
    Family::RandomWalk,
    Family::Spiral,
    Family::Zigzag,
    Family::Bump,
    Family::Convex,
];

fn curve(max_n: usize) -> impl Strategy<Value = Polyline> {
    (any::<u64>(), 0..FAMILIES.len(), 2..=max_n).prop_map(|(seed, f, n)| {
        generate(&GeneratorConfig {
            seed,
            n,
            family: FAMILIES[f],
            scale: 1.0,
        })
        .expect("valid config")
    })
}

fn point() -> impl Strategy<Value = Point> {
    (-5.0..5.0f64, -5.0..5.0f64).prop_map(|(x, y)| Point::xy(x, y))
}

fn segment() -> impl Strategy<Value = Segment> {
    (point(), point()).prop_map(|(a, b)| Segment::new(a, b).expect("same dimension"))
}

fn pos(z: &Polyline, x: f64) -> CurvePos {
    CurvePos::from_param(x * z.edge_count() as f64, z.edge_count())
}

/// `Y` close to `X` with random spikes.
fn instance() -> impl Strategy<Value = (Polyline, Polyline)> {
    (
        curve(10),
        prop::collection::vec(
            (
                0.0..1.0f64,
                -0.3..0.3f64,
                -0.3..0.3f64,
                prop::bool::weighted(0.3),
            ),
            0..7,
        ),
    )
        .prop_map(|(x, ys)| {
            let m = x.edge_count() as f64;
            let mut ts: Vec<_> = ys
                .into_iter()
                .map(|(t, dx, dy, spike)| (t * m, dx, dy, spike))
                .collect();
            ts.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut pts = vec![x.first().add(&Point::xy(0.05, -0.05))];
            for (t, dx, dy, spike) in ts {
                let k = if spike { 8.0 } else { 1.0 };
                pts.push(x.at_param(t).add(&Point::xy(k * dx, k * dy)));
            }
            pts.push(x.last().add(&Point::xy(-0.05, 0.05)));
            (x, Polyline::new(pts).expect("finite"))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn segment_frechet_is_a_metric(a in segment(), b in segment(), c in segment()) {
        let d = |s: &Segment, t: &Segment| segment_frechet(s, t).unwrap();
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-12);
        prop_assert_eq!(d(&a, &a), 0.0);
        if a.a != b.a || a.b != b.b {
            prop_assert!(d(&a, &b) > 0.0);
        }
    }

    #[test]
    fn nearest_point_beats_endpoints(p in point(), s in segment()) {
        let (_, d) = point_segment_nearest(&p, &s).unwrap();
        prop_assert!(d <= p.dist(&s.a) + 1e-12 && d <= p.dist(&s.b) + 1e-12);
    }

    #[test]
    fn subcurve_of_everything_is_the_curve(z in curve(12)) {
        prop_assert_eq!(subcurve(&z, z.start_pos(), z.end_pos()).unwrap(), z);
    }

    #[test]
    fn subcurve_composes(z in curve(12), r in prop::collection::vec(0.0..1.0f64, 4)) {
        let mut outer = [r[0], r[1]];
        outer.sort_by(f64::total_cmp);
        let m = z.edge_count() as f64;
        let (a, c) = (outer[0] * m, outer[1] * m);
        let sub = subcurve(&z, pos(&z, outer[0]), pos(&z, outer[1])).unwrap();
        // breakpoints of `sub` in parameters of `z`
        let mut ts = vec![a];
        ts.extend((a.floor() as usize + 1..).map(|v| v as f64).take_while(|&v| v < c));
        ts.push(c);
        prop_assume!(ts.len() == sub.len());
        let mut inner = [r[2], r[3]];
        inner.sort_by(f64::total_cmp);
        let to_z = |s: f64| {
            let x = s * sub.edge_count() as f64;
            let e = (x.floor() as usize).min(sub.edge_count() - 1);
            ts[e] + (x - e as f64) * (ts[e + 1] - ts[e])
        };
        let (a2, b2) = (to_z(inner[0]), to_z(inner[1]));
        let twice = subcurve(&sub, pos(&sub, inner[0]), pos(&sub, inner[1])).unwrap();
        let once = subcurve(&z, CurvePos::from_param(a2, z.edge_count()), CurvePos::from_param(b2, z.edge_count())).unwrap();
        prop_assert!(frechet_value(&twice, &once) <= 1e-9);
    }

    #[test]
    fn segment_distance_against_spines(z in curve(12), s in segment(), r in prop::collection::vec(0.0..1.0f64, 2)) {
        let d = curve_segment_frechet(&z, &s);
        let sp = spine(&z);
        prop_assert!(d >= segment_frechet(&s, &sp).unwrap() - 1e-9);
        let own = curve_segment_frechet(&z, &sp);
        prop_assert!(d >= own / 2.0 - 1e-9);
        let mut ab = [r[0], r[1]];
        ab.sort_by(f64::total_cmp);
        let sub = subcurve(&z, pos(&z, ab[0]), pos(&z, ab[1])).unwrap();
        prop_assert!(curve_segment_frechet(&sub, &spine(&sub)) <= 2.0 * own + 1e-9);
    }

    #[test]
    fn shortcutting_a_curve_never_hurts_against_a_segment(z in curve(12), s in segment(), i in 0usize..12, j in 0usize..12) {
        let n = z.len();
        let i = i % (n - 1);
        let j = i + 1 + j % (n - 1 - i);
        let kept: Vec<usize> = (0..=i).chain(j..z.len()).collect();
        let short = z.pick(&kept);
        prop_assert!(curve_segment_frechet(&short, &s) <= curve_segment_frechet(&z, &s) + 1e-9);
    }

    #[test]
    fn decide_is_monotone_and_agrees_with_value(x in curve(10), y in curve(10), f in 0.1..3.0f64) {
        let v = frechet_value(&x, &y);
        prop_assert!(frechet_decide(&x, &y, v + 1e-7));
        if v > 1e-4 {
            prop_assert!(!frechet_decide(&x, &y, v - 1e-4));
        }
        let d = f * v;
        if frechet_decide(&x, &y, d) {
            prop_assert!(frechet_decide(&x, &y, 1.5 * d) && frechet_decide(&x, &y, 4.0 * d));
        }
    }

    #[test]
    fn frechet_value_is_symmetric_with_triangle_inequality(x in curve(8), y in curve(8), z in curve(8)) {
        let d = frechet_value;
        prop_assert!((d(&x, &y) - d(&y, &x)).abs() <= 1e-9);
        prop_assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z) + 1e-9);
    }

    #[test]
    fn simplification_properties(z in curve(40), mu in 0.0..3.0f64) {
        let s = simplify_mu(&z, mu);
        prop_assert!(frechet_value(&s.curve, &z) <= mu + 1e-9);
        prop_assert_eq!(simplify_mu(&s.curve, mu).curve, s.curve.clone());
        prop_assert_eq!(s.kept_indices.first(), Some(&0));
        prop_assert_eq!(s.kept_indices.last(), Some(&(z.len() - 1)));
    }

    #[test]
    fn permutation_weights_are_quasi_decreasing(z in curve(16)) {
        let perm = build_permutation(&z).unwrap();
        let w: Vec<f64> = (3..=z.len()).map(|i| perm.weight(i).unwrap()).collect();
        for i in 0..w.len() {
            for j in i + 1..w.len() {
                prop_assert!(w[j] <= 4.0 * w[i] + 1e-9);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn shortcut_oracle_facts((x, y) in instance(), angle in 0.0..6.3f64, dx in -3.0..3.0f64) {
        let ds = brute_shortcut_frechet(&x, &y, 1e-9).unwrap();
        prop_assert!(ds <= frechet_value(&x, &y) + 1e-9);
        let (c, s) = (angle.cos(), angle.sin());
        let mv = |z: &Polyline| {
            Polyline::new(
                z.vertices().iter().map(|p| {
                    let (a, b) = (p.coords()[0], p.coords()[1]);
                    Point::xy(c * a - s * b + dx, s * a + c * b - dx)
                }).collect(),
            ).unwrap()
        };
        let moved = brute_shortcut_frechet(&mv(&x), &mv(&y), 1e-9).unwrap();
        prop_assert!((moved - ds).abs() <= 1e-6);
    }

    #[test]
    fn optimal_simplification_improves_with_k(z in curve(9)) {
        let vals: Vec<f64> = (2..=z.len()).map(|k| brute_opt_simplification(&z, k).unwrap()).collect();
        for w in vals.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12);
        }
    }

    #[test]
    fn shortcut_distance_is_sandwiched_with_a_valid_witness((x, y) in instance(), eps in 0.1..2.0f64) {
        let ds = brute_shortcut_frechet(&x, &y, 1e-9).unwrap();
        let r = shortcut_frechet(&x, &y, eps).unwrap();
        prop_assert!(r.value >= ds - 1e-6 && r.value <= (3.0 + eps) * ds + 1e-6, "{} vs {}", r.value, ds);
        prop_assert!(frechet_value(&x, &r.witness.curve(&y)) <= r.value + 1e-9);
        prop_assert_eq!(r.witness.vertices.first(), Some(&0));
        prop_assert_eq!(r.witness.vertices.last(), Some(&(y.len() - 1)));
    }

    #[test]
    fn decider_accepts_at_or_above_the_distance((x, y) in instance(), f in 1.0..3.0f64) {
        let ds = brute_shortcut_frechet(&x, &y, 1e-9).unwrap();
        prop_assert!(decider(&x, &y, 1.0 / 3.0, ds * f + 1e-7).is_yes());
    }
}

#[test]
fn relevant_complexity_grows_linearly() {
    let mut per_vertex = Vec::new();
    for n in [250, 500, 1000, 2000] {
        let x = generate(&GeneratorConfig {
            seed: 3,
            n,
            family: Family::Spiral,
            scale: 1.0,
        })
        .unwrap();
        let y = Polyline::new(
            x.vertices()
                .iter()
                .map(|p| p.add(&Point::xy(0.1, 0.0)))
                .collect(),
        )
        .unwrap();
        let delta = 0.3;
        let sx = simplify_mu(&x, delta / 10.0).curve;
        let sy = simplify_mu(&y, delta / 10.0).curve;
        per_vertex.push(relevant_complexity(&sx, &sy, delta) as f64 / n as f64);
    }
    let lo = per_vertex.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = per_vertex.iter().cloned().fold(0.0, f64::max);
    assert!(hi <= 3.0 * lo, "{per_vertex:?}");
}
