//! Brute-force ground truth and deterministic instance generators.

use std::f64::consts::PI;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::GeomError;
use crate::freespace::{ball_interval, frechet_decide, frechet_value_with, FrechetOptions};
use crate::geom::{Point, Polyline};

/// Largest second curve accepted by [`brute_shortcut_frechet`].
pub const MAX_SHORTCUT_VERTICES: usize = 14;
/// Largest curve accepted by [`brute_opt_simplification`].
pub const MAX_SIMPLIFICATION_VERTICES: usize = 16;

/// Minimum Fréchet distance between `x` and any vertex-restricted
/// shortcut curve of `y`.
pub fn brute_shortcut_frechet(x: &Polyline, y: &Polyline, tol: f64) -> Result<f64, GeomError> {
    brute_shortcut_witness(x, y, tol).map(|(v, _)| v)
}

/// Like [`brute_shortcut_frechet`], also returning the kept vertices of `y`
/// of an optimal shortcut curve.
///
/// A vertex-restricted shortcut curve is the polyline through a subset of
/// `y`'s vertices that contains both endpoints, so the enumeration runs
/// over those subsets.
pub fn brute_shortcut_witness(
    x: &Polyline,
    y: &Polyline,
    tol: f64,
) -> Result<(f64, Vec<usize>), GeomError> {
    let n = y.len();
    if n > MAX_SHORTCUT_VERTICES {
        return Err(GeomError::TooManyVertices {
            limit: MAX_SHORTCUT_VERTICES,
            found: n,
        });
    }
    if x.dim() != y.dim() {
        return Err(GeomError::DimensionMismatch {
            expected: x.dim(),
            found: y.dim(),
        });
    }
    if n <= 2 {
        let v = frechet_value_with(x, y, opts(tol));
        return Ok((v, (0..n).collect()));
    }
    let floor = x.first().dist(y.first()).max(x.last().dist(y.last()));
    let interior = n - 2;
    let mut best = f64::INFINITY;
    let mut best_kept = Vec::new();
    let mut kept = Vec::with_capacity(n);
    for mask in 0u32..(1u32 << interior) {
        kept.clear();
        kept.push(0);
        kept.extend(
            (0..interior)
                .filter(|b| mask & (1 << b) != 0)
                .map(|b| b + 1),
        );
        kept.push(n - 1);
        let w = y.pick(&kept);
        if best.is_finite() && !frechet_decide(x, &w, best) {
            continue;
        }
        let v = frechet_value_with(x, &w, opts(tol));
        if v < best {
            best = v;
            best_kept = kept.clone();
            if best <= floor {
                break;
            }
        }
    }
    Ok((best, best_kept))
}

/// Minimum Fréchet distance between `z` and a polyline through at most `k`
/// of its vertices including both endpoints.
pub fn brute_opt_simplification(z: &Polyline, k: usize) -> Result<f64, GeomError> {
    let n = z.len();
    if n > MAX_SIMPLIFICATION_VERTICES {
        return Err(GeomError::TooManyVertices {
            limit: MAX_SIMPLIFICATION_VERTICES,
            found: n,
        });
    }
    if k < 2 || k > n {
        return Err(GeomError::OutOfRange {
            name: "k",
            value: k as f64,
        });
    }
    if k == n {
        return Ok(0.0);
    }
    let interior = n - 2;
    let mut best = f64::INFINITY;
    let mut kept = Vec::with_capacity(k);
    for mask in 0u32..(1u32 << interior) {
        if mask.count_ones() as usize > k - 2 {
            continue;
        }
        kept.clear();
        kept.push(0);
        kept.extend(
            (0..interior)
                .filter(|b| mask & (1 << b) != 0)
                .map(|b| b + 1),
        );
        kept.push(n - 1);
        let w = z.pick(&kept);
        if best.is_finite() && !frechet_decide(&w, z, best) {
            continue;
        }
        best = best.min(frechet_value_with(&w, z, FrechetOptions::default()));
        if best == 0.0 {
            break;
        }
    }
    Ok(best)
}

fn opts(tol: f64) -> FrechetOptions {
    FrechetOptions {
        tol,
        ..FrechetOptions::default()
    }
}

/// Lower-bound estimate of the packedness constant of `z`.
///
/// Balls are centered at vertices and edge midpoints. Radii are all
/// pairwise center distances for small curves; for larger curves a
/// geometric ladder of ratio `2^(1/4)` spanning the same range is used.
pub fn packedness_estimate(z: &Polyline) -> f64 {
    let mut centers: Vec<Point> = z.vertices().to_vec();
    for i in 0..z.len().saturating_sub(1) {
        centers.push(z.vertex(i).lerp(z.vertex(i + 1), 0.5));
    }
    let mut radii = Vec::new();
    if centers.len() <= 200 {
        for i in 0..centers.len() {
            for j in i + 1..centers.len() {
                radii.push(centers[i].dist(&centers[j]));
            }
        }
    } else {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for i in 0..z.len().saturating_sub(1) {
            let l = z.vertex(i).dist(z.vertex(i + 1));
            if l > 0.0 {
                lo = lo.min(l / 2.0);
            }
        }
        for c in &centers {
            hi = hi.max(c.dist(z.first())).max(c.dist(z.last()));
        }
        let mut r = lo;
        while r.is_finite() && r <= 2.0 * hi {
            radii.push(r);
            r *= 2f64.powf(0.25);
        }
    }
    radii.retain(|&r| r > 0.0);
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    let mut best = 0.0f64;
    for c in &centers {
        for &r in &radii {
            let mut len = 0.0;
            for i in 0..z.len().saturating_sub(1) {
                let (a, b) = (z.vertex(i), z.vertex(i + 1));
                if let Some((lo, hi)) = ball_interval(a, b, c, r) {
                    len += (hi - lo) * a.dist(b);
                }
            }
            best = best.max(len / r);
        }
    }
    best
}

/// Curve families produced by [`generate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    RandomWalk,
    Spiral,
    Zigzag,
    Bump,
    Convex,
}

impl FromStr for Family {
    type Err = GeomError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random_walk" => Ok(Family::RandomWalk),
            "spiral" => Ok(Family::Spiral),
            "zigzag" => Ok(Family::Zigzag),
            "bump" => Ok(Family::Bump),
            "convex" => Ok(Family::Convex),
            other => Err(GeomError::UnknownFamily(other.to_string())),
        }
    }
}

/// Parameters of a generated planar curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub n: usize,
    pub family: Family,
    pub scale: f64,
}

/// Deterministic planar curve for a configuration.
pub fn generate(cfg: &GeneratorConfig) -> Result<Polyline, GeomError> {
    if cfg.n == 0 {
        return Err(GeomError::TooFewVertices {
            needed: 1,
            found: 0,
        });
    }
    if !(cfg.scale > 0.0 && cfg.scale.is_finite()) {
        return Err(GeomError::OutOfRange {
            name: "scale",
            value: cfg.scale,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.n;
    let s = cfg.scale;
    let pts: Vec<(f64, f64)> = match cfg.family {
        Family::RandomWalk => {
            let mut p = (0.0, 0.0);
            let mut out = vec![p];
            for _ in 1..n {
                let a = rng.gen_range(0.0..2.0 * PI);
                let l = s * rng.gen_range(0.5..1.5);
                p = (p.0 + l * a.cos(), p.1 + l * a.sin());
                out.push(p);
            }
            out
        }
        Family::Spiral => {
            // Archimedean spiral with turn spacing `s` and arc step about s/2
            let b = s / (2.0 * PI);
            let mut theta = 2.0 * PI + rng.gen_range(0.0..2.0 * PI);
            let mut out = Vec::with_capacity(n);
            for _ in 0..n {
                let r = b * theta;
                out.push((r * theta.cos(), r * theta.sin()));
                let step = 0.5 * s * rng.gen_range(0.8..1.2);
                theta += step / r;
            }
            out
        }
        Family::Zigzag => (0..n)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                (k as f64 * 0.2 * s, sign * s * rng.gen_range(0.8..1.0))
            })
            .collect(),
        Family::Bump => (0..n)
            .map(|k| {
                let x = k as f64 * s;
                let interior = k > 0 && k + 1 < n;
                let y = if interior && rng.gen_bool(0.3) {
                    s * rng.gen_range(1.0..3.0)
                } else {
                    s * rng.gen_range(-0.1..0.1)
                };
                (x, y)
            })
            .collect(),
        Family::Convex => {
            let mut angles: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.9 * PI)).collect();
            angles.sort_by(f64::total_cmp);
            angles
                .iter()
                .map(|a| (s * a.cos(), 0.6 * s * a.sin()))
                .collect()
        }
    };
    Ok(Polyline::from_xy(&pts))
}
