//! Instance builders shared by the benchmarks.

use frechet_core::oracle::{generate, Family, GeneratorConfig};
use frechet_core::{Point, Polyline};

/// A generated curve with about unit spacing between vertices.
pub fn base_curve(family: Family, n: usize) -> Polyline {
    let scale = if family == Family::Convex {
        n as f64 / 40.0
    } else {
        1.0
    };
    generate(&GeneratorConfig {
        seed: 7,
        n,
        family,
        scale,
    })
    .expect("valid generator config")
}

/// `X` and a copy of it shifted by `offset` with every 37th vertex pulled
/// out by `spike`, so the best shortcut curve skips the spikes.
pub fn spiked_pair(family: Family, n: usize, offset: f64, spike: f64) -> (Polyline, Polyline) {
    let x = base_curve(family, n);
    let pts = (0..n)
        .map(|i| {
            let p = x.vertex(i).add(&Point::xy(offset, 0.0));
            if i % 37 == 18 && i + 1 < n {
                p.add(&Point::xy(spike, spike))
            } else {
                p
            }
        })
        .collect();
    (x, Polyline::new(pts).expect("finite points"))
}
