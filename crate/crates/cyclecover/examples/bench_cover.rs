//! Rough timing harness for the full cover pipeline on image lattices.
//! Run: cargo run --release --example bench_cover -- <side>

use std::time::Instant;

use cyclecover::image::{add_gaussian_noise, build_8lattice, ImageSignal, WeightScheme};
use cyclecover::vcc::min_weight_cycle_cover_with;
use cyclecover::QuantizeMode;

fn main() {
    let side: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(16);
    let base = ImageSignal::new(
        side,
        side,
        (0..side * side)
            .map(|i| {
                let (r, c) = (i / side, i % side);
                if r < side / 2 && c < side / 2 {
                    0.0
                } else if r < side / 2 {
                    80.0
                } else if c < side / 2 {
                    160.0
                } else {
                    240.0
                }
            })
            .collect(),
    );
    let img = add_gaussian_noise(&base, 7.0, 1);
    let g = build_8lattice(&img, &WeightScheme::default()).unwrap();
    println!("lattice: {} vertices, {} edges", g.vertex_count(), g.edge_count());
    let t = Instant::now();
    let cover = min_weight_cycle_cover_with(&g, QuantizeMode::Dense).unwrap();
    println!(
        "cover in {:.2?}: {} cycles, weight {:.3}",
        t.elapsed(),
        cover.cycles.len(),
        cover.total_weight
    );
}
