//! Timing for unit-weight lattice covers under different quantize modes.
//! Run: cargo run --release --example bench_unit -- <side>

use std::time::Instant;

use cyclecover::image::{build_8lattice, ImageSignal, WeightScheme};
use cyclecover::vcc::min_weight_cycle_cover_with;
use cyclecover::QuantizeMode;

fn main() {
    let side: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(32);
    let img = ImageSignal::constant(side, side, 0.0);
    let g = build_8lattice(&img, &WeightScheme::AbsDiff)
        .unwrap()
        .map_weights(|_| 1.0);
    for (name, mode) in [("none", QuantizeMode::None), ("ordinal", QuantizeMode::Ordinal)] {
        let t = Instant::now();
        let cover = min_weight_cycle_cover_with(&g, mode).unwrap();
        println!(
            "{name}: {:.2?}, {} cycles, weight {}",
            t.elapsed(),
            cover.cycles.len(),
            cover.total_weight
        );
    }
}
