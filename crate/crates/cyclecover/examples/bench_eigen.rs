//! Timing harness for the dense Laplacian eigendecomposition.
//! Run: cargo run --release --example bench_eigen -- <side>

use std::time::Instant;

use cyclecover::image::{build_8lattice, ImageSignal, WeightScheme};
use cyclecover::spectral::gft_basis;

fn main() {
    let side: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(32);
    let img = ImageSignal::constant(side, side, 0.0);
    let g = build_8lattice(&img, &WeightScheme::default()).unwrap();
    let t = Instant::now();
    let basis = gft_basis(&g);
    println!(
        "n = {}: eigensolve in {:.2?}, lambda_0 = {:.2e}",
        g.vertex_count(),
        t.elapsed(),
        basis.eigenvalues[0]
    );
}
