//! Acceptance suite: criteria A1-A10. Each test prints a single
//! "A<k> PASS ..." / "A<k> FAIL ..." line before asserting, so the verdicts
//! are visible in one place in the test output (run with --nocapture to see
//! lines for passing tests too).

use std::sync::OnceLock;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cyclecover::analysis::{adjacency_entropy, cover_stats, reorder_adjacency, spectrum_comparison};
use cyclecover::image::{
    add_gaussian_noise, build_8lattice, ImageSignal, WeightScheme, DEFAULT_EXP_SCALE,
};
use cyclecover::matching::{brute_force_perfect_matching, min_weight_perfect_matching};
use cyclecover::spectral::{
    denoise_image_vcc, dft, gft, gft_basis, idft, igft, psnr,
};
use cyclecover::vcc::{
    brute_force_cycle_cover, cover_with_fallback, min_weight_cycle_cover,
    min_weight_cycle_cover_with, validate_cover, CycleCover,
};
use cyclecover::{Graph, QuantizeMode};

fn verdict(name: &str, pass: bool, detail: &str) {
    println!("{name} {} {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{name} failed: {detail}");
}

fn random_graph(rng: &mut ChaCha8Rng, n: usize, density: f64, max_w: u32) -> Graph {
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(density) {
                g.add_edge(u, v, rng.gen_range(1..=max_w) as f64).unwrap();
            }
        }
    }
    g
}

/// 64x64 test image: vertical stripes cycling through the four intensity
/// values {0, 80, 160, 240} with period four. Every pixel column is a
/// one-pixel-wide slice of its intensity class, so no 2-factor can stay on a
/// single intensity: the cover statistics and spectra below are non-vacuous.
fn stripe_image() -> &'static ImageSignal {
    static IMG: OnceLock<ImageSignal> = OnceLock::new();
    IMG.get_or_init(|| {
        let pixels = (0..64 * 64)
            .map(|i| 80.0 * ((i % 64) % 4) as f64)
            .collect();
        ImageSignal::new(64, 64, pixels)
    })
}

/// Minimum-weight cover of the stripe image under the covering weights
/// (exp-difference, rank quantized), shared across A3/A4/A5.
fn stripe_cover() -> &'static (Graph, CycleCover) {
    static COVER: OnceLock<(Graph, CycleCover)> = OnceLock::new();
    COVER.get_or_init(|| {
        let g = build_8lattice(stripe_image(), &WeightScheme::default()).unwrap();
        let cover = min_weight_cycle_cover_with(&g, QuantizeMode::Dense).unwrap();
        (g, cover)
    })
}

fn longest_cycle_signal(img: &ImageSignal, cover: &CycleCover) -> Vec<f64> {
    let cycle = cover.cycles.iter().max_by_key(|c| c.len()).expect("has cycles");
    cycle.iter().map(|&v| img.pixels[v]).collect()
}

#[test]
fn a1_matching_exactness() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xA1);
    let sizes = [4usize, 6, 8, 10, 12];
    let mut checked = 0;
    while checked < 200 {
        let n = sizes[rng.gen_range(0..sizes.len())];
        let g = random_graph(&mut rng, n, 0.6, 20);
        let (fast, slow) = (min_weight_perfect_matching(&g), brute_force_perfect_matching(&g));
        match (fast, slow) {
            (Ok(fast), Ok(slow)) => {
                assert_eq!(
                    fast.total_weight, slow.total_weight,
                    "exact equality required on integer weights"
                );
                checked += 1;
            }
            (Err(_), Err(_)) => {} // infeasible instance, not counted
            (fast, slow) => panic!("feasibility disagreement: {fast:?} vs {slow:?}"),
        }
    }
    let elapsed = start.elapsed();
    verdict(
        "A1",
        elapsed.as_secs() < 60,
        &format!("(matching == oracle on {checked} graphs, {elapsed:.2?})"),
    );
}

#[test]
fn a2_cover_exactness() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xA2);
    let mut checked = 0;
    while checked < 100 {
        let n = rng.gen_range(4..=10);
        let g = random_graph(&mut rng, n, 0.6, 20);
        match (min_weight_cycle_cover(&g), brute_force_cycle_cover(&g)) {
            (Ok(fast), Ok(slow)) => {
                assert!(fast.uncovered.is_empty());
                assert_eq!(fast.total_weight, slow.total_weight);
                assert!(validate_cover(&g, &fast).is_valid(), "validate_cover rejected output");
                checked += 1;
            }
            (Ok(fast), Err(_)) => assert!(!fast.uncovered.is_empty()),
            (Err(_), Err(_)) => {}
            (fast, slow) => panic!("feasibility disagreement: {fast:?} vs {slow:?}"),
        }
    }
    let elapsed = start.elapsed();
    verdict(
        "A2",
        elapsed.as_secs() < 60,
        &format!("(cover == oracle on {checked} graphs, {elapsed:.2?})"),
    );
}

#[test]
fn a3_edge_fraction() {
    let (g, cover) = stripe_cover();
    let stats = cover_stats(g, cover).unwrap();
    let (w, h) = (64.0f64, 64.0f64);
    let closed_form = (w * h) / (4.0 * w * h - 3.0 * w - 3.0 * h + 2.0);
    let exact = stats.edge_fraction == closed_form;
    let in_range = (0.25..=0.27).contains(&stats.edge_fraction);
    verdict(
        "A3",
        exact && in_range,
        &format!(
            "(edge_fraction {} == |V|/(4wh-3w-3h+2) = {closed_form}, in [0.25, 0.27])",
            stats.edge_fraction
        ),
    );
}

#[test]
fn a4_smoothness_direction() {
    let (_, cover) = stripe_cover();
    // Variation statistics use absolute-difference weights.
    let stats_graph = build_8lattice(stripe_image(), &WeightScheme::AbsDiff).unwrap();
    let stats = cover_stats(&stats_graph, cover).unwrap();
    let ordered = stats.mean_weight_in_cover < stats.mean_weight_all
        && stats.mean_weight_all < stats.mean_weight_out_of_cover;
    let concentrated = stats.weight_fraction < stats.edge_fraction;
    verdict(
        "A4",
        ordered && concentrated,
        &format!(
            "(in {:.3} < all {:.3} < out {:.3}; weight_fraction {:.4} < edge_fraction {:.4})",
            stats.mean_weight_in_cover,
            stats.mean_weight_all,
            stats.mean_weight_out_of_cover,
            stats.weight_fraction,
            stats.edge_fraction
        ),
    );
}

#[test]
fn a5_spectrum_ordering() {
    let start = Instant::now();
    let img = stripe_image();
    let (g, cover) = stripe_cover();

    let signal = longest_cycle_signal(img, cover);
    let report = spectrum_comparison(&signal, 20, 0, None).unwrap();

    let unit_graph = g.map_weights(|_| 1.0);
    let unit_cover = min_weight_cycle_cover(&unit_graph).unwrap();
    let unit_signal = longest_cycle_signal(img, &unit_cover);
    let unit_fraction = dft(&unit_signal).band_energy_fraction(0.25, 0.75);

    let orig = report.original_fraction;
    let vs_permuted = orig <= 0.95 * report.permuted_mean_fraction;
    let vs_unit = orig <= 0.95 * unit_fraction;
    let elapsed = start.elapsed();
    verdict(
        "A5",
        vs_permuted && vs_unit && elapsed.as_secs() < 120,
        &format!(
            "(original {orig:.5} vs permuted {:.5} vs unit-weight {unit_fraction:.5}, {elapsed:.2?})",
            report.permuted_mean_fraction
        ),
    );
}

/// 64x64 piecewise-smooth image: two smooth sinusoidal pieces joined at a
/// vertical seam.
fn smooth_image() -> ImageSignal {
    let pixels = (0..64 * 64)
        .map(|i| {
            let (r, c) = ((i / 64) as f64, (i % 64) as f64);
            let tau = std::f64::consts::TAU;
            if (i % 64) < 32 {
                120.0 + 60.0 * (tau * r / 64.0).sin() * (tau * c / 64.0).cos()
            } else {
                60.0 + 40.0 * (tau * (r + c) / 64.0).cos()
            }
        })
        .collect();
    ImageSignal::new(64, 64, pixels)
}

#[test]
fn a6_denoising_improves_psnr() {
    let start = Instant::now();
    let clean = smooth_image();
    let noisy = add_gaussian_noise(&clean, 7.0, 0xA6);
    let noisy_psnr = psnr(&clean, &noisy).unwrap();

    // Per-cycle denoising along the minimum-weight cover.
    let g = build_8lattice(&noisy, &WeightScheme::default()).unwrap();
    let cover = min_weight_cycle_cover_with(&g, QuantizeMode::Dense).unwrap();
    let vcc_best = [0.5, 1.0, 2.0, 4.0, 8.0, 16.0]
        .iter()
        .map(|&gamma| psnr(&clean, &denoise_image_vcc(&noisy, &cover, gamma).unwrap()).unwrap())
        .fold(f64::NEG_INFINITY, f64::max);

    // Whole-image GFT baseline on the affinity-weighted lattice
    // (exp(-|diff|/s): similar pixels strongly coupled), eigensolve done once.
    let affinity = build_8lattice(
        &noisy,
        &WeightScheme::ExpDiff {
            scale: -DEFAULT_EXP_SCALE,
        },
    )
    .unwrap();
    let basis = gft_basis(&affinity);
    let coeffs = gft(&basis, &noisy.pixels).unwrap();
    let gft_best = [0.5, 1.0, 2.0, 4.0]
        .iter()
        .map(|&gamma| {
            let shrunk: Vec<f64> = coeffs
                .iter()
                .zip(&basis.eigenvalues)
                .map(|(c, l)| c / (1.0 + gamma * l))
                .collect();
            let out = ImageSignal::new(64, 64, igft(&basis, &shrunk).unwrap());
            psnr(&clean, &out).unwrap()
        })
        .fold(f64::NEG_INFINITY, f64::max);

    let elapsed = start.elapsed();
    let vcc_ok = vcc_best >= noisy_psnr + 1.0;
    let gft_ok = gft_best >= noisy_psnr + 0.5;
    verdict(
        "A6",
        vcc_ok && gft_ok && elapsed.as_secs() < 600,
        &format!(
            "(noisy {noisy_psnr:.2} dB, vcc+gft {vcc_best:.2} dB, gft {gft_best:.2} dB, {elapsed:.2?})"
        ),
    );
}

#[test]
fn a7_gft_dft_equivalence() {
    let mut max_eig_err = 0.0f64;
    let mut max_residual = 0.0f64;
    for n in 3..=32usize {
        let mut g = Graph::new(n);
        for i in 0..n {
            g.add_edge(i, (i + 1) % n, 1.0).unwrap();
        }
        let basis = gft_basis(&g);
        let mut expect: Vec<f64> = (0..n)
            .map(|k| 2.0 - 2.0 * (std::f64::consts::TAU * k as f64 / n as f64).cos())
            .collect();
        expect.sort_by(f64::total_cmp);
        for (a, b) in basis.eigenvalues.iter().zip(&expect) {
            max_eig_err = max_eig_err.max((a - b).abs());
        }
        // Each real DFT basis vector must lie in the eigenspace of its
        // eigenvalue: project it onto the span of matching eigenvectors and
        // check the residual.
        for k in 0..n {
            let lambda = 2.0 - 2.0 * (std::f64::consts::TAU * k as f64 / n as f64).cos();
            for phase in [0.0, std::f64::consts::FRAC_PI_2] {
                let v: Vec<f64> = (0..n)
                    .map(|i| (std::f64::consts::TAU * (k * i) as f64 / n as f64 + phase).cos())
                    .collect();
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm < 1e-9 {
                    continue; // sine branch vanishes at k = 0 and Nyquist
                }
                let v: Vec<f64> = v.iter().map(|x| x / norm).collect();
                let mut residual: Vec<f64> = v.clone();
                for j in 0..n {
                    if (basis.eigenvalues[j] - lambda).abs() < 1e-6 {
                        let col = basis.vectors.column(j);
                        let dot: f64 = v.iter().zip(col.iter()).map(|(a, b)| a * b).sum();
                        for (r, b) in residual.iter_mut().zip(col.iter()) {
                            *r -= dot * b;
                        }
                    }
                }
                let res = residual.iter().map(|x| x * x).sum::<f64>().sqrt();
                max_residual = max_residual.max(res);
            }
        }
    }
    verdict(
        "A7",
        max_eig_err < 1e-9 && max_residual < 1e-8,
        &format!("(max eigenvalue error {max_eig_err:.2e}, max projection residual {max_residual:.2e})"),
    );
}

#[test]
fn a8_fallback() {
    // The bowtie: two triangles sharing vertex 2; no 2-factor exists.
    let mut bowtie = Graph::new(5);
    for (u, v) in [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)] {
        bowtie.add_edge(u, v, 1.0).unwrap();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xA8);
    let mut instances = vec![bowtie];
    while instances.len() < 21 {
        let n = rng.gen_range(5..=12);
        let g = random_graph(&mut rng, n, 0.25, 20);
        if g.edge_count() >= 2 && min_weight_cycle_cover(&g).is_err() {
            instances.push(g);
        }
    }
    for (idx, g) in instances.iter().enumerate() {
        let seed = idx as u64;
        let cover = cover_with_fallback(g, QuantizeMode::Dense, None, seed, 64)
            .unwrap_or_else(|e| panic!("fallback failed on instance {idx}: {e}"));
        // Disjoint, complete coverage.
        let mut seen = vec![0u32; g.vertex_count()];
        for part in cover.cycles.iter().chain(&cover.chains) {
            for &v in part {
                seen[v] += 1;
            }
        }
        for &v in &cover.uncovered {
            seen[v] += 1;
        }
        assert!(seen.iter().all(|&c| c == 1), "instance {idx}: coverage not exact");
        // No penalty edge in the reported cover.
        for &(u, v) in &cover.cover_edges {
            assert!(
                g.edge_weight(u, v).is_some(),
                "instance {idx}: penalty edge ({u},{v}) leaked into the cover"
            );
        }
        // Deterministic per seed.
        let again = cover_with_fallback(g, QuantizeMode::Dense, None, seed, 64).unwrap();
        assert_eq!(cover.cycles, again.cycles, "instance {idx} not deterministic");
        assert_eq!(cover.chains, again.chains, "instance {idx} not deterministic");
    }
    verdict("A8", true, &format!("(bowtie + {} coverless graphs)", instances.len() - 1));
}

#[test]
fn a9_reordering_entropy() {
    let mut wins = 0;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0xA900 + seed);
        // Random vertex labels, then 4 hidden blocks of 16.
        let mut labels: Vec<usize> = (0..64).collect();
        labels.shuffle(&mut rng);
        let block = |v: usize| labels[v] / 16;
        let mut g = Graph::new(64);
        for u in 0..64 {
            for v in u + 1..64 {
                let p = if block(u) == block(v) { 0.6 } else { 0.05 };
                if rng.gen_bool(p) {
                    // Smooth weights: cheap inside a block, expensive across.
                    let w = 1.0 + 80.0 * (block(u) as f64 - block(v) as f64).abs();
                    g.add_edge(u, v, w).unwrap();
                }
            }
        }
        let cover = cover_with_fallback(&g, QuantizeMode::Dense, None, seed, 64).unwrap();
        let order = reorder_adjacency(&g, &cover).unwrap();
        let identity: Vec<usize> = (0..64).collect();
        let h_cover = adjacency_entropy(&g, &order).unwrap();
        let h_identity = adjacency_entropy(&g, &identity).unwrap();
        if h_cover < h_identity {
            wins += 1;
        }
    }
    verdict("A9", wins >= 18, &format!("(cover order beat identity in {wins}/20 seeds)"));
}

#[test]
fn a10_transform_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA10);
    let mut max_rt = 0.0f64;
    let mut max_parseval = 0.0f64;
    for _ in 0..1000 {
        let n = rng.gen_range(3..=257);
        let xs: Vec<f64> = (0..n).map(|_| rng.gen_range(-100.0..100.0)).collect();
        let spec = dft(&xs);
        let back = idft(&spec);
        let scale = 1.0 + xs.iter().map(|x| x.abs()).fold(0.0, f64::max);
        for (a, b) in xs.iter().zip(&back) {
            max_rt = max_rt.max((a - b).abs() / scale);
        }
        let time: f64 = xs.iter().map(|x| x * x).sum();
        let freq = spec.energy() / n as f64;
        max_parseval = max_parseval.max((time - freq).abs() / (1.0 + time));
    }
    verdict(
        "A10",
        max_rt < 1e-9 && max_parseval < 1e-9,
        &format!("(1000 signals, max round-trip {max_rt:.2e}, max Parseval {max_parseval:.2e})"),
    );
}
