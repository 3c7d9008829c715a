//! Quantitative characterization of cycle covers: edge-weight statistics,
//! spectrum-vs-permutation comparison, cover rendering, and adjacency-matrix
//! reordering with an edge-offset entropy measure.

use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::Graph;
use crate::spectral::dft;
use crate::vcc::CycleCover;

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("cover does not match the graph: {0}")]
    CoverMismatch(String),
    #[error("order is not a permutation of the vertex ids: {0}")]
    BadPermutation(String),
    #[error("signal of length {0} is too short, need at least 8")]
    TooShort(usize),
    #[error("i/o error: {0}")]
    Io(String),
}

/// Edge-weight statistics of a cover relative to its host graph.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverStats {
    pub mean_weight_all: f64,
    pub mean_weight_in_cover: f64,
    pub mean_weight_out_of_cover: f64,
    /// |E_C| / |E|.
    pub edge_fraction: f64,
    /// W(E_C) / W(E).
    pub weight_fraction: f64,
    pub cycle_length_histogram: BTreeMap<usize, usize>,
}

pub fn cover_stats(g: &Graph, c: &CycleCover) -> Result<CoverStats, AnalysisError> {
    use std::collections::BTreeSet;
    let mut in_cover = BTreeSet::new();
    for &(u, v) in &c.cover_edges {
        let key = (u.min(v), u.max(v));
        if g.edge_weight(key.0, key.1).is_none() {
            return Err(AnalysisError::CoverMismatch(format!(
                "cover edge ({}, {}) is not in the graph",
                key.0, key.1
            )));
        }
        if !in_cover.insert(key) {
            return Err(AnalysisError::CoverMismatch(format!(
                "cover edge ({}, {}) repeated",
                key.0, key.1
            )));
        }
    }
    let m = g.edge_count();
    if m == 0 {
        return Err(AnalysisError::CoverMismatch("graph has no edges".into()));
    }
    let mut w_in = 0.0;
    let mut w_out = 0.0;
    let mut n_in = 0usize;
    for &(u, v, w) in g.edges() {
        if in_cover.contains(&(u, v)) {
            w_in += w;
            n_in += 1;
        } else {
            w_out += w;
        }
    }
    if n_in != in_cover.len() {
        return Err(AnalysisError::CoverMismatch(
            "cover edge missing from the graph".into(),
        ));
    }
    let n_out = m - n_in;
    let total = w_in + w_out;
    let mut histogram = BTreeMap::new();
    for cycle in &c.cycles {
        *histogram.entry(cycle.len()).or_insert(0) += 1;
    }
    Ok(CoverStats {
        mean_weight_all: total / m as f64,
        mean_weight_in_cover: if n_in > 0 { w_in / n_in as f64 } else { 0.0 },
        mean_weight_out_of_cover: if n_out > 0 { w_out / n_out as f64 } else { 0.0 },
        edge_fraction: n_in as f64 / m as f64,
        weight_fraction: if total > 0.0 { w_in / total } else { 0.0 },
        cycle_length_histogram: histogram,
    })
}

/// Result of comparing a cyclic signal's spectrum against random
/// permutations of the same samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumComparison {
    /// High-bin energy fraction of the signal as given.
    pub original_fraction: f64,
    /// Mean high-bin fraction over the permuted trials.
    pub permuted_mean_fraction: f64,
    /// Per-trial high-bin fractions, in trial order.
    pub permuted_fractions: Vec<f64>,
    /// Mean magnitude spectrum over the permuted trials, per bin.
    pub permuted_mean_magnitudes: Vec<f64>,
    /// The (lo, hi) band used, as fractions of n.
    pub band: (f64, f64),
}

/// Default high band: bins k with n/4 <= k <= 3n/4, the high-frequency half
/// under conjugate symmetry.
pub const DEFAULT_HIGH_BAND: (f64, f64) = (0.25, 0.75);

/// Compare the high-bin energy fraction of `signal` (treated as one period
/// of a cyclic signal) against the mean over `trials` seeded random
/// permutations of the same samples. Deterministic for a fixed seed.
pub fn spectrum_comparison(
    signal: &[f64],
    trials: usize,
    seed: u64,
    band: Option<(f64, f64)>,
) -> Result<SpectrumComparison, AnalysisError> {
    let n = signal.len();
    if n < 8 {
        return Err(AnalysisError::TooShort(n));
    }
    let band = band.unwrap_or(DEFAULT_HIGH_BAND);
    let original_fraction = dft(signal).band_energy_fraction(band.0, band.1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut permuted_fractions = Vec::with_capacity(trials);
    let mut permuted_mean_magnitudes = vec![0.0; n];
    let mut shuffled = signal.to_vec();
    for _ in 0..trials {
        shuffled.shuffle(&mut rng);
        let spectrum = dft(&shuffled);
        permuted_fractions.push(spectrum.band_energy_fraction(band.0, band.1));
        for (acc, c) in permuted_mean_magnitudes.iter_mut().zip(&spectrum.coefficients) {
            *acc += c.norm() / trials as f64;
        }
    }
    let permuted_mean_fraction = if trials > 0 {
        permuted_fractions.iter().sum::<f64>() / trials as f64
    } else {
        0.0
    };
    Ok(SpectrumComparison {
        original_fraction,
        permuted_mean_fraction,
        permuted_fractions,
        permuted_mean_magnitudes,
        band,
    })
}

/// Fixed 7-anchor piecewise-linear jet-like colormap; t in [0, 1].
/// Anchors at t = k/6: (0,0,128), (0,0,255), (0,255,255), (0,255,0),
/// (255,255,0), (255,128,0), (128,0,0).
pub fn jet_color(t: f64) -> [u8; 3] {
    const ANCHORS: [[f64; 3]; 7] = [
        [0.0, 0.0, 128.0],
        [0.0, 0.0, 255.0],
        [0.0, 255.0, 255.0],
        [0.0, 255.0, 0.0],
        [255.0, 255.0, 0.0],
        [255.0, 128.0, 0.0],
        [128.0, 0.0, 0.0],
    ];
    let t = t.clamp(0.0, 1.0) * 6.0;
    let lo = (t.floor() as usize).min(5);
    let frac = t - lo as f64;
    let mut rgb = [0u8; 3];
    for ch in 0..3 {
        let v = ANCHORS[lo][ch] + frac * (ANCHORS[lo + 1][ch] - ANCHORS[lo][ch]);
        rgb[ch] = v.round() as u8;
    }
    rgb
}

/// Render a cover over a width x height pixel raster as binary PPM (P6)
/// bytes: one jet color per cycle (uniformly sampled by discovery order),
/// chains in evenly spaced grays, uncovered pixels black.
pub fn encode_cover_ppm(
    width: usize,
    height: usize,
    c: &CycleCover,
) -> Result<Vec<u8>, AnalysisError> {
    let npix = width * height;
    let mut colors = vec![[0u8; 3]; npix];
    let ncycles = c.cycles.len();
    for (i, cycle) in c.cycles.iter().enumerate() {
        let t = if ncycles > 1 {
            i as f64 / (ncycles - 1) as f64
        } else {
            0.5
        };
        let rgb = jet_color(t);
        for &v in cycle {
            if v >= npix {
                return Err(AnalysisError::CoverMismatch(format!(
                    "vertex {v} out of range for a {width}x{height} raster"
                )));
            }
            colors[v] = rgb;
        }
    }
    let nchains = c.chains.len();
    for (i, chain) in c.chains.iter().enumerate() {
        let gray = if nchains > 1 {
            (64 + i * 128 / (nchains - 1)) as u8
        } else {
            128
        };
        for &v in chain {
            if v >= npix {
                return Err(AnalysisError::CoverMismatch(format!(
                    "vertex {v} out of range for a {width}x{height} raster"
                )));
            }
            colors[v] = [gray, gray, gray];
        }
    }
    let mut out = format!("P6\n{width} {height}\n255\n").into_bytes();
    for rgb in colors {
        out.extend_from_slice(&rgb);
    }
    Ok(out)
}

pub fn render_cover(
    width: usize,
    height: usize,
    c: &CycleCover,
    path: impl AsRef<Path>,
) -> Result<(), AnalysisError> {
    let bytes = encode_cover_ppm(width, height, c)?;
    std::fs::write(path, bytes).map_err(|e| AnalysisError::Io(e.to_string()))
}

/// Permutation that lists vertices cycle by cycle (each in canonical
/// traversal order), then chains, then uncovered vertices. Applying it to
/// the adjacency matrix puts each cycle's cover edges on the +-1
/// off-diagonals of its block, plus one wrap entry per cycle.
pub fn reorder_adjacency(g: &Graph, c: &CycleCover) -> Result<Vec<usize>, AnalysisError> {
    let n = g.vertex_count();
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    let mut push = |order: &mut Vec<usize>, v: usize| -> Result<(), AnalysisError> {
        if v >= n {
            return Err(AnalysisError::CoverMismatch(format!(
                "vertex {v} out of range"
            )));
        }
        if seen[v] {
            return Err(AnalysisError::CoverMismatch(format!(
                "vertex {v} appears twice in the cover"
            )));
        }
        seen[v] = true;
        order.push(v);
        Ok(())
    };
    for cycle in &c.cycles {
        for &v in cycle {
            push(&mut order, v)?;
        }
    }
    for chain in &c.chains {
        for &v in chain {
            push(&mut order, v)?;
        }
    }
    for &v in &c.uncovered {
        push(&mut order, v)?;
    }
    if order.len() != n {
        return Err(AnalysisError::CoverMismatch(format!(
            "cover lists {} of {} vertices",
            order.len(),
            n
        )));
    }
    Ok(order)
}

/// Shannon entropy (bits) of the empirical distribution of |pi(i) - pi(j)|
/// over all edges (i, j), where pi is the position of a vertex in `order`.
/// Band-structured matrices concentrate offsets and score low.
pub fn adjacency_entropy(g: &Graph, order: &[usize]) -> Result<f64, AnalysisError> {
    let n = g.vertex_count();
    if order.len() != n {
        return Err(AnalysisError::BadPermutation(format!(
            "order has length {}, expected {}",
            order.len(),
            n
        )));
    }
    let mut pos = vec![usize::MAX; n];
    for (k, &v) in order.iter().enumerate() {
        if v >= n || pos[v] != usize::MAX {
            return Err(AnalysisError::BadPermutation(format!(
                "value {v} invalid or repeated"
            )));
        }
        pos[v] = k;
    }
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &(u, v, _) in g.edges() {
        let offset = pos[u].abs_diff(pos[v]);
        *counts.entry(offset).or_insert(0) += 1;
    }
    let m: usize = counts.values().sum();
    if m == 0 {
        return Ok(0.0);
    }
    let mut h = 0.0;
    for &count in counts.values() {
        let p = count as f64 / m as f64;
        h -= p * p.log2();
    }
    Ok(h)
}
