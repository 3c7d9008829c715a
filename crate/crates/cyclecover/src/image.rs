//! Grayscale images as graph signals: PGM I/O, 8-connected lattice graphs
//! with signal-dependent edge weights, a gradient edge-map detector, and
//! seeded Gaussian noise.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::Graph;

#[derive(Debug, Error, PartialEq)]
pub enum ImageError {
    #[error("pgm parse error: {0}")]
    ParseError(String),
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),
    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("image too small ({0}x{1}), need at least 2x2")]
    TooSmall(usize, usize),
    #[error("i/o error: {0}")]
    Io(String),
}

/// A 2-D grayscale raster stored in floating point. Pixel (r, c) is lattice
/// vertex r * width + c. Intensities stay in [0, 255]; rounding happens only
/// when the image is written out.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageSignal {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<f64>,
}

impl ImageSignal {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Self {
        assert_eq!(pixels.len(), width * height);
        ImageSignal {
            width,
            height,
            pixels,
        }
    }

    pub fn constant(width: usize, height: usize, value: f64) -> Self {
        ImageSignal::new(width, height, vec![value; width * height])
    }

    #[inline]
    pub fn vertex_of(&self, r: usize, c: usize) -> usize {
        r * self.width + c
    }

    #[inline]
    pub fn coords_of(&self, v: usize) -> (usize, usize) {
        (v / self.width, v % self.width)
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.pixels[r * self.width + c]
    }
}

/// Binary edge map; `true` marks an edge pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeMap {
    pub width: usize,
    pub height: usize,
    pub mask: Vec<bool>,
}

/// Edge weight assignment for the 8-lattice.
#[derive(Debug, Clone)]
pub enum WeightScheme {
    /// w(u,v) = exp(|x_u - x_v| / scale).
    ExpDiff { scale: f64 },
    /// w(u,v) = |x_u - x_v| (the "variation" statistic weights).
    AbsDiff,
    /// 5 across edge/non-edge transitions of the map, 1 otherwise.
    Binary(EdgeMap),
}

pub const DEFAULT_EXP_SCALE: f64 = 255.0 / 8.0;

impl Default for WeightScheme {
    fn default() -> Self {
        WeightScheme::ExpDiff {
            scale: DEFAULT_EXP_SCALE,
        }
    }
}

fn pgm_tokens(bytes: &[u8]) -> impl Iterator<Item = (usize, &[u8])> {
    // Token stream over the header region; '#' comments run to end of line.
    let mut pos = 0;
    std::iter::from_fn(move || {
        while pos < bytes.len() {
            let b = bytes[pos];
            if b == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                pos += 1;
            } else {
                let start = pos;
                while pos < bytes.len()
                    && !bytes[pos].is_ascii_whitespace()
                    && bytes[pos] != b'#'
                {
                    pos += 1;
                }
                return Some((pos, &bytes[start..pos]));
            }
        }
        None
    })
}

/// Parse a P2 (ASCII) or P5 (binary) PGM with maxval <= 255.
pub fn parse_pgm(bytes: &[u8]) -> Result<ImageSignal, ImageError> {
    let mut tokens = pgm_tokens(bytes);
    let (_, magic) = tokens
        .next()
        .ok_or_else(|| ImageError::ParseError("empty file".into()))?;
    let binary = match magic {
        b"P2" => false,
        b"P5" => true,
        other => {
            return Err(ImageError::UnsupportedFormat(format!(
                "magic {:?}, expected P2 or P5",
                String::from_utf8_lossy(other)
            )))
        }
    };
    let mut header_num = |name: &str| -> Result<(usize, usize), ImageError> {
        let (end, tok) = tokens
            .next()
            .ok_or_else(|| ImageError::ParseError(format!("missing {name}")))?;
        let s = std::str::from_utf8(tok)
            .map_err(|_| ImageError::ParseError(format!("bad {name}")))?;
        let v = s
            .parse::<usize>()
            .map_err(|_| ImageError::ParseError(format!("bad {name}: {s:?}")))?;
        Ok((end, v))
    };
    let (_, width) = header_num("width")?;
    let (_, height) = header_num("height")?;
    let (maxval_end, maxval) = header_num("maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(ImageError::UnsupportedFormat(format!(
            "maxval {maxval} out of range"
        )));
    }
    let npix = width * height;
    let pixels: Vec<f64> = if binary {
        // Single whitespace byte separates the header from raster data.
        let data_start = maxval_end + 1;
        if bytes.len() < data_start + npix {
            return Err(ImageError::ParseError("truncated raster data".into()));
        }
        bytes[data_start..data_start + npix]
            .iter()
            .map(|&b| b as f64)
            .collect()
    } else {
        let mut vals = Vec::with_capacity(npix);
        for _ in 0..npix {
            let (_, tok) = tokens
                .next()
                .ok_or_else(|| ImageError::ParseError("truncated raster data".into()))?;
            let s = std::str::from_utf8(tok)
                .map_err(|_| ImageError::ParseError("bad sample".into()))?;
            let v = s
                .parse::<u32>()
                .map_err(|_| ImageError::ParseError(format!("bad sample {s:?}")))?;
            vals.push(v as f64);
        }
        vals
    };
    if pixels.iter().any(|&p| p > maxval as f64) {
        return Err(ImageError::ParseError("sample exceeds maxval".into()));
    }
    Ok(ImageSignal::new(width, height, pixels))
}

pub fn load_pgm(path: impl AsRef<Path>) -> Result<ImageSignal, ImageError> {
    let bytes = std::fs::read(path).map_err(|e| ImageError::Io(e.to_string()))?;
    parse_pgm(&bytes)
}

/// Serialize as binary P5, clamping and rounding each sample to 0..=255.
pub fn encode_pgm(img: &ImageSignal) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend(
        img.pixels
            .iter()
            .map(|&p| p.clamp(0.0, 255.0).round() as u8),
    );
    out
}

pub fn save_pgm(img: &ImageSignal, path: impl AsRef<Path>) -> Result<(), ImageError> {
    std::fs::write(path, encode_pgm(img)).map_err(|e| ImageError::Io(e.to_string()))
}

/// Read an edge map from a PGM: nonzero = edge pixel.
pub fn load_edge_map(path: impl AsRef<Path>) -> Result<EdgeMap, ImageError> {
    let img = load_pgm(path)?;
    Ok(EdgeMap {
        width: img.width,
        height: img.height,
        mask: img.pixels.iter().map(|&p| p != 0.0).collect(),
    })
}

const NEIGHBOR_OFFSETS: [(isize, isize); 4] = [(0, 1), (1, 0), (1, 1), (1, -1)];

/// Build the 8-connected lattice over the image's pixels. Interior pixels
/// have degree 8; the edge count is 4wh - 3w - 3h + 2.
pub fn build_8lattice(img: &ImageSignal, scheme: &WeightScheme) -> Result<Graph, ImageError> {
    if img.width < 2 || img.height < 2 {
        return Err(ImageError::TooSmall(img.width, img.height));
    }
    if let WeightScheme::Binary(em) = scheme {
        if em.width != img.width || em.height != img.height {
            return Err(ImageError::DimensionMismatch(
                img.width, img.height, em.width, em.height,
            ));
        }
    }
    let (w, h) = (img.width, img.height);
    let mut g = Graph::new(w * h);
    for r in 0..h {
        for c in 0..w {
            for (dr, dc) in NEIGHBOR_OFFSETS {
                let (nr, nc) = (r as isize + dr, c as isize + dc);
                if nr < 0 || nc < 0 || nr >= h as isize || nc >= w as isize {
                    continue;
                }
                let (nr, nc) = (nr as usize, nc as usize);
                let u = img.vertex_of(r, c);
                let v = img.vertex_of(nr, nc);
                let weight = match scheme {
                    WeightScheme::ExpDiff { scale } => {
                        ((img.get(r, c) - img.get(nr, nc)).abs() / scale).exp()
                    }
                    WeightScheme::AbsDiff => (img.get(r, c) - img.get(nr, nc)).abs(),
                    WeightScheme::Binary(em) => {
                        if em.mask[u] != em.mask[v] {
                            5.0
                        } else {
                            1.0
                        }
                    }
                };
                g.add_edge(u, v, weight).expect("lattice construction");
            }
        }
    }
    Ok(g)
}

/// 8-lattice with the binary edge-map weights: 5 across an edge / non-edge
/// transition, 1 otherwise (including edge-edge pairs).
pub fn binary_edge_weights(img: &ImageSignal, em: &EdgeMap) -> Result<Graph, ImageError> {
    build_8lattice(img, &WeightScheme::Binary(em.clone()))
}

/// Mark a pixel when the largest absolute intensity difference to any of its
/// 8 neighbours strictly exceeds `threshold`. A crude stand-in for a real
/// edge detector; accepted edge-map files take precedence in the CLI.
pub fn gradient_edge_map(img: &ImageSignal, threshold: f64) -> EdgeMap {
    let (w, h) = (img.width, img.height);
    let mut mask = vec![false; w * h];
    for r in 0..h {
        for c in 0..w {
            let mut maxdiff: f64 = 0.0;
            for dr in -1isize..=1 {
                for dc in -1isize..=1 {
                    if dr == 0 && dc == 0 {
                        continue;
                    }
                    let (nr, nc) = (r as isize + dr, c as isize + dc);
                    if nr < 0 || nc < 0 || nr >= h as isize || nc >= w as isize {
                        continue;
                    }
                    maxdiff =
                        maxdiff.max((img.get(r, c) - img.get(nr as usize, nc as usize)).abs());
                }
            }
            mask[r * w + c] = maxdiff > threshold;
        }
    }
    EdgeMap {
        width: w,
        height: h,
        mask,
    }
}

/// Perturb every pixel by an independent N(0, sigma^2) draw from a ChaCha8
/// stream seeded with `seed`, clamped back into [0, 255]. Values stay in
/// floating point; rounding happens at save time.
pub fn add_gaussian_noise(img: &ImageSignal, sigma: f64, seed: u64) -> ImageSignal {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pixels = img
        .pixels
        .iter()
        .map(|&p| (p + sigma * standard_normal(&mut rng)).clamp(0.0, 255.0))
        .collect();
    ImageSignal::new(img.width, img.height, pixels)
}

/// Box-Muller standard normal; platform-independent given the seeded stream.
fn standard_normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_ascii_pgm() {
        let img = parse_pgm(b"P2\n2 2\n255\n0 0 0 100\n").unwrap();
        assert_eq!((img.width, img.height), (2, 2));
        assert_eq!(img.pixels, vec![0.0, 0.0, 0.0, 100.0]);
    }

    #[test]
    fn pgm_round_trip() {
        let img = ImageSignal::new(3, 2, vec![0.0, 10.0, 255.0, 128.0, 1.0, 99.0]);
        let back = parse_pgm(&encode_pgm(&img)).unwrap();
        assert_eq!(back, img);
    }

    #[test]
    fn rejects_color_pgm() {
        assert!(matches!(
            parse_pgm(b"P6\n2 2\n255\nxxxxxxxxxxxx"),
            Err(ImageError::UnsupportedFormat(_))
        ));
        assert!(matches!(
            parse_pgm(b"P2\n2 2\n65535\n0 0 0 0\n"),
            Err(ImageError::UnsupportedFormat(_))
        ));
    }

    #[test]
    fn parse_with_comments() {
        let img = parse_pgm(b"P2 # ascii\n# size\n2 2\n255\n1 2 3 4\n").unwrap();
        assert_eq!(img.pixels, vec![1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn lattice_edge_counts() {
        let img = ImageSignal::constant(2, 2, 0.0);
        let g = build_8lattice(&img, &WeightScheme::AbsDiff).unwrap();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.edge_count(), 6); // K4

        let img = ImageSignal::constant(3, 3, 0.0);
        let g = build_8lattice(&img, &WeightScheme::AbsDiff).unwrap();
        assert_eq!(g.vertex_count(), 9);
        assert_eq!(g.edge_count(), 20);
        assert_eq!(g.degree(img.vertex_of(1, 1)), 8);
    }

    #[test]
    fn lattice_counts_match_closed_form() {
        for w in 2..=10 {
            for h in 2..=10 {
                let img = ImageSignal::constant(w, h, 0.0);
                let g = build_8lattice(&img, &WeightScheme::AbsDiff).unwrap();
                assert_eq!(g.edge_count(), 4 * w * h - 3 * w - 3 * h + 2, "{w}x{h}");
            }
        }
    }

    #[test]
    fn constant_image_expdiff_weights_are_one() {
        let img = ImageSignal::constant(3, 3, 77.0);
        let g = build_8lattice(&img, &WeightScheme::default()).unwrap();
        assert!(g.edges().iter().all(|e| e.2 == 1.0));
    }

    #[test]
    fn too_small_image() {
        let img = ImageSignal::constant(1, 5, 0.0);
        assert_eq!(
            build_8lattice(&img, &WeightScheme::AbsDiff),
            Err(ImageError::TooSmall(1, 5))
        );
    }

    #[test]
    fn binary_weights() {
        let img = ImageSignal::constant(2, 2, 0.0);
        let all_zero = EdgeMap {
            width: 2,
            height: 2,
            mask: vec![false; 4],
        };
        let g = binary_edge_weights(&img, &all_zero).unwrap();
        assert!(g.edges().iter().all(|e| e.2 == 1.0));

        let all_one = EdgeMap {
            width: 2,
            height: 2,
            mask: vec![true; 4],
        };
        let g = binary_edge_weights(&img, &all_one).unwrap();
        assert!(g.edges().iter().all(|e| e.2 == 1.0));

        // one edge pixel: the 3 edges incident to pixel 0 get weight 5
        let corner = EdgeMap {
            width: 2,
            height: 2,
            mask: vec![true, false, false, false],
        };
        let g = binary_edge_weights(&img, &corner).unwrap();
        for &(u, v, w) in g.edges() {
            let expect = if u == 0 || v == 0 { 5.0 } else { 1.0 };
            assert_eq!(w, expect, "edge ({u},{v})");
        }
        assert!(g.edges().iter().all(|e| e.2 == 1.0 || e.2 == 5.0));

        let wrong = EdgeMap {
            width: 3,
            height: 2,
            mask: vec![false; 6],
        };
        assert!(matches!(
            binary_edge_weights(&img, &wrong),
            Err(ImageError::DimensionMismatch(..))
        ));
    }

    #[test]
    fn gradient_edge_map_cases() {
        let flat = ImageSignal::constant(4, 4, 42.0);
        assert!(gradient_edge_map(&flat, 1.0).mask.iter().all(|&m| !m));

        let img = ImageSignal::new(2, 2, vec![0.0, 0.0, 0.0, 100.0]);
        let em = gradient_edge_map(&img, 50.0);
        assert!(em.mask.iter().all(|&m| m)); // every pixel touches the step

        let em = gradient_edge_map(&img, 300.0);
        assert!(em.mask.iter().all(|&m| !m)); // differences cap at 255
    }

    #[test]
    fn noise_zero_sigma_and_determinism() {
        let img = ImageSignal::constant(8, 8, 128.0);
        assert_eq!(add_gaussian_noise(&img, 0.0, 5), img);
        let a = add_gaussian_noise(&img, 7.0, 5);
        let b = add_gaussian_noise(&img, 7.0, 5);
        assert_eq!(a, b);
        assert_ne!(a, img);
    }

    #[test]
    fn noise_sample_standard_deviation() {
        let img = ImageSignal::constant(64, 64, 128.0);
        let noisy = add_gaussian_noise(&img, 7.0, 42);
        let diffs: Vec<f64> = noisy
            .pixels
            .iter()
            .zip(&img.pixels)
            .map(|(a, b)| a - b)
            .collect();
        let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
        let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (diffs.len() - 1) as f64;
        let sd = var.sqrt();
        assert!((6.3..=7.7).contains(&sd), "sample sd {sd}");
    }

    #[test]
    fn pixel_vertex_bijection() {
        let img = ImageSignal::constant(5, 3, 0.0);
        for r in 0..3 {
            for c in 0..5 {
                assert_eq!(img.coords_of(img.vertex_of(r, c)), (r, c));
            }
        }
    }
}
