//! Spectral processing of graph signals: the DFT on cycles, the graph
//! Fourier transform via the Laplacian eigenbasis, Tikhonov low-pass
//! denoising, and the cycle-cover image denoiser built on top of them.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use thiserror::Error;

use crate::graph::Graph;
use crate::image::ImageSignal;
use crate::vcc::CycleCover;

#[derive(Debug, Error, PartialEq)]
pub enum SpectralError {
    #[error("signal of length {0} is too short, need at least 3")]
    TooShort(usize),
    #[error("graph with {0} vertices exceeds the dense eigensolver cap of {1}")]
    TooLarge(usize, usize),
    #[error("signal length {0} does not match basis dimension {1}")]
    DimensionMismatch(usize, usize),
    #[error("cycle cover does not match the signal: {0}")]
    CoverMismatch(String),
}

/// Default size cap for the dense Laplacian eigendecomposition.
pub const DEFAULT_EIGEN_CAP: usize = 8192;

/// DFT coefficients of a real signal.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub coefficients: Vec<Complex64>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.norm()).collect()
    }

    /// Total energy sum |S_k|^2 (equals n * sum x_i^2 by Parseval).
    pub fn energy(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Fraction of spectral energy carried by bins k with
    /// lo <= k/n <= hi. Zero for an all-zero signal.
    pub fn band_energy_fraction(&self, lo: f64, hi: f64) -> f64 {
        let n = self.coefficients.len() as f64;
        let total = self.energy();
        if total == 0.0 {
            return 0.0;
        }
        let band: f64 = self
            .coefficients
            .iter()
            .enumerate()
            .filter(|(k, _)| {
                let f = *k as f64 / n;
                f >= lo && f <= hi
            })
            .map(|(_, c)| c.norm_sqr())
            .sum();
        band / total
    }
}

/// Unnormalized forward DFT: S_k = sum_i x_i exp(-2 pi i k i / n). Direct
/// O(n^2) evaluation; cycles in this codebase stay small enough for that.
pub fn dft(signal: &[f64]) -> Spectrum {
    let n = signal.len();
    let mut coefficients = Vec::with_capacity(n);
    for k in 0..n {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, &x) in signal.iter().enumerate() {
            let angle = -std::f64::consts::TAU * (k as f64) * (i as f64) / n as f64;
            acc += x * Complex64::new(angle.cos(), angle.sin());
        }
        coefficients.push(acc);
    }
    Spectrum { coefficients }
}

/// Inverse of [`dft`]; divides by n and returns the real parts.
pub fn idft(spectrum: &Spectrum) -> Vec<f64> {
    let n = spectrum.coefficients.len();
    let mut signal = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, &s) in spectrum.coefficients.iter().enumerate() {
            let angle = std::f64::consts::TAU * (k as f64) * (i as f64) / n as f64;
            acc += s * Complex64::new(angle.cos(), angle.sin());
        }
        signal.push(acc.re / n as f64);
    }
    signal
}

/// Laplacian eigenvalues of the cycle C_n: lambda_k = 2 - 2 cos(2 pi k / n),
/// in DFT bin order (not sorted).
pub fn cycle_laplacian_eigenvalues(n: usize) -> Result<Vec<f64>, SpectralError> {
    if n < 3 {
        return Err(SpectralError::TooShort(n));
    }
    Ok((0..n)
        .map(|k| 2.0 - 2.0 * (std::f64::consts::TAU * k as f64 / n as f64).cos())
        .collect())
}

/// Tikhonov denoising on a cycle: shrink each DFT coefficient by
/// 1 / (1 + gamma * lambda_k) and transform back.
pub fn tikhonov_denoise_cycle(signal: &[f64], gamma: f64) -> Result<Vec<f64>, SpectralError> {
    let n = signal.len();
    let lambdas = cycle_laplacian_eigenvalues(n)?;
    let mut spectrum = dft(signal);
    for (c, lambda) in spectrum.coefficients.iter_mut().zip(&lambdas) {
        *c /= 1.0 + gamma * lambda;
    }
    Ok(idft(&spectrum))
}

/// Orthonormal Laplacian eigenbasis of a graph, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct GftBasis {
    pub eigenvalues: Vec<f64>,
    /// Column k is the eigenvector for eigenvalues[k].
    pub vectors: DMatrix<f64>,
}

pub fn gft_basis(graph: &Graph) -> GftBasis {
    let eig = SymmetricEigen::new(graph.laplacian());
    let n = graph.vertex_count();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vectors.set_column(k, &eig.eigenvectors.column(i));
    }
    GftBasis {
        eigenvalues,
        vectors,
    }
}

/// Graph Fourier transform: coefficients U^T x.
pub fn gft(basis: &GftBasis, signal: &[f64]) -> Result<Vec<f64>, SpectralError> {
    let n = basis.eigenvalues.len();
    if signal.len() != n {
        return Err(SpectralError::DimensionMismatch(signal.len(), n));
    }
    let x = DVector::from_column_slice(signal);
    Ok((basis.vectors.transpose() * x).iter().copied().collect())
}

/// Inverse graph Fourier transform: x = U c.
pub fn igft(basis: &GftBasis, coeffs: &[f64]) -> Result<Vec<f64>, SpectralError> {
    let n = basis.eigenvalues.len();
    if coeffs.len() != n {
        return Err(SpectralError::DimensionMismatch(coeffs.len(), n));
    }
    let c = DVector::from_column_slice(coeffs);
    Ok((&basis.vectors * c).iter().copied().collect())
}

/// Tikhonov denoising in the graph Fourier domain. The dense
/// eigendecomposition is O(n^3); graphs above `cap` (default
/// [`DEFAULT_EIGEN_CAP`]) are refused rather than silently approximated.
pub fn tikhonov_denoise_graph(
    graph: &Graph,
    signal: &[f64],
    gamma: f64,
    cap: Option<usize>,
) -> Result<Vec<f64>, SpectralError> {
    let cap = cap.unwrap_or(DEFAULT_EIGEN_CAP);
    let n = graph.vertex_count();
    if n > cap {
        return Err(SpectralError::TooLarge(n, cap));
    }
    if signal.len() != n {
        return Err(SpectralError::DimensionMismatch(signal.len(), n));
    }
    let basis = gft_basis(graph);
    let mut coeffs = gft(&basis, signal)?;
    for (c, lambda) in coeffs.iter_mut().zip(&basis.eigenvalues) {
        *c /= 1.0 + gamma * lambda;
    }
    igft(&basis, &coeffs)
}

/// Denoise a chain by even (reflective) extension: the chain followed by its
/// reverse forms a cycle of twice the length, which is denoised and the
/// first half kept. Chains shorter than 2 pass through unchanged.
pub fn tikhonov_denoise_chain(signal: &[f64], gamma: f64) -> Vec<f64> {
    let n = signal.len();
    if n < 2 {
        return signal.to_vec();
    }
    let mut extended = signal.to_vec();
    extended.extend(signal.iter().rev());
    let denoised = tikhonov_denoise_cycle(&extended, gamma).expect("extension length >= 4");
    denoised[..n].to_vec()
}

/// Denoise an image along a vertex-disjoint cycle cover of its pixel
/// lattice: each cycle is low-pass filtered independently as a 1-D periodic
/// signal, chains via reflective extension, and uncovered pixels pass
/// through unchanged.
pub fn denoise_image_vcc(
    img: &ImageSignal,
    cover: &CycleCover,
    gamma: f64,
) -> Result<ImageSignal, SpectralError> {
    let npix = img.width * img.height;
    let mut out = img.pixels.clone();
    let mut seen = vec![false; npix];
    let mut visit = |vs: &[usize]| -> Result<(), SpectralError> {
        for &v in vs {
            if v >= npix {
                return Err(SpectralError::CoverMismatch(format!(
                    "vertex {v} out of range for a {}x{} image",
                    img.width, img.height
                )));
            }
            if seen[v] {
                return Err(SpectralError::CoverMismatch(format!(
                    "vertex {v} appears twice in the cover"
                )));
            }
            seen[v] = true;
        }
        Ok(())
    };
    for cycle in &cover.cycles {
        visit(cycle)?;
        let values: Vec<f64> = cycle.iter().map(|&v| img.pixels[v]).collect();
        let denoised = tikhonov_denoise_cycle(&values, gamma)
            .map_err(|_| SpectralError::CoverMismatch(format!("cycle of length {}", cycle.len())))?;
        for (&v, &x) in cycle.iter().zip(&denoised) {
            out[v] = x;
        }
    }
    for chain in &cover.chains {
        visit(chain)?;
        let values: Vec<f64> = chain.iter().map(|&v| img.pixels[v]).collect();
        let denoised = tikhonov_denoise_chain(&values, gamma);
        for (&v, &x) in chain.iter().zip(&denoised) {
            out[v] = x;
        }
    }
    Ok(ImageSignal::new(img.width, img.height, out))
}

/// Peak signal-to-noise ratio against a 255 peak; +inf for identical images.
pub fn psnr(reference: &ImageSignal, candidate: &ImageSignal) -> Result<f64, SpectralError> {
    if reference.width != candidate.width || reference.height != candidate.height {
        return Err(SpectralError::DimensionMismatch(
            candidate.pixels.len(),
            reference.pixels.len(),
        ));
    }
    let n = reference.pixels.len() as f64;
    let mse = reference
        .pixels
        .iter()
        .zip(&candidate.pixels)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / n;
    if mse == 0.0 {
        Ok(f64::INFINITY)
    } else {
        Ok(10.0 * (255.0 * 255.0 / mse).log10())
    }
}
