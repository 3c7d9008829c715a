//! Command-line driver for the cycle-cover pipeline: computes covers of
//! image lattices or edge-list graphs, denoises images along covers,
//! compares spectra, reorders adjacency matrices, and renders covers.
//!
//! All randomness flows from a single `--seed` through ChaCha8 streams, so
//! identical invocations produce byte-identical outputs. Every subcommand
//! writes a `<output>.config.json` sidecar with its fully-resolved
//! configuration.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 no cycle cover exists
//! (and fallback was not requested), 3 a size cap was exceeded.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use cyclecover::analysis::{
    adjacency_entropy, cover_stats, encode_cover_ppm, reorder_adjacency, spectrum_comparison,
};
use cyclecover::graph::load_edge_list;
use cyclecover::image::{
    add_gaussian_noise, build_8lattice, load_edge_map, load_pgm, save_pgm, ImageSignal,
    WeightScheme, DEFAULT_EXP_SCALE,
};
use cyclecover::spectral::{
    denoise_image_vcc, dft, psnr, tikhonov_denoise_graph, SpectralError,
};
use cyclecover::vcc::{
    cover_with_fallback, format_cycle_cover, min_weight_cycle_cover_with, parse_cycle_cover,
    CycleCover, VccError,
};
use cyclecover::{Graph, QuantizeMode};

#[derive(Parser, Serialize)]
#[command(name = "vcc", version, about = "Vertex-disjoint cycle covers for graph signal processing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Serialize)]
enum Command {
    /// Compute a minimum-weight cycle cover of an image lattice or graph.
    Vcc(VccArgs),
    /// Denoise an image, either along a cycle cover or with the whole-graph GFT.
    Denoise(DenoiseArgs),
    /// Compare the longest cover cycle's spectrum against permutations and a unit-weight cover.
    Spectrum(SpectrumArgs),
    /// Reorder a graph's adjacency matrix by its cover and report entropies.
    Reorder(ReorderArgs),
    /// Render a cover over a pixel raster as a color PPM.
    Render(RenderArgs),
    /// Add seeded Gaussian noise to an image.
    Noise(NoiseArgs),
}

#[derive(Copy, Clone, ValueEnum, Serialize)]
enum WeightsArg {
    /// exp(|difference| / scale)
    Exp,
    /// |difference|
    Abs,
    /// 5 across edge-map transitions, 1 elsewhere (requires --edge-map)
    Binary,
}

#[derive(Copy, Clone, ValueEnum, Serialize)]
enum QuantizeArg {
    /// ranks among sorted distinct weights; ties share a rank
    Dense,
    /// position in a stable sort; ties broken by edge order
    Ordinal,
    /// use raw weights unchanged
    None,
}

impl From<QuantizeArg> for QuantizeMode {
    fn from(q: QuantizeArg) -> Self {
        match q {
            QuantizeArg::Dense => QuantizeMode::Dense,
            QuantizeArg::Ordinal => QuantizeMode::Ordinal,
            QuantizeArg::None => QuantizeMode::None,
        }
    }
}

#[derive(Args, Serialize)]
struct InputArgs {
    /// Input grayscale image (PGM, P2 or P5)
    #[arg(long, conflicts_with = "graph")]
    image: Option<PathBuf>,
    /// Input graph as an edge list (vertex count, then "u v w" lines)
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Edge weight scheme for image lattices
    #[arg(long, value_enum, default_value = "exp")]
    weights: WeightsArg,
    /// Scale for the exp weights (default 255/8)
    #[arg(long, default_value_t = DEFAULT_EXP_SCALE)]
    scale: f64,
    /// Binary edge map (PGM; nonzero = edge pixel) for --weights binary
    #[arg(long)]
    edge_map: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct VccArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Weight quantization applied before matching
    #[arg(long, value_enum, default_value = "dense")]
    quantize: QuantizeArg,
    /// Add random penalty edges until a cover exists (chains in the output)
    #[arg(long)]
    fallback: bool,
    /// Penalty weight for fallback edges (default 1 + total weight)
    #[arg(long)]
    penalty: Option<f64>,
    /// Seed for all randomness
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Maximum fallback rounds
    #[arg(long, default_value_t = 32)]
    max_rounds: usize,
    /// Where to write the cover (text format)
    #[arg(long, short, default_value = "cover.txt")]
    output: PathBuf,
    /// Also write cover statistics as CSV
    #[arg(long)]
    stats: Option<PathBuf>,
    /// Also render the cover as a PPM (image input only)
    #[arg(long)]
    render: Option<PathBuf>,
}

#[derive(Copy, Clone, ValueEnum, Serialize)]
enum DenoiseMode {
    /// low-pass each cover cycle independently via the DFT
    VccGft,
    /// whole-image graph Fourier transform (dense eigensolve)
    Gft,
}

#[derive(Args, Serialize)]
struct DenoiseArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value = "vcc-gft")]
    mode: DenoiseMode,
    /// Existing cover file; computed from the image when omitted (vcc-gft)
    #[arg(long)]
    cover: Option<PathBuf>,
    /// Tikhonov regularization strength
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// Comma-separated gammas; the best by PSNR against --reference wins
    #[arg(long, value_delimiter = ',', conflicts_with = "gamma")]
    gamma_sweep: Option<Vec<f64>>,
    /// Clean reference image for PSNR reporting
    #[arg(long)]
    reference: Option<PathBuf>,
    /// Vertex cap for the dense eigensolve (gft mode)
    #[arg(long)]
    cap: Option<usize>,
    #[arg(long, value_enum, default_value = "dense")]
    quantize: QuantizeArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, short, default_value = "denoised.pgm")]
    output: PathBuf,
}

#[derive(Args, Serialize)]
struct SpectrumArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Cover file for the image's lattice
    #[arg(long)]
    cover: PathBuf,
    /// Number of random permutations
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// High band as fractions of n: LO,HI
    #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [0.25, 0.75])]
    band: Vec<f64>,
    /// Prefix for the emitted CSVs (<prefix>_original.csv, _permuted.csv, _unit.csv)
    #[arg(long, short, default_value = "spectrum")]
    output: String,
}

#[derive(Args, Serialize)]
struct ReorderArgs {
    /// Input graph as an edge list
    #[arg(long)]
    graph: PathBuf,
    /// Cover of that graph
    #[arg(long)]
    cover: PathBuf,
    /// Where to write the permutation (one vertex id per line)
    #[arg(long, short, default_value = "order.txt")]
    output: PathBuf,
}

#[derive(Args, Serialize)]
struct RenderArgs {
    #[arg(long)]
    cover: PathBuf,
    #[arg(long)]
    width: usize,
    #[arg(long)]
    height: usize,
    #[arg(long, short, default_value = "cover.ppm")]
    output: PathBuf,
}

#[derive(Args, Serialize)]
struct NoiseArgs {
    #[arg(long)]
    image: PathBuf,
    #[arg(long, default_value_t = 7.0)]
    sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, short, default_value = "noisy.pgm")]
    output: PathBuf,
}

struct CliError {
    message: String,
    code: u8,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            message: message.into(),
            code: 1,
        }
    }
}

impl From<VccError> for CliError {
    fn from(e: VccError) -> Self {
        let code = match e {
            VccError::NoCycleCover => 2,
            VccError::TooLarge(..) => 3,
            _ => 1,
        };
        CliError {
            message: e.to_string(),
            code,
        }
    }
}

impl From<SpectralError> for CliError {
    fn from(e: SpectralError) -> Self {
        let code = match e {
            SpectralError::TooLarge(..) => 3,
            _ => 1,
        };
        CliError {
            message: e.to_string(),
            code,
        }
    }
}

macro_rules! usage_from {
    ($($ty:ty),*) => {$(
        impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::usage(e.to_string())
            }
        }
    )*};
}
usage_from!(
    cyclecover::GraphError,
    cyclecover::image::ImageError,
    cyclecover::analysis::AnalysisError,
    cyclecover::MatchingError,
    std::io::Error
);

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes, not usage errors.
            use clap::error::ErrorKind;
            let ok = matches!(
                e.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if ok { ExitCode::SUCCESS } else { ExitCode::from(1) };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Vcc(args) => cmd_vcc(args),
        Command::Denoise(args) => cmd_denoise(args),
        Command::Spectrum(args) => cmd_spectrum(args),
        Command::Reorder(args) => cmd_reorder(args),
        Command::Render(args) => cmd_render(args),
        Command::Noise(args) => cmd_noise(args),
    }
}

/// Write the resolved configuration sidecar next to the primary output.
fn write_sidecar(output: &Path, args: &impl Serialize) -> Result<(), CliError> {
    let mut path = output.as_os_str().to_owned();
    path.push(".config.json");
    let json = serde_json::to_string_pretty(args).expect("config serializes");
    std::fs::write(path, json)?;
    Ok(())
}

/// Resolve the input arguments to a weighted graph, plus the image (if any)
/// for raster-aware outputs.
fn load_input(input: &InputArgs) -> Result<(Graph, Option<ImageSignal>), CliError> {
    match (&input.image, &input.graph) {
        (Some(image), None) => {
            let img = load_pgm(image)?;
            let scheme = match input.weights {
                WeightsArg::Exp => WeightScheme::ExpDiff { scale: input.scale },
                WeightsArg::Abs => WeightScheme::AbsDiff,
                WeightsArg::Binary => {
                    let em = input.edge_map.as_ref().ok_or_else(|| {
                        CliError::usage("--weights binary requires --edge-map")
                    })?;
                    WeightScheme::Binary(load_edge_map(em)?)
                }
            };
            let g = build_8lattice(&img, &scheme)?;
            Ok((g, Some(img)))
        }
        (None, Some(graph)) => Ok((load_edge_list(graph)?, None)),
        _ => Err(CliError::usage("exactly one of --image or --graph is required")),
    }
}

fn compute_cover(
    g: &Graph,
    quantize: QuantizeArg,
    fallback: bool,
    penalty: Option<f64>,
    seed: u64,
    max_rounds: usize,
) -> Result<CycleCover, CliError> {
    let cover = if fallback {
        cover_with_fallback(g, quantize.into(), penalty, seed, max_rounds)?
    } else {
        min_weight_cycle_cover_with(g, quantize.into())?
    };
    Ok(cover)
}

fn load_cover(path: &Path) -> Result<CycleCover, CliError> {
    let text = std::fs::read_to_string(path)?;
    Ok(parse_cycle_cover(&text)?)
}

fn cmd_vcc(args: VccArgs) -> Result<(), CliError> {
    let (g, img) = load_input(&args.input)?;
    let cover = compute_cover(
        &g,
        args.quantize,
        args.fallback,
        args.penalty,
        args.seed,
        args.max_rounds,
    )?;
    std::fs::write(&args.output, format_cycle_cover(&cover))?;
    write_sidecar(&args.output, &args)?;

    // Variation statistics use absolute-difference weights for images,
    // regardless of the covering weights.
    let stats_graph = match &img {
        Some(img) => build_8lattice(img, &WeightScheme::AbsDiff)?,
        None => g.clone(),
    };
    let stats = cover_stats(&stats_graph, &cover)?;
    println!("cycles            {}", cover.cycles.len());
    println!("chains            {}", cover.chains.len());
    println!("covered vertices  {}", cover.covered_count());
    println!("cover weight      {}", cover.total_weight);
    println!("mean weight (all) {}", stats.mean_weight_all);
    println!("mean weight (in)  {}", stats.mean_weight_in_cover);
    println!("mean weight (out) {}", stats.mean_weight_out_of_cover);
    println!("edge fraction     {}", stats.edge_fraction);
    println!("weight fraction   {}", stats.weight_fraction);
    if let Some(stats_path) = &args.stats {
        let mut csv = String::from(
            "mean_weight_all,mean_weight_in_cover,mean_weight_out_of_cover,edge_fraction,weight_fraction\n",
        );
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            stats.mean_weight_all,
            stats.mean_weight_in_cover,
            stats.mean_weight_out_of_cover,
            stats.edge_fraction,
            stats.weight_fraction
        ));
        std::fs::write(stats_path, csv)?;
    }
    if let Some(render_path) = &args.render {
        let img = img.ok_or_else(|| CliError::usage("--render requires --image input"))?;
        let bytes = encode_cover_ppm(img.width, img.height, &cover)?;
        std::fs::write(render_path, bytes)?;
    }
    Ok(())
}

fn cmd_denoise(args: DenoiseArgs) -> Result<(), CliError> {
    let (g, img) = load_input(&args.input)?;
    let img = img.ok_or_else(|| CliError::usage("denoise requires --image input"))?;
    let reference = args.reference.as_ref().map(load_pgm).transpose()?;
    let gammas: Vec<f64> = match &args.gamma_sweep {
        Some(sweep) if !sweep.is_empty() => {
            if reference.is_none() {
                return Err(CliError::usage("--gamma-sweep requires --reference to rank results"));
            }
            sweep.clone()
        }
        _ => vec![args.gamma],
    };

    // The expensive shared work (cover / eigenbasis) happens once; only the
    // cheap spectral shrink repeats across a gamma sweep.
    enum Prepared {
        Cover(CycleCover),
        Basis(cyclecover::spectral::GftBasis, Vec<f64>),
    }
    let prepared = match args.mode {
        DenoiseMode::VccGft => Prepared::Cover(match &args.cover {
            Some(path) => load_cover(path)?,
            None => compute_cover(&g, args.quantize, false, None, args.seed, 0)?,
        }),
        DenoiseMode::Gft => {
            use cyclecover::spectral::{gft, gft_basis, DEFAULT_EIGEN_CAP};
            let cap = args.cap.unwrap_or(DEFAULT_EIGEN_CAP);
            if g.vertex_count() > cap {
                return Err(SpectralError::TooLarge(g.vertex_count(), cap).into());
            }
            let basis = gft_basis(&g);
            let coeffs = gft(&basis, &img.pixels)?;
            Prepared::Basis(basis, coeffs)
        }
    };
    let denoise_once = |gamma: f64| -> Result<ImageSignal, CliError> {
        match &prepared {
            Prepared::Cover(cover) => Ok(denoise_image_vcc(&img, cover, gamma)?),
            Prepared::Basis(basis, coeffs) => {
                use cyclecover::spectral::igft;
                let shrunk: Vec<f64> = coeffs
                    .iter()
                    .zip(&basis.eigenvalues)
                    .map(|(c, lambda)| c / (1.0 + gamma * lambda))
                    .collect();
                let out = igft(basis, &shrunk)?;
                Ok(ImageSignal::new(img.width, img.height, out))
            }
        }
    };

    let mut best: Option<(f64, f64, ImageSignal)> = None;
    for &gamma in &gammas {
        let out = denoise_once(gamma)?;
        let score = match &reference {
            Some(r) => psnr(r, &out)?,
            None => 0.0,
        };
        if best.as_ref().is_none_or(|(_, s, _)| score > *s) {
            best = Some((gamma, score, out));
        }
    }
    let (gamma, _, out) = best.expect("at least one gamma");
    save_pgm(&out, &args.output)?;
    write_sidecar(&args.output, &args)?;
    println!("gamma             {gamma}");
    if let Some(r) = &reference {
        println!("psnr (input)      {}", psnr(r, &img)?);
        println!("psnr (denoised)   {}", psnr(r, &out)?);
    }
    Ok(())
}

fn longest_cycle_signal(img: &ImageSignal, cover: &CycleCover) -> Result<Vec<f64>, CliError> {
    let cycle = cover
        .cycles
        .iter()
        .max_by_key(|c| c.len())
        .ok_or_else(|| CliError::usage("cover has no cycles"))?;
    let npix = img.pixels.len();
    cycle
        .iter()
        .map(|&v| {
            if v < npix {
                Ok(img.pixels[v])
            } else {
                Err(CliError::usage(format!("cover vertex {v} out of range")))
            }
        })
        .collect()
}

fn write_spectrum_csv(path: &str, spectrum: &cyclecover::spectral::Spectrum) -> Result<(), CliError> {
    let mut csv = String::from("bin,re,im,magnitude\n");
    for (k, c) in spectrum.coefficients.iter().enumerate() {
        csv.push_str(&format!("{k},{},{},{}\n", c.re, c.im, c.norm()));
    }
    std::fs::write(path, csv)?;
    Ok(())
}

/// The permuted-trials dump carries mean magnitudes only (a mean of spectra
/// has no meaningful phase).
fn write_magnitude_csv(path: &str, values: &[f64]) -> Result<(), CliError> {
    let mut csv = String::from("bin,magnitude\n");
    for (k, m) in values.iter().enumerate() {
        csv.push_str(&format!("{k},{m}\n"));
    }
    std::fs::write(path, csv)?;
    Ok(())
}

fn cmd_spectrum(args: SpectrumArgs) -> Result<(), CliError> {
    let (g, img) = load_input(&args.input)?;
    let img = img.ok_or_else(|| CliError::usage("spectrum requires --image input"))?;
    let cover = load_cover(&args.cover)?;
    let band = (args.band[0], args.band[1]);

    let signal = longest_cycle_signal(&img, &cover)?;
    let original = dft(&signal);
    let report = spectrum_comparison(&signal, args.trials, args.seed, Some(band))?;

    // Third case: longest cycle of the unit-weight cover of the same lattice.
    let unit_graph = g.map_weights(|_| 1.0);
    let unit_cover = min_weight_cycle_cover_with(&unit_graph, QuantizeMode::None)?;
    let unit_signal = longest_cycle_signal(&img, &unit_cover)?;
    let unit = dft(&unit_signal);

    write_spectrum_csv(&format!("{}_original.csv", args.output), &original)?;
    write_magnitude_csv(
        &format!("{}_permuted.csv", args.output),
        &report.permuted_mean_magnitudes,
    )?;
    write_spectrum_csv(&format!("{}_unit.csv", args.output), &unit)?;
    write_sidecar(Path::new(&format!("{}_original.csv", args.output)), &args)?;

    println!("high band          [{}, {}]", band.0, band.1);
    println!("original fraction  {}", report.original_fraction);
    println!("permuted mean      {}", report.permuted_mean_fraction);
    println!(
        "unit-cover fraction {}",
        unit.band_energy_fraction(band.0, band.1)
    );
    Ok(())
}

fn cmd_reorder(args: ReorderArgs) -> Result<(), CliError> {
    let g = load_edge_list(&args.graph)?;
    let cover = load_cover(&args.cover)?;
    let order = reorder_adjacency(&g, &cover)?;
    let identity: Vec<usize> = (0..g.vertex_count()).collect();
    let h_identity = adjacency_entropy(&g, &identity)?;
    let h_cover = adjacency_entropy(&g, &order)?;
    let mut text = String::new();
    for v in &order {
        text.push_str(&format!("{v}\n"));
    }
    std::fs::write(&args.output, text)?;
    write_sidecar(&args.output, &args)?;
    println!("entropy (identity) {h_identity}");
    println!("entropy (cover)    {h_cover}");
    Ok(())
}

fn cmd_render(args: RenderArgs) -> Result<(), CliError> {
    let cover = load_cover(&args.cover)?;
    let bytes = encode_cover_ppm(args.width, args.height, &cover)?;
    std::fs::write(&args.output, bytes)?;
    write_sidecar(&args.output, &args)?;
    Ok(())
}

fn cmd_noise(args: NoiseArgs) -> Result<(), CliError> {
    let img = load_pgm(&args.image)?;
    let noisy = add_gaussian_noise(&img, args.sigma, args.seed);
    save_pgm(&noisy, &args.output)?;
    write_sidecar(&args.output, &args)?;
    Ok(())
}
