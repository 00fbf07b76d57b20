use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use frame_forge::report::{bounds_csv, render_recovery, AnalysisReport, RecoveryRepr, WeakRipRepr};
use frame_forge::{framefile, CliError};
use frame_forge_core::coherence::{
    average_coherence, bound_table, scp_check, worst_case_coherence,
};
use frame_forge_core::constructions::{
    chirp, code_frame, gabor_alltop, gabor_steinhaus, gaussian_normalized, harmonic_from_indices,
    random_harmonic, spherical_2design, steiner_etf,
};
use frame_forge_core::designs::{affine_plane_system, pair_system};
use frame_forge_core::equivalence::{linear_flip, random_flip_search};
use frame_forge_core::gf2m::FieldContext;
use frame_forge_core::sparse::{recovery_experiment, weak_rip_test};
use frame_forge_core::{Complex64, Family, Frame, HarmonicSelection};

#[derive(Parser)]
#[command(
    name = "frame-forge",
    version,
    about = "Construct unit-norm frames, measure their coherence, and run recovery experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a frame from a named family and write it to a frame file
    Construct(ConstructArgs),
    /// Report coherence metrics, bounds, and family expectations for a frame file
    Analyze(AnalyzeArgs),
    /// Emit the table of coherence lower bounds as CSV
    Bounds(BoundsArgs),
    /// Flip column signs to lower average coherence, keeping all other geometry
    Flip(FlipArgs),
    /// Run one-step-thresholding sparse recovery trials against a frame
    Ost(OstArgs),
    /// Estimate how often random sparse vectors violate near-isometry
    Wrip(WripArgs),
}

#[derive(Args)]
struct ConstructArgs {
    /// One of: gaussian, harmonic, harmonic-fixed, gabor-alltop,
    /// gabor-steinhaus, chirp, sph2design, steiner-pair, steiner-affine, code
    family: String,
    /// Rows (gaussian, harmonic, gabor-*, chirp) or field degree (code)
    #[arg(long)]
    m: Option<usize>,
    /// Columns (gaussian, harmonic) or modulus (harmonic-fixed, sph2design)
    #[arg(long)]
    n: Option<usize>,
    /// Correlation order for code frames
    #[arg(long)]
    t: Option<u32>,
    /// Point count for steiner-pair
    #[arg(long)]
    v: Option<usize>,
    /// Prime order for steiner-affine
    #[arg(long)]
    q: Option<usize>,
    /// Comma-separated row indices (harmonic-fixed, sph2design)
    #[arg(long)]
    indices: Option<String>,
    /// Reduction polynomial for code frames, hex or decimal (default: built in)
    #[arg(long)]
    poly: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output frame file
    #[arg(long, short = 'o')]
    out: PathBuf,
}

#[derive(Args)]
struct AnalyzeArgs {
    frame: PathBuf,
    /// Constant c in the strictest coherence test mu <= 1/(c ln N)
    #[arg(long, default_value_t = 164.0)]
    constant: f64,
    /// Also write the report as JSON
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    /// Ambient dimension
    #[arg(long)]
    m: usize,
    /// Frame-size range "lo:hi" (or a single value)
    #[arg(long)]
    n: String,
    /// Write CSV here instead of standard output
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FlipMode {
    /// One greedy pass over the columns
    Linear,
    /// Seeded random search for a pattern meeting the nu <= mu/sqrt(M) target
    Random,
}

#[derive(Args)]
struct FlipArgs {
    frame: PathBuf,
    #[arg(long, value_enum, default_value_t = FlipMode::Linear)]
    mode: FlipMode,
    /// Random-mode trial budget
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output frame file
    #[arg(long, short = 'o')]
    out: PathBuf,
}

#[derive(Args)]
struct OstArgs {
    frame: PathBuf,
    /// Sparsity of the synthetic signals
    #[arg(long)]
    k: usize,
    /// Noise level (standard deviation per measurement)
    #[arg(long)]
    sigma: f64,
    /// Split parameter in (0,1) used by the threshold formula
    #[arg(long, default_value_t = 0.5)]
    t: f64,
    /// Fraction of nonzeros at full magnitude
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Full magnitude as a multiple of sigma*sqrt(2 ln N)
    #[arg(long, default_value_t = 10.0)]
    alpha_mult: f64,
    #[arg(long, default_value_t = 200)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Pin the selection threshold instead of using the formula
    /// (required when sigma is 0)
    #[arg(long)]
    lambda: Option<f64>,
    /// Also write the summary as JSON
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct WripArgs {
    frame: PathBuf,
    /// Sparsity of the test vectors (entries are all ones)
    #[arg(long)]
    k: usize,
    /// Allowed relative energy deviation
    #[arg(long)]
    delta: f64,
    #[arg(long, default_value_t = 10000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests land here too; only real usage errors
            // take the failure path
            let code = u8::from(e.use_stderr());
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

/// FRAME_FORGE_THREADS caps worker threads; unset means all cores.
fn init_thread_pool() {
    if let Ok(raw) = std::env::var("FRAME_FORGE_THREADS") {
        match raw.parse::<usize>() {
            Ok(threads) if threads >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
            }
            _ => eprintln!("ignoring FRAME_FORGE_THREADS={raw}: expected a positive integer"),
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Construct(args) => cmd_construct(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Bounds(args) => cmd_bounds(args),
        Command::Flip(args) => cmd_flip(args),
        Command::Ost(args) => cmd_ost(args),
        Command::Wrip(args) => cmd_wrip(args),
    }
}

fn require<T>(value: Option<T>, flag: &str, family: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("family {family} requires {flag}")))
}

fn parse_indices(raw: &str) -> Result<Vec<usize>, CliError> {
    raw.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("--indices entry '{s}' is not an integer")))
        })
        .collect()
}

fn parse_poly(raw: &str) -> Result<u32, CliError> {
    let parsed = match raw.strip_prefix("0x").or_else(|| raw.strip_prefix("0X")) {
        Some(hex) => u32::from_str_radix(hex, 16),
        None => raw.parse(),
    };
    parsed.map_err(|_| CliError::Usage(format!("--poly '{raw}' is not a hex or decimal integer")))
}

fn cmd_construct(args: ConstructArgs) -> Result<(), CliError> {
    let family = Family::from_name(&args.family)?;
    let name = family.name();
    let frame = match family {
        Family::Gaussian => gaussian_normalized(
            require(args.m, "--m", name)?,
            require(args.n, "--n", name)?,
            args.seed,
        )?,
        Family::Harmonic => {
            random_harmonic(require(args.m, "--m", name)?, require(args.n, "--n", name)?, args.seed)?
                .0
        }
        Family::HarmonicFixed => {
            let indices = parse_indices(&require(args.indices, "--indices", name)?)?;
            harmonic_from_indices(&HarmonicSelection::new(require(args.n, "--n", name)?, indices)?)?
        }
        Family::GaborAlltop => gabor_alltop(require(args.m, "--m", name)?)?,
        Family::GaborSteinhaus => gabor_steinhaus(require(args.m, "--m", name)?, args.seed)?,
        Family::Chirp => chirp(require(args.m, "--m", name)?)?,
        Family::Sph2Design => {
            let indices = parse_indices(&require(args.indices, "--indices", name)?)?;
            spherical_2design(&HarmonicSelection::new(require(args.n, "--n", name)?, indices)?)?
        }
        Family::SteinerPair => steiner_etf(&pair_system(require(args.v, "--v", name)?)?)?,
        Family::SteinerAffine => steiner_etf(&affine_plane_system(require(args.q, "--q", name)?)?)?,
        Family::Code => {
            let m = require(args.m, "--m", name)? as u32;
            let ctx = match args.poly {
                Some(raw) => FieldContext::new(m, parse_poly(&raw)?)?,
                None => FieldContext::default_for(m)?,
            };
            code_frame(&ctx, require(args.t, "--t", name)?)?
        }
    };
    framefile::save(&frame, &args.out)?;
    println!("{name} {}x{} -> {}", frame.rows(), frame.cols(), args.out.display());
    Ok(())
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<(), CliError> {
    if !(args.constant.is_finite() && args.constant > 0.0) {
        return Err(CliError::Usage(format!(
            "--constant must be positive and finite, got {}",
            args.constant
        )));
    }
    let frame = framefile::load(&args.frame)?;
    let report = AnalysisReport::build(&frame, args.constant)?;
    print!("{}", report.render());
    if let Some(path) = args.out {
        std::fs::write(&path, report.to_json())
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn parse_range(raw: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Usage(format!("--n '{raw}' is not 'lo:hi' or a single integer"));
    match raw.split_once(':') {
        Some((lo, hi)) => {
            let lo = lo.trim().parse().map_err(|_| bad())?;
            let hi = hi.trim().parse().map_err(|_| bad())?;
            Ok((lo, hi))
        }
        None => {
            let n = raw.trim().parse().map_err(|_| bad())?;
            Ok((n, n))
        }
    }
}

fn cmd_bounds(args: BoundsArgs) -> Result<(), CliError> {
    let (lo, hi) = parse_range(&args.n)?;
    let table = bound_table(args.m, lo, hi)?;
    let csv = bounds_csv(&table);
    match args.out {
        Some(path) => std::fs::write(&path, csv)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn flip_summary(label: &str, frame: &Frame) -> Result<String, CliError> {
    let mu = worst_case_coherence(frame)?;
    let nu = average_coherence(frame)?;
    let scp2 = scp_check(frame, 164.0)?.scp2;
    Ok(format!("{label:<8}mu {mu:.12}   nu {nu:.12}   scp2 {scp2}"))
}

fn cmd_flip(args: FlipArgs) -> Result<(), CliError> {
    let frame = framefile::load(&args.frame)?;
    let before = flip_summary("before", &frame)?;
    let (flipped, pattern) = match args.mode {
        FlipMode::Linear => linear_flip(&frame)?,
        FlipMode::Random => match random_flip_search(&frame, args.trials, args.seed)? {
            Some(found) => found,
            None => {
                return Err(CliError::Search(format!(
                    "no sign pattern reached nu <= mu/sqrt(M) within {} trials",
                    args.trials
                )))
            }
        },
    };
    let after = flip_summary("after", &flipped)?;
    println!("pattern {pattern}");
    println!("{before}");
    println!("{after}");
    framefile::save(&flipped, &args.out)?;
    Ok(())
}

fn cmd_ost(args: OstArgs) -> Result<(), CliError> {
    let frame = framefile::load(&args.frame)?;
    let summary = recovery_experiment(
        &frame,
        args.k,
        args.beta,
        args.alpha_mult,
        args.sigma,
        args.t,
        args.trials,
        args.seed,
        args.lambda,
    )?;
    print!("{}", render_recovery(&summary));
    if let Some(path) = args.out {
        let mut text = serde_json::to_string_pretty(&RecoveryRepr::from(&summary))
            .expect("summary serialization is infallible");
        text.push('\n');
        std::fs::write(&path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn cmd_wrip(args: WripArgs) -> Result<(), CliError> {
    let frame = framefile::load(&args.frame)?;
    let values = vec![Complex64::new(1.0, 0.0); args.k];
    let report = weak_rip_test(&frame, &values, args.delta, args.trials, args.seed)?;
    let mut text = serde_json::to_string_pretty(&WeakRipRepr::from(&report))
        .expect("report serialization is infallible");
    text.push('\n');
    print!("{text}");
    Ok(())
}
