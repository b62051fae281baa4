use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use dnspectral::cli::{self, CliError, Mode, RunConfig, RunOptions, EXIT_CODES_HELP, EXIT_CONFIG};

/// Spectral solvers for time-fractional diffusion with the
/// Dzherbashian-Nersesian operator and nonlocal boundary conditions.
#[derive(Debug, Parser)]
#[command(name = "dnspectral", version, after_help = EXIT_CODES_HELP)]
struct Args {
    /// Pipeline to run; overrides "mode" in the configuration.
    mode: Mode,
    /// JSON configuration file (not needed for selftest).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; overrides "output_dir".
    #[arg(long)]
    output: Option<PathBuf>,
    /// Number of modes per family; overrides "N".
    #[arg(long)]
    modes: Option<usize>,
    /// Spatial nodes and time steps; override "nx" and "nt".
    #[arg(long, num_args = 2, value_names = ["NX", "NT"])]
    grid: Option<Vec<usize>>,
    /// Amplification cutoff for the backward solver.
    #[arg(long)]
    cutoff: Option<f64>,
    /// Continue when phi or psi fail the compatibility checks.
    #[arg(long)]
    allow_incompatible: bool,
}

fn threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("DNSPECTRAL_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or(format!("DNSPECTRAL_THREADS = {raw:?} must be an integer >= 1"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn load(args: &Args) -> Result<(RunConfig, PathBuf), CliError> {
    let (mut config, base) = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
            let base = path.parent().map(PathBuf::from).unwrap_or_default();
            (cli::parse_config(&text)?, base)
        }
        None if args.mode == Mode::Selftest => (RunConfig::new(Mode::Selftest), PathBuf::new()),
        None => return Err(CliError::Invalid(vec![format!("--config is required in {} mode", args.mode.name())])),
    };
    config.mode = args.mode;
    if let Some(dir) = &args.output {
        config.output_dir = dir.clone();
    }
    if let Some(n) = args.modes {
        config.n_modes = n;
    }
    if let Some(g) = &args.grid {
        (config.nx, config.nt) = (g[0], g[1]);
    }
    if args.cutoff.is_some() {
        config.cutoff_amplification = args.cutoff;
    }
    Ok((config, base))
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG } else { 0 });
        }
    };
    if let Err(m) = threads() {
        eprintln!("dnspectral: {m}");
        return ExitCode::from(EXIT_CONFIG);
    }
    let code = match load(&args) {
        Ok((config, base_dir)) => {
            cli::run(&config, &RunOptions { base_dir, allow_incompatible: args.allow_incompatible })
        }
        Err(e) => {
            eprintln!("dnspectral: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code)
}
