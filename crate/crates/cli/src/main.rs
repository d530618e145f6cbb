use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use wall1d::runner::{
    fmt_f64, parse_config, perturbation_study, refinement_study, run_simulation, selftest, SimConfig,
};
use wall1d::Error;

#[derive(Parser)]
#[command(name = "wall1d", version, about = "Pseudospectral runs and blowup diagnostics for the 1D wall model")]
struct Cli {
    /// Directory for all output files; overrides `output_dir` in the config.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,

    /// Suppress the summary printed on success.
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation.
    Simulate { config: PathBuf },
    /// Repeat a run on successively doubled grids.
    Refine {
        config: PathBuf,
        #[arg(long)]
        levels: usize,
    },
    /// Rerun with perturbed initial data at each scale.
    Perturb {
        config: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        scales: Vec<f64>,
    },
    /// Kernel inequality and embedding-constant checks.
    Selftest,
}

const EXIT_RUN_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_ERROR: u8 = 3;

fn load(path: &Path, output_dir: &Option<PathBuf>) -> Result<SimConfig, Error> {
    let text = std::fs::read_to_string(path)?;
    let mut config = parse_config(&text)?;
    if let Some(dir) = output_dir {
        config.output_dir = dir.clone();
    }
    Ok(config)
}

fn execute(cli: &Cli) -> Result<u8, Error> {
    match &cli.command {
        Command::Simulate { config } => {
            let config = load(config, &cli.output_dir)?;
            let out = run_simulation(&config)?;
            if !cli.quiet {
                println!("termination: {}", out.termination);
                println!("steps: {}  final time: {}", out.steps, fmt_f64(out.final_state.time));
                println!("c0: {}  t_star_bound: {}", fmt_f64(out.c0), fmt_f64(out.t_star_bound));
                match &out.blowup_fit {
                    Ok((t, q)) => println!("blowup fit: t* = {}  r2 = {}", fmt_f64(*t), fmt_f64(*q)),
                    Err(reason) => println!("blowup fit unavailable: {reason}"),
                }
                println!("output: {}", config.output_dir.display());
            }
            Ok(if out.termination.is_success() { 0 } else { EXIT_RUN_FAILED })
        }
        Command::Refine { config, levels } => {
            let config = load(config, &cli.output_dir)?;
            let report = refinement_study(&config, *levels)?;
            if !cli.quiet {
                for (l, level) in report.levels.iter().enumerate() {
                    println!("level {l}: N = {}  termination: {}", level.n_points, level.termination);
                }
                for (l, h) in report.agreement_horizons.iter().enumerate() {
                    println!("levels {l}/{}: agree to t = {}", l + 1, fmt_f64(*h));
                }
                println!("report: {}", config.output_dir.join("refine_report.csv").display());
            }
            Ok(0)
        }
        Command::Perturb { config, scales } => {
            let config = load(config, &cli.output_dir)?;
            let report = perturbation_study(&config, scales)?;
            if !cli.quiet {
                for r in &report.rows {
                    println!("scale {}: max W1 distance {}", fmt_f64(r.scale), fmt_f64(r.max_distance));
                }
                println!("monotone: {}", report.is_monotone());
                println!("report: {}", config.output_dir.join("perturb_report.csv").display());
            }
            Ok(0)
        }
        Command::Selftest => match selftest(0) {
            Ok(report) => {
                if !cli.quiet {
                    let k = &report.kernel;
                    println!("kernel: {} samples, worst K(w)+K(1/w)+2 = {:e} at w = {}", k.samples, k.symmetric_sum_max, k.symmetric_sum_argmax);
                    println!("kernel: worst K(w) on [0,1) = {:e}, worst K(1/w)+2 = {:e}", k.lower_k_max, k.upper_k_plus_two_max);
                    println!("constants: {} fields, worst Poincare margin {:e}, worst Sobolev margin {:e}", report.fields, report.poincare_worst, report.sobolev_worst);
                    println!("selftest passed");
                }
                Ok(0)
            }
            Err(e @ Error::InequalityViolation(_)) => {
                eprintln!("selftest failed: {e}");
                Ok(EXIT_RUN_FAILED)
            }
            Err(e) => Err(e),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Config { .. } | Error::Json(_) => EXIT_CONFIG,
                _ => EXIT_ERROR,
            })
        }
    }
}
