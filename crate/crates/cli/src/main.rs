use std::path::{Path, PathBuf};
use std::process::ExitCode;

use aqpe_cli::{
    reproduce_fig4, resolve_out_dir, run_experiment, solve_params, CliError, CliResult,
    ExperimentConfig, Fig4Options, Mode, ParameterProfile, Stages,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "aqpe",
    version,
    about = "Cavity-readout analog phase estimation experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Overrides {
    /// Output directory (default: $AQPE_OUT_DIR, then ./aqpe-out).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Fock truncation.
    #[arg(long)]
    nmax: Option<usize>,
    /// Treat hierarchy violations as errors.
    #[arg(long)]
    strict: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run every stage of a configuration file.
    Run {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
    },
    /// Canned two-qubit experiment with acceptance checks.
    #[command(name = "reproduce-fig4")]
    ReproduceFig4 {
        #[command(flatten)]
        overrides: Overrides,
        /// Target bond in Hz (snapshot times scale with 1/eta).
        #[arg(long, default_value_t = aqpe_cli::fig4::ETA_HZ)]
        eta: f64,
        #[arg(long, value_enum, default_value_t = ProfileArg::Hierarchy)]
        profile: ProfileArg,
        /// Skip Wigner grid export.
        #[arg(long)]
        no_wigner: bool,
    },
    /// Coupler parameters for a two-qubit bond (all inputs in Hz).
    #[command(name = "solve-params")]
    SolveParams {
        #[arg(long)]
        eta: f64,
        #[arg(long)]
        g: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        strict: bool,
    },
    /// Angular profiles and Wigner grids only.
    Wigner {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Angular profiles and spectral estimates only.
    Estimate {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Ideal,
    Engineered,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    Hierarchy,
    WeakCoupling,
}

fn load(path: &Path, o: &Overrides) -> CliResult<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(n) = o.nmax {
        cfg.cavity.n_max = n;
    }
    cfg.strict |= o.strict;
    Ok(cfg)
}

fn report(outcome: &aqpe_cli::RunOutcome) {
    println!(
        "wrote {} files and {}",
        outcome.manifest.files.len(),
        outcome
            .out_dir
            .join(aqpe_cli::manifest::MANIFEST_FILE)
            .display()
    );
    for c in &outcome.manifest.acceptance {
        println!(
            "{} {}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
}

fn execute(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::Run {
            config,
            overrides,
            mode,
        } => {
            let mut cfg = load(&config, &overrides)?;
            if let Some(m) = mode {
                cfg.mode = match m {
                    ModeArg::Ideal => Mode::Ideal,
                    ModeArg::Engineered => Mode::Engineered,
                    ModeArg::Full => Mode::Full,
                };
            }
            report(&run_experiment(
                &cfg,
                &resolve_out_dir(overrides.out),
                Stages::ALL,
            )?);
        }
        Command::Wigner { config, overrides } => {
            let cfg = load(&config, &overrides)?;
            let stages = Stages {
                wigner: true,
                estimates: false,
                fidelity: false,
            };
            report(&run_experiment(
                &cfg,
                &resolve_out_dir(overrides.out),
                stages,
            )?);
        }
        Command::Estimate { config, overrides } => {
            let cfg = load(&config, &overrides)?;
            let stages = Stages {
                wigner: false,
                estimates: true,
                fidelity: false,
            };
            report(&run_experiment(
                &cfg,
                &resolve_out_dir(overrides.out),
                stages,
            )?);
        }
        Command::ReproduceFig4 {
            overrides,
            eta,
            profile,
            no_wigner,
        } => {
            let mut opts = Fig4Options::new(resolve_out_dir(overrides.out));
            opts.strict = overrides.strict;
            if let Some(n) = overrides.nmax {
                opts.n_max = n;
            }
            opts.eta_hz = eta;
            opts.profile = match profile {
                ProfileArg::Hierarchy => ParameterProfile::Hierarchy,
                ProfileArg::WeakCoupling => ParameterProfile::WeakCoupling,
            };
            opts.wigner = !no_wigner;
            match reproduce_fig4(&opts) {
                Ok(outcome) => report(&outcome),
                Err(e @ CliError::Acceptance(_)) => {
                    if let Ok(m) = aqpe_cli::export::read_json::<aqpe_cli::RunManifest>(
                        &opts.out_dir.join(aqpe_cli::manifest::MANIFEST_FILE),
                    ) {
                        for c in &m.acceptance {
                            println!(
                                "{} {}: {}",
                                if c.passed { "PASS" } else { "FAIL" },
                                c.name,
                                c.detail
                            );
                        }
                    }
                    return Err(e);
                }
                Err(e) => return Err(e),
            }
        }
        Command::SolveParams {
            eta,
            g,
            delta,
            strict,
        } => {
            let solved = solve_params(eta, g, delta, strict)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&solved).expect("parameters serialize")
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
