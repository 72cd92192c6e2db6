//! `ddicav` — steady-state transmission spectra of two dipole-dipole
//! coupled atoms in a driven optical cavity.
//!
//! Every subcommand writes one machine-readable table (CSV or JSON) with a
//! header block echoing all resolved parameters; diagnostics go to stderr.
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure.

mod output;
mod recipes;
mod run;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ddicav::params::SystemParams;
use ddicav::Error;

use output::Format;
use run::{Axis, Regime, RunConfig, SweepSpec};

#[derive(Parser)]
#[command(
    name = "ddicav",
    version,
    about = "Transmission spectra of two dipole-coupled atoms in a driven cavity",
    after_help = "All rates are in units of the atom-cavity coupling g. Parameters come from \
                  --config (flat key=value lines) and --set overrides; keys: g, kappa, gamma, \
                  gamma_prime, eta, delta_c, delta, j_ddi, eta2_over_kappa2."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Flat key=value parameter file.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Parameter override, repeatable (e.g. --set j_ddi=1 --set eta=0.12).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Output file; stdout when omitted.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum SpectrumRegime {
    Low,
    Saturated,
}

#[derive(Subcommand)]
enum Command {
    /// Steady-state spectrum over a parameter sweep.
    Spectrum {
        /// Solution layer: linear low-excitation or saturated multivalued.
        #[arg(long, value_enum, default_value_t = SpectrumRegime::Low)]
        regime: SpectrumRegime,
        /// Sweep as axis=start:stop:count (axes: delta_c, delta, j_ddi, eta).
        #[arg(long, value_name = "SPEC")]
        sweep: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Dressed levels: excitation number, branch, energy, mixing angle.
    Dressed {
        /// Number of excitation manifolds to emit.
        #[arg(long, default_value_t = 3)]
        levels: u32,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Complex normal-mode frequencies swept over the atomic detuning.
    AvoidedCrossing {
        #[arg(long, value_name = "SPEC")]
        sweep: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Fold points bounding multivalued probe-detuning windows.
    Bistability {
        #[arg(long, value_name = "SPEC")]
        sweep: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Relax the mean-field equations from vacuum; emits the time series.
    Relax {
        /// Integration horizon; defaults to several decay lifetimes.
        #[arg(long, value_name = "T")]
        t_max: Option<f64>,
        /// Flow-norm threshold declaring convergence.
        #[arg(long, default_value_t = ddicav::meanfield::DEFAULT_RHS_TOL)]
        tol: f64,
        /// Keep every n-th accepted step.
        #[arg(long, default_value_t = 10)]
        sample: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Quasi-static up-then-down probe sweep seeded point to point.
    Hysteresis {
        #[arg(long, value_name = "SPEC")]
        sweep: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Quantum steady state vs the semiclassical formula along a sweep.
    Oracle {
        /// Fock-space truncation (photons 0..=n_max).
        #[arg(long, default_value_t = 12)]
        n_max: usize,
        #[arg(long, value_name = "SPEC")]
        sweep: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Write the ready-made figure data sets (1..=6) into a directory.
    Figure {
        /// Figure number.
        n: usize,
        /// Directory for the per-curve output files.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Parameter overrides applied on top of each recipe.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidParameter(_) => 2,
        Error::AtGridPoint { source, .. } => exit_code(source),
        _ => 3,
    }
}

fn dispatch(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Spectrum {
            regime,
            sweep,
            common,
        } => {
            let regime = match regime {
                SpectrumRegime::Low => Regime::Low,
                SpectrumRegime::Saturated => Regime::Saturated,
            };
            let config = build_config(&common, regime, sweep.as_deref(), default_probe_sweep())?;
            emit(&config, &common)
        }
        Command::Dressed { levels, common } => {
            let mut config = build_config(&common, Regime::Dressed, None, default_probe_sweep())?;
            config.levels = levels.max(1);
            emit(&config, &common)
        }
        Command::AvoidedCrossing { sweep, common } => {
            let default = SweepSpec::new(Axis::Delta, -4.0, 4.0, 801)?;
            let config = build_config(&common, Regime::AvoidedCrossing, sweep.as_deref(), default)?;
            emit(&config, &common)
        }
        Command::Bistability { sweep, common } => {
            let default = SweepSpec::new(Axis::DeltaC, -5.0, 5.0, 401)?;
            let config = build_config(&common, Regime::Bistability, sweep.as_deref(), default)?;
            emit(&config, &common)
        }
        Command::Relax {
            t_max,
            tol,
            sample,
            common,
        } => {
            let mut config = build_config(&common, Regime::Relax, None, default_probe_sweep())?;
            config.t_max = t_max;
            config.tol = tol;
            config.sample_every = sample.max(1);
            emit(&config, &common)
        }
        Command::Hysteresis { sweep, common } => {
            let default = SweepSpec::new(Axis::DeltaC, -5.0, 5.0, 201)?;
            let config = build_config(&common, Regime::Hysteresis, sweep.as_deref(), default)?;
            emit(&config, &common)
        }
        Command::Oracle {
            n_max,
            sweep,
            common,
        } => {
            let default = SweepSpec::new(Axis::DeltaC, -4.0, 4.0, 41)?;
            let mut config = build_config(&common, Regime::Oracle, sweep.as_deref(), default)?;
            config.n_max = n_max;
            emit(&config, &common)
        }
        Command::Figure {
            n,
            out_dir,
            format,
            set,
        } => run_figure(n, &out_dir, format, &set),
    }
}

fn default_probe_sweep() -> SweepSpec {
    SweepSpec::new(Axis::DeltaC, -5.0, 5.0, 2001).expect("static sweep")
}

fn resolve_params(config: Option<&Path>, set: &[String]) -> Result<SystemParams, Error> {
    let mut p = SystemParams::default();
    if let Some(path) = config {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::InvalidParameter(format!("cannot read config {}: {e}", path.display()))
        })?;
        p.apply_key_values(&text)?;
    }
    if !set.is_empty() {
        p.apply_key_values(&set.join("\n"))?;
    }
    Ok(p)
}

fn build_config(
    common: &CommonArgs,
    regime: Regime,
    sweep: Option<&str>,
    default_sweep: SweepSpec,
) -> Result<RunConfig, Error> {
    let params = resolve_params(common.config.as_deref(), &common.set)?;
    let sweep = match sweep {
        Some(text) => SweepSpec::parse(text)?,
        None => default_sweep,
    };
    Ok(RunConfig::new(params, sweep, regime))
}

fn emit(config: &RunConfig, common: &CommonArgs) -> Result<(), Error> {
    let table = run::run(config)?;
    let text = table.render(common.format);
    match &common.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::InvalidParameter(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_figure(n: usize, out_dir: &Path, format: Format, set: &[String]) -> Result<(), Error> {
    let runs = recipes::figure_recipe(n)?;
    std::fs::create_dir_all(out_dir).map_err(|e| {
        Error::InvalidParameter(format!("cannot create {}: {e}", out_dir.display()))
    })?;
    for mut config in runs {
        if !set.is_empty() {
            config.params.apply_key_values(&set.join("\n"))?;
        }
        let table = run::run(&config)?;
        let path = out_dir.join(format!("figure{n}_{}.{}", config.label, format.extension()));
        std::fs::write(&path, table.render(format)).map_err(|e| {
            Error::InvalidParameter(format!("cannot write {}: {e}", path.display()))
        })?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}
