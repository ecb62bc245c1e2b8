use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use torus_dirac_cli::commands::{self, SpectrumOptions, SweepSpec};
use torus_dirac_cli::config::ScenarioConfig;
use torus_dirac_cli::output::Sink;
use torus_dirac_cli::report::RunReport;

#[derive(Parser)]
#[command(name = "torus-dirac", version, about = "Dirac operator on a torus: spectra and residual checks")]
struct Cli {
    /// Scenario file (TOML); built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Override `grid.n`.
    #[arg(long, global = true)]
    grid_n: Option<usize>,
    /// Omit the `# generated` header line from CSV files.
    #[arg(long, global = true)]
    no_timestamp: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Metric, Christoffel and spin-connection tables.
    Geometry,
    /// Numerical levels next to the closed forms.
    Spectrum {
        /// Particle in a box on [0, π] instead of the scenario.
        #[arg(long = "box")]
        box_test: bool,
    },
    /// Full residual suite; exits nonzero on any failure.
    Verify {
        /// Perturb the superpotential by 1% so factorization must fail.
        #[arg(long)]
        negative_control: bool,
    },
    /// One row per parameter value, computed in parallel.
    Sweep {
        /// One of a, c, e, k, a2, C2, alpha, C1.
        #[arg(long)]
        param: String,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long)]
        points: usize,
    },
    /// Closed-form levels, parameters and wavefunction tables.
    Analytic,
}

fn run(cli: Cli) -> Result<bool> {
    let mut cfg = match &cli.config {
        Some(p) => ScenarioConfig::load(p)?,
        None => ScenarioConfig::default(),
    };
    if let Some(n) = cli.grid_n {
        cfg.grid.n = n;
    }
    cfg.validate()?;
    let sink = Sink::new(&cli.out, !cli.no_timestamp)?;
    let report: RunReport = match cli.command {
        Command::Geometry => commands::cmd_geometry(&cfg, &sink)?,
        Command::Spectrum { box_test } => commands::cmd_spectrum(&cfg, &sink, SpectrumOptions { box_test })?,
        Command::Verify { negative_control } => commands::cmd_verify(&cfg, &sink, negative_control)?,
        Command::Sweep { param, from, to, points } => {
            let t = commands::cmd_sweep(&cfg, &sink, &SweepSpec { parameter: param, from, to, points })?;
            print!("{}", t.to_csv(false));
            return Ok(true);
        }
        Command::Analytic => commands::cmd_analytic(&cfg, &sink)?,
    };
    print!("{}", report.render());
    Ok(report.passed())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
