use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use platesim::cli::{cmd_run, cmd_scenarios, cmd_validate, RunConfig, ScenarioSource};
use std::path::PathBuf;
use std::process::ExitCode;

/// Agent-based 2D heat conduction simulator.
///
/// A plate is modeled as a lattice of agents, each carrying its own
/// temperature and material properties and updated synchronously from its
/// four neighbors' states.
#[derive(Parser)]
#[command(
    name = "platesim",
    version,
    about,
    after_help = "Command-line overrides (--steps, --dt, --snapshot-every, --csv/--no-csv, --pgm) \
                  take precedence over the corresponding scenario-file values.\n\
                  Exit codes: 0 success, 1 usage or validation error, 2 non-finite final field."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write snapshots, probe series, and a summary line
    Run(RunArgs),
    /// Check a scenario file; print errors and warnings
    Validate {
        /// Path to a scenario JSON file
        path: PathBuf,
    },
    /// List the built-in scenarios
    Scenarios,
}

#[derive(Args)]
struct RunArgs {
    /// Path to a scenario JSON file
    #[arg(
        long,
        value_name = "PATH",
        conflicts_with = "builtin",
        required_unless_present = "builtin"
    )]
    scenario: Option<PathBuf>,

    /// Name of a built-in scenario (see `platesim scenarios`)
    #[arg(long, value_name = "NAME")]
    builtin: Option<String>,

    /// Output directory for snapshots and the probe series
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,

    /// Override the scenario's step count
    #[arg(long, value_name = "N")]
    steps: Option<u64>,

    /// Override the scenario's time step, seconds
    #[arg(long, value_name = "S")]
    dt: Option<f64>,

    /// Override the snapshot interval in steps (0 = initial and final only)
    #[arg(long, value_name = "N")]
    snapshot_every: Option<u64>,

    /// Worker threads for the update loop; results are bit-identical for
    /// any count
    #[arg(long, value_name = "N", default_value_t = 1)]
    workers: usize,

    /// Write CSV snapshots and probe series (the default)
    #[arg(long, overrides_with = "no_csv")]
    csv: bool,

    /// Disable CSV output
    #[arg(long)]
    no_csv: bool,

    /// Also write grayscale PGM heatmaps scaled over this temperature range
    #[arg(long, value_name = "LO:HI", value_parser = parse_pgm_range, allow_hyphen_values = true)]
    pgm: Option<(f64, f64)>,
}

fn parse_pgm_range(text: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = text
        .split_once(':')
        .ok_or_else(|| format!("expected LO:HI, got {text:?}"))?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("bad LO: {e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("bad HI: {e}"))?;
    if !(lo < hi) {
        return Err(format!("range must satisfy LO < HI, got {lo}:{hi}"));
    }
    Ok((lo, hi))
}

impl RunArgs {
    fn into_config(self) -> RunConfig {
        let source = match (self.scenario, self.builtin) {
            (Some(path), None) => ScenarioSource::File(path),
            (None, Some(name)) => ScenarioSource::Builtin(name),
            // clap enforces exactly one of the two.
            _ => unreachable!("clap enforces a single scenario source"),
        };
        RunConfig {
            source,
            out_dir: self.out,
            steps: self.steps,
            dt: self.dt,
            snapshot_every: self.snapshot_every,
            workers: self.workers,
            csv: if self.csv {
                Some(true)
            } else if self.no_csv {
                Some(false)
            } else {
                None
            },
            pgm: self.pgm,
        }
    }
}

fn main() -> ExitCode {
    // clap's default usage-error code is 2, which this tool reserves for
    // numerical blow-up; remap usage errors to 1.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let result = match cli.command {
        Command::Run(args) => cmd_run(&args.into_config(), &mut out),
        Command::Validate { path } => cmd_validate(&path, &mut out),
        Command::Scenarios => cmd_scenarios(&mut out).map(|()| 0).map_err(Into::into),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
