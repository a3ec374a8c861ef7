use std::fs;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use singlet_sim::harness::{
    cmd_compare_joint, cmd_cost_table, cmd_primitives_check, cmd_simulate, cmd_verify,
    default_workers, parse_direction, parse_rational, parse_seed, OutputFormat, Perturbation,
    PrimitivesConfig, RunConfig, VerifyConfig, SCHEMA_VERSION,
};
use singlet_sim::{Result, SpinValue, DEFAULT_SEED};

#[derive(Parser)]
#[command(name = "singlet-sim", version, about = "Classical simulation of spin-s singlet correlations")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Master seed, decimal or 0x-hex.
    #[arg(long, global = true, env = "SINGLET_SIM_SEED")]
    seed: Option<String>,

    /// Worker threads (default: available cores). Never changes results.
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// json, csv or table.
    #[arg(long, global = true, default_value = "json")]
    format: String,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<String>,
}

#[derive(Args)]
struct DirectionArgs {
    /// First measurement direction, "x,y,z" (or "theta,phi" with --spherical).
    #[arg(long, default_value = "0,0,1", allow_hyphen_values = true)]
    a: String,

    /// Second measurement direction.
    #[arg(long, default_value = "0.6,0,0.8", allow_hyphen_values = true)]
    b: String,

    /// Read directions as polar and azimuthal angles in radians.
    #[arg(long)]
    spherical: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the protocol and summarize its outputs.
    Simulate {
        #[arg(long, allow_hyphen_values = true)]
        spin: String,
        #[command(flatten)]
        directions: DirectionArgs,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        /// Write one JSON object per trial to this file.
        #[arg(long)]
        dump_transcripts: Option<String>,
        /// Add wall-clock time to the report.
        #[arg(long)]
        timing: bool,
    },
    /// Check every spin up to --spin-max against the exact oracles.
    Verify {
        #[arg(long, default_value = "15/2")]
        spin_max: String,
        #[arg(long, default_value_t = 20)]
        pairs: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Add this to every f-bias (self-test; verification should fail).
        #[arg(long, allow_hyphen_values = true)]
        perturb_bias: Option<String>,
        /// Add this many half units to the last coefficient (self-test).
        #[arg(long, allow_hyphen_values = true)]
        perturb_coefficient: Option<i64>,
    },
    /// Chain length and randomness per spin.
    CostTable {
        #[arg(long, default_value = "10")]
        spin_max: String,
    },
    /// Protocol joint law next to the quantum one.
    CompareJoint {
        #[arg(long, allow_hyphen_values = true)]
        spin: String,
        #[command(flatten)]
        directions: DirectionArgs,
    },
    /// Monte Carlo checks of the sign and f-bit identities.
    PrimitivesCheck {
        #[command(flatten)]
        directions: DirectionArgs,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
    },
}

impl DirectionArgs {
    fn parse(&self) -> Result<(singlet_sim::Direction64, singlet_sim::Direction64)> {
        Ok((
            parse_direction(&self.a, self.spherical)?,
            parse_direction(&self.b, self.spherical)?,
        ))
    }
}

trait Render: Serialize {
    fn csv(&self) -> String;
    fn table(&self) -> String;

    fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            OutputFormat::Csv => self.csv(),
            OutputFormat::Table => self.table(),
        }
    }
}

macro_rules! render_via {
    ($($t:ty),*) => {$(
        impl Render for $t {
            fn csv(&self) -> String { self.to_csv() }
            fn table(&self) -> String { self.to_table() }
        }
    )*};
}

render_via!(
    singlet_sim::harness::SimulateReport,
    singlet_sim::harness::VerifyReport,
    singlet_sim::harness::CostTable,
    singlet_sim::harness::CompareReport,
    singlet_sim::harness::PrimitivesReport
);

fn emit(text: &str, out: Option<&str>) -> Result<()> {
    match out {
        Some(path) => Ok(fs::write(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Runs the command; `Ok(false)` means it ran but a check failed.
fn run(cli: Cli) -> Result<bool> {
    let seed = cli.seed.as_deref().map(parse_seed).transpose()?.unwrap_or(DEFAULT_SEED);
    let workers = cli.workers.unwrap_or_else(default_workers);
    let format: OutputFormat = cli.format.parse()?;
    let out = cli.out.as_deref();

    match cli.command {
        Command::Simulate {
            spin,
            directions,
            trials,
            dump_transcripts,
            timing,
        } => {
            let (a, b) = directions.parse()?;
            let config = RunConfig {
                spin: spin.parse()?,
                direction_a: a,
                direction_b: b,
                trials,
                seed,
                workers,
                output_format: format,
                record_transcripts: dump_transcripts.is_some(),
                timing,
            };
            let started = Instant::now();
            let report = cmd_simulate(&config)?;
            eprintln!("wall time {:.3} s", started.elapsed().as_secs_f64());
            if let (Some(path), Some(lines)) = (dump_transcripts, report.transcript_lines()) {
                fs::write(path, lines)?;
            }
            emit(&report.render(format), out)?;
            Ok(true)
        }
        Command::Verify {
            spin_max,
            pairs,
            trials,
            tol,
            perturb_bias,
            perturb_coefficient,
        } => {
            let config = VerifyConfig {
                spin_max: spin_max.parse()?,
                pairs,
                trials,
                tol,
                perturbation: Perturbation {
                    bias: perturb_bias.as_deref().map(parse_rational).transpose()?,
                    coefficient_twice: perturb_coefficient,
                },
                ..VerifyConfig::new(seed, workers)
            };
            let report = cmd_verify(&config)?;
            emit(&report.render(format), out)?;
            Ok(report.passed)
        }
        Command::CostTable { spin_max } => {
            let spin_max: SpinValue = spin_max.parse()?;
            emit(&cmd_cost_table(spin_max)?.render(format), out)?;
            Ok(true)
        }
        Command::CompareJoint { spin, directions } => {
            let (a, b) = directions.parse()?;
            let report = cmd_compare_joint(spin.parse()?, &a, &b)?;
            emit(&report.render(format), out)?;
            Ok(report.agrees())
        }
        Command::PrimitivesCheck { directions, trials } => {
            let (a, b) = directions.parse()?;
            let report = cmd_primitives_check(&PrimitivesConfig {
                samples: trials,
                seed,
                workers,
                a,
                b,
            })?;
            emit(&report.render(format), out)?;
            Ok(report.passed)
        }
    }
}

fn error_object(kind: &str, message: &str) -> String {
    json!({
        "schema": SCHEMA_VERSION,
        "error": { "kind": kind, "message": message },
    })
    .to_string()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            println!("{}", error_object("usage", e.to_string().trim()));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            println!("{}", error_object(e.kind(), &e.to_string()));
            ExitCode::from(2)
        }
    }
}
