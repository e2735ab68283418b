use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use tscale::harness::{self, Format, Profile, SuiteReport};
use tscale::inequality::TheoremId;

#[derive(Parser)]
#[command(name = "tscale", version, about = "Check delta-calculus inequalities on time scales")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the checks listed in a scenario file.
    Verify {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate seeded scenarios and run their checks.
    Fuzz {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        profile: Profile,
        #[arg(long, default_value_t = 4)]
        parallelism: usize,
        #[arg(long, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Identity residuals at every probe point of the scenario window.
    Identity {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare a classical bound with the general form it specialises.
    Reduce {
        #[arg(long)]
        check: TheoremId,
        #[arg(long)]
        scenario: PathBuf,
    },
}

fn finish(report: &SuiteReport, format: Format, out: Option<PathBuf>) -> tscale::Result<ExitCode> {
    harness::emit_report(report, format, out.as_deref())?;
    let s = &report.summary;
    eprintln!("passed {} failed {} errored {}", s.passed, s.failed, s.errored);
    Ok(if s.failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn run(cli: Cli) -> tscale::Result<ExitCode> {
    match cli.command {
        Command::Verify { scenario, format, out } => {
            let s = harness::load_scenario(&scenario)?;
            finish(&harness::run_suite(&[s], 1)?, format, out)
        }
        Command::Fuzz { seed, count, profile, parallelism, format, out } => {
            let scenarios = harness::generate_scenarios(seed, count, profile);
            let mut report = harness::run_suite(&scenarios, parallelism)?;
            report.summary.seed = Some(seed);
            finish(&report, format, out)
        }
        Command::Identity { scenario, format, out } => {
            let s = harness::load_scenario(&scenario)?;
            finish(&SuiteReport::from_records(harness::identity_records(&s), None), format, out)
        }
        Command::Reduce { check, scenario } => {
            let s = harness::load_scenario(&scenario)?;
            let red = harness::reduce(&s, check)?;
            let text = serde_json::to_string_pretty(&red).map_err(|e| tscale::Error::Io(e.to_string()))?;
            writeln!(std::io::stdout(), "{text}")?;
            Ok(if red.coherent { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error [{}]: {e}", e.kind());
            ExitCode::from(2)
        }
    }
}
