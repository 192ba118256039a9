use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use truss_agents_cli::{
    cmd_evaluate, cmd_render, cmd_replay, cmd_run, parse_variants, CliError, ExperimentConfig,
};

#[derive(Parser)]
#[command(name = "truss-agents", version, about = "Run and audit truss design agent experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every variant for every team and write traces and reports.
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        teams: Option<usize>,
        /// Comma-separated, e.g. `goal,combination`.
        #[arg(long)]
        variants: Option<String>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Print the evaluation of a design as JSON.
    Evaluate {
        #[arg(long)]
        design: PathBuf,
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Write the design's raster as a binary graymap.
    Render {
        #[arg(long)]
        design: PathBuf,
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rebuild a trace and check every logged evaluation.
    Replay {
        trace: PathBuf,
        #[arg(long)]
        scenario: PathBuf,
    },
}

macro_rules! out {
    ($($arg:tt)*) => {
        let _ = writeln!(io::stdout(), $($arg)*);
    };
}

fn run(command: Command) -> Result<i32, CliError> {
    match command {
        Command::Run { config, scenario, out, seed, teams, variants, threads } => {
            let mut cfg = match (&config, &scenario) {
                (Some(path), _) => ExperimentConfig::load(path)?,
                (None, Some(s)) => ExperimentConfig::new(s, "out"),
                (None, None) => return Err(CliError::Config("run needs --config or --scenario".into())),
            };
            if config.is_some() {
                if let Some(s) = scenario {
                    cfg.scenario = s;
                }
            }
            if let Some(o) = out {
                cfg.out_dir = o;
            }
            if let Some(s) = seed {
                cfg.base_seed = s;
            }
            if let Some(t) = teams {
                cfg.teams = t;
            }
            if let Some(v) = variants {
                cfg.variants = parse_variants(&v)?;
            }
            if threads.is_some() {
                cfg.threads = threads;
            }
            let output = cmd_run(&cfg)?;
            for (variant, report) in &output.reports {
                out!(
                    "{variant}: final best RSWR {:.6} ± {:.6} over {} teams, mean final FOS {:.3}",
                    report.final_best_rswr.mean, report.final_best_rswr.stderr, report.teams, report.final_fos.mean
                );
            }
            out!("wrote {} traces and {}", output.runs.len(), output.combined_csv.display());
            Ok(0)
        }
        Command::Evaluate { design, scenario } => {
            let out = cmd_evaluate(&design, &scenario)?;
            out!("{}", serde_json::to_string_pretty(&out.report).expect("report serializes"));
            for v in &out.violations {
                eprintln!("violation: {}", serde_json::to_string(v).expect("violation serializes"));
            }
            Ok(out.exit_code())
        }
        Command::Render { design, scenario, out } => {
            cmd_render(&design, &scenario, &out)?;
            Ok(0)
        }
        Command::Replay { trace, scenario } => {
            let s = cmd_replay(&trace, &scenario)?;
            out!("ok: {} steps, {} syncs, {} states", s.steps, s.syncs, s.states);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
