//! Experiment harness around the agent library: config loading, seeded
//! multi-team runs, reports, design evaluation, rendering and trace audits.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use truss_agents::fea::{evaluate, EvaluationResult};
use truss_agents::model::{validate_design, Scenario, TrussDesign, Violation};
use truss_agents::policy::{AgentConfig, SelectionWeights, Variant};
use truss_agents::seed::team_seed;
use truss_agents::team::{
    aggregate, best_index, cumulative_best_rswr, read_trace, replay_records, run_team, write_trace, ReplayError,
    ReplaySummary, TeamSpec, TeamTrace, VariantReport,
};
use truss_agents::visual::{render, write_pgm};

pub const THREADS_ENV: &str = "TRUSS_AGENTS_THREADS";
pub const RESOLUTION: usize = 128;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Validation(String),
    #[error("replay mismatch at iteration {iteration}: {message}")]
    Replay { iteration: usize, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Io(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Replay { .. } => 4,
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn read_input(path: &Path, what: &str) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {what} {}: {e}", path.display())))
}

pub fn load_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text = read_input(path, "scenario file")?;
    Scenario::from_json(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn load_design(path: &Path) -> Result<TrussDesign, CliError> {
    let text = read_input(path, "design file")?;
    TrussDesign::from_json(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<SelectionWeights>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub burst_length: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_init: Option<usize>,
}

impl AgentOverrides {
    pub fn agent_config(&self, variant: Variant) -> AgentConfig {
        let mut c = AgentConfig::for_variant(variant);
        if let Some(w) = self.weights {
            c.weights = w;
        }
        if let Some(b) = self.burst_length {
            c.burst_length = b;
        }
        if let Some(n) = self.n_init {
            c.n_init = n;
        }
        c
    }
}

fn all_variants() -> Vec<Variant> {
    Variant::ALL.to_vec()
}

fn default_teams() -> usize {
    16
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: PathBuf,
    #[serde(default = "all_variants")]
    pub variants: Vec<Variant>,
    #[serde(default = "default_teams")]
    pub teams: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default)]
    pub agent: AgentOverrides,
    /// Worker threads; unset lets the pool decide.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(scenario: impl Into<PathBuf>, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            scenario: scenario.into(),
            variants: all_variants(),
            teams: default_teams(),
            base_seed: 0,
            out_dir: out_dir.into(),
            agent: AgentOverrides::default(),
            threads: None,
        }
    }

    /// Reads a config file. Relative paths inside it are taken relative to
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = read_input(path, "config file")?;
        let mut cfg: Self =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        if cfg.scenario.is_relative() {
            cfg.scenario = base.join(&cfg.scenario);
        }
        if cfg.out_dir.is_relative() {
            cfg.out_dir = base.join(&cfg.out_dir);
        }
        Ok(cfg)
    }

    pub fn check(&self) -> Result<(), CliError> {
        if self.teams == 0 {
            return Err(CliError::Config("teams must be at least 1".into()));
        }
        if self.variants.is_empty() {
            return Err(CliError::Config("at least one variant is required".into()));
        }
        let mut seen = self.variants.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.variants.len() {
            return Err(CliError::Config("variants must not repeat".into()));
        }
        if self.threads == Some(0) {
            return Err(CliError::Config("threads must be at least 1".into()));
        }
        for v in &self.variants {
            self.agent.agent_config(*v).check().map_err(CliError::Config)?;
        }
        Ok(())
    }

    /// Thread count after the environment override.
    pub fn effective_threads(&self) -> Result<Option<usize>, CliError> {
        match std::env::var(THREADS_ENV) {
            Ok(v) => match v.trim().parse::<usize>() {
                Ok(n) if n > 0 => Ok(Some(n)),
                _ => Err(CliError::Config(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
            },
            Err(_) => Ok(self.threads),
        }
    }
}

pub fn parse_variants(list: &str) -> Result<Vec<Variant>, CliError> {
    list.split(',').filter(|s| !s.trim().is_empty()).map(|s| s.parse().map_err(CliError::Config)).collect()
}

/// One finished team run and where its trace was written.
#[derive(Debug, Clone)]
pub struct TeamRun {
    pub variant: Variant,
    pub team: usize,
    pub trace_path: PathBuf,
    pub trace: TeamTrace,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub runs: Vec<TeamRun>,
    pub reports: BTreeMap<Variant, VariantReport>,
    pub combined_csv: PathBuf,
}

impl RunOutput {
    pub fn runs_of(&self, variant: Variant) -> impl Iterator<Item = &TeamRun> {
        self.runs.iter().filter(move |r| r.variant == variant)
    }
}

pub fn trace_path(out_dir: &Path, variant: Variant, team: usize) -> PathBuf {
    out_dir.join("traces").join(variant.as_str()).join(format!("team_{team:02}.jsonl"))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| io_error(path, e))
}

fn write_trace_file(path: &Path, trace: &TeamTrace) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    }
    let file = fs::File::create(path).map_err(|e| io_error(path, e))?;
    let mut w = BufWriter::new(file);
    write_trace(&mut w, &trace.records).map_err(|e| io_error(path, e))?;
    w.flush().map_err(|e| io_error(path, e))
}

fn report_csv(report: &VariantReport) -> String {
    let mut out = String::from("iteration,mean_rswr,stderr_rswr\n");
    for (i, m) in report.cumulative_best_rswr.iter().enumerate() {
        let _ = writeln!(out, "{},{},{}", i + 1, m.mean, m.stderr);
    }
    out
}

/// Long format: one row per variant, team and iteration. Runs that ended
/// early repeat their last value up to the budget.
fn combined_csv(runs: &[TeamRun]) -> String {
    let mut out = String::from("variant,team,iteration,cumulative_best_rswr\n");
    for r in runs {
        let series = cumulative_best_rswr(&r.trace);
        let last = series.last().copied().unwrap_or(0.0);
        for i in 0..r.trace.iteration_budget {
            let _ = writeln!(out, "{},{},{},{}", r.variant, r.team, i + 1, series.get(i).copied().unwrap_or(last));
        }
    }
    out
}

/// The best final design of a team, rebuilt from its trace.
pub fn best_final_design(trace: &TeamTrace, scenario: &Scenario) -> Result<TrussDesign, CliError> {
    let mut designs: Vec<TrussDesign> = Vec::new();
    replay_records(&trace.records, scenario, |agent, _, d| {
        if agent == designs.len() {
            designs.push(d.clone());
        } else {
            designs[agent] = d.clone();
        }
    })
    .map_err(|e| replay_error(&e))?;
    let evals: Vec<EvaluationResult> = designs.iter().map(|d| evaluate(d, scenario)).collect();
    let best = best_index(&evals).ok_or_else(|| CliError::Validation("trace has no agents".into()))?;
    Ok(designs.swap_remove(best))
}

/// Runs every (variant, team) job, then writes per-variant reports, the
/// combined series and a snapshot of each variant's best final design.
pub fn cmd_run(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    cfg.check()?;
    let scenario = load_scenario(&cfg.scenario)?;
    let jobs: Vec<(Variant, usize)> =
        cfg.variants.iter().flat_map(|&v| (0..cfg.teams).map(move |t| (v, t))).collect();

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cfg.effective_threads()? {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Config(format!("thread pool: {e}")))?;

    let results: Vec<Result<TeamRun, CliError>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(variant, team)| {
                let spec = TeamSpec { team, team_seed: team_seed(cfg.base_seed, team) };
                let trace = run_team(&scenario, &cfg.agent.agent_config(variant), &spec)
                    .map_err(|e| CliError::Config(format!("{variant} team {team}: {e}")))?;
                let trace_path = trace_path(&cfg.out_dir, variant, team);
                write_trace_file(&trace_path, &trace)?;
                Ok(TeamRun { variant, team, trace_path, trace })
            })
            .collect()
    });
    let runs = results.into_iter().collect::<Result<Vec<_>, _>>()?;

    let mut reports = BTreeMap::new();
    for &v in &cfg.variants {
        let traces: Vec<TeamTrace> = runs.iter().filter(|r| r.variant == v).map(|r| r.trace.clone()).collect();
        let report = aggregate(&traces).expect("teams >= 1");
        let dir = cfg.out_dir.join("reports");
        let json = serde_json::to_string_pretty(&report).expect("report serializes");
        write_file(&dir.join(format!("{v}.json")), json.as_bytes())?;
        write_file(&dir.join(format!("{v}.csv")), report_csv(&report).as_bytes())?;

        let finals: Vec<EvaluationResult> =
            traces.iter().map(|t| t.final_evals[best_index(&t.final_evals).expect("agents")]).collect();
        let team = best_index(&finals).expect("teams >= 1");
        let design = best_final_design(&traces[team], &scenario)?;
        let snap = cfg.out_dir.join("snapshots");
        write_file(&snap.join(format!("{v}.best.pgm")), &write_pgm(&render(&design, &scenario, RESOLUTION)))?;
        write_file(&snap.join(format!("{v}.best.json")), design.to_json().as_bytes())?;
        reports.insert(v, report);
    }
    let combined = cfg.out_dir.join("cumulative_best_rswr.csv");
    write_file(&combined, combined_csv(&runs).as_bytes())?;
    Ok(RunOutput { runs, reports, combined_csv: combined })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub fos: f64,
    pub mass: f64,
    pub swr: Option<f64>,
    pub feasible: bool,
    pub solvable: bool,
}

impl From<EvaluationResult> for EvaluationReport {
    fn from(e: EvaluationResult) -> Self {
        Self { fos: e.fos, mass: e.mass, swr: e.swr, feasible: e.feasible, solvable: e.solvable }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluateOutput {
    pub report: EvaluationReport,
    pub violations: Vec<Violation>,
}

impl EvaluateOutput {
    pub fn exit_code(&self) -> i32 {
        if self.violations.is_empty() {
            0
        } else {
            3
        }
    }
}

pub fn cmd_evaluate(design: &Path, scenario: &Path) -> Result<EvaluateOutput, CliError> {
    let scenario = load_scenario(scenario)?;
    let design = load_design(design)?;
    Ok(EvaluateOutput { report: evaluate(&design, &scenario).into(), violations: validate_design(&design, &scenario) })
}

pub fn cmd_render(design: &Path, scenario: &Path, out: &Path) -> Result<(), CliError> {
    let scenario = load_scenario(scenario)?;
    let design = load_design(design)?;
    let bytes = write_pgm(&render(&design, &scenario, RESOLUTION));
    fs::write(out, bytes).map_err(|e| io_error(out, e))
}

fn replay_error(e: &ReplayError) -> CliError {
    match e.iteration() {
        Some(iteration) => CliError::Replay { iteration, message: e.to_string() },
        None => CliError::Config(e.to_string()),
    }
}

/// Re-applies a trace and checks every logged evaluation and every rebuilt
/// state's validity.
pub fn cmd_replay(trace: &Path, scenario: &Path) -> Result<ReplaySummary, CliError> {
    let scenario = load_scenario(scenario)?;
    let file = fs::File::open(trace)
        .map_err(|e| CliError::Config(format!("cannot read trace file {}: {e}", trace.display())))?;
    let records =
        read_trace(BufReader::new(file)).map_err(|e| CliError::Config(format!("{}: {e}", trace.display())))?;
    let mut invalid: Option<String> = None;
    let summary = replay_records(&records, &scenario, |agent, iteration, d| {
        if invalid.is_none() {
            let v = validate_design(d, &scenario);
            if !v.is_empty() {
                invalid = Some(format!("iteration {iteration}, agent {agent}: invalid design state {v:?}"));
            }
        }
    })
    .map_err(|e| replay_error(&e))?;
    match invalid {
        Some(msg) => Err(CliError::Validation(msg)),
        None => Ok(summary),
    }
}
