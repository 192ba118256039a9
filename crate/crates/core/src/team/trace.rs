use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::best_index;
use crate::actions::Action;
use crate::fea::EvaluationResult;
use crate::model::TrussDesign;
use crate::policy::{SelectorMode, StepRecord, Variant};

/// One line of a JSON-lines trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TraceRecord {
    Init {
        team: usize,
        agent: usize,
        variant: Variant,
        scenario: String,
        team_seed: u64,
        agent_seed: u64,
        iteration_budget: usize,
        interaction_interval: usize,
        eval: EvaluationResult,
        design: TrussDesign,
    },
    Step {
        team: usize,
        agent: usize,
        iteration: usize,
        action: Action,
        candidates: usize,
        fos: f64,
        mass: f64,
        swr: Option<f64>,
        feasible: bool,
        solvable: bool,
        selector_mode: SelectorMode,
    },
    /// The agent found no candidate actions at `iteration` and stopped.
    Finished { team: usize, agent: usize, iteration: usize },
    /// After `iteration`, every agent adopted `source_agent`'s design.
    Sync { team: usize, iteration: usize, source_agent: usize, eval: EvaluationResult },
}

impl TraceRecord {
    pub fn step(team: usize, agent: usize, r: &StepRecord) -> Self {
        TraceRecord::Step {
            team,
            agent,
            iteration: r.iteration,
            action: r.action,
            candidates: r.candidates,
            fos: r.eval.fos,
            mass: r.eval.mass,
            swr: r.eval.swr,
            feasible: r.eval.feasible,
            solvable: r.eval.solvable,
            selector_mode: r.selector_mode,
        }
    }

    pub fn iteration(&self) -> usize {
        match *self {
            TraceRecord::Init { .. } => 0,
            TraceRecord::Step { iteration, .. }
            | TraceRecord::Finished { iteration, .. }
            | TraceRecord::Sync { iteration, .. } => iteration,
        }
    }

    /// Evaluation logged by a step record.
    pub fn step_eval(&self) -> Option<EvaluationResult> {
        match *self {
            TraceRecord::Step { fos, mass, swr, feasible, solvable, .. } => {
                Some(EvaluationResult { fos, mass, swr, feasible, solvable })
            }
            _ => None,
        }
    }
}

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("trace line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("malformed trace: {0}")]
    Malformed(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// A team run: the raw records plus the series derived from them.
#[derive(Debug, Clone, PartialEq)]
pub struct TeamTrace {
    pub team: usize,
    pub variant: Variant,
    pub scenario: String,
    pub team_seed: u64,
    pub iteration_budget: usize,
    pub interaction_interval: usize,
    pub records: Vec<TraceRecord>,
    /// Last iteration in which anything happened.
    pub iterations: usize,
    /// Best evaluation held by any agent after each iteration (index 0 is
    /// iteration 1).
    pub team_best: Vec<EvaluationResult>,
    pub final_evals: Vec<EvaluationResult>,
    pub steps_taken: Vec<usize>,
    pub finished_at: Vec<Option<usize>>,
}

fn malformed(msg: impl Into<String>) -> TraceError {
    TraceError::Malformed(msg.into())
}

impl TeamTrace {
    pub fn agents(&self) -> usize {
        self.final_evals.len()
    }

    pub fn total_steps(&self) -> usize {
        self.steps_taken.iter().sum()
    }

    pub fn from_records(records: Vec<TraceRecord>) -> Result<Self, TraceError> {
        let inits: Vec<_> = records.iter().take_while(|r| matches!(r, TraceRecord::Init { .. })).collect();
        let Some(TraceRecord::Init { team, variant, scenario, team_seed, iteration_budget, interaction_interval, .. }) =
            inits.first().map(|r| (*r).clone())
        else {
            return Err(malformed("trace has no init records"));
        };
        let n = inits.len();
        let mut evals = Vec::with_capacity(n);
        for (i, r) in inits.iter().enumerate() {
            let TraceRecord::Init { agent, team: t, eval, .. } = r else { unreachable!() };
            if *agent != i || *t != team {
                return Err(malformed(format!("init record {i} names team {t} agent {agent}")));
            }
            evals.push(*eval);
        }

        let mut steps_taken = vec![0; n];
        let mut finished_at: Vec<Option<usize>> = vec![None; n];
        let mut team_best = Vec::new();
        let mut current = 0;
        let flush = |upto: usize, team_best: &mut Vec<EvaluationResult>, evals: &[EvaluationResult]| {
            while team_best.len() < upto {
                team_best.push(evals[best_index(evals).expect("non-empty team")]);
            }
        };
        for r in &records[n..] {
            let it = r.iteration();
            if it == 0 || it > iteration_budget {
                return Err(malformed(format!("iteration {it} outside 1..={iteration_budget}")));
            }
            if it < current {
                return Err(malformed(format!("iteration {it} follows iteration {current}")));
            }
            if it > current {
                flush(current, &mut team_best, &evals);
                current = it;
            }
            match r {
                TraceRecord::Init { .. } => return Err(malformed("init record after the header")),
                TraceRecord::Step { agent, team: t, .. } | TraceRecord::Finished { agent, team: t, .. } => {
                    if *t != team || *agent >= n {
                        return Err(malformed(format!("record for team {t} agent {agent}")));
                    }
                    if finished_at[*agent].is_some() {
                        return Err(malformed(format!("agent {agent} acts after finishing")));
                    }
                    match r.step_eval() {
                        Some(e) => {
                            evals[*agent] = e;
                            steps_taken[*agent] += 1;
                        }
                        None => finished_at[*agent] = Some(it),
                    }
                }
                TraceRecord::Sync { source_agent, eval, team: t, .. } => {
                    if *t != team || *source_agent >= n {
                        return Err(malformed(format!("sync from team {t} agent {source_agent}")));
                    }
                    flush(current, &mut team_best, &evals);
                    evals.iter_mut().for_each(|e| *e = *eval);
                }
            }
        }
        flush(current, &mut team_best, &evals);

        Ok(Self {
            team,
            variant,
            scenario,
            team_seed,
            iteration_budget,
            interaction_interval,
            records,
            iterations: current,
            team_best,
            final_evals: evals,
            steps_taken,
            finished_at,
        })
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = Vec::new();
        write_trace(&mut out, &self.records).expect("writing to memory");
        String::from_utf8(out).expect("json is utf-8")
    }
}

pub fn write_trace<W: Write>(mut w: W, records: &[TraceRecord]) -> io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Parses JSON lines; blank lines are skipped.
pub fn read_trace<R: BufRead>(r: R) -> Result<Vec<TraceRecord>, TraceError> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).map_err(|e| TraceError::Parse { line: i + 1, message: e.to_string() })?;
        out.push(rec);
    }
    Ok(out)
}
