use thiserror::Error;

use super::{best_index, TraceRecord};
use crate::actions::apply;
use crate::fea::{evaluate, EvaluationResult};
use crate::model::{Scenario, TrussDesign};

pub const REPLAY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum ReplayError {
    #[error("iteration {iteration}, agent {agent}: logged {field} {logged} but recomputed {recomputed}")]
    Mismatch { iteration: usize, agent: usize, field: &'static str, logged: String, recomputed: String },
    #[error("iteration {iteration}, agent {agent}: logged action cannot be applied: {reason}")]
    Inapplicable { iteration: usize, agent: usize, reason: String },
    #[error("iteration {iteration}: sync source {logged} is not the best agent ({recomputed})")]
    WrongSyncSource { iteration: usize, logged: usize, recomputed: usize },
    #[error("malformed trace: {0}")]
    Malformed(String),
}

impl ReplayError {
    pub fn iteration(&self) -> Option<usize> {
        match self {
            ReplayError::Mismatch { iteration, .. }
            | ReplayError::Inapplicable { iteration, .. }
            | ReplayError::WrongSyncSource { iteration, .. } => Some(*iteration),
            ReplayError::Malformed(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ReplaySummary {
    pub steps: usize,
    pub syncs: usize,
    pub states: usize,
}

fn close(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= REPLAY_TOLERANCE * a.abs().max(b.abs())
}

fn compare(iteration: usize, agent: usize, logged: &EvaluationResult, got: &EvaluationResult) -> Result<(), ReplayError> {
    let mismatch = |field, l: String, r: String| {
        Err(ReplayError::Mismatch { iteration, agent, field, logged: l, recomputed: r })
    };
    if !close(logged.fos, got.fos) {
        return mismatch("fos", logged.fos.to_string(), got.fos.to_string());
    }
    if !close(logged.mass, got.mass) {
        return mismatch("mass", logged.mass.to_string(), got.mass.to_string());
    }
    let swr_ok = match (logged.swr, got.swr) {
        (Some(a), Some(b)) => close(a, b),
        (None, None) => true,
        _ => false,
    };
    if !swr_ok {
        return mismatch("swr", format!("{:?}", logged.swr), format!("{:?}", got.swr));
    }
    if logged.feasible != got.feasible {
        return mismatch("feasible", logged.feasible.to_string(), got.feasible.to_string());
    }
    if logged.solvable != got.solvable {
        return mismatch("solvable", logged.solvable.to_string(), got.solvable.to_string());
    }
    Ok(())
}

/// Rebuilds every design state from the logged initial designs and actions
/// and checks each logged evaluation against a fresh one. `visit` sees each
/// state (agent, iteration, design) as it is reconstructed, including the
/// copies handed out by a sync.
pub fn replay_records(
    records: &[TraceRecord],
    scenario: &Scenario,
    mut visit: impl FnMut(usize, usize, &TrussDesign),
) -> Result<ReplaySummary, ReplayError> {
    let mut designs: Vec<TrussDesign> = Vec::new();
    let mut evals: Vec<EvaluationResult> = Vec::new();
    let mut summary = ReplaySummary::default();
    for r in records {
        match r {
            TraceRecord::Init { agent, design, eval, .. } => {
                if *agent != designs.len() {
                    return Err(ReplayError::Malformed(format!("init for agent {agent} out of order")));
                }
                let got = evaluate(design, scenario);
                compare(0, *agent, eval, &got)?;
                visit(*agent, 0, design);
                designs.push(design.clone());
                evals.push(got);
                summary.states += 1;
            }
            TraceRecord::Step { agent, iteration, action, .. } => {
                let current = designs
                    .get(*agent)
                    .ok_or_else(|| ReplayError::Malformed(format!("step for unknown agent {agent}")))?;
                let next = apply(action, current, scenario).map_err(|e| ReplayError::Inapplicable {
                    iteration: *iteration,
                    agent: *agent,
                    reason: e.to_string(),
                })?;
                let got = evaluate(&next, scenario);
                compare(*iteration, *agent, &r.step_eval().expect("step record"), &got)?;
                visit(*agent, *iteration, &next);
                designs[*agent] = next;
                evals[*agent] = got;
                summary.steps += 1;
                summary.states += 1;
            }
            TraceRecord::Finished { .. } => {}
            TraceRecord::Sync { iteration, source_agent, eval, .. } => {
                let best = best_index(&evals).ok_or_else(|| ReplayError::Malformed("sync before init".into()))?;
                if best != *source_agent {
                    return Err(ReplayError::WrongSyncSource { iteration: *iteration, logged: *source_agent, recomputed: best });
                }
                compare(*iteration, best, eval, &evals[best])?;
                let design = designs[best].clone();
                for (agent, d) in designs.iter_mut().enumerate() {
                    *d = design.clone();
                    visit(agent, *iteration, d);
                }
                let e = evals[best];
                evals.iter_mut().for_each(|x| *x = e);
                summary.syncs += 1;
            }
        }
    }
    if designs.is_empty() {
        return Err(ReplayError::Malformed("trace has no init records".into()));
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policy::{AgentConfig, Variant};
    use crate::team::{run_team, TeamSpec};

    #[test]
    fn replay_accepts_and_detects_tampering() {
        let mut s = Scenario::unconstrained();
        s.iteration_budget = 100;
        let t = run_team(&s, &AgentConfig::for_variant(Variant::Goal), &TeamSpec { team: 0, team_seed: 5 }).unwrap();
        let summary = replay_records(&t.records, &s, |_, _, _| {}).unwrap();
        assert_eq!(summary.syncs, 2);
        assert!(summary.steps > 0);

        let mut bad = t.records.clone();
        let (pos, it) = bad
            .iter()
            .enumerate()
            .find_map(|(i, r)| matches!(r, TraceRecord::Step { iteration: 30, .. }).then_some((i, 30)))
            .unwrap();
        if let TraceRecord::Step { fos, .. } = &mut bad[pos] {
            *fos *= 1.01;
        }
        let err = replay_records(&bad, &s, |_, _, _| {}).unwrap_err();
        assert_eq!(err.iteration(), Some(it));
    }
}
