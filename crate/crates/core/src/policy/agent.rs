use serde::{Deserialize, Serialize};

use super::heuristic::{HeuristicState, HistoryEntry};
use super::select::{select_combination_with, select_goal_with, select_temporal, select_vanilla, SelectorMode};
use super::{AgentConfig, Variant};
use crate::actions::{apply, filter_candidates, Action, CandidateAction};
use crate::error::VisualError;
use crate::fea::{analyze, evaluate, EvaluationResult};
use crate::model::{Scenario, TrussDesign};
use crate::seed::AgentRng;
use crate::visual::{finalize, infer_raw, HeatmapSuggester};

#[derive(Debug, Clone, PartialEq)]
pub struct AgentState {
    pub rng: AgentRng,
    pub heuristic: HeuristicState,
    /// Members that connect a node added on the previous step, kept as
    /// candidates for the following steps.
    pub pending: Vec<CandidateAction>,
    /// Steps taken so far.
    pub iteration: usize,
}

impl AgentState {
    pub fn new(rng: AgentRng) -> Self {
        Self { rng, heuristic: HeuristicState::default(), pending: Vec::new(), iteration: 0 }
    }

    /// Called when the agent's design is replaced by another agent's.
    pub fn adopt_foreign_design(&mut self) {
        self.pending.clear();
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    /// 1-based iteration the step belongs to.
    pub iteration: usize,
    pub action: Action,
    pub candidates: usize,
    pub selector_mode: SelectorMode,
    pub eval: EvaluationResult,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StepOutcome {
    Stepped { design: TrussDesign, record: StepRecord },
    /// No candidate actions; the agent stops.
    Finished { iteration: usize },
}

/// One pass of the pipeline: evaluate, suggest a heatmap, infer and filter
/// candidates, select, apply.
pub fn agent_step(
    design: &TrussDesign,
    scenario: &Scenario,
    config: &AgentConfig,
    state: &mut AgentState,
    suggester: &dyn HeatmapSuggester,
) -> Result<StepOutcome, VisualError> {
    let iteration = state.iteration + 1;
    let analysis = analyze(design, scenario);
    let heatmap = suggester.suggest(design, scenario, &analysis, iteration, &mut state.rng);
    let raw = infer_raw(&heatmap, design, scenario, &config.inference)?;

    let mut pool = raw.clone();
    pool.extend(state.pending.iter().copied());
    let candidates = finalize(filter_candidates(&pool, design, scenario), config.inference.max_candidates);
    if candidates.is_empty() {
        return Ok(StepOutcome::Finished { iteration });
    }

    let feasible = analysis.eval.feasible;
    let (index, mode) = match config.variant {
        Variant::Vanilla => {
            (select_vanilla(&candidates, design, &heatmap, scenario).expect("non-empty"), SelectorMode::Vanilla)
        }
        Variant::Temporal => {
            let sel = select_temporal(&candidates, design, &heatmap, scenario, &state.heuristic, config.burst_length)
                .expect("non-empty");
            state.heuristic = sel.heuristic;
            (sel.index, sel.mode)
        }
        Variant::Goal => select_goal_with(&candidates, design, scenario, &heatmap, feasible).expect("non-empty"),
        Variant::Combination => {
            let sel = select_combination_with(
                &candidates,
                design,
                scenario,
                &heatmap,
                &state.heuristic,
                &config.weights,
                config.burst_length,
                &mut state.rng,
                feasible,
            )
            .expect("non-empty");
            state.heuristic = sel.heuristic;
            (sel.index, sel.mode)
        }
    };

    let chosen = candidates[index];
    let next = apply(&chosen.action, design, scenario).expect("filtered candidates apply");
    state.pending = follow_ups(&chosen, &raw, &state.pending, design);
    state.heuristic.record(HistoryEntry::taken(&chosen.action, design));
    state.iteration = iteration;

    let record =
        StepRecord { iteration, action: chosen.action, candidates: candidates.len(), selector_mode: mode, eval: evaluate(&next, scenario) };
    Ok(StepOutcome::Stepped { design: next, record })
}

/// Candidates to carry into the next step: the members an added node's blob
/// asked for, or the rest of an already carried set while it is being used.
fn follow_ups(
    chosen: &CandidateAction,
    raw: &[CandidateAction],
    pending: &[CandidateAction],
    before: &TrussDesign,
) -> Vec<CandidateAction> {
    match chosen.action {
        Action::AddNode { .. } => {
            let new_id = before.next_node_id();
            raw.iter()
                .filter(|c| c.source_blob.is_some() && c.source_blob == chosen.source_blob)
                .filter(|c| matches!(c.action, Action::AddMember { node_a, node_b } if node_a == new_id || node_b == new_id))
                .copied()
                .collect()
        }
        _ if pending.iter().any(|p| p.action == chosen.action) => {
            pending.iter().filter(|p| p.action != chosen.action).copied().collect()
        }
        _ => Vec::new(),
    }
}
