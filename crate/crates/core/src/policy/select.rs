use rand::Rng;
use serde::{Deserialize, Serialize};

use super::heuristic::{classify_heuristic, HeuristicState};
use super::SelectionWeights;
use crate::actions::{apply, CandidateAction, HeuristicLabel};
use crate::fea::{evaluate, objective_rank, EvaluationResult};
use crate::model::{Scenario, TrussDesign};
use crate::seed::AgentRng;
use crate::visual::{render_with, ssim, Heatmap, PixelMap, Raster};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectorMode {
    Vanilla,
    Temporal,
    Lookahead,
    Random,
}

impl SelectorMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            SelectorMode::Vanilla => "vanilla",
            SelectorMode::Temporal => "temporal",
            SelectorMode::Lookahead => "lookahead",
            SelectorMode::Random => "random",
        }
    }
}

/// A selector's pick: the candidate index, the path that chose it, and the
/// heuristic state to carry into the next step.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub index: usize,
    pub mode: SelectorMode,
    pub heuristic: HeuristicState,
}

/// Index of the maximum score; the first of equal maxima wins.
fn argmax_by<T>(items: &[T], better: impl Fn(&T, &T) -> bool) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, item) in items.iter().enumerate() {
        if best.map_or(true, |b| better(item, &items[b])) {
            best = Some(i);
        }
    }
    best
}

/// Renders next states at the heatmap's resolution and compares them with
/// the current render composited with the heatmap.
pub struct VanillaScorer<'a> {
    design: &'a TrussDesign,
    scenario: &'a Scenario,
    map: PixelMap,
    target: Raster,
}

impl<'a> VanillaScorer<'a> {
    pub fn new(design: &'a TrussDesign, scenario: &'a Scenario, heatmap: &Heatmap) -> Self {
        let map = PixelMap::new(scenario.bounds, heatmap.width, heatmap.height);
        let target = heatmap.composite(&render_with(design, &map));
        Self { design, scenario, map, target }
    }

    pub fn target(&self) -> &Raster {
        &self.target
    }

    /// SSIM of the candidate's next state against the target; inapplicable
    /// candidates score negative infinity.
    pub fn score(&self, candidate: &CandidateAction) -> f64 {
        match apply(&candidate.action, self.design, self.scenario) {
            Ok(next) => ssim(&render_with(&next, &self.map), &self.target).unwrap_or(f64::NEG_INFINITY),
            Err(_) => f64::NEG_INFINITY,
        }
    }

    pub fn scores(&self, candidates: &[CandidateAction]) -> Vec<f64> {
        candidates.iter().map(|c| self.score(c)).collect()
    }

    /// Best candidate among `indices`, which must be in ascending order.
    pub fn best_of(&self, candidates: &[CandidateAction], indices: &[usize]) -> Option<usize> {
        let scores: Vec<f64> = indices.iter().map(|&i| self.score(&candidates[i])).collect();
        argmax_by(&scores, |a, b| a > b).map(|k| indices[k])
    }
}

pub fn select_vanilla(
    candidates: &[CandidateAction],
    design: &TrussDesign,
    heatmap: &Heatmap,
    scenario: &Scenario,
) -> Option<usize> {
    if candidates.is_empty() {
        return None;
    }
    let scorer = VanillaScorer::new(design, scenario, heatmap);
    argmax_by(&scorer.scores(candidates), |a, b| a > b)
}

pub fn select_temporal(
    candidates: &[CandidateAction],
    design: &TrussDesign,
    heatmap: &Heatmap,
    scenario: &Scenario,
    state: &HeuristicState,
    burst_length: usize,
) -> Option<Selection> {
    if candidates.is_empty() {
        return None;
    }
    let labels: Vec<HeuristicLabel> =
        candidates.iter().map(|c| classify_heuristic(c, design, &state.history, scenario)).collect();
    let scorer = VanillaScorer::new(design, scenario, heatmap);
    let mut next = state.clone();

    if state.remaining_burst > 0 {
        let matching: Vec<usize> = (0..candidates.len()).filter(|&i| labels[i] == state.active).collect();
        if let Some(index) = scorer.best_of(candidates, &matching) {
            next.remaining_burst -= 1;
            return Some(Selection { index, mode: SelectorMode::Temporal, heuristic: next });
        }
    }
    let all: Vec<usize> = (0..candidates.len()).collect();
    let index = scorer.best_of(candidates, &all)?;
    next.active = labels[index];
    next.remaining_burst = burst_length.saturating_sub(1);
    Some(Selection { index, mode: SelectorMode::Temporal, heuristic: next })
}

/// Evaluation of every candidate's next state; `None` where it cannot apply.
pub fn lookahead_evaluations(
    candidates: &[CandidateAction],
    design: &TrussDesign,
    scenario: &Scenario,
) -> Vec<Option<EvaluationResult>> {
    candidates
        .iter()
        .map(|c| apply(&c.action, design, scenario).ok().map(|next| evaluate(&next, scenario)))
        .collect()
}

/// One-step lookahead argmax under [`objective_rank`].
pub fn lookahead_argmax(candidates: &[CandidateAction], design: &TrussDesign, scenario: &Scenario) -> Option<usize> {
    let evals = lookahead_evaluations(candidates, design, scenario);
    let mut best: Option<(usize, EvaluationResult)> = None;
    for (i, e) in evals.into_iter().enumerate() {
        let Some(e) = e else { continue };
        if best.as_ref().map_or(true, |(_, b)| objective_rank(&e, b).is_gt()) {
            best = Some((i, e));
        }
    }
    best.map(|(i, _)| i)
}

pub fn select_goal(
    candidates: &[CandidateAction],
    design: &TrussDesign,
    scenario: &Scenario,
    heatmap: &Heatmap,
) -> Option<usize> {
    let feasible = evaluate(design, scenario).feasible;
    select_goal_with(candidates, design, scenario, heatmap, feasible).map(|(i, _)| i)
}

pub(crate) fn select_goal_with(
    candidates: &[CandidateAction],
    design: &TrussDesign,
    scenario: &Scenario,
    heatmap: &Heatmap,
    feasible: bool,
) -> Option<(usize, SelectorMode)> {
    if feasible {
        lookahead_argmax(candidates, design, scenario).map(|i| (i, SelectorMode::Lookahead))
    } else {
        select_vanilla(candidates, design, heatmap, scenario).map(|i| (i, SelectorMode::Vanilla))
    }
}

#[allow(clippy::too_many_arguments)]
pub fn select_combination(
    candidates: &[CandidateAction],
    design: &TrussDesign,
    scenario: &Scenario,
    heatmap: &Heatmap,
    state: &HeuristicState,
    weights: &SelectionWeights,
    burst_length: usize,
    rng: &mut AgentRng,
) -> Option<Selection> {
    let feasible = evaluate(design, scenario).feasible;
    select_combination_with(candidates, design, scenario, heatmap, state, weights, burst_length, rng, feasible)
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn select_combination_with(
    candidates: &[CandidateAction],
    design: &TrussDesign,
    scenario: &Scenario,
    heatmap: &Heatmap,
    state: &HeuristicState,
    weights: &SelectionWeights,
    burst_length: usize,
    rng: &mut AgentRng,
    feasible: bool,
) -> Option<Selection> {
    if candidates.is_empty() {
        return None;
    }
    if !feasible {
        return select_temporal(candidates, design, heatmap, scenario, state, burst_length);
    }
    let u: f64 = rng.gen();
    if u < weights.heuristic {
        select_temporal(candidates, design, heatmap, scenario, state, burst_length)
    } else if u < weights.heuristic + weights.greedy {
        let index = lookahead_argmax(candidates, design, scenario)?;
        Some(Selection { index, mode: SelectorMode::Lookahead, heuristic: state.clone() })
    } else {
        let index = rng.gen_range(0..candidates.len());
        Some(Selection { index, mode: SelectorMode::Random, heuristic: state.clone() })
    }
}
