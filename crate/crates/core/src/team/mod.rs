//! Teams of agents sharing a design pool, their traces and aggregate metrics.

mod metrics;
mod replay;
mod trace;

pub use metrics::{aggregate, cumulative_best_rswr, MeanStderr, VariantReport};
pub use replay::{replay_records, ReplayError, ReplaySummary};
pub use trace::{read_trace, write_trace, TeamTrace, TraceError, TraceRecord};

use std::cmp::Ordering;

use rand::Rng;

use crate::error::VisualError;
use crate::fea::{evaluate, objective_rank, EvaluationResult};
use crate::model::{Node, NodeKind, Point2D, Scenario, TrussDesign, MIN_NODE_SPACING};
use crate::policy::{agent_step, AgentConfig, AgentState, StepOutcome};
use crate::seed::{agent_rng, agent_seed, AgentRng};
use crate::visual::{HeatmapSuggester, SyntheticSuggester};

const MAX_PLACEMENT_ATTEMPTS: usize = 10_000;

/// Fixed nodes plus `n_init` free nodes drawn uniformly inside the bounds,
/// away from obstacles and at least the minimum spacing from other nodes.
pub fn initial_state(scenario: &Scenario, n_init: usize, rng: &mut AgentRng) -> TrussDesign {
    let mut design = scenario.seed_design();
    let b = scenario.bounds;
    for _ in 0..n_init {
        for _ in 0..MAX_PLACEMENT_ATTEMPTS {
            let pos = Point2D::new(rng.gen_range(b.min.x..=b.max.x), rng.gen_range(b.min.y..=b.max.y));
            if scenario.point_in_obstacle(&pos) || design.nodes.iter().any(|n| n.pos.distance(&pos) < MIN_NODE_SPACING) {
                continue;
            }
            let id = design.next_node_id();
            design.nodes.push(Node { id, pos, kind: NodeKind::Free, applied_load: Point2D::default() });
            break;
        }
    }
    design
}

/// Index of the best evaluation; the lowest index wins ties.
pub fn best_index(evals: &[EvaluationResult]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, e) in evals.iter().enumerate() {
        if best.map_or(true, |b| objective_rank(e, &evals[b]) == Ordering::Greater) {
            best = Some(i);
        }
    }
    best
}

/// Every agent takes a copy of the pool's best design.
pub fn synchronize(designs: &[TrussDesign], scenario: &Scenario) -> Vec<TrussDesign> {
    let evals: Vec<_> = designs.iter().map(|d| evaluate(d, scenario)).collect();
    match best_index(&evals) {
        Some(b) => vec![designs[b].clone(); designs.len()],
        None => Vec::new(),
    }
}

/// Identity of one team run.
#[derive(Debug, Clone, PartialEq)]
pub struct TeamSpec {
    pub team: usize,
    pub team_seed: u64,
}

pub fn run_team(scenario: &Scenario, config: &AgentConfig, spec: &TeamSpec) -> Result<TeamTrace, VisualError> {
    let suggester = SyntheticSuggester::new(config.synth.clone(), config.inference.resolution);
    run_team_with(scenario, config, spec, &suggester)
}

/// Agents step in index order each iteration; after every iteration that is
/// a multiple of the interaction interval all agents adopt the best design.
pub fn run_team_with(
    scenario: &Scenario,
    config: &AgentConfig,
    spec: &TeamSpec,
    suggester: &dyn HeatmapSuggester,
) -> Result<TeamTrace, VisualError> {
    let n = scenario.team_size;
    let mut records = Vec::new();
    let mut states = Vec::with_capacity(n);
    let mut designs = Vec::with_capacity(n);
    let mut evals = Vec::with_capacity(n);
    for agent in 0..n {
        let mut rng = agent_rng(spec.team_seed, agent);
        let design = initial_state(scenario, config.n_init, &mut rng);
        let eval = evaluate(&design, scenario);
        records.push(TraceRecord::Init {
            team: spec.team,
            agent,
            variant: config.variant,
            scenario: scenario.name.clone(),
            team_seed: spec.team_seed,
            agent_seed: agent_seed(spec.team_seed, agent),
            iteration_budget: scenario.iteration_budget,
            interaction_interval: scenario.interaction_interval,
            eval,
            design: design.clone(),
        });
        states.push(AgentState::new(rng));
        designs.push(design);
        evals.push(eval);
    }

    let mut finished = vec![false; n];
    for iteration in 1..=scenario.iteration_budget {
        if finished.iter().all(|&f| f) {
            break;
        }
        for agent in 0..n {
            if finished[agent] {
                continue;
            }
            match agent_step(&designs[agent], scenario, config, &mut states[agent], suggester)? {
                StepOutcome::Stepped { design, record } => {
                    records.push(TraceRecord::step(spec.team, agent, &record));
                    evals[agent] = record.eval;
                    designs[agent] = design;
                }
                StepOutcome::Finished { iteration } => {
                    records.push(TraceRecord::Finished { team: spec.team, agent, iteration });
                    finished[agent] = true;
                }
            }
        }
        if n > 1 && scenario.interaction_interval > 0 && iteration % scenario.interaction_interval == 0 {
            let source = best_index(&evals).expect("non-empty team");
            records.push(TraceRecord::Sync { team: spec.team, iteration, source_agent: source, eval: evals[source] });
            let best = designs[source].clone();
            for agent in 0..n {
                if agent != source {
                    designs[agent] = best.clone();
                    states[agent].adopt_foreign_design();
                }
                evals[agent] = evals[source];
            }
        }
    }
    Ok(TeamTrace::from_records(records).expect("run produces a well-formed trace"))
}
