#![allow(dead_code)]

use rand::Rng;
use truss_agents::actions::{apply, filter_candidates, Action, CandidateAction};
use truss_agents::fea::{analyze, evaluate, EvaluationResult};
use truss_agents::model::{Scenario, TrussDesign};
use truss_agents::seed::agent_rng;
use truss_agents::visual::{infer_candidates, synth_heatmap, Heatmap, InferenceConfig, SynthConfig};

use super::random::{rng, valid_design, warren};

pub struct State {
    pub scenario: Scenario,
    pub design: TrussDesign,
    pub heatmap: Heatmap,
    pub candidates: Vec<CandidateAction>,
}

pub fn with_candidates(scenario: Scenario, design: TrussDesign, seed: u64) -> State {
    let a = analyze(&design, &scenario);
    let heatmap = synth_heatmap(&design, &scenario, &a, &mut agent_rng(seed, 1), &SynthConfig::default(), 128);
    let mut candidates = infer_candidates(&heatmap, &design, &scenario, &InferenceConfig::default()).unwrap();
    let mut r = rng(seed);
    for m in &design.members {
        if r.gen_bool(0.3) {
            let member_id = m.id;
            candidates.push(
                match r.gen_range(0..3) {
                    0 => Action::IncreaseThickness { member_id },
                    1 => Action::DecreaseThickness { member_id },
                    _ => Action::DeleteMember { member_id },
                }
                .into(),
            );
        }
    }
    let candidates = filter_candidates(&candidates, &design, &scenario);
    State { scenario, design, heatmap, candidates }
}

/// Warren trusses of heavy members: feasible.
pub fn feasible_state(seed: u64) -> State {
    let s = Scenario::unconstrained();
    let mut r = rng(seed);
    let sizes: Vec<u8> = (0..15).map(|_| r.gen_range(6..=10)).collect();
    let d = warren(&s, r.gen_range(1.5..4.5), r.gen_range(-0.5..0.5), &sizes);
    assert!(evaluate(&d, &s).feasible);
    with_candidates(s, d, seed)
}

/// Slender trusses and partial designs: infeasible.
pub fn infeasible_state(seed: u64) -> State {
    let s = Scenario::unconstrained();
    let mut r = rng(seed);
    let d = if seed % 2 == 0 {
        let sizes: Vec<u8> = (0..15).map(|_| r.gen_range(1..=2)).collect();
        warren(&s, r.gen_range(1.5..4.5), 0.0, &sizes)
    } else {
        valid_design(&s, seed, r.gen_range(0..40))
    };
    assert!(!evaluate(&d, &s).feasible);
    with_candidates(s, d, seed)
}

fn better(a: &EvaluationResult, b: &EvaluationResult) -> bool {
    match (a.feasible, b.feasible) {
        (true, false) => true,
        (false, true) => false,
        (true, true) => a.fos / a.mass > b.fos / b.mass,
        (false, false) => a.fos > b.fos,
    }
}

/// Applies and evaluates every candidate on its own and keeps the first best.
pub fn brute_force_pick(st: &State) -> Option<usize> {
    let mut best: Option<(usize, EvaluationResult)> = None;
    for (i, c) in st.candidates.iter().enumerate() {
        let next = apply(&c.action, &st.design, &st.scenario).unwrap();
        let e = evaluate(&next, &st.scenario);
        if best.map_or(true, |(_, b)| better(&e, &b)) {
            best = Some((i, e));
        }
    }
    best.map(|(i, _)| i)
}
