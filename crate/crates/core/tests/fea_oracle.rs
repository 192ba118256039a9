mod support;

use proptest::prelude::*;
use support::equilibrium::free_node_imbalance;
use support::joints::{bar_forces, fixtures};
use support::random::{frame_design, solvable_design};
use truss_agents::fea::{analyze, assemble_and_solve, member_forces, objective_rank, EvaluationResult};
use truss_agents::model::{NodeKind, Point2D, Scenario, TrussDesign};

fn scenario() -> Scenario {
    Scenario::unconstrained()
}

fn axial(d: &TrussDesign) -> Vec<f64> {
    let s = scenario();
    let u = assemble_and_solve(d, &s).expect("solvable");
    member_forces(d, &s, &u).iter().map(|f| f.axial_force).collect()
}

#[test]
fn fixtures_are_determinate() {
    for f in fixtures() {
        assert!(f.is_determinate(), "{}", f.name);
    }
    assert!(fixtures().len() >= 5);
}

#[test]
fn two_bar_hand_statics() {
    let f = &fixtures()[0];
    let expected = -1000.0 / 2f64.sqrt();
    for got in bar_forces(f).unwrap() {
        assert!((got - expected).abs() < 1e-9);
    }
    for got in axial(&frame_design(f)) {
        assert!((got / expected - 1.0).abs() < 1e-6, "{got}");
    }
}

#[test]
fn stiffness_forces_match_joint_statics() {
    for f in fixtures() {
        let oracle = bar_forces(&f).unwrap();
        let got = axial(&frame_design(&f));
        let scale = oracle.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        for (k, (g, o)) in got.iter().zip(&oracle).enumerate() {
            assert!((g - o).abs() <= 1e-6 * o.abs().max(1e-6 * scale), "{} bar {k}: {g} vs {o}", f.name);
        }
    }
}

#[test]
fn fixture_forces_do_not_depend_on_sizes() {
    for f in fixtures() {
        let base = axial(&frame_design(&f));
        let mut d = frame_design(&f);
        for (k, m) in d.members.iter_mut().enumerate() {
            m.size_index = 1 + (k as u8 * 3) % 10;
        }
        for (a, b) in base.iter().zip(axial(&d)) {
            assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
        }
    }
}

fn mirrored(d: &TrussDesign, axis: f64) -> TrussDesign {
    let mut m = d.clone();
    for n in &mut m.nodes {
        n.pos = Point2D::new(2.0 * axis - n.pos.x, n.pos.y);
        n.applied_load = Point2D::new(-n.applied_load.x, n.applied_load.y);
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn free_nodes_are_in_equilibrium(seed in any::<u64>()) {
        let d = solvable_design(seed);
        prop_assert!(free_node_imbalance(&d, &axial(&d)) < 1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn forces_scale_with_loads(seed in any::<u64>(), k in 0.1f64..10.0) {
        let d = solvable_design(seed);
        let mut scaled = d.clone();
        for n in &mut scaled.nodes {
            n.applied_load = Point2D::new(k * n.applied_load.x, k * n.applied_load.y);
        }
        let (a, b) = (axial(&d), axial(&scaled));
        let scale = a.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((k * x - y).abs() <= 1e-9 * (k * scale));
        }
    }

    #[test]
    fn mirror_image_has_the_same_forces(seed in any::<u64>(), axis in -5.0f64..15.0) {
        let s = scenario();
        let d = solvable_design(seed);
        let m = mirrored(&d, axis);
        let (a, b) = (analyze(&d, &s), analyze(&m, &s));
        prop_assert!((a.eval.fos / b.eval.fos - 1.0).abs() < 1e-9);
        let scale = a.forces.iter().fold(0.0_f64, |m, f| m.max(f.axial_force.abs()));
        for (x, y) in a.forces.iter().zip(&b.forces) {
            prop_assert!((x.axial_force - y.axial_force).abs() <= 1e-9 * scale);
        }
    }

    #[test]
    fn fos_is_the_weakest_member(seed in any::<u64>()) {
        let s = scenario();
        let d = solvable_design(seed);
        let a = analyze(&d, &s);
        let worst = a
            .forces
            .iter()
            .filter(|f| f.axial_force.abs() >= 1e-9)
            .map(|f| f.capacity / f.axial_force.abs())
            .fold(truss_agents::fea::ZERO_DEMAND_FOS, f64::min);
        prop_assert!((a.eval.fos / worst - 1.0).abs() < 1e-12);
        prop_assert_eq!(a.eval.feasible, a.eval.fos >= 1.0);
        prop_assert!((a.eval.swr.unwrap() - a.eval.fos / a.eval.mass).abs() <= 1e-12 * a.eval.swr.unwrap());
    }
}

fn arb_eval() -> impl Strategy<Value = EvaluationResult> {
    (any::<bool>(), 0u8..4, 0u8..4, 1u8..4).prop_map(|(feasible, f, s, m)| {
        let fos = if feasible { 1.0 + f as f64 } else { 0.25 * f as f64 };
        let mass = m as f64 * 10.0;
        EvaluationResult { fos, mass, swr: Some(s as f64 / mass), feasible, solvable: true }
    })
}

proptest! {
    #[test]
    fn objective_rank_is_a_total_order(a in arb_eval(), b in arb_eval(), c in arb_eval()) {
        prop_assert_eq!(objective_rank(&a, &b), objective_rank(&b, &a).reverse());
        prop_assert!(objective_rank(&a, &a).is_eq());
        if objective_rank(&a, &b).is_ge() && objective_rank(&b, &c).is_ge() {
            prop_assert!(objective_rank(&a, &c).is_ge());
        }
        if objective_rank(&a, &b).is_gt() && objective_rank(&b, &c).is_gt() {
            prop_assert!(objective_rank(&a, &c).is_gt());
        }
    }
}

#[test]
fn unsupported_design_is_unsolvable() {
    let s = scenario();
    let mut d = frame_design(&fixtures()[0]);
    for n in &mut d.nodes {
        if n.kind == NodeKind::Support {
            n.kind = NodeKind::Free;
        }
    }
    assert!(assemble_and_solve(&d, &s).is_err());
    let e = analyze(&d, &s).eval;
    assert!(!e.solvable && !e.feasible && e.fos == 0.0);
}
