mod support;

use std::collections::HashSet;

use proptest::prelude::*;
use support::random::{apply_unchecked, random_action, rng, valid_design};
use truss_agents::actions::{apply, filter_candidates, is_applicable, Action, CandidateAction};
use truss_agents::model::{
    segment_intersects_obstacle, Member, MemberId, Node, NodeId, NodeKind, Point2D, Rect, Scenario, TrussDesign,
};
use truss_agents::validate_design;
use rand::Rng;

fn orient(a: Point2D, b: Point2D, c: Point2D) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

fn on_segment(a: Point2D, b: Point2D, p: Point2D) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

fn segments_meet(p: Point2D, q: Point2D, a: Point2D, b: Point2D) -> bool {
    let (d1, d2) = (orient(a, b, p), orient(a, b, q));
    let (d3, d4) = (orient(p, q, a), orient(p, q, b));
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(a, b, p))
        || (d2 == 0.0 && on_segment(a, b, q))
        || (d3 == 0.0 && on_segment(p, q, a))
        || (d4 == 0.0 && on_segment(p, q, b))
}

fn inside(r: &Rect, p: Point2D) -> bool {
    r.min.x <= p.x && p.x <= r.max.x && r.min.y <= p.y && p.y <= r.max.y
}

/// Endpoint containment or an edge crossing.
fn blocked(p: Point2D, q: Point2D, r: &Rect) -> bool {
    let corners = [r.min, Point2D::new(r.max.x, r.min.y), r.max, Point2D::new(r.min.x, r.max.y)];
    inside(r, p) || inside(r, q) || (0..4).any(|i| segments_meet(p, q, corners[i], corners[(i + 1) % 4]))
}

/// Every design rule re-checked from scratch.
fn brute_valid(d: &TrussDesign, s: &Scenario) -> bool {
    let ids: HashSet<_> = d.nodes.iter().map(|n| n.id).collect();
    if ids.len() != d.nodes.len() {
        return false;
    }
    for n in &d.nodes {
        let p = n.pos;
        if !(p.x.is_finite() && p.y.is_finite() && n.applied_load.x.is_finite() && n.applied_load.y.is_finite()) {
            return false;
        }
        if !inside(&s.bounds, p) || s.obstacles.iter().any(|o| inside(o, p)) {
            return false;
        }
        let loaded = n.applied_load.x != 0.0 || n.applied_load.y != 0.0;
        if loaded != (n.kind == NodeKind::Load) {
            return false;
        }
        if n.kind != NodeKind::Free && !s.fixed_nodes.contains(n) {
            return false;
        }
    }
    if s.fixed_nodes.iter().any(|f| !d.nodes.contains(f)) {
        return false;
    }
    for (i, a) in d.nodes.iter().enumerate() {
        for b in &d.nodes[i + 1..] {
            if (a.pos.x - b.pos.x).hypot(a.pos.y - b.pos.y) < 0.1 {
                return false;
            }
        }
    }
    let mut mids = HashSet::new();
    let mut pairs = HashSet::new();
    for m in &d.members {
        if !mids.insert(m.id) || m.node_a == m.node_b || !(1..=10).contains(&m.size_index) {
            return false;
        }
        if !pairs.insert((m.node_a.min(m.node_b), m.node_a.max(m.node_b))) {
            return false;
        }
        let (Some(a), Some(b)) = (d.node(m.node_a), d.node(m.node_b)) else { return false };
        if s.obstacles.iter().any(|o| blocked(a.pos, b.pos, o)) {
            return false;
        }
    }
    true
}

/// Random edits of a valid design, many of which break a rule.
fn scrambled(seed: u64) -> (Scenario, TrussDesign) {
    let s = Scenario::constrained();
    let mut d = valid_design(&s, seed, 30);
    let mut r = rng(seed ^ 0x5eed);
    for _ in 0..r.gen_range(0..3) {
        match r.gen_range(0..8) {
            0 => {
                let id = NodeId(r.gen_range(0..12));
                let pos = Point2D::new(r.gen_range(-1.0..11.0), r.gen_range(-1.0..6.0));
                d.nodes.push(Node::free(id, pos));
            }
            1 if !d.nodes.is_empty() => {
                let i = r.gen_range(0..d.nodes.len());
                d.nodes[i].pos.x += r.gen_range(-0.2..0.2);
            }
            2 if !d.nodes.is_empty() => {
                let i = r.gen_range(0..d.nodes.len());
                d.nodes[i].applied_load = Point2D::new(0.0, r.gen_range(-1.0..1.0));
            }
            3 if !d.nodes.is_empty() => {
                let i = r.gen_range(0..d.nodes.len());
                d.nodes[i].kind = [NodeKind::Free, NodeKind::Load, NodeKind::Support][r.gen_range(0..3)];
            }
            4 => d.members.push(Member {
                id: MemberId(r.gen_range(0..20)),
                node_a: NodeId(r.gen_range(0..12)),
                node_b: NodeId(r.gen_range(0..12)),
                size_index: r.gen_range(0..12),
            }),
            5 if !d.members.is_empty() => {
                let i = r.gen_range(0..d.members.len());
                d.members[i].size_index = r.gen_range(0..12);
            }
            6 if !d.nodes.is_empty() => {
                let i = r.gen_range(0..d.nodes.len());
                d.nodes.remove(i);
            }
            _ => {
                let pos = Point2D::new(r.gen_range(3.0..7.0), r.gen_range(1.5..5.0));
                d.nodes.push(Node::free(d.next_node_id(), pos));
            }
        }
    }
    (s, d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn validation_agrees_with_brute_force(seed in any::<u64>()) {
        let (s, d) = scrambled(seed);
        prop_assert_eq!(validate_design(&d, &s).is_empty(), brute_valid(&d, &s), "{:?}", validate_design(&d, &s));
    }

    #[test]
    fn obstacle_test_matches_edge_crossings(
        px in -1.0f64..11.0, py in -1.0f64..6.0, qx in -1.0f64..11.0, qy in -1.0f64..6.0,
    ) {
        let o = Scenario::constrained().obstacles[0];
        let (p, q) = (Point2D::new(px, py), Point2D::new(qx, qy));
        prop_assert_eq!(segment_intersects_obstacle(p, q, &o), blocked(p, q, &o));
        prop_assert_eq!(segment_intersects_obstacle(p, q, &o), segment_intersects_obstacle(q, p, &o));
    }

    #[test]
    fn lengths_ignore_order_and_translation(seed in any::<u64>(), dx in -3.0f64..3.0, dy in -3.0f64..3.0) {
        let s = Scenario::unconstrained();
        let d = valid_design(&s, seed, 25);
        let mut moved = d.clone();
        for n in &mut moved.nodes {
            n.pos = Point2D::new(n.pos.x + dx, n.pos.y + dy);
        }
        let mut flipped = d.clone();
        for m in &mut flipped.members {
            std::mem::swap(&mut m.node_a, &mut m.node_b);
        }
        for m in &d.members {
            let l = d.member_length(m.id).unwrap();
            prop_assert_eq!(l, flipped.member_length(m.id).unwrap());
            prop_assert!((l - moved.member_length(m.id).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn mass_grows_with_every_size_step(seed in any::<u64>()) {
        let s = Scenario::unconstrained();
        let d = valid_design(&s, seed, 25);
        for (i, m) in d.members.iter().enumerate() {
            if m.size_index < 10 {
                let mut heavier = d.clone();
                heavier.members[i].size_index += 1;
                prop_assert!(heavier.total_mass(&s) > d.total_mass(&s));
            }
        }
    }

    #[test]
    fn designs_round_trip_through_json(seed in any::<u64>()) {
        let (_, d) = scrambled(seed);
        prop_assert_eq!(TrussDesign::from_json(&d.to_json()).unwrap(), d);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn applicability_matches_validity_of_the_raw_edit(seed in any::<u64>()) {
        let s = Scenario::constrained();
        let d = valid_design(&s, seed, (seed % 40) as usize);
        prop_assert!(validate_design(&d, &s).is_empty());
        let a = random_action(&d, &s, &mut rng(seed.rotate_left(17)));
        let raw = apply_unchecked(&a, &d);
        prop_assert_eq!(is_applicable(&a, &d, &s), validate_design(&raw, &s).is_empty(), "{:?}", a);
        let before = d.clone();
        match apply(&a, &d, &s) {
            Ok(next) => {
                prop_assert_eq!(&next, &apply(&a, &d, &s).unwrap());
                let mut sorted = raw.clone();
                sorted.nodes.sort_by_key(|n| n.id);
                sorted.members.sort_by_key(|m| m.id);
                prop_assert_eq!(next, sorted);
            }
            Err(_) => prop_assert!(!is_applicable(&a, &d, &s)),
        }
        prop_assert_eq!(d, before);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn filtering_keeps_applicable_entries_in_order(seed in any::<u64>()) {
        let s = Scenario::constrained();
        let d = valid_design(&s, seed, 30);
        let mut r = rng(seed);
        let all: Vec<CandidateAction> = (0..20).map(|_| random_action(&d, &s, &mut r).into()).collect();
        let kept = filter_candidates(&all, &d, &s);
        let expected: Vec<_> = all.iter().copied().filter(|c| is_applicable(&c.action, &d, &s)).collect();
        prop_assert_eq!(&kept, &expected);
        prop_assert_eq!(filter_candidates(&kept, &d, &s), kept);
    }

    #[test]
    fn deleting_a_node_leaves_no_dangling_members(seed in any::<u64>()) {
        let s = Scenario::unconstrained();
        let d = valid_design(&s, seed, 40);
        for n in d.nodes.iter().filter(|n| n.kind == NodeKind::Free) {
            let next = apply(&Action::DeleteNode { node_id: n.id }, &d, &s).unwrap();
            prop_assert!(validate_design(&next, &s).is_empty());
            prop_assert!(next.members.iter().all(|m| !m.touches(n.id)));
        }
    }
}

#[test]
fn obstacle_filtering_example() {
    let s = Scenario::constrained();
    let d = s.seed_design();
    let list: Vec<CandidateAction> = vec![
        Action::AddMember { node_a: NodeId(0), node_b: NodeId(1) }.into(),
        Action::AddNode { pos: Point2D::new(5.0, 3.0) }.into(),
        Action::AddMember { node_a: NodeId(1), node_b: NodeId(2) }.into(),
    ];
    let kept = filter_candidates(&list, &d, &s);
    assert_eq!(kept, vec![list[0], list[2]]);
    assert!(filter_candidates(&[], &d, &s).is_empty());
}
