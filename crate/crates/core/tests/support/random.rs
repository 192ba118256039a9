#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use truss_agents::actions::Action;
use truss_agents::fea::assemble_and_solve;
use truss_agents::model::{Member, MemberId, Node, NodeId, NodeKind, Point2D, Scenario, TrussDesign};
use truss_agents::{apply, is_applicable};

use super::joints::Frame;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn frame_design(frame: &Frame) -> TrussDesign {
    let nodes = frame
        .joints
        .iter()
        .enumerate()
        .map(|(i, j)| {
            let kind = if j.pinned {
                NodeKind::Support
            } else if j.load != (0.0, 0.0) {
                NodeKind::Load
            } else {
                NodeKind::Free
            };
            Node { id: NodeId(i as u32), pos: Point2D::new(j.x, j.y), kind, applied_load: Point2D::new(j.load.0, j.load.1) }
        })
        .collect();
    let members = frame
        .bars
        .iter()
        .enumerate()
        .map(|(k, &(a, b))| Member { id: MemberId(k as u32), node_a: NodeId(a as u32), node_b: NodeId(b as u32), size_index: 5 })
        .collect();
    TrussDesign { nodes, members }
}

fn angle_ok(p: Point2D, a: Point2D, b: Point2D) -> bool {
    let (ux, uy) = (a.x - p.x, a.y - p.y);
    let (vx, vy) = (b.x - p.x, b.y - p.y);
    let sin = (ux * vy - uy * vx).abs() / (ux.hypot(uy) * vx.hypot(vy));
    sin > 0.2
}

/// A stable design grown by attaching each node to two earlier nodes, with a
/// few extra bars and random sizes and loads. Keeps drawing until the
/// stiffness solve succeeds.
pub fn solvable_design(seed: u64) -> TrussDesign {
    let mut r = rng(seed);
    loop {
        if let Some(d) = try_design(&mut r) {
            if assemble_and_solve(&d, &Scenario::unconstrained()).is_ok() {
                return d;
            }
        }
    }
}

fn try_design(r: &mut ChaCha8Rng) -> Option<TrussDesign> {
    let span = r.gen_range(4.0..10.0);
    let mut nodes = vec![
        Node { id: NodeId(0), pos: Point2D::new(0.0, 0.0), kind: NodeKind::Support, applied_load: Point2D::default() },
        Node { id: NodeId(1), pos: Point2D::new(span, r.gen_range(-1.0..1.0)), kind: NodeKind::Support, applied_load: Point2D::default() },
    ];
    let extra = r.gen_range(1..8);
    for i in 0..extra {
        let pos = Point2D::new(r.gen_range(0.0..span), r.gen_range(-2.0..4.0));
        if nodes.iter().any(|n| n.pos.distance(&pos) < 0.3) {
            return None;
        }
        let (kind, applied_load) = if r.gen_bool(0.5) {
            (NodeKind::Load, Point2D::new(r.gen_range(-5e3..5e3), r.gen_range(-2e4..-1e2)))
        } else {
            (NodeKind::Free, Point2D::default())
        };
        nodes.push(Node { id: NodeId(i + 2), pos, kind, applied_load });
    }
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for i in 2..nodes.len() {
        let mut earlier: Vec<usize> = (0..i).collect();
        earlier.shuffle(r);
        let (a, b) = (earlier[0], earlier[1]);
        if !angle_ok(nodes[i].pos, nodes[a].pos, nodes[b].pos) {
            return None;
        }
        pairs.push((a, i));
        pairs.push((b, i));
    }
    for _ in 0..r.gen_range(0..4) {
        let a = r.gen_range(0..nodes.len());
        let b = r.gen_range(0..nodes.len());
        if a != b && !pairs.iter().any(|&(p, q)| (p, q) == (a, b) || (q, p) == (a, b)) {
            pairs.push((a, b));
        }
    }
    let members = pairs
        .iter()
        .enumerate()
        .map(|(k, &(a, b))| Member {
            id: MemberId(k as u32),
            node_a: nodes[a].id,
            node_b: nodes[b].id,
            size_index: r.gen_range(1..=10),
        })
        .collect();
    Some(TrussDesign { nodes, members })
}

/// A valid design for `scenario` reached by random applicable actions from
/// the seed design.
pub fn valid_design(scenario: &Scenario, seed: u64, steps: usize) -> TrussDesign {
    let mut r = rng(seed);
    let mut d = scenario.seed_design();
    for _ in 0..steps {
        let a = random_action(&d, scenario, &mut r);
        if is_applicable(&a, &d, scenario) {
            d = apply(&a, &d, scenario).expect("applicable");
        }
    }
    d
}

/// An action whose ids refer to parts of `d` (or to the node an add would
/// create), anywhere near the construction space.
pub fn random_action(d: &TrussDesign, scenario: &Scenario, r: &mut ChaCha8Rng) -> Action {
    let b = scenario.bounds;
    let node = |r: &mut ChaCha8Rng| d.nodes.choose(r).map(|n| n.id).unwrap_or(NodeId(0));
    let member = |r: &mut ChaCha8Rng| d.members.choose(r).map(|m| m.id);
    match r.gen_range(0..6) {
        0 => {
            let near = d.nodes.choose(r).map(|n| n.pos).filter(|_| r.gen_bool(0.2));
            let pos = match near {
                Some(p) => Point2D::new(p.x + r.gen_range(-0.15..0.15), p.y + r.gen_range(-0.15..0.15)),
                None => Point2D::new(
                    r.gen_range(b.min.x - 0.5..b.max.x + 0.5),
                    r.gen_range(b.min.y - 0.5..b.max.y + 0.5),
                ),
            };
            Action::AddNode { pos }
        }
        1 | 2 => Action::AddMember { node_a: node(r), node_b: node(r) },
        3 => Action::DeleteNode { node_id: node(r) },
        k => match member(r) {
            Some(member_id) if k == 4 => {
                if r.gen_bool(0.5) {
                    Action::IncreaseThickness { member_id }
                } else {
                    Action::DecreaseThickness { member_id }
                }
            }
            Some(member_id) => Action::DeleteMember { member_id },
            None => Action::AddMember { node_a: node(r), node_b: node(r) },
        },
    }
}

/// The design a raw edit would produce, valid or not.
pub fn apply_unchecked(a: &Action, d: &TrussDesign) -> TrussDesign {
    let mut next = d.clone();
    match *a {
        Action::AddNode { pos } => {
            let id = NodeId(d.nodes.iter().map(|n| n.id.0 + 1).max().unwrap_or(0));
            next.nodes.push(Node { id, pos, kind: NodeKind::Free, applied_load: Point2D::default() });
        }
        Action::AddMember { node_a, node_b } => {
            let id = MemberId(d.members.iter().map(|m| m.id.0 + 1).max().unwrap_or(0));
            next.members.push(Member { id, node_a, node_b, size_index: 3 });
        }
        Action::DeleteNode { node_id } => {
            next.nodes.retain(|n| n.id != node_id);
            next.members.retain(|m| m.node_a != node_id && m.node_b != node_id);
        }
        Action::DeleteMember { member_id } => next.members.retain(|m| m.id != member_id),
        Action::IncreaseThickness { member_id } => {
            for m in next.members.iter_mut().filter(|m| m.id == member_id) {
                m.size_index += 1;
            }
        }
        Action::DecreaseThickness { member_id } => {
            for m in next.members.iter_mut().filter(|m| m.id == member_id) {
                m.size_index -= 1;
            }
        }
    }
    next
}

/// Warren truss over the default span with the top chord at `rise` and the
/// given member sizes (cycled).
pub fn warren(scenario: &Scenario, rise: f64, shift: f64, sizes: &[u8]) -> TrussDesign {
    let mut d = scenario.seed_design();
    let tops = [1.25, 3.75, 6.25, 8.75];
    for (i, x) in tops.iter().enumerate() {
        d.nodes.push(Node::free(NodeId(5 + i as u32), Point2D::new(x + shift, rise)));
    }
    let mut pairs = vec![(0, 1), (1, 2), (2, 3), (3, 4), (5, 6), (6, 7), (7, 8)];
    for i in 0..4u32 {
        pairs.push((i, 5 + i));
        pairs.push((5 + i, i + 1));
    }
    d.members = pairs
        .iter()
        .enumerate()
        .map(|(k, &(a, b))| Member {
            id: MemberId(k as u32),
            node_a: NodeId(a),
            node_b: NodeId(b),
            size_index: sizes[k % sizes.len()],
        })
        .collect();
    d
}
