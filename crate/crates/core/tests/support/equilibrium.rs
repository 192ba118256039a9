use truss_agents::model::{NodeKind, TrussDesign};

/// Largest net force component at any unsupported node, from the member
/// forces (tension positive) and the geometry alone.
pub fn free_node_imbalance(d: &TrussDesign, forces: &[f64]) -> f64 {
    let mut worst = 0.0_f64;
    for n in d.nodes.iter().filter(|n| n.kind != NodeKind::Support) {
        let (mut fx, mut fy) = (n.applied_load.x, n.applied_load.y);
        for (m, f) in d.members.iter().zip(forces) {
            let other = if m.node_a == n.id {
                m.node_b
            } else if m.node_b == n.id {
                m.node_a
            } else {
                continue;
            };
            let q = d.node(other).unwrap().pos;
            let len = n.pos.distance(&q);
            fx += f * (q.x - n.pos.x) / len;
            fy += f * (q.y - n.pos.y) / len;
        }
        worst = worst.max(fx.abs()).max(fy.abs());
    }
    worst
}
