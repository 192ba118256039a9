//! Rule-driven heatmap generator standing in for a trained prediction network.
//!
//! Unsolvable designs get add strokes bridging node pairs that lack a load
//! path or bracing, remove discs over stray nodes, or a new node above the
//! deck when nothing else helps. Overloaded members of infeasible designs get
//! add strokes at their next width; on feasible designs the most utilized
//! members get add discs. Solvable designs also get add discs inside large
//! unbraced quadrilaterals and remove strokes over idle members the truss can
//! spare. Feasible designs get small remove marks beside members with slack.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{member_pixels, member_width_px, point_segment_distance, Heatmap, PixelMap, Raster};
use crate::fea::{member_capacity, Analysis, Bar, StiffnessModel};
use crate::model::{NodeId, NodeKind, Point2D, Scenario, TrussDesign, DEFAULT_MEMBER_SIZE};
use crate::seed::AgentRng;

const NODE_TRIM_PX: f64 = 5.0;
const APEX_ATTEMPTS: usize = 10;
const THIN_RADIUS_PX: f64 = 2.0;
const THIN_OFFSET_PX: f64 = 3.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub disc_radius_px: f64,
    pub jitter_px: f64,
    /// Members below this utilization are marked for removal.
    pub idle_utilization: f64,
    /// On feasible designs, members that would stay below this fraction of
    /// the peak utilization one size down may be marked for thinning.
    pub thin_relative: f64,
    /// On feasible designs, members above this fraction of the peak
    /// utilization are marked for thickening.
    pub hot_relative: f64,
    pub max_thin: usize,
    pub hot_members: usize,
    pub max_bridges: usize,
    /// Chance of passing over each repair connection, for variety.
    pub bridge_skip_prob: f64,
    pub bridge_half_width_px: f64,
    pub bridge_gap_px: f64,
    /// Pixels beyond a member's drawn width that a bridge stroke keeps clear of.
    pub stripe_clearance_px: f64,
    /// Chance that an isolated free node is marked for removal rather than
    /// connected.
    pub isolated_prune_prob: f64,
    /// Minimum area (m^2) of a quadrilateral that asks for a bracing node.
    pub brace_area: f64,
    pub max_braces: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            disc_radius_px: 4.0,
            jitter_px: 2.0,
            idle_utilization: 0.05,
            thin_relative: 0.8,
            hot_relative: 0.9,
            max_thin: 6,
            hot_members: 2,
            max_bridges: 4,
            bridge_skip_prob: 0.3,
            bridge_half_width_px: 1.5,
            bridge_gap_px: 3.0,
            stripe_clearance_px: 0.5,
            isolated_prune_prob: 0.5,
            brace_area: 1.0,
            max_braces: 2,
        }
    }
}

/// Source of heatmaps for the agent pipeline.
pub trait HeatmapSuggester: Send + Sync {
    fn suggest(
        &self,
        design: &TrussDesign,
        scenario: &Scenario,
        analysis: &Analysis,
        iteration: usize,
        rng: &mut AgentRng,
    ) -> Heatmap;
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSuggester {
    pub config: SynthConfig,
    pub resolution: usize,
}

impl SyntheticSuggester {
    pub fn new(config: SynthConfig, resolution: usize) -> Self {
        Self { config, resolution }
    }
}

impl HeatmapSuggester for SyntheticSuggester {
    fn suggest(
        &self,
        design: &TrussDesign,
        scenario: &Scenario,
        analysis: &Analysis,
        _iteration: usize,
        rng: &mut AgentRng,
    ) -> Heatmap {
        synth_heatmap(design, scenario, analysis, rng, &self.config, self.resolution)
    }
}

struct Canvas {
    map: PixelMap,
    add: Raster,
    remove: Raster,
}

impl Canvas {
    fn into_heatmap(self) -> Heatmap {
        Heatmap {
            width: self.add.width,
            height: self.add.height,
            add_intensity: self.add.pixels,
            remove_intensity: self.remove.pixels,
        }
    }
}

fn jitter(rng: &mut AgentRng, amount: f64) -> f64 {
    if amount > 0.0 {
        rng.gen_range(-amount..=amount)
    } else {
        0.0
    }
}

/// Deterministic given the rng state.
pub fn synth_heatmap(
    design: &TrussDesign,
    scenario: &Scenario,
    analysis: &Analysis,
    rng: &mut AgentRng,
    cfg: &SynthConfig,
    resolution: usize,
) -> Heatmap {
    let map = PixelMap::square(scenario.bounds, resolution);
    let mut canvas = Canvas { map, add: Raster::new(resolution, resolution), remove: Raster::new(resolution, resolution) };
    if analysis.eval.solvable {
        solvable_marks(design, scenario, analysis, rng, cfg, &mut canvas);
    } else {
        let plan = plan_bridges(design, scenario, &canvas.map, rng, cfg);
        for id in plan.prune {
            let p = canvas.map.to_pixel(&design.node(id).expect("planned").pos);
            canvas.remove.stamp_disc(p, cfg.disc_radius_px, 1.0);
        }
        if let Some(p) = plan.apex {
            canvas.add.stamp_disc(canvas.map.to_pixel(&p), cfg.disc_radius_px, 1.0);
        }
        for (a, b) in plan.bridges {
            let (pa, pb) = (design.node(a).expect("planned").pos, design.node(b).expect("planned").pos);
            let (pa, pb) = (canvas.map.to_pixel(&pa), canvas.map.to_pixel(&pb));
            let len = (pb.0 - pa.0).hypot(pb.1 - pa.1);
            if len <= 2.0 * cfg.bridge_gap_px {
                continue;
            }
            let (ux, uy) = ((pb.0 - pa.0) / len, (pb.1 - pa.1) / len);
            let j = jitter(rng, cfg.jitter_px);
            let (nx, ny) = (-uy * j, ux * j);
            let g = cfg.bridge_gap_px;
            canvas.add.stamp_segment(
                (pa.0 + g * ux + nx, pa.1 + g * uy + ny),
                (pb.0 - g * ux + nx, pb.1 - g * uy + ny),
                cfg.bridge_half_width_px,
                1.0,
            );
        }
    }
    canvas.into_heatmap()
}

fn solvable_marks(
    design: &TrussDesign,
    scenario: &Scenario,
    analysis: &Analysis,
    rng: &mut AgentRng,
    cfg: &SynthConfig,
    canvas: &mut Canvas,
) {
    // (member index, utilization), most utilized first
    let mut util: Vec<(usize, f64)> = analysis.forces.iter().map(|f| f.utilization).enumerate().collect();
    util.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));

    let seg = |i: usize| {
        let m = &design.members[i];
        let (a, b) = design.member_endpoints(m).expect("valid design");
        (canvas.map.to_pixel(&a), canvas.map.to_pixel(&b), 0.5 * member_width_px(m.size_index))
    };
    let along = |(a, b): ((f64, f64), (f64, f64)), shift: f64, offset: f64| {
        let len = (b.0 - a.0).hypot(b.1 - a.1).max(1e-9);
        let (ux, uy) = ((b.0 - a.0) / len, (b.1 - a.1) / len);
        let mid = (0.5 * (a.0 + b.0), 0.5 * (a.1 + b.1));
        (mid.0 + shift * ux - offset * uy, mid.1 + shift * uy + offset * ux)
    };

    let max_size = scenario.size_table.max_size();
    let feasible = analysis.eval.feasible;
    let peak = util.first().map_or(0.0, |&(_, u)| u);
    let hot_floor = if feasible { cfg.hot_relative * peak } else { 1.0 };
    // stroke the whole member at its next width, clear of the node discs
    let trim = |(a, b, h): Stroke| {
        let len = (b.0 - a.0).hypot(b.1 - a.1);
        let t = (NODE_TRIM_PX / len.max(1e-9)).min(0.45);
        ((a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1)), (b.0 - t * (b.0 - a.0), b.1 - t * (b.1 - a.1)), h)
    };
    let strokes: Vec<Stroke> = (0..design.members.len()).map(|i| trim(seg(i))).collect();
    let hot = disjoint(
        design,
        &strokes,
        util.iter()
            .filter(|&&(i, u)| design.members[i].size_index < max_size && u >= hot_floor)
            .map(|&(i, _)| i),
        cfg.hot_members,
        2.0,
        true,
    );
    // small enough that most of the disc lies on the member's stripe
    let on_member = |half: f64| cfg.disc_radius_px.min((2.2 * half).max(2.5));
    for &i in &hot {
        let (a, b, half) = strokes[i];
        if feasible {
            let centre = along((a, b), jitter(rng, cfg.jitter_px), 0.0);
            canvas.add.stamp_disc(centre, on_member(half), 1.0);
        } else {
            canvas.add.stamp_segment(a, b, half + 0.5, 1.0);
        }
    }

    // only members the truss stays stable without
    let model = StiffnessModel::from_design(design, scenario);
    let removable = |i: usize| {
        let mut trial = model.clone();
        trial.bars.remove(i);
        trial.nullity() == 0
    };
    let idle = disjoint(
        design,
        &strokes,
        util.iter().rev().take_while(|&&(_, u)| u < cfg.idle_utilization).map(|&(i, _)| i).filter(|&i| removable(i)),
        usize::MAX,
        2.0,
        false,
    );
    for &i in &idle {
        let (a, b, half) = strokes[i];
        canvas.remove.stamp_segment(a, b, half, 1.0);
    }

    if feasible {
        let thinnable = |i: usize| design.members[i].size_index > 1 && !idle.contains(&i) && !hot.contains(&i);
        let mut thin = util
            .iter()
            .rev()
            .filter(|&&(i, _)| {
                let m = &design.members[i];
                if !thinnable(i) {
                    return false;
                }
                // utilization it would have one size down, under the same force
                let f = &analysis.forces[i];
                let len = design.member_length(m.id).expect("valid design");
                let thinner = f.axial_force.abs() / member_capacity(m.size_index - 1, len, f.axial_force, scenario);
                thinner < cfg.thin_relative * peak
            })
            .take(cfg.max_thin)
            .map(|&(i, _)| i)
            .collect::<Vec<_>>();
        if thin.is_empty() && hot.is_empty() && idle.is_empty() {
            // nothing stands out; offer the least used members
            thin = util.iter().rev().map(|&(i, _)| i).filter(|&i| thinnable(i)).take(cfg.max_thin).collect();
        }
        let stripes: Vec<_> = (0..design.members.len()).map(seg).collect();
        let nodes: Vec<_> = design.nodes.iter().map(|n| canvas.map.to_pixel(&n.pos)).collect();
        let size = canvas.map.width as f64;
        for i in thin {
            let (a, b, half) = stripes[i];
            let len = (b.0 - a.0).hypot(b.1 - a.1);
            let side = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let j = jitter(rng, cfg.jitter_px);
            // first spot where the mark reads as thinning this member and no other
            let spot = [0.0, -0.2, 0.2, -0.3, 0.3]
                .into_iter()
                .flat_map(|t| [side, -side].map(|s| along((a, b), t * len + j, s * (half + THIN_OFFSET_PX))))
                .find(|&c| {
                    let inside = c.0 >= THIN_RADIUS_PX && c.1 >= THIN_RADIUS_PX
                        && c.0 <= size - THIN_RADIUS_PX && c.1 <= size - THIN_RADIUS_PX;
                    let clear_of_members = stripes.iter().enumerate().all(|(k, &(p, q, h))| {
                        k == i || point_segment_distance(c, p, q) - h > THIN_OFFSET_PX + 0.5
                    });
                    let clear_of_nodes = nodes.iter().all(|n| (n.0 - c.0).hypot(n.1 - c.1) > THIN_RADIUS_PX + 4.0);
                    inside && clear_of_members && clear_of_nodes
                });
            if let Some(c) = spot {
                canvas.remove.stamp_disc(c, THIN_RADIUS_PX, 1.0);
            }
        }
    }

    for centroid in unbraced_quads(design, cfg.brace_area).into_iter().take(cfg.max_braces) {
        let (x, y) = canvas.map.to_pixel(&centroid);
        let centre = (x + jitter(rng, cfg.jitter_px), y + jitter(rng, cfg.jitter_px));
        canvas.add.stamp_disc(centre, cfg.disc_radius_px, 1.0);
    }
}

/// Up to `limit` members from `order` that keep `gap` pixels clear of every
/// earlier pick and, unless `share_nodes`, share no node with one.
fn disjoint(
    design: &TrussDesign,
    strokes: &[Stroke],
    order: impl Iterator<Item = usize>,
    limit: usize,
    gap: f64,
    share_nodes: bool,
) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    for i in order {
        if out.len() >= limit {
            break;
        }
        let m = &design.members[i];
        let clash = out.iter().any(|&k| {
            let o = &design.members[k];
            let (a, b, h) = strokes[i];
            let (p, q, g) = strokes[k];
            (!share_nodes && (m.touches(o.node_a) || m.touches(o.node_b)))
                || segment_distance((a, b), (p, q)) <= h + g + gap
        });
        if !clash {
            out.push(i);
        }
    }
    out
}

type Stroke = ((f64, f64), (f64, f64), f64);

fn segment_distance(s: ((f64, f64), (f64, f64)), t: ((f64, f64), (f64, f64))) -> f64 {
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let (d1, d2) = (cross(t.0, t.1, s.0), cross(t.0, t.1, s.1));
    let (d3, d4) = (cross(s.0, s.1, t.0), cross(s.0, s.1, t.1));
    if d1 * d2 < 0.0 && d3 * d4 < 0.0 {
        return 0.0;
    }
    point_segment_distance(s.0, t.0, t.1)
        .min(point_segment_distance(s.1, t.0, t.1))
        .min(point_segment_distance(t.0, s.0, s.1))
        .min(point_segment_distance(t.1, s.0, s.1))
}

/// Centroids of chordless four-cycles with at least `min_area`, largest first.
fn unbraced_quads(design: &TrussDesign, min_area: f64) -> Vec<Point2D> {
    let n = design.nodes.len();
    let idx = |id: NodeId| design.node_index(id);
    let mut adj = vec![vec![false; n]; n];
    for m in &design.members {
        if let (Some(a), Some(b)) = (idx(m.node_a), idx(m.node_b)) {
            adj[a][b] = true;
            adj[b][a] = true;
        }
    }
    let mut seen = BTreeSet::new();
    let mut quads: Vec<(f64, Point2D)> = Vec::new();
    for a in 0..n {
        for c in a + 1..n {
            if adj[a][c] {
                continue;
            }
            let common: Vec<usize> = (0..n).filter(|&k| adj[a][k] && adj[c][k]).collect();
            for (i, &b) in common.iter().enumerate() {
                for &d in &common[i + 1..] {
                    if adj[b][d] {
                        continue;
                    }
                    let mut key = [a, b, c, d];
                    key.sort_unstable();
                    if !seen.insert(key) {
                        continue;
                    }
                    let pts = [a, b, c, d].map(|k| design.nodes[k].pos);
                    let area = 0.5
                        * (0..4)
                            .map(|k| {
                                let (p, q) = (pts[k], pts[(k + 1) % 4]);
                                p.x * q.y - q.x * p.y
                            })
                            .sum::<f64>()
                            .abs();
                    if area >= min_area {
                        let cx = pts.iter().map(|p| p.x).sum::<f64>() / 4.0;
                        let cy = pts.iter().map(|p| p.y).sum::<f64>() / 4.0;
                        quads.push((area, Point2D::new(cx, cy)));
                    }
                }
            }
        }
    }
    quads.sort_by(|x, y| y.0.total_cmp(&x.0));
    quads.into_iter().map(|(_, c)| c).collect()
}

/// Repairs for an unsolvable design: node pairs to connect, each node used
/// at most once, and free nodes to drop.
struct BridgePlan {
    bridges: Vec<(NodeId, NodeId)>,
    prune: Vec<NodeId>,
    /// A new node, when nothing can be connected or removed.
    apex: Option<Point2D>,
}

/// Connections that remove the most mechanism modes, shortest first, kept
/// only when the stroke would read as a new member (not as a thickening of
/// an existing one) and stays clear of obstacles.
fn plan_bridges(
    design: &TrussDesign,
    scenario: &Scenario,
    map: &PixelMap,
    rng: &mut AgentRng,
    cfg: &SynthConfig,
) -> BridgePlan {
    let nodes = &design.nodes;
    let n = nodes.len();
    let model = StiffnessModel::from_design(design, scenario);
    let base = model.nullity();
    let new_stiffness = scenario.material.elastic_modulus * scenario.size_table.area(DEFAULT_MEMBER_SIZE);

    let degree = |i: usize| design.members.iter().filter(|m| m.touches(nodes[i].id)).count();
    let mut prune = Vec::new();
    for i in 0..n {
        if nodes[i].kind == NodeKind::Free && degree(i) == 0 && rng.gen_bool(cfg.isolated_prune_prob) {
            prune.push(nodes[i].id);
            break;
        }
    }

    let stripes: Vec<((f64, f64), (f64, f64), f64)> = design
        .members
        .iter()
        .filter_map(|m| {
            let (a, b) = member_pixels(design, m, map)?;
            Some((a, b, 0.5 * member_width_px(m.size_index) + cfg.stripe_clearance_px))
        })
        .collect();
    let reads_as_member = |i: usize, j: usize| {
        let (pa, pb) = (map.to_pixel(&nodes[i].pos), map.to_pixel(&nodes[j].pos));
        let len = (pb.0 - pa.0).hypot(pb.1 - pa.1);
        let usable = len - 2.0 * cfg.bridge_gap_px;
        if usable <= 0.0 {
            return false;
        }
        const SAMPLES: usize = 16;
        let hits = (0..=SAMPLES)
            .filter(|&k| {
                let t = (cfg.bridge_gap_px + usable * k as f64 / SAMPLES as f64) / len;
                let p = (pa.0 + t * (pb.0 - pa.0), pa.1 + t * (pb.1 - pa.1));
                stripes.iter().any(|&(a, b, reach)| point_segment_distance(p, a, b) <= reach)
            })
            .count();
        2 * hits < SAMPLES + 1
    };

    let mut options: Vec<(usize, usize, usize, f64)> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let (p, q) = (&nodes[i], &nodes[j]);
            if (p.kind == NodeKind::Support && q.kind == NodeKind::Support)
                || prune.contains(&p.id)
                || prune.contains(&q.id)
                || design.member_between(p.id, q.id).is_some()
                || scenario.segment_blocked(p.pos, q.pos)
                || !reads_as_member(i, j)
            {
                continue;
            }
            let mut trial = model.clone();
            trial.bars.push(Bar { a: i, b: j, axial_stiffness: new_stiffness });
            let gain = base.saturating_sub(trial.nullity());
            if gain > 0 {
                options.push((i, j, gain, p.pos.distance(&q.pos)));
            }
        }
    }
    options.sort_by(|x, y| y.2.cmp(&x.2).then(x.3.total_cmp(&y.3)).then((x.0, x.1).cmp(&(y.0, y.1))));

    let mut used = vec![false; n];
    let mut pairs = Vec::new();
    for &(i, j, _, _) in &options {
        if pairs.len() >= cfg.max_bridges {
            break;
        }
        if used[i] || used[j] || rng.gen_bool(cfg.bridge_skip_prob) {
            continue;
        }
        used[i] = true;
        used[j] = true;
        pairs.push((nodes[i].id, nodes[j].id));
    }
    if let (true, Some(&(i, j, _, _))) = (pairs.is_empty(), options.first()) {
        pairs.push((nodes[i].id, nodes[j].id));
    }
    if pairs.is_empty() && prune.is_empty() {
        if let Some(i) = (0..n).filter(|&i| nodes[i].kind == NodeKind::Free).min_by_key(|&i| (degree(i), i)) {
            prune.push(nodes[i].id);
        }
    }
    let apex = if pairs.is_empty() && prune.is_empty() { apex_site(design, scenario, rng) } else { None };
    BridgePlan { bridges: pairs, prune, apex }
}

/// A spot about a quarter span above the nodes' centroid, clear of
/// obstacles and existing nodes.
fn apex_site(design: &TrussDesign, scenario: &Scenario, rng: &mut AgentRng) -> Option<Point2D> {
    let n = design.nodes.len().max(1) as f64;
    let cx = design.nodes.iter().map(|p| p.pos.x).sum::<f64>() / n;
    let cy = design.nodes.iter().map(|p| p.pos.y).sum::<f64>() / n;
    let b = &scenario.bounds;
    let rise = 0.25 * (b.max.x - b.min.x);
    (0..APEX_ATTEMPTS).find_map(|_| {
        let p = Point2D::new(
            (cx + jitter(rng, 0.25 * rise)).clamp(b.min.x, b.max.x),
            (cy + rise + jitter(rng, 0.25 * rise)).clamp(b.min.y, b.max.y),
        );
        let clear = !scenario.point_in_obstacle(&p) && design.nodes.iter().all(|q| q.pos.distance(&p) > 0.5);
        clear.then_some(p)
    })
}
