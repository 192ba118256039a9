//! Rule-based mapping from heatmap blobs to candidate design actions.
//!
//! Rules, applied to each blob in blob order:
//!
//! * add blob mostly on a member stripe: thicken that member;
//! * elongated add blob whose two ends sit near two distinct nodes: connect them;
//! * any other add blob: add a node at the snapped centroid, followed by
//!   members from the new node to its nearest existing nodes;
//! * remove blob mostly on a member stripe: delete the member; on a node:
//!   delete the node; otherwise thin the nearest member within snapping range.

use super::{extract_blobs, member_pixels, member_width_px, point_segment_distance, Blob, Heatmap, InferenceConfig};
use super::{PixelMap, Polarity};
use crate::actions::{filter_candidates, Action, CandidateAction};
use crate::error::VisualError;
use crate::model::{Member, MemberId, NodeId, Point2D, Scenario, TrussDesign};

struct Context<'a> {
    design: &'a TrussDesign,
    map: PixelMap,
    cfg: &'a InferenceConfig,
    /// (member id, pixel segment, stripe half-width)
    stripes: Vec<(MemberId, (f64, f64), (f64, f64), f64)>,
    nodes_px: Vec<(NodeId, (f64, f64))>,
}

impl<'a> Context<'a> {
    fn new(design: &'a TrussDesign, scenario: &Scenario, cfg: &'a InferenceConfig) -> Self {
        let map = PixelMap::square(scenario.bounds, cfg.resolution);
        let stripes = design
            .members
            .iter()
            .filter_map(|m: &Member| {
                let (a, b) = member_pixels(design, m, &map)?;
                Some((m.id, a, b, 0.5 * member_width_px(m.size_index)))
            })
            .collect();
        let nodes_px = design.nodes.iter().map(|n| (n.id, map.to_pixel(&n.pos))).collect();
        Self { design, map, cfg, stripes, nodes_px }
    }

    /// Member whose stripe holds the largest share of the blob, with that share.
    fn best_stripe_overlap(&self, blob: &Blob) -> Option<(MemberId, f64)> {
        let n = blob.pixel_count() as f64;
        let mut best: Option<(MemberId, usize)> = None;
        for &(id, a, b, half) in &self.stripes {
            let reach = half + self.cfg.stripe_halo_px;
            let hits = blob
                .component
                .pixels
                .iter()
                .filter(|&&(c, r)| point_segment_distance((c as f64 + 0.5, r as f64 + 0.5), a, b) <= reach)
                .count();
            if hits > 0 && best.map_or(true, |(_, h)| hits > h) {
                best = Some((id, hits));
            }
        }
        best.map(|(id, hits)| (id, hits as f64 / n))
    }

    fn nearest_node(&self, p: (f64, f64), within: f64, exclude: Option<NodeId>) -> Option<NodeId> {
        self.nodes_px
            .iter()
            .filter(|(id, _)| Some(*id) != exclude)
            .map(|&(id, q)| (id, (p.0 - q.0).hypot(p.1 - q.1)))
            .filter(|&(_, d)| d <= within)
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .map(|(id, _)| id)
    }

    /// Ends of the blob along its principal axis, if it is elongated enough.
    fn elongated_ends(&self, blob: &Blob) -> Option<((f64, f64), (f64, f64))> {
        let pts: Vec<(f64, f64)> =
            blob.component.pixels.iter().map(|&(c, r)| (c as f64 + 0.5, r as f64 + 0.5)).collect();
        let (cx, cy) = blob.centroid_px;
        let n = pts.len() as f64;
        let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
        for &(x, y) in &pts {
            sxx += (x - cx) * (x - cx);
            syy += (y - cy) * (y - cy);
            sxy += (x - cx) * (y - cy);
        }
        let theta = 0.5 * (2.0 * sxy / n).atan2((sxx - syy) / n);
        let (dx, dy) = (theta.cos(), theta.sin());
        let (mut tmin, mut tmax, mut smin, mut smax) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for &(x, y) in &pts {
            let t = (x - cx) * dx + (y - cy) * dy;
            let s = -(x - cx) * dy + (y - cy) * dx;
            tmin = tmin.min(t);
            tmax = tmax.max(t);
            smin = smin.min(s);
            smax = smax.max(s);
        }
        let aspect = (tmax - tmin + 1.0) / (smax - smin + 1.0);
        (aspect >= self.cfg.aspect_threshold)
            .then(|| ((cx + tmin * dx, cy + tmin * dy), (cx + tmax * dx, cy + tmax * dy)))
    }

    fn snapped(&self, p: Point2D) -> Point2D {
        let g = self.cfg.grid_snap;
        if g > 0.0 {
            Point2D::new((p.x / g).round() * g, (p.y / g).round() * g)
        } else {
            p
        }
    }

    fn add_rules(&self, blob: &Blob, out: &mut Vec<CandidateAction>) {
        let emit = |a| CandidateAction::from_blob(a, blob.id);
        if let Some((member_id, share)) = self.best_stripe_overlap(blob) {
            if share >= 0.5 {
                out.push(emit(Action::IncreaseThickness { member_id }));
                return;
            }
        }
        if let Some((p, q)) = self.elongated_ends(blob) {
            if let Some(a) = self.nearest_node(p, self.cfg.snap_px, None) {
                if let Some(b) = self.nearest_node(q, self.cfg.snap_px, Some(a)) {
                    out.push(emit(Action::AddMember { node_a: a, node_b: b }));
                    return;
                }
            }
        }
        let pos = self.snapped(blob.centroid);
        out.push(emit(Action::AddNode { pos }));
        let new_id = self.design.next_node_id();
        let mut near: Vec<(NodeId, f64)> = self.design.nodes.iter().map(|n| (n.id, n.pos.distance(&pos))).collect();
        near.sort_by(|x, y| x.1.total_cmp(&y.1).then(x.0.cmp(&y.0)));
        for &(k, _) in near.iter().take(self.cfg.connect_nearest) {
            out.push(emit(Action::AddMember { node_a: new_id, node_b: k }));
        }
    }

    fn remove_rules(&self, blob: &Blob, out: &mut Vec<CandidateAction>) {
        let emit = |a| CandidateAction::from_blob(a, blob.id);
        if let Some((member_id, share)) = self.best_stripe_overlap(blob) {
            if share >= 0.5 {
                out.push(emit(Action::DeleteMember { member_id }));
                return;
            }
        }
        let covered = self
            .nodes_px
            .iter()
            .filter(|(_, (x, y))| *x >= 0.0 && *y >= 0.0 && blob.contains_px(*x as usize, *y as usize))
            .map(|&(id, q)| (id, (q.0 - blob.centroid_px.0).hypot(q.1 - blob.centroid_px.1)))
            .min_by(|x, y| x.1.total_cmp(&y.1));
        if let Some((node_id, _)) = covered {
            out.push(emit(Action::DeleteNode { node_id }));
            return;
        }
        let nearest = self
            .stripes
            .iter()
            .map(|&(id, a, b, half)| (id, point_segment_distance(blob.centroid_px, a, b) - half))
            .filter(|&(_, d)| d <= self.cfg.snap_px)
            .min_by(|x, y| x.1.total_cmp(&y.1));
        if let Some((member_id, _)) = nearest {
            out.push(emit(Action::DecreaseThickness { member_id }));
        }
    }
}

/// All rule outputs in blob order, before validity filtering and capping.
///
/// Includes the follow-up members that reference the node an add-node
/// candidate would create; those only become applicable once that node exists.
pub fn infer_raw(
    h: &Heatmap,
    design: &TrussDesign,
    scenario: &Scenario,
    cfg: &InferenceConfig,
) -> Result<Vec<CandidateAction>, VisualError> {
    let expected = (cfg.resolution, cfg.resolution);
    if h.dims() != expected {
        return Err(VisualError::DimensionMismatch { left: h.dims(), right: expected });
    }
    let ctx = Context::new(design, scenario, cfg);
    let mut out = Vec::new();
    for blob in extract_blobs(h, &ctx.map, cfg) {
        match blob.polarity {
            Polarity::Add => ctx.add_rules(&blob, &mut out),
            Polarity::Remove => ctx.remove_rules(&blob, &mut out),
        }
    }
    Ok(out)
}

/// Applicable, de-duplicated candidates, capped at `cfg.max_candidates`.
pub fn infer_candidates(
    h: &Heatmap,
    design: &TrussDesign,
    scenario: &Scenario,
    cfg: &InferenceConfig,
) -> Result<Vec<CandidateAction>, VisualError> {
    let raw = infer_raw(h, design, scenario, cfg)?;
    Ok(finalize(filter_candidates(&raw, design, scenario), cfg.max_candidates))
}

/// Drops repeated actions (first occurrence wins) and caps the list.
pub(crate) fn finalize(candidates: Vec<CandidateAction>, cap: usize) -> Vec<CandidateAction> {
    let mut out: Vec<CandidateAction> = Vec::with_capacity(cap.min(candidates.len()));
    for c in candidates {
        if out.len() == cap {
            break;
        }
        if !out.iter().any(|o| o.action == c.action) {
            out.push(c);
        }
    }
    out
}
