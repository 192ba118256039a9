use serde::{Deserialize, Serialize};

use crate::actions::{Action, CandidateAction, HeuristicLabel};
use crate::model::{NodeId, Point2D, Scenario, TrussDesign};

/// Mirror tolerance (m) for the spatial-mirror heuristic.
pub const MIRROR_TOLERANCE: f64 = 0.3;

/// How many past actions count as "recent" when classifying.
pub const HISTORY_LEN: usize = 2;

/// A past action with the geometry it had when it was taken.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub action: Action,
    pub anchor: Option<Point2D>,
    /// Node created by an add-node action.
    pub created_node: Option<NodeId>,
}

impl HistoryEntry {
    /// Records `action` as taken on `before`.
    pub fn taken(action: &Action, before: &TrussDesign) -> Self {
        let created_node = matches!(action, Action::AddNode { .. }).then(|| before.next_node_id());
        Self { action: *action, anchor: action.anchor(before), created_node }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct HeuristicState {
    pub active: HeuristicLabel,
    pub remaining_burst: usize,
    pub anchor: Option<Point2D>,
    /// Most recent last, at most [`HISTORY_LEN`] entries.
    pub history: Vec<HistoryEntry>,
}

impl HeuristicState {
    pub fn record(&mut self, entry: HistoryEntry) {
        self.anchor = entry.anchor;
        self.history.push(entry);
        if self.history.len() > HISTORY_LEN {
            self.history.remove(0);
        }
    }
}

fn thickness_direction(a: &Action) -> Option<i8> {
    match a {
        Action::IncreaseThickness { .. } => Some(1),
        Action::DecreaseThickness { .. } => Some(-1),
        _ => None,
    }
}

/// First matching rule wins: sequential member chain, repeated thickness
/// change, connecting a freshly created node, mirror of the previous action
/// about the vertical midline.
pub fn classify_heuristic(
    candidate: &CandidateAction,
    design: &TrussDesign,
    history: &[HistoryEntry],
    scenario: &Scenario,
) -> HeuristicLabel {
    let Some(prev) = history.last() else {
        return HeuristicLabel::None;
    };
    let action = &candidate.action;

    if let (Action::AddMember { node_a, node_b }, Action::AddMember { node_a: pa, node_b: pb }) = (action, &prev.action) {
        if [pa, pb].contains(&node_a) || [pa, pb].contains(&node_b) {
            return HeuristicLabel::SequentialAddMember;
        }
    }
    if let (Some(d), Some(pd)) = (thickness_direction(action), thickness_direction(&prev.action)) {
        if d == pd {
            return HeuristicLabel::RepeatedThickness;
        }
    }
    if let Action::AddMember { node_a, node_b } = action {
        if history.iter().rev().take(HISTORY_LEN).any(|h| h.created_node == Some(*node_a) || h.created_node == Some(*node_b)) {
            return HeuristicLabel::NodeThenConnect;
        }
    }
    if let (Some(here), Some(there)) = (action.anchor(design), prev.anchor) {
        let mirrored = Point2D::new(2.0 * scenario.midline_x() - there.x, there.y);
        if here.distance(&mirrored) <= MIRROR_TOLERANCE {
            return HeuristicLabel::SpatialMirror;
        }
    }
    HeuristicLabel::None
}
