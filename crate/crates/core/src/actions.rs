//! The six sequential design actions and their validity rules.

use serde::{Deserialize, Serialize};

use crate::error::ActionError;
use crate::model::{
    Member, MemberId, Node, NodeId, Point2D, Scenario, TrussDesign, DEFAULT_MEMBER_SIZE, MIN_NODE_SPACING,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "payload", rename_all = "snake_case")]
pub enum Action {
    AddNode { pos: Point2D },
    AddMember { node_a: NodeId, node_b: NodeId },
    DeleteNode { node_id: NodeId },
    DeleteMember { member_id: MemberId },
    IncreaseThickness { member_id: MemberId },
    DecreaseThickness { member_id: MemberId },
}

impl Action {
    pub fn name(&self) -> &'static str {
        match self {
            Action::AddNode { .. } => "add_node",
            Action::AddMember { .. } => "add_member",
            Action::DeleteNode { .. } => "delete_node",
            Action::DeleteMember { .. } => "delete_member",
            Action::IncreaseThickness { .. } => "increase_thickness",
            Action::DecreaseThickness { .. } => "decrease_thickness",
        }
    }

    /// Representative position of the action's payload in `design`.
    pub fn anchor(&self, design: &TrussDesign) -> Option<Point2D> {
        let member_mid = |id| {
            let m = design.member(id)?;
            let (a, b) = design.member_endpoints(m)?;
            Some(a.midpoint(&b))
        };
        match *self {
            Action::AddNode { pos } => Some(pos),
            Action::AddMember { node_a, node_b } => Some(design.node(node_a)?.pos.midpoint(&design.node(node_b)?.pos)),
            Action::DeleteNode { node_id } => design.node(node_id).map(|n| n.pos),
            Action::DeleteMember { member_id }
            | Action::IncreaseThickness { member_id }
            | Action::DecreaseThickness { member_id } => member_mid(member_id),
        }
    }
}

/// Heuristic vocabulary used to classify candidate actions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum HeuristicLabel {
    SequentialAddMember,
    RepeatedThickness,
    NodeThenConnect,
    SpatialMirror,
    #[default]
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CandidateAction {
    pub action: Action,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_blob: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heuristic_label: Option<HeuristicLabel>,
}

impl CandidateAction {
    pub fn new(action: Action) -> Self {
        Self { action, source_blob: None, heuristic_label: None }
    }

    pub fn from_blob(action: Action, blob: usize) -> Self {
        Self { action, source_blob: Some(blob), heuristic_label: None }
    }
}

impl From<Action> for CandidateAction {
    fn from(action: Action) -> Self {
        Self::new(action)
    }
}

/// Checks `action` against the rule that names why it is inapplicable.
pub fn check_action(action: &Action, design: &TrussDesign, scenario: &Scenario) -> Result<(), String> {
    let size_table = &scenario.size_table;
    match *action {
        Action::AddNode { pos } => {
            if !pos.is_finite() || !scenario.bounds.contains(&pos) {
                return Err("node position outside construction bounds".into());
            }
            if scenario.point_in_obstacle(&pos) {
                return Err("node position inside an obstacle".into());
            }
            if design.nodes.iter().any(|n| n.pos.distance(&pos) < MIN_NODE_SPACING) {
                return Err("node closer than minimum spacing to an existing node".into());
            }
            Ok(())
        }
        Action::AddMember { node_a, node_b } => {
            if node_a == node_b {
                return Err("member endpoints must differ".into());
            }
            let a = design.node(node_a).ok_or("unknown member endpoint")?;
            let b = design.node(node_b).ok_or("unknown member endpoint")?;
            if design.member_between(node_a, node_b).is_some() {
                return Err("duplicate member".into());
            }
            if scenario.segment_blocked(a.pos, b.pos) {
                return Err("member crosses an obstacle".into());
            }
            Ok(())
        }
        Action::DeleteNode { node_id } => match design.node(node_id) {
            None => Err("unknown node".into()),
            Some(n) if n.is_fixed() => Err("load and support nodes cannot be deleted".into()),
            Some(_) => Ok(()),
        },
        Action::DeleteMember { member_id } => {
            design.member(member_id).map(|_| ()).ok_or_else(|| "unknown member".into())
        }
        Action::IncreaseThickness { member_id } => {
            let m = design.member(member_id).ok_or("unknown member")?;
            if m.size_index >= size_table.max_size() {
                return Err("member already at the largest size".into());
            }
            Ok(())
        }
        Action::DecreaseThickness { member_id } => {
            let m = design.member(member_id).ok_or("unknown member")?;
            if m.size_index <= 1 {
                return Err("member already at the smallest size".into());
            }
            Ok(())
        }
    }
}

/// True iff applying `action` keeps `design` valid. Assumes `design` is valid.
pub fn is_applicable(action: &Action, design: &TrussDesign, scenario: &Scenario) -> bool {
    check_action(action, design, scenario).is_ok()
}

/// Returns a new design with `action` applied; the input is untouched.
pub fn apply(action: &Action, design: &TrussDesign, scenario: &Scenario) -> Result<TrussDesign, ActionError> {
    check_action(action, design, scenario).map_err(ActionError::Inapplicable)?;
    let mut next = design.clone();
    match *action {
        Action::AddNode { pos } => next.nodes.push(Node::free(design.next_node_id(), pos)),
        Action::AddMember { node_a, node_b } => next.members.push(Member {
            id: design.next_member_id(),
            node_a,
            node_b,
            size_index: DEFAULT_MEMBER_SIZE,
        }),
        Action::DeleteNode { node_id } => {
            next.nodes.retain(|n| n.id != node_id);
            next.members.retain(|m| !m.touches(node_id));
        }
        Action::DeleteMember { member_id } => next.members.retain(|m| m.id != member_id),
        Action::IncreaseThickness { member_id } | Action::DecreaseThickness { member_id } => {
            let up = matches!(action, Action::IncreaseThickness { .. });
            let m = next.members.iter_mut().find(|m| m.id == member_id).expect("checked above");
            m.size_index = if up { m.size_index + 1 } else { m.size_index - 1 };
        }
    }
    next.sort();
    Ok(next)
}

/// Order-preserving subsequence of the applicable candidates.
pub fn filter_candidates(
    candidates: &[CandidateAction],
    design: &TrussDesign,
    scenario: &Scenario,
) -> Vec<CandidateAction> {
    candidates.iter().filter(|c| is_applicable(&c.action, design, scenario)).copied().collect()
}
