//! Truss geometry, scenarios and design validation.

use std::collections::{BTreeSet, HashSet};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ModelError;

/// Minimum spacing between any two nodes, in metres.
pub const MIN_NODE_SPACING: f64 = 0.1;

/// Size index assigned to newly created members.
pub const DEFAULT_MEMBER_SIZE: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn distance(&self, other: &Point2D) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn midpoint(&self, other: &Point2D) -> Point2D {
        Point2D::new(0.5 * (self.x + other.x), 0.5 * (self.y + other.y))
    }
}

/// A force vector in newtons.
pub type Force = Point2D;

macro_rules! string_id {
    ($name:ident, $prefix:literal) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(pub u32);

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!($prefix, "{}"), self.0)
            }
        }

        impl FromStr for $name {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                s.strip_prefix($prefix)
                    .and_then(|n| n.parse().ok())
                    .map($name)
                    .ok_or_else(|| format!(concat!("expected id of the form ", $prefix, "<n>, got {:?}"), s))
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                serializer.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
                let s = String::deserialize(deserializer)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

string_id!(NodeId, "n");
string_id!(MemberId, "m");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Free,
    Load,
    Support,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub pos: Point2D,
    pub kind: NodeKind,
    #[serde(default)]
    pub applied_load: Force,
}

impl Node {
    pub fn free(id: NodeId, pos: Point2D) -> Self {
        Self { id, pos, kind: NodeKind::Free, applied_load: Force::default() }
    }

    pub fn is_fixed(&self) -> bool {
        self.kind != NodeKind::Free
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Member {
    pub id: MemberId,
    pub node_a: NodeId,
    pub node_b: NodeId,
    pub size_index: u8,
}

impl Member {
    pub fn connects(&self, a: NodeId, b: NodeId) -> bool {
        (self.node_a == a && self.node_b == b) || (self.node_a == b && self.node_b == a)
    }

    pub fn touches(&self, n: NodeId) -> bool {
        self.node_a == n || self.node_b == n
    }

    fn key(&self) -> (NodeId, NodeId) {
        if self.node_a <= self.node_b {
            (self.node_a, self.node_b)
        } else {
            (self.node_b, self.node_a)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub elastic_modulus: f64,
    pub yield_stress: f64,
    pub density: f64,
}

impl Material {
    /// Structural steel.
    pub fn steel() -> Self {
        Self { elastic_modulus: 200e9, yield_stress: 250e6, density: 7870.0 }
    }
}

impl Default for Material {
    fn default() -> Self {
        Self::steel()
    }
}

/// Discrete cross-section ladder. Index 1 is the thinnest section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeTable {
    pub areas: Vec<f64>,
    pub second_moments: Vec<f64>,
}

impl SizeTable {
    /// Solid circular sections of radius `k * step` for k in 1..=count.
    pub fn solid_circular(count: u8, radius_step: f64) -> Self {
        let radii = (1..=count).map(|k| f64::from(k) * radius_step);
        Self {
            areas: radii.clone().map(|r| PI * r * r).collect(),
            second_moments: radii.map(|r| PI * r.powi(4) / 4.0).collect(),
        }
    }

    pub fn max_size(&self) -> u8 {
        self.areas.len() as u8
    }

    pub fn contains(&self, size_index: u8) -> bool {
        size_index >= 1 && size_index <= self.max_size()
    }

    /// Panics when `size_index` is outside the table.
    pub fn area(&self, size_index: u8) -> f64 {
        self.areas[usize::from(size_index) - 1]
    }

    pub fn second_moment(&self, size_index: u8) -> f64 {
        self.second_moments[usize::from(size_index) - 1]
    }
}

impl Default for SizeTable {
    fn default() -> Self {
        Self::solid_circular(10, 0.005)
    }
}

/// Axis-aligned closed rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min: Point2D,
    pub max: Point2D,
}

impl Rect {
    pub const fn new(min: Point2D, max: Point2D) -> Self {
        Self { min, max }
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn contains(&self, p: &Point2D) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        self.contains(&other.min) && self.contains(&other.max)
    }

    pub fn is_well_formed(&self) -> bool {
        self.min.is_finite() && self.max.is_finite() && self.min.x < self.max.x && self.min.y < self.max.y
    }
}

pub type Obstacle = Rect;

/// True iff the closed segment `pq` meets the closed rectangle.
///
/// Liang-Barsky clipping of the parametric segment against the four slabs.
pub fn segment_intersects_obstacle(p: Point2D, q: Point2D, obs: &Obstacle) -> bool {
    let d = Point2D::new(q.x - p.x, q.y - p.y);
    let mut t0 = 0.0_f64;
    let mut t1 = 1.0_f64;
    let slabs = [
        (-d.x, p.x - obs.min.x),
        (d.x, obs.max.x - p.x),
        (-d.y, p.y - obs.min.y),
        (d.y, obs.max.y - p.y),
    ];
    for (denom, num) in slabs {
        if denom == 0.0 {
            if num < 0.0 {
                return false;
            }
        } else {
            let t = num / denom;
            if denom < 0.0 {
                t0 = t0.max(t);
            } else {
                t1 = t1.min(t);
            }
            if t0 > t1 {
                return false;
            }
        }
    }
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(default)]
    pub name: String,
    pub bounds: Rect,
    pub fixed_nodes: Vec<Node>,
    #[serde(default)]
    pub obstacles: Vec<Obstacle>,
    #[serde(default)]
    pub material: Material,
    #[serde(default)]
    pub size_table: SizeTable,
    pub iteration_budget: usize,
    pub interaction_interval: usize,
    pub team_size: usize,
    #[serde(default = "default_fos_threshold")]
    pub fos_threshold: f64,
}

fn default_fos_threshold() -> f64 {
    1.0
}

impl Scenario {
    /// Open 10 m x 5 m construction space: supports at the lower corners and
    /// three 10 kN loads along the bottom span.
    pub fn unconstrained() -> Self {
        let support = |id, x| Node {
            id: NodeId(id),
            pos: Point2D::new(x, 0.0),
            kind: NodeKind::Support,
            applied_load: Force::default(),
        };
        let load = |id, x| Node {
            id: NodeId(id),
            pos: Point2D::new(x, 0.0),
            kind: NodeKind::Load,
            applied_load: Force::new(0.0, -10_000.0),
        };
        Self {
            name: "unconstrained".into(),
            bounds: Rect::new(Point2D::new(0.0, 0.0), Point2D::new(10.0, 5.0)),
            fixed_nodes: vec![support(0, 0.0), load(1, 2.5), load(2, 5.0), load(3, 7.5), support(4, 10.0)],
            obstacles: Vec::new(),
            material: Material::steel(),
            size_table: SizeTable::default(),
            iteration_budget: 250,
            interaction_interval: 48,
            team_size: 3,
            fos_threshold: 1.0,
        }
    }

    /// Same boundary conditions with a block over the central upper region.
    pub fn constrained() -> Self {
        Self {
            name: "constrained".into(),
            obstacles: vec![Rect::new(Point2D::new(3.5, 2.0), Point2D::new(6.5, 5.0))],
            iteration_budget: 700,
            ..Self::unconstrained()
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let scenario: Scenario = serde_json::from_str(text).map_err(ModelError::from_json)?;
        scenario.check()?;
        Ok(scenario)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// Checks the scenario's own invariants.
    pub fn check(&self) -> Result<(), ModelError> {
        let bad = |msg: String| Err(ModelError::InvalidScenario(msg));
        if !self.bounds.is_well_formed() {
            return bad("bounds must have min < max".into());
        }
        if self.iteration_budget == 0 || self.interaction_interval == 0 || self.team_size == 0 {
            return bad("iteration_budget, interaction_interval and team_size must be positive".into());
        }
        let m = &self.material;
        if !(m.elastic_modulus > 0.0 && m.yield_stress > 0.0 && m.density > 0.0) {
            return bad("material properties must be strictly positive".into());
        }
        let t = &self.size_table;
        if t.areas.is_empty() || t.areas.len() != t.second_moments.len() || t.areas.len() > usize::from(u8::MAX) {
            return bad("size_table areas and second_moments must be non-empty and equal length".into());
        }
        let increasing = |v: &[f64]| v[0] > 0.0 && v.windows(2).all(|w| w[0] < w[1]);
        if !increasing(&t.areas) || !increasing(&t.second_moments) {
            return bad("size_table must be strictly increasing".into());
        }
        let mut ids = HashSet::new();
        for n in &self.fixed_nodes {
            if n.kind == NodeKind::Free {
                return bad(format!("fixed node {} must be a load or support", n.id));
            }
            if !ids.insert(n.id) {
                return bad(format!("duplicate fixed node id {}", n.id));
            }
            if !self.bounds.contains(&n.pos) {
                return bad(format!("fixed node {} lies outside bounds", n.id));
            }
        }
        for o in &self.obstacles {
            if !o.is_well_formed() || !self.bounds.contains_rect(o) {
                return bad("obstacles must be well formed and inside bounds".into());
            }
        }
        if !(self.fos_threshold.is_finite() && self.fos_threshold > 0.0) {
            return bad("fos_threshold must be positive".into());
        }
        Ok(())
    }

    pub fn midline_x(&self) -> f64 {
        0.5 * (self.bounds.min.x + self.bounds.max.x)
    }

    pub fn point_in_obstacle(&self, p: &Point2D) -> bool {
        self.obstacles.iter().any(|o| o.contains(p))
    }

    pub fn segment_blocked(&self, p: Point2D, q: Point2D) -> bool {
        self.obstacles.iter().any(|o| segment_intersects_obstacle(p, q, o))
    }

    /// The memberless design holding only the fixed nodes.
    pub fn seed_design(&self) -> TrussDesign {
        let mut nodes = self.fixed_nodes.clone();
        nodes.sort_by_key(|n| n.id);
        TrussDesign { nodes, members: Vec::new() }
    }
}

/// The evolving design state. Nodes and members are kept sorted by id.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrussDesign {
    pub nodes: Vec<Node>,
    pub members: Vec<Member>,
}

impl TrussDesign {
    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.node_index(id).map(|i| &self.nodes[i])
    }

    pub fn node_index(&self, id: NodeId) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    pub fn member(&self, id: MemberId) -> Option<&Member> {
        self.members.iter().find(|m| m.id == id)
    }

    pub fn member_between(&self, a: NodeId, b: NodeId) -> Option<&Member> {
        self.members.iter().find(|m| m.connects(a, b))
    }

    pub fn next_node_id(&self) -> NodeId {
        NodeId(self.nodes.iter().map(|n| n.id.0 + 1).max().unwrap_or(0))
    }

    pub fn next_member_id(&self) -> MemberId {
        MemberId(self.members.iter().map(|m| m.id.0 + 1).max().unwrap_or(0))
    }

    pub fn degree(&self, id: NodeId) -> usize {
        self.members.iter().filter(|m| m.touches(id)).count()
    }

    /// Endpoint positions of a member, if both endpoints exist.
    pub fn member_endpoints(&self, member: &Member) -> Option<(Point2D, Point2D)> {
        Some((self.node(member.node_a)?.pos, self.node(member.node_b)?.pos))
    }

    pub fn member_length(&self, id: MemberId) -> Result<f64, ModelError> {
        let member = self.member(id).ok_or(ModelError::UnknownMember(id))?;
        let (a, b) = self.member_endpoints(member).ok_or(ModelError::UnknownMember(id))?;
        Ok(a.distance(&b))
    }

    pub fn total_mass(&self, scenario: &Scenario) -> f64 {
        self.members
            .iter()
            .filter_map(|m| {
                let (a, b) = self.member_endpoints(m)?;
                Some(scenario.material.density * scenario.size_table.area(m.size_index) * a.distance(&b))
            })
            .sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("design serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        serde_json::from_str(text).map_err(ModelError::from_json)
    }

    pub(crate) fn sort(&mut self) {
        self.nodes.sort_by_key(|n| n.id);
        self.members.sort_by_key(|m| m.id);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NonFiniteNode { node_id: NodeId },
    DuplicateNodeId { node_id: NodeId },
    DuplicateMemberId { member_id: MemberId },
    NodeOutOfBounds { node_id: NodeId },
    NodesTooClose { node_a: NodeId, node_b: NodeId },
    BadLoad { node_id: NodeId },
    MissingFixedNode { node_id: NodeId },
    FixedNodeAltered { node_id: NodeId },
    DanglingMember { member_id: MemberId },
    SelfLoop { member_id: MemberId },
    DuplicateMember { member_id: MemberId },
    SizeOutOfRange { member_id: MemberId },
    NodeInObstacle { node_id: NodeId },
    ObstacleViolation { member_id: MemberId },
}

/// Lists every invariant the design breaks against `scenario`.
pub fn validate_design(design: &TrussDesign, scenario: &Scenario) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut seen_nodes = HashSet::new();
    for n in &design.nodes {
        if !seen_nodes.insert(n.id) {
            out.push(Violation::DuplicateNodeId { node_id: n.id });
        }
        if !n.pos.is_finite() || !n.applied_load.is_finite() {
            out.push(Violation::NonFiniteNode { node_id: n.id });
            continue;
        }
        if !scenario.bounds.contains(&n.pos) {
            out.push(Violation::NodeOutOfBounds { node_id: n.id });
        }
        let loaded = n.applied_load != Force::default();
        let load_ok = match n.kind {
            NodeKind::Load => loaded,
            NodeKind::Support | NodeKind::Free => !loaded,
        };
        if !load_ok {
            out.push(Violation::BadLoad { node_id: n.id });
        }
        if scenario.point_in_obstacle(&n.pos) {
            out.push(Violation::NodeInObstacle { node_id: n.id });
        }
    }
    for (i, a) in design.nodes.iter().enumerate() {
        for b in &design.nodes[i + 1..] {
            if a.pos.distance(&b.pos) < MIN_NODE_SPACING {
                out.push(Violation::NodesTooClose { node_a: a.id, node_b: b.id });
            }
        }
    }
    for fixed in &scenario.fixed_nodes {
        match design.node(fixed.id) {
            None => out.push(Violation::MissingFixedNode { node_id: fixed.id }),
            Some(n) if n != fixed => out.push(Violation::FixedNodeAltered { node_id: fixed.id }),
            Some(_) => {}
        }
    }
    for n in &design.nodes {
        if n.is_fixed() && !scenario.fixed_nodes.iter().any(|f| f.id == n.id) {
            out.push(Violation::FixedNodeAltered { node_id: n.id });
        }
    }

    let mut seen_members = HashSet::new();
    let mut seen_pairs = BTreeSet::new();
    for m in &design.members {
        if !seen_members.insert(m.id) {
            out.push(Violation::DuplicateMemberId { member_id: m.id });
        }
        if !scenario.size_table.contains(m.size_index) {
            out.push(Violation::SizeOutOfRange { member_id: m.id });
        }
        if m.node_a == m.node_b {
            out.push(Violation::SelfLoop { member_id: m.id });
        }
        if !seen_pairs.insert(m.key()) {
            out.push(Violation::DuplicateMember { member_id: m.id });
        }
        match design.member_endpoints(m) {
            None => out.push(Violation::DanglingMember { member_id: m.id }),
            Some((a, b)) => {
                if a.is_finite() && b.is_finite() && scenario.segment_blocked(a, b) {
                    out.push(Violation::ObstacleViolation { member_id: m.id });
                }
            }
        }
    }
    out
}
