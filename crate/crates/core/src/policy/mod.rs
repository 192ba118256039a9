//! Action selection for the four agent variants and the step pipeline.

mod agent;
mod heuristic;
mod select;

pub use agent::{agent_step, AgentState, StepOutcome, StepRecord};
pub use heuristic::{classify_heuristic, HeuristicState, HistoryEntry, HISTORY_LEN, MIRROR_TOLERANCE};
pub use select::{
    lookahead_argmax, lookahead_evaluations, select_combination, select_goal, select_temporal, select_vanilla,
    Selection, SelectorMode, VanillaScorer,
};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::visual::{InferenceConfig, SynthConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Vanilla,
    Temporal,
    Goal,
    Combination,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Vanilla, Variant::Temporal, Variant::Goal, Variant::Combination];

    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::Vanilla => "vanilla",
            Variant::Temporal => "temporal",
            Variant::Goal => "goal",
            Variant::Combination => "combination",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Variant::ALL
            .into_iter()
            .find(|v| v.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown variant `{s}` (expected vanilla, temporal, goal or combination)"))
    }
}

/// Probabilities of the heuristic, greedy and random modes. Serialized as
/// `[h, g, r]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct SelectionWeights {
    pub heuristic: f64,
    pub greedy: f64,
    pub random: f64,
}

impl SelectionWeights {
    pub fn new(heuristic: f64, greedy: f64, random: f64) -> Result<Self, String> {
        let w = [heuristic, greedy, random];
        if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(format!("selection weights must be non-negative, got {w:?}"));
        }
        if (w.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(format!("selection weights must sum to 1, got {w:?}"));
        }
        Ok(Self { heuristic, greedy, random })
    }
}

impl Default for SelectionWeights {
    fn default() -> Self {
        Self { heuristic: 0.3, greedy: 0.6, random: 0.1 }
    }
}

impl TryFrom<[f64; 3]> for SelectionWeights {
    type Error = String;

    fn try_from(w: [f64; 3]) -> Result<Self, String> {
        Self::new(w[0], w[1], w[2])
    }
}

impl From<SelectionWeights> for [f64; 3] {
    fn from(w: SelectionWeights) -> Self {
        [w.heuristic, w.greedy, w.random]
    }
}

pub const DEFAULT_BURST_LENGTH: usize = 5;
pub const DEFAULT_INITIAL_NODES: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AgentConfig {
    pub variant: Variant,
    pub weights: SelectionWeights,
    pub burst_length: usize,
    /// Only depth 1 is implemented.
    pub lookahead_depth: usize,
    /// Random free nodes in each agent's starting design.
    pub n_init: usize,
    pub inference: InferenceConfig,
    pub synth: SynthConfig,
}

impl Default for AgentConfig {
    fn default() -> Self {
        Self {
            variant: Variant::Vanilla,
            weights: SelectionWeights::default(),
            burst_length: DEFAULT_BURST_LENGTH,
            lookahead_depth: 1,
            n_init: DEFAULT_INITIAL_NODES,
            inference: InferenceConfig::default(),
            synth: SynthConfig::default(),
        }
    }
}

impl AgentConfig {
    pub fn for_variant(variant: Variant) -> Self {
        Self { variant, ..Self::default() }
    }

    pub fn check(&self) -> Result<(), String> {
        if self.burst_length == 0 {
            return Err("burst_length must be positive".into());
        }
        if self.lookahead_depth != 1 {
            return Err(format!("lookahead_depth {} is not supported (only 1)", self.lookahead_depth));
        }
        if self.inference.resolution < 16 {
            return Err("inference.resolution must be at least 16".into());
        }
        SelectionWeights::new(self.weights.heuristic, self.weights.greedy, self.weights.random).map(|_| ())
    }
}
