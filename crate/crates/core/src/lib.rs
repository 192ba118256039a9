//! Goal-directed design agents for sequential truss configuration.
//!
//! A design is built one action at a time. Each agent step renders the
//! current design, obtains an add/remove heatmap, turns heatmap blobs into
//! candidate actions, and picks one with a variant-specific selector:
//! image similarity, heuristic bursts, one-step objective lookahead, or a
//! weighted mix of the three. Teams of agents periodically adopt the best
//! design in their pool.

pub mod actions;
pub mod error;
pub mod fea;
pub mod model;
pub mod policy;
pub mod seed;
pub mod team;
pub mod visual;

pub use actions::{apply, filter_candidates, is_applicable, Action, CandidateAction, HeuristicLabel};
pub use error::{ActionError, ModelError, VisualError};
pub use fea::{evaluate, objective_rank, EvaluationResult};
pub use model::{validate_design, Point2D, Scenario, TrussDesign, Violation};
