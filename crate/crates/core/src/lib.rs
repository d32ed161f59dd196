//! Uncoupled no-regret learning dynamics whose average product distribution
//! of play converges to a correlated equilibrium.

pub mod diagnostics;
pub mod error;
pub mod game;
pub mod internal;
pub mod learner;
pub mod markov_tree;
pub mod metrics;
pub mod omwu;
pub mod runner;
pub mod simplex;
pub mod swap;

pub use error::{Error, Result};
pub use game::{Game, StrategyProfile};
pub use omwu::Omwu;
pub use simplex::SimplexVector;
pub use internal::{verify_equivalence, ArboDynamics, EquivalenceReport, SlOmwu};
pub use learner::{InnerRecord, Learner, MwuLearner};
pub use markov_tree::{enumerate_arborescences, solve_stationary, Arborescence, TransitionMatrix};
pub use metrics::{ce_gap, JointDistribution, RegretAccumulator, RunTrace};
pub use runner::{run_dynamics, Dynamics, EtaRule, GameSource, RunConfig, Summary};
pub use swap::BmOmwu;
