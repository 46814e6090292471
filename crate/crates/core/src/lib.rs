//! Bayesian network structure learning: graphs, data, conditional
//! independence tests, network scores, constraint-based and score-based
//! learning.

pub mod citest;
pub mod constraint;
pub mod data;
pub mod error;
pub mod graph;
pub mod hc;
pub mod priors;
pub mod reference;
pub mod score;
pub mod special;
pub mod trace;

pub use citest::{ci_test, CiTester, TestKind, TestResult};
pub use constraint::{constraint_learn, Algorithm, LearnConfig};
pub use data::{DataKind, Dataset};
pub use error::{Error, Result};
pub use graph::Graph;
pub use hc::{hill_climb, HillClimbConfig};
pub use priors::{normalize_priors, Constraints, PriorKnowledge};
pub use score::{network_score, LocalScorer, ScoreKind, ScoreSpec};
pub use trace::{LearnTrace, TraceEvent};
