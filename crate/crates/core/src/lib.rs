//! Learning objective functions from pairwise preferences.
//!
//! A user compares pairs of candidate solutions, each described by a vector of
//! measures. From the verdicts, prefforge fits an objective function made of
//! regression rules: threshold conditions over the measures, each paired with a
//! weighted mean of the measure values.
//!
//! The pipeline:
//!
//! 1. [`generation`] pairs up solutions of problem instances into a
//!    [`model::ComparisonSet`].
//! 2. [`elicitation`] drives the question loop, choosing comparisons with
//!    consistency, evolution, order and random strategies.
//! 3. [`learner`] searches integer weights with a genetic algorithm
//!    ([`weight_search`]) and splits the measure space with a rule learner
//!    ([`partition`]) while that keeps lowering the error.
//!
//! [`oracle`] simulates a user for closed-loop runs, [`io`] stores every
//! artifact as versioned JSON, and [`fixture`] ships the building
//! generalisation case study.

pub mod elicitation;
pub mod error;
pub mod fixture;
pub mod generation;
pub mod io;
pub mod learner;
pub mod model;
pub mod objective;
pub mod oracle;
pub mod partition;
pub mod weight_search;

pub use error::{Error, Result, Violation};
pub use learner::{learn_objective, LearnConfig, LearnReport, Learned};
pub use model::{
    Comparison, ComparisonSet, InstanceCatalog, MeasureDescriptor, MeasureSchema, Preference, ProblemInstance,
    Solution, Verdict,
};
pub use objective::{render_rules, ErrorModel, GlobalError, ObjectiveFunction};
