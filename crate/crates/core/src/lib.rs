//! Statevector simulation of quantum tree search.
//!
//! A search problem with arbitrary (non-constant) branching is encoded as a
//! node register plus one action register per tree level. The operator 𝒜
//! puts the current level's action register into a uniform superposition of
//! the admissible actions, 𝒯 moves the node register along the chosen action,
//! and interleaving them `d` times yields the superposition tree. A phase
//! oracle marks goal (or heuristic-threshold) configurations and amplitude
//! amplification about the prepared state rotates amplitude into them.
//!
//! Every quantum result can be checked against the classical ground truth in
//! [`problem`].

pub mod amplify;
#[cfg(feature = "cli")]
pub mod cli;
pub mod drivers;
pub mod error;
pub mod prep;
pub mod problem;
pub mod report;
pub mod state;

pub use amplify::{
    amplify, apply_oracle, marked_mass, reflect_about, reflect_about_prepared, AmplificationSchedule, Amplified,
    Amplifier, MarkKind, MarkPredicate, PhaseOracle, Policy,
};
pub use drivers::{
    compare_strategies, greedy_quantum_loop, iterative_deepening_search, pruned_search, uninformed_search,
    PipelinePlan, PruningStage,
};
pub use error::{Error, Result};
pub use prep::{apply_action_superposition, apply_transition, prepare_tree_state, PreparationPlan};
pub use problem::{load_problem, ProblemSpec};
pub use report::{RunReport, RunStatus};
pub use state::{inner_product, Amplitude, RegisterLayout, TreeState};
