//! Decides whether a preference profile of Condorcet dimension at least `k`
//! exists for `n` agents and `m` alternatives, by compiling the question to
//! CNF, solving it, and checking any model against a brute-force oracle.

pub mod cli;
pub mod cnf;
pub mod decode;
pub mod encoder;
pub mod model;
pub mod solver;
pub mod subsets;

pub use cnf::{Assignment, CnfFormula, SolveOutcome, VariableRegistry};
pub use decode::{decode_profile, verify_at_least_dimension, WitnessReport};
pub use encoder::{build_instance, EncodeOptions};
pub use model::{AlternativeSet, CoverageThreshold, PreferenceProfile};
pub use solver::{solve, SolverConfig};
