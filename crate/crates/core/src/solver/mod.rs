//! Satisfiability back ends: the built-in CDCL search or an external
//! DIMACS solver process. Every satisfiable answer is checked against the
//! formula before it is returned.

mod cdcl;
mod external;

use std::io;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::cnf::CnfFormula;
pub use crate::cnf::SolveOutcome;
pub use cdcl::{CdclSolver, SearchResult, SolverStats};
pub use external::{CommandTemplate, CNF_PLACEHOLDER};

/// Environment variable naming the external solver command template.
pub const SOLVER_ENV: &str = "CONDIM_EXTERNAL_SOLVER";
/// Used by `ext` when [`SOLVER_ENV`] is unset.
pub const DEFAULT_EXTERNAL_SOLVER: &str = "kissat -q {cnf}";

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("solver configuration: {0}")]
    Config(String),
    #[error("solver environment: {0}")]
    Environment(String),
    #[error("solver integrity: {0}")]
    Integrity(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Backend {
    Builtin,
    External(CommandTemplate),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverConfig {
    pub backend: Backend,
    pub timeout: Option<Duration>,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            backend: Backend::Builtin,
            timeout: None,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn builtin() -> Self {
        Self::default()
    }

    pub fn external(template: &str) -> Result<Self, SolverError> {
        Ok(Self {
            backend: Backend::External(CommandTemplate::parse(template)?),
            ..Self::default()
        })
    }

    /// External solver taken from [`SOLVER_ENV`], falling back to
    /// [`DEFAULT_EXTERNAL_SOLVER`].
    pub fn external_from_env() -> Result<Self, SolverError> {
        let template = std::env::var(SOLVER_ENV).unwrap_or_else(|_| DEFAULT_EXTERNAL_SOLVER.into());
        Self::external(&template)
    }

    pub fn with_timeout(mut self, timeout: Option<Duration>) -> Self {
        self.timeout = timeout;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

fn verified(
    formula: &CnfFormula,
    outcome: SolveOutcome,
    origin: &str,
) -> Result<SolveOutcome, SolverError> {
    if let SolveOutcome::Satisfiable(assignment) = &outcome {
        if assignment.len() != formula.variable_count() as usize {
            return Err(SolverError::Integrity(format!(
                "{origin} returned {} values for {} variables",
                assignment.len(),
                formula.variable_count()
            )));
        }
        if let Some(idx) = formula.first_falsified(assignment) {
            return Err(SolverError::Integrity(format!(
                "{origin} model falsifies clause #{idx} {:?}",
                formula.clauses()[idx]
            )));
        }
    }
    Ok(outcome)
}

pub fn solve_builtin(
    formula: &CnfFormula,
    config: &SolverConfig,
) -> Result<SolveOutcome, SolverError> {
    let deadline = config.timeout.map(|t| Instant::now() + t);
    let outcome = match CdclSolver::new(formula, config.seed).solve(deadline) {
        SearchResult::Sat(assignment) => SolveOutcome::Satisfiable(assignment),
        SearchResult::Unsat => SolveOutcome::Unsatisfiable,
        SearchResult::Interrupted => SolveOutcome::TimedOut,
    };
    verified(formula, outcome, "built-in solver")
}

pub fn solve_external(
    formula: &CnfFormula,
    config: &SolverConfig,
) -> Result<SolveOutcome, SolverError> {
    let Backend::External(template) = &config.backend else {
        return Err(SolverError::Config(
            "no external solver command configured".into(),
        ));
    };
    let outcome = external::solve_external(formula, template, config.timeout)?;
    verified(formula, outcome, "external solver")
}

pub fn solve(formula: &CnfFormula, config: &SolverConfig) -> Result<SolveOutcome, SolverError> {
    match config.backend {
        Backend::Builtin => solve_builtin(formula, config),
        Backend::External(_) => solve_external(formula, config),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::parse_dimacs;

    #[test]
    fn unit_contradiction() {
        let f = parse_dimacs("p cnf 1 2\n1 0\n-1 0\n").unwrap();
        let out = solve(&f, &SolverConfig::builtin()).unwrap();
        assert_eq!(out, SolveOutcome::Unsatisfiable);
    }

    #[test]
    fn no_clauses() {
        let f = parse_dimacs("p cnf 4 0\n").unwrap();
        assert!(solve(&f, &SolverConfig::builtin()).unwrap().is_sat());
    }

    #[test]
    fn zero_timeout_is_reported_as_such() {
        let f = parse_dimacs("p cnf 2 1\n1 2 0\n").unwrap();
        let cfg = SolverConfig::builtin().with_timeout(Some(Duration::ZERO));
        assert_eq!(solve(&f, &cfg).unwrap(), SolveOutcome::TimedOut);
    }

    #[test]
    fn template_needs_placeholder() {
        assert!(matches!(
            CommandTemplate::parse("kissat"),
            Err(SolverError::Config(_))
        ));
        assert!(matches!(
            CommandTemplate::parse("  "),
            Err(SolverError::Config(_))
        ));
        assert!(CommandTemplate::parse("kissat -q {cnf}").is_ok());
    }

    #[test]
    fn bogus_model_is_rejected() {
        let f = parse_dimacs("p cnf 2 1\n1 2 0\n").unwrap();
        let bad = SolveOutcome::Satisfiable(crate::cnf::Assignment::all_false(2));
        assert!(matches!(
            verified(&f, bad, "test"),
            Err(SolverError::Integrity(_))
        ));
    }

    #[test]
    fn missing_binary_is_environment_error() {
        let f = parse_dimacs("p cnf 1 1\n1 0\n").unwrap();
        let cfg = SolverConfig::external("/nonexistent/condim-solver {cnf}").unwrap();
        assert!(matches!(solve(&f, &cfg), Err(SolverError::Environment(_))));
    }
}
