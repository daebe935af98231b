//! Propositional formulas in conjunctive normal form.
//!
//! Literals follow the DIMACS convention: variable `v` is the positive
//! integer `v`, its negation is `-v`, and `0` never appears inside a clause.

mod dimacs;
mod protocol;
mod registry;

pub use dimacs::{parse_dimacs, write_dimacs, DimacsError};
pub use protocol::{parse_solver_output, ProtocolError};
pub use registry::{RegistryError, SemanticVariable, VariableRegistry};

/// A signed DIMACS literal.
pub type Lit = i32;

/// Receives clauses from the encoder.
pub trait ClauseSink {
    fn emit(&mut self, clause: &[Lit]);
}

/// Sink that only counts clauses.
#[derive(Debug, Default, Clone, Copy)]
pub struct ClauseCounter(pub usize);

impl ClauseSink for ClauseCounter {
    fn emit(&mut self, _clause: &[Lit]) {
        self.0 += 1;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CnfFormula {
    variable_count: u32,
    clauses: Vec<Vec<Lit>>,
    comments: Vec<String>,
}

impl CnfFormula {
    pub fn new(variable_count: u32) -> Self {
        Self {
            variable_count,
            ..Self::default()
        }
    }

    pub fn variable_count(&self) -> u32 {
        self.variable_count
    }

    pub fn clauses(&self) -> &[Vec<Lit>] {
        &self.clauses
    }

    pub fn clause_count(&self) -> usize {
        self.clauses.len()
    }

    /// Comment lines, without the leading `c `.
    pub fn comments(&self) -> &[String] {
        &self.comments
    }

    pub fn add_comment(&mut self, comment: impl Into<String>) {
        self.comments.push(comment.into());
    }

    /// Appends a clause.
    ///
    /// Panics on an empty clause, a zero literal, or a literal whose variable
    /// exceeds the declared count: those are encoder bugs, not input errors.
    pub fn add_clause(&mut self, clause: Vec<Lit>) {
        assert!(!clause.is_empty(), "empty clause");
        for &lit in &clause {
            assert!(
                lit != 0 && lit.unsigned_abs() <= self.variable_count,
                "literal {lit} outside 1..={}",
                self.variable_count
            );
        }
        self.clauses.push(clause);
    }

    /// Index of the first clause not satisfied by `assignment`.
    pub fn first_falsified(&self, assignment: &Assignment) -> Option<usize> {
        self.clauses
            .iter()
            .position(|clause| !clause.iter().any(|&lit| assignment.satisfies(lit)))
    }

    pub fn is_satisfied_by(&self, assignment: &Assignment) -> bool {
        assignment.len() == self.variable_count as usize
            && self.first_falsified(assignment).is_none()
    }
}

impl ClauseSink for CnfFormula {
    fn emit(&mut self, clause: &[Lit]) {
        self.add_clause(clause.to_vec());
    }
}

/// A total truth assignment over variables `1..=V`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    values: Vec<bool>,
}

impl Assignment {
    /// `values[v - 1]` is the value of variable `v`.
    pub fn new(values: Vec<bool>) -> Self {
        Self { values }
    }

    pub fn all_false(variable_count: u32) -> Self {
        Self::new(vec![false; variable_count as usize])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value of variable `var` (1-based). Panics when out of range.
    pub fn value(&self, var: u32) -> bool {
        self.values[var as usize - 1]
    }

    pub fn set(&mut self, var: u32, value: bool) {
        self.values[var as usize - 1] = value;
    }

    pub fn satisfies(&self, lit: Lit) -> bool {
        self.values
            .get(lit.unsigned_abs() as usize - 1)
            .is_some_and(|&v| v == (lit > 0))
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    /// The assignment as DIMACS literals `±1 .. ±V`.
    pub fn literals(&self) -> impl Iterator<Item = Lit> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(idx, &v)| if v { idx as Lit + 1 } else { -(idx as Lit + 1) })
    }
}

/// Result of a satisfiability check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Satisfiable(Assignment),
    Unsatisfiable,
    TimedOut,
}

impl SolveOutcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveOutcome::Satisfiable(_))
    }
}
