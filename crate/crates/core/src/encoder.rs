//! Compiles "is there a profile with `n` agents over `m` alternatives whose
//! Condorcet dimension is at least `k`?" into CNF.
//!
//! The formula has three blocks, emitted in this order:
//!
//! 1. per agent, the linear-order axioms over `r(i, a, b)`;
//! 2. for every candidate set `S` of size `k - 1`, clauses forcing some
//!    `y ∉ S` to be left uncovered: `c(S, y)` must hold whenever some
//!    strict majority `M` of agents fails to contain an agent `i` with
//!    `h(S, y, i)`, and `h(S, y, i)` forces agent `i` to rank `y` above
//!    every member of `S`;
//! 3. optionally, unit clauses fixing agent 0 to the order `0 > 1 > ... > m-1`.

use num_integer::binomial;
use thiserror::Error;

use crate::cnf::{ClauseCounter, ClauseSink, CnfFormula, Lit, VariableRegistry};
use crate::model::{majority_threshold, AlternativeSet, CoverageThreshold};
use crate::subsets::{KSubsets, MAX_UNIVERSE};

pub use crate::subsets::enumerate_k_subsets;

/// Bumped whenever the emitted clause sequence changes.
pub const ENCODER_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("need at least one agent")]
    NoAgents,
    #[error("need at least one alternative")]
    NoAlternatives,
    #[error("at most {MAX_UNIVERSE} agents and alternatives are supported")]
    TooLarge,
    #[error("dimension bound k={k} must satisfy 2 <= k <= m (m={m})")]
    Dimension { k: usize, m: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EncodeOptions {
    pub agents: usize,
    pub alternatives: usize,
    pub dimension: usize,
    pub symmetry_breaking: bool,
    pub theta: CoverageThreshold,
}

impl EncodeOptions {
    pub fn new(agents: usize, alternatives: usize, dimension: usize) -> Self {
        Self {
            agents,
            alternatives,
            dimension,
            symmetry_breaking: true,
            theta: CoverageThreshold::half(),
        }
    }

    pub fn with_symmetry_breaking(mut self, enabled: bool) -> Self {
        self.symmetry_breaking = enabled;
        self
    }

    pub fn with_theta(mut self, theta: CoverageThreshold) -> Self {
        self.theta = theta;
        self
    }

    pub fn validate(&self) -> Result<(), EncodeError> {
        if self.agents == 0 {
            return Err(EncodeError::NoAgents);
        }
        if self.alternatives == 0 {
            return Err(EncodeError::NoAlternatives);
        }
        if self.agents > MAX_UNIVERSE as usize || self.alternatives > MAX_UNIVERSE as usize {
            return Err(EncodeError::TooLarge);
        }
        if self.dimension < 2 || self.dimension > self.alternatives {
            return Err(EncodeError::Dimension {
                k: self.dimension,
                m: self.alternatives,
            });
        }
        Ok(())
    }

    pub fn registry(&self) -> Result<VariableRegistry, EncodeError> {
        self.validate()?;
        Ok(
            VariableRegistry::new(self.agents, self.alternatives, self.dimension)
                .expect("validated options"),
        )
    }
}

/// Reflexivity, completeness, antisymmetry and transitivity of agent `agent`.
pub fn encode_linear_order(
    registry: &VariableRegistry,
    agent: usize,
    out: &mut impl ClauseSink,
) -> usize {
    let m = registry.alternatives();
    let r = |a: usize, b: usize| registry.pref(agent, a, b) as Lit;
    let mut count = 0;
    let mut emit = |clause: &[Lit]| {
        out.emit(clause);
        count += 1;
    };

    for a in 0..m {
        emit(&[r(a, a)]);
    }
    for a in 0..m {
        for b in a + 1..m {
            emit(&[r(a, b), r(b, a)]);
        }
    }
    for a in 0..m {
        for b in a + 1..m {
            emit(&[-r(a, b), -r(b, a)]);
        }
    }
    // Triples with a repeated element are implied by the clauses above.
    for x in 0..m {
        for y in 0..m {
            if y == x {
                continue;
            }
            for z in 0..m {
                if z == x || z == y {
                    continue;
                }
                emit(&[-r(x, y), -r(y, z), r(x, z)]);
            }
        }
    }
    count
}

/// For every candidate set of size `k - 1`, forbids it from being a
/// θ-winning set.
pub fn encode_no_condorcet_set(
    options: &EncodeOptions,
    registry: &VariableRegistry,
    out: &mut impl ClauseSink,
) -> Result<usize, EncodeError> {
    options.validate()?;
    let (n, m, k) = (options.agents, options.alternatives, options.dimension);
    let quorum = majority_threshold(n, options.theta);
    // A quorum larger than n leaves no majority to enumerate.
    let majorities: Vec<u64> = if quorum <= n {
        KSubsets::new(n as u32, quorum as u32)
            .expect("quorum <= n")
            .collect()
    } else {
        Vec::new()
    };

    let mut count = 0;
    let mut clause: Vec<Lit> = Vec::with_capacity(quorum.max(m) + 1);
    for mask in KSubsets::new(m as u32, (k - 1) as u32).expect("k <= m") {
        let set = AlternativeSet::from_mask(mask);
        let outside: Vec<usize> = set.complement_in(m).collect();

        clause.clear();
        clause.extend(outside.iter().map(|&y| -(registry.cover(set, y) as Lit)));
        out.emit(&clause);
        count += 1;

        for &y in &outside {
            let cover = registry.cover(set, y) as Lit;
            for &majority in &majorities {
                clause.clear();
                clause.push(cover);
                clause.extend(
                    crate::subsets::members(majority).map(|i| registry.helper(set, y, i) as Lit),
                );
                out.emit(&clause);
                count += 1;
            }
            for agent in 0..n {
                let helper = registry.helper(set, y, agent) as Lit;
                for x in set.iter() {
                    out.emit(&[-helper, -(registry.pref(agent, x, y) as Lit)]);
                    count += 1;
                }
            }
        }
    }
    Ok(count)
}

/// Fixes agent 0 to the lexicographic order when symmetry breaking is on.
pub fn encode_lexicographic_first_agent(
    options: &EncodeOptions,
    registry: &VariableRegistry,
    out: &mut impl ClauseSink,
) -> usize {
    if !options.symmetry_breaking {
        return 0;
    }
    let m = options.alternatives;
    let mut count = 0;
    for x in 0..m {
        for y in x + 1..m {
            out.emit(&[registry.pref(0, x, y) as Lit]);
            count += 1;
        }
    }
    count
}

fn encode_into(
    options: &EncodeOptions,
    registry: &VariableRegistry,
    out: &mut impl ClauseSink,
) -> Result<usize, EncodeError> {
    let mut count = 0;
    for agent in 0..options.agents {
        count += encode_linear_order(registry, agent, out);
    }
    count += encode_no_condorcet_set(options, registry, out)?;
    count += encode_lexicographic_first_agent(options, registry, out);
    Ok(count)
}

/// The complete instance together with the registry that numbers it.
pub fn build_instance(
    options: &EncodeOptions,
) -> Result<(CnfFormula, VariableRegistry), EncodeError> {
    let registry = options.registry()?;
    let mut formula = CnfFormula::new(registry.variable_count());
    formula.add_comment(format!(
        "n={} m={} k={} sym={}",
        options.agents,
        options.alternatives,
        options.dimension,
        u8::from(options.symmetry_breaking)
    ));
    formula.add_comment(format!(
        "theta={} encoder=condim-v{ENCODER_VERSION}",
        options.theta
    ));
    encode_into(options, &registry, &mut formula)?;
    Ok((formula, registry))
}

/// Clause count of [`build_instance`] without materializing the formula.
pub fn count_clauses(options: &EncodeOptions) -> Result<usize, EncodeError> {
    let registry = options.registry()?;
    let mut counter = ClauseCounter::default();
    encode_into(options, &registry, &mut counter)?;
    Ok(counter.0)
}

/// Closed-form clause counts per block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClauseBudget {
    pub linear_order_per_agent: usize,
    pub no_condorcet_set: usize,
    pub symmetry: usize,
}

impl ClauseBudget {
    pub fn of(options: &EncodeOptions) -> Self {
        let (n, m, k) = (options.agents, options.alternatives, options.dimension);
        let quorum = majority_threshold(n, options.theta);
        let majorities = if quorum <= n { binomial(n, quorum) } else { 0 };
        let outside = m + 1 - k;
        Self {
            linear_order_per_agent: m
                + 2 * binomial(m, 2)
                + m * m.saturating_sub(1) * m.saturating_sub(2),
            no_condorcet_set: binomial(m, k - 1)
                * (1 + outside * majorities + outside * n * (k - 1)),
            symmetry: if options.symmetry_breaking {
                binomial(m, 2)
            } else {
                0
            },
        }
    }

    pub fn total(&self, agents: usize) -> usize {
        agents * self.linear_order_per_agent + self.no_condorcet_set + self.symmetry
    }
}
