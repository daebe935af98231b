//! Preference profiles, the θ-covering relation, Condorcet winning sets and a
//! brute-force Condorcet dimension oracle.
//!
//! Everything here is deliberately independent of the CNF pipeline: the
//! oracle is what the SAT side is checked against.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::subsets::{self, KSubsets, MAX_UNIVERSE};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("a profile needs at least one agent")]
    NoAgents,
    #[error("a profile needs at least one alternative")]
    NoAlternatives,
    #[error("at most {MAX_UNIVERSE} alternatives are supported, got {0}")]
    TooManyAlternatives(usize),
    #[error("agent {agent} does not rank a permutation of 0..{alternatives}")]
    NotLinear { agent: usize, alternatives: usize },
    #[error("agent index {agent} out of range (n = {agents})")]
    AgentOutOfRange { agent: usize, agents: usize },
    #[error("alternative {alternative} out of range (m = {alternatives})")]
    AlternativeOutOfRange {
        alternative: usize,
        alternatives: usize,
    },
    #[error("the empty set of alternatives is not a candidate set")]
    EmptySet,
    #[error("alternative {0} is a member of the covering set")]
    CoveredIsMember(usize),
    #[error("not a permutation of 0..{0}")]
    NotAPermutation(usize),
    #[error("coverage threshold must lie in [0, 1), got {0}/{1}")]
    InvalidThreshold(u64, u64),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Exact rational θ in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CoverageThreshold(Ratio<u64>);

impl CoverageThreshold {
    pub fn new(numerator: u64, denominator: u64) -> Result<Self, ModelError> {
        if denominator == 0 || numerator >= denominator {
            return Err(ModelError::InvalidThreshold(numerator, denominator));
        }
        Ok(Self(Ratio::new(numerator, denominator)))
    }

    pub fn half() -> Self {
        Self(Ratio::new(1, 2))
    }

    pub fn numerator(&self) -> u64 {
        *self.0.numer()
    }

    pub fn denominator(&self) -> u64 {
        *self.0.denom()
    }

    /// `count > θ·n`, decided in exact arithmetic.
    pub fn exceeded_by(&self, count: usize, agents: usize) -> bool {
        count as u128 * self.denominator() as u128 > self.numerator() as u128 * agents as u128
    }
}

impl Default for CoverageThreshold {
    fn default() -> Self {
        Self::half()
    }
}

impl fmt::Display for CoverageThreshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator(), self.denominator())
    }
}

/// Smallest number of agents forming a strict θ-majority: `⌊θ·n⌋ + 1`.
pub fn majority_threshold(agents: usize, theta: CoverageThreshold) -> usize {
    (theta.numerator() as u128 * agents as u128 / theta.denominator() as u128) as usize + 1
}

/// Number of preference profiles with `agents` agents over `alternatives`
/// alternatives, `(m!)^n`.
pub fn profile_space_size(agents: usize, alternatives: usize) -> BigUint {
    let factorial: BigUint = (1..=alternatives as u64).map(BigUint::from).product();
    num_traits::pow(factorial, agents)
}

/// A set of alternatives, stored as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AlternativeSet(u64);

impl AlternativeSet {
    pub const EMPTY: Self = Self(0);

    pub fn from_mask(mask: u64) -> Self {
        Self(mask)
    }

    pub fn full(alternatives: usize) -> Self {
        debug_assert!(alternatives as u32 <= MAX_UNIVERSE);
        Self((1u64 << alternatives) - 1)
    }

    pub fn from_members<I: IntoIterator<Item = usize>>(members: I) -> Self {
        Self(members.into_iter().fold(0, |mask, a| mask | 1 << a))
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, alternative: usize) -> bool {
        alternative < 64 && self.0 >> alternative & 1 == 1
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        subsets::members(self.0)
    }

    /// Alternatives of `0..alternatives` outside this set, ascending.
    pub fn complement_in(self, alternatives: usize) -> impl Iterator<Item = usize> {
        (0..alternatives).filter(move |&y| !self.contains(y))
    }
}

impl fmt::Display for AlternativeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (idx, a) in self.iter().enumerate() {
            if idx > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str("}")
    }
}

/// `n` linear orders over `m` alternatives, most preferred first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PreferenceProfile {
    alternatives: usize,
    rankings: Vec<Vec<usize>>,
    // positions[i][a] = place of alternative a in agent i's ranking.
    positions: Vec<Vec<usize>>,
}

impl PreferenceProfile {
    pub fn new(rankings: Vec<Vec<usize>>) -> Result<Self, ModelError> {
        let first = rankings.first().ok_or(ModelError::NoAgents)?;
        let alternatives = first.len();
        if alternatives == 0 {
            return Err(ModelError::NoAlternatives);
        }
        if alternatives > MAX_UNIVERSE as usize {
            return Err(ModelError::TooManyAlternatives(alternatives));
        }
        let positions = rankings
            .iter()
            .enumerate()
            .map(|(agent, ranking)| {
                inverse_permutation(ranking, alternatives).ok_or(ModelError::NotLinear {
                    agent,
                    alternatives,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            alternatives,
            rankings,
            positions,
        })
    }

    pub fn agent_count(&self) -> usize {
        self.rankings.len()
    }

    pub fn alternative_count(&self) -> usize {
        self.alternatives
    }

    pub fn rankings(&self) -> &[Vec<usize>] {
        &self.rankings
    }

    pub fn ranking(&self, agent: usize) -> &[usize] {
        &self.rankings[agent]
    }

    fn check_agent(&self, agent: usize) -> Result<(), ModelError> {
        if agent < self.agent_count() {
            Ok(())
        } else {
            Err(ModelError::AgentOutOfRange {
                agent,
                agents: self.agent_count(),
            })
        }
    }

    fn check_alternative(&self, alternative: usize) -> Result<(), ModelError> {
        if alternative < self.alternatives {
            Ok(())
        } else {
            Err(ModelError::AlternativeOutOfRange {
                alternative,
                alternatives: self.alternatives,
            })
        }
    }

    fn check_set(&self, set: AlternativeSet) -> Result<(), ModelError> {
        if set.is_empty() {
            return Err(ModelError::EmptySet);
        }
        if !set.is_subset_of(AlternativeSet::full(self.alternatives)) {
            let stray = set.iter().find(|&a| a >= self.alternatives).unwrap_or(64);
            return Err(ModelError::AlternativeOutOfRange {
                alternative: stray,
                alternatives: self.alternatives,
            });
        }
        Ok(())
    }

    /// Whether agent `agent` ranks `a` at least as high as `b`.
    pub fn prefers(&self, agent: usize, a: usize, b: usize) -> Result<bool, ModelError> {
        self.check_agent(agent)?;
        self.check_alternative(a)?;
        self.check_alternative(b)?;
        Ok(self.prefers_unchecked(agent, a, b))
    }

    #[inline]
    pub(crate) fn prefers_unchecked(&self, agent: usize, a: usize, b: usize) -> bool {
        let pos = &self.positions[agent];
        pos[a] <= pos[b]
    }

    /// Number of agents ranking some member of `set` at least as high as `y`.
    pub fn covering_count(&self, set: AlternativeSet, y: usize) -> Result<usize, ModelError> {
        self.check_set(set)?;
        self.check_alternative(y)?;
        if set.contains(y) {
            return Err(ModelError::CoveredIsMember(y));
        }
        Ok(self.covering_count_unchecked(set, y))
    }

    fn covering_count_unchecked(&self, set: AlternativeSet, y: usize) -> usize {
        self.positions
            .iter()
            .filter(|pos| set.iter().any(|x| pos[x] <= pos[y]))
            .count()
    }

    /// Whether `set` θ-covers `y`.
    pub fn covers(
        &self,
        set: AlternativeSet,
        y: usize,
        theta: CoverageThreshold,
    ) -> Result<bool, ModelError> {
        let count = self.covering_count(set, y)?;
        Ok(theta.exceeded_by(count, self.agent_count()))
    }

    /// Alternatives outside `set` that `set` fails to θ-cover, ascending.
    pub fn uncovered(
        &self,
        set: AlternativeSet,
        theta: CoverageThreshold,
    ) -> Result<Vec<usize>, ModelError> {
        self.check_set(set)?;
        Ok(set
            .complement_in(self.alternatives)
            .filter(|&y| {
                !theta.exceeded_by(self.covering_count_unchecked(set, y), self.agent_count())
            })
            .collect())
    }

    pub fn is_condorcet_winning_set(&self, set: AlternativeSet) -> Result<bool, ModelError> {
        self.is_winning_set_at(set, CoverageThreshold::half())
    }

    pub fn is_winning_set_at(
        &self,
        set: AlternativeSet,
        theta: CoverageThreshold,
    ) -> Result<bool, ModelError> {
        self.check_set(set)?;
        Ok(set
            .complement_in(self.alternatives)
            .all(|y| theta.exceeded_by(self.covering_count_unchecked(set, y), self.agent_count())))
    }

    /// The first Condorcet winning set of minimum size, searching sizes
    /// ascending and masks in ascending order within a size.
    pub fn minimal_winning_set(&self) -> AlternativeSet {
        let m = self.alternatives as u32;
        for size in 1..=m {
            let hit = KSubsets::new(m, size)
                .expect("size <= m")
                .map(AlternativeSet::from_mask)
                .find(|&s| self.is_condorcet_winning_set(s).expect("valid set"));
            if let Some(set) = hit {
                return set;
            }
        }
        unreachable!("the full alternative set always wins")
    }

    pub fn condorcet_dimension(&self) -> usize {
        self.minimal_winning_set().len()
    }

    /// Same profile with a new alternative `m` ranked last by every agent.
    pub fn pad_with_bottom_alternative(&self) -> Result<Self, ModelError> {
        let m = self.alternatives;
        Self::new(
            self.rankings
                .iter()
                .map(|r| r.iter().copied().chain(std::iter::once(m)).collect())
                .collect(),
        )
    }

    /// Relabels alternative `a` as `permutation[a]`.
    pub fn permute_alternatives(&self, permutation: &[usize]) -> Result<Self, ModelError> {
        if inverse_permutation(permutation, self.alternatives).is_none() {
            return Err(ModelError::NotAPermutation(self.alternatives));
        }
        Self::new(
            self.rankings
                .iter()
                .map(|r| r.iter().map(|&a| permutation[a]).collect())
                .collect(),
        )
    }
}

fn inverse_permutation(seq: &[usize], len: usize) -> Option<Vec<usize>> {
    if seq.len() != len {
        return None;
    }
    let mut inverse = vec![usize::MAX; len];
    for (pos, &a) in seq.iter().enumerate() {
        if a >= len || inverse[a] != usize::MAX {
            return None;
        }
        inverse[a] = pos;
    }
    Some(inverse)
}

impl fmt::Display for PreferenceProfile {
    /// One line per agent, `0 > 1 > 2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ranking in &self.rankings {
            writeln!(f, "{}", format_ranking(ranking))?;
        }
        Ok(())
    }
}

pub(crate) fn format_ranking(ranking: &[usize]) -> String {
    ranking
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(" > ")
}

impl FromStr for PreferenceProfile {
    type Err = ModelError;

    fn from_str(text: &str) -> Result<Self, ModelError> {
        let mut rankings = Vec::new();
        let mut width = None;
        let mut last_line = 0;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            last_line = line;
            let content = raw.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            let ranking = content
                .split('>')
                .map(|tok| {
                    tok.trim().parse::<usize>().map_err(|_| ModelError::Parse {
                        line,
                        message: format!("expected an alternative index, found {:?}", tok.trim()),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            let expected = *width.get_or_insert(ranking.len());
            if ranking.len() != expected {
                return Err(ModelError::Parse {
                    line,
                    message: format!("expected {expected} alternatives, found {}", ranking.len()),
                });
            }
            if inverse_permutation(&ranking, expected).is_none() {
                return Err(ModelError::Parse {
                    line,
                    message: format!("ranking is not a permutation of 0..{expected}"),
                });
            }
            rankings.push(ranking);
        }
        if rankings.is_empty() {
            return Err(ModelError::Parse {
                line: last_line,
                message: "no agent rankings found".into(),
            });
        }
        Self::new(rankings)
    }
}
