use std::ops::RangeInclusive;

use num_integer::binomial;
use thiserror::Error;

use crate::model::AlternativeSet;
use crate::subsets::{colex_rank, colex_unrank, MAX_UNIVERSE};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegistryError {
    #[error("invalid registry parameters n={n} m={m} k={k}")]
    Parameters { n: usize, m: usize, k: usize },
    #[error("agent {0} out of range")]
    Agent(usize),
    #[error("alternative {0} out of range")]
    Alternative(usize),
    #[error("candidate set {set} does not have size {expected}")]
    SetSize {
        set: AlternativeSet,
        expected: usize,
    },
    #[error("alternative {0} belongs to the candidate set")]
    MemberOfSet(usize),
}

/// The meaning of a propositional variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SemanticVariable {
    /// Agent `agent` ranks `a` at least as high as `b`.
    Pref { agent: usize, a: usize, b: usize },
    /// Candidate set `set` covers alternative `y`.
    Cover { set: AlternativeSet, y: usize },
    /// Agent `agent` ranks `y` strictly above every member of `set`.
    Helper {
        set: AlternativeSet,
        y: usize,
        agent: usize,
    },
}

/// Numbers semantic variables family by family: all `Pref` first, then
/// `Cover`, then `Helper`, each row-major in its index tuple. Candidate sets
/// are indexed by their position in ascending-mask order, and `y` by its
/// position among the alternatives outside the set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VariableRegistry {
    n: usize,
    m: usize,
    k: usize,
    set_count: usize,
    outside: usize,
}

impl VariableRegistry {
    /// Registry for `n` agents, `m` alternatives and candidate sets of size `k - 1`.
    pub fn new(n: usize, m: usize, k: usize) -> Result<Self, RegistryError> {
        if n == 0 || m == 0 || m > MAX_UNIVERSE as usize || k == 0 || k > m {
            return Err(RegistryError::Parameters { n, m, k });
        }
        Ok(Self {
            n,
            m,
            k,
            set_count: binomial(m, k - 1),
            outside: m - k + 1,
        })
    }

    pub fn agents(&self) -> usize {
        self.n
    }

    pub fn alternatives(&self) -> usize {
        self.m
    }

    pub fn dimension(&self) -> usize {
        self.k
    }

    fn pref_count(&self) -> usize {
        self.n * self.m * self.m
    }

    fn cover_count(&self) -> usize {
        self.set_count * self.outside
    }

    fn helper_count(&self) -> usize {
        self.cover_count() * self.n
    }

    pub fn variable_count(&self) -> u32 {
        (self.pref_count() + self.cover_count() + self.helper_count()) as u32
    }

    pub fn pref_range(&self) -> RangeInclusive<u32> {
        1..=self.pref_count() as u32
    }

    pub fn cover_range(&self) -> RangeInclusive<u32> {
        let start = self.pref_count() as u32 + 1;
        start..=start + self.cover_count() as u32 - 1
    }

    pub fn helper_range(&self) -> RangeInclusive<u32> {
        let start = (self.pref_count() + self.cover_count()) as u32 + 1;
        start..=start + self.helper_count() as u32 - 1
    }

    /// `r(i, a, b)`; indices are assumed valid.
    #[inline]
    pub fn pref(&self, agent: usize, a: usize, b: usize) -> u32 {
        debug_assert!(agent < self.n && a < self.m && b < self.m);
        ((agent * self.m + a) * self.m + b) as u32 + 1
    }

    fn cover_slot(&self, set: AlternativeSet, y: usize) -> usize {
        let below = (set.mask() & ((1u64 << y) - 1)).count_ones() as usize;
        colex_rank(set.mask()) as usize * self.outside + (y - below)
    }

    /// `c(S, y)`; `set` must have `k - 1` members and exclude `y`.
    pub fn cover(&self, set: AlternativeSet, y: usize) -> u32 {
        (self.pref_count() + self.cover_slot(set, y)) as u32 + 1
    }

    /// `h(S, y, i)`; same preconditions as [`cover`](Self::cover).
    pub fn helper(&self, set: AlternativeSet, y: usize, agent: usize) -> u32 {
        (self.pref_count() + self.cover_count() + self.cover_slot(set, y) * self.n + agent) as u32
            + 1
    }

    fn check_cover(&self, set: AlternativeSet, y: usize) -> Result<(), RegistryError> {
        if set.len() != self.k - 1 {
            return Err(RegistryError::SetSize {
                set,
                expected: self.k - 1,
            });
        }
        if let Some(stray) = set.iter().find(|&a| a >= self.m) {
            return Err(RegistryError::Alternative(stray));
        }
        if y >= self.m {
            return Err(RegistryError::Alternative(y));
        }
        if set.contains(y) {
            return Err(RegistryError::MemberOfSet(y));
        }
        Ok(())
    }

    /// Validated id of `var`.
    pub fn variable_id(&self, var: SemanticVariable) -> Result<u32, RegistryError> {
        match var {
            SemanticVariable::Pref { agent, a, b } => {
                if agent >= self.n {
                    return Err(RegistryError::Agent(agent));
                }
                if let Some(bad) = [a, b].into_iter().find(|&x| x >= self.m) {
                    return Err(RegistryError::Alternative(bad));
                }
                Ok(self.pref(agent, a, b))
            }
            SemanticVariable::Cover { set, y } => {
                self.check_cover(set, y)?;
                Ok(self.cover(set, y))
            }
            SemanticVariable::Helper { set, y, agent } => {
                self.check_cover(set, y)?;
                if agent >= self.n {
                    return Err(RegistryError::Agent(agent));
                }
                Ok(self.helper(set, y, agent))
            }
        }
    }

    fn slot_to_cover(&self, slot: usize) -> (AlternativeSet, usize) {
        let set = colex_unrank((slot / self.outside) as u64, (self.k - 1) as u32);
        let set = AlternativeSet::from_mask(set);
        let y = set
            .complement_in(self.m)
            .nth(slot % self.outside)
            .expect("slot within range");
        (set, y)
    }

    /// Inverse of [`variable_id`](Self::variable_id).
    pub fn decode(&self, id: u32) -> Option<SemanticVariable> {
        if id == 0 || id > self.variable_count() {
            return None;
        }
        let mut idx = id as usize - 1;
        if idx < self.pref_count() {
            let b = idx % self.m;
            let a = idx / self.m % self.m;
            let agent = idx / (self.m * self.m);
            return Some(SemanticVariable::Pref { agent, a, b });
        }
        idx -= self.pref_count();
        if idx < self.cover_count() {
            let (set, y) = self.slot_to_cover(idx);
            return Some(SemanticVariable::Cover { set, y });
        }
        idx -= self.cover_count();
        let (set, y) = self.slot_to_cover(idx / self.n);
        Some(SemanticVariable::Helper {
            set,
            y,
            agent: idx % self.n,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pref_ids() {
        let reg = VariableRegistry::new(6, 6, 3).unwrap();
        let id = |agent, a, b| {
            reg.variable_id(SemanticVariable::Pref { agent, a, b })
                .unwrap()
        };
        assert_eq!(id(0, 0, 0), 1);
        assert_eq!(id(5, 5, 5), 216);
        assert_eq!(id(2, 3, 4), 2 * 36 + 3 * 6 + 4 + 1);
        assert_eq!(reg.variable_count(), 216 + 60 + 360);
        assert_eq!(*reg.cover_range().start(), 217);
        assert_eq!(*reg.helper_range().end(), 636);
    }

    #[test]
    fn first_cover_and_helper() {
        let reg = VariableRegistry::new(6, 6, 3).unwrap();
        let s01 = AlternativeSet::from_members([0, 1]);
        assert_eq!(reg.cover(s01, 2), 217);
        assert_eq!(reg.cover(s01, 5), 220);
        assert_eq!(reg.cover(AlternativeSet::from_members([0, 2]), 1), 221);
        assert_eq!(reg.helper(s01, 2, 0), 277);
        assert_eq!(reg.helper(s01, 2, 5), 282);
    }

    #[test]
    fn rejects_invalid_components() {
        let reg = VariableRegistry::new(3, 4, 3).unwrap();
        let s = AlternativeSet::from_members([0, 1]);
        assert_eq!(
            reg.variable_id(SemanticVariable::Pref {
                agent: 3,
                a: 0,
                b: 0
            }),
            Err(RegistryError::Agent(3))
        );
        assert_eq!(
            reg.variable_id(SemanticVariable::Cover { set: s, y: 1 }),
            Err(RegistryError::MemberOfSet(1))
        );
        assert!(matches!(
            reg.variable_id(SemanticVariable::Cover {
                set: AlternativeSet::from_members([0]),
                y: 2
            }),
            Err(RegistryError::SetSize { .. })
        ));
        assert_eq!(
            reg.variable_id(SemanticVariable::Helper {
                set: s,
                y: 4,
                agent: 0
            }),
            Err(RegistryError::Alternative(4))
        );
        assert!(VariableRegistry::new(3, 4, 5).is_err());
        assert!(VariableRegistry::new(0, 4, 2).is_err());
        assert_eq!(reg.decode(0), None);
        assert_eq!(reg.decode(reg.variable_count() + 1), None);
    }

    #[test]
    fn equal_parameters_number_identically() {
        let a = VariableRegistry::new(4, 5, 3).unwrap();
        let b = VariableRegistry::new(4, 5, 3).unwrap();
        for id in 1..=a.variable_count() {
            assert_eq!(a.decode(id), b.decode(id));
        }
    }
}
