//! Fixed-size subset enumeration over bitmasks.
//!
//! Subsets of a universe `{0, .., u-1}` are `u64` bitmasks. [`KSubsets`]
//! walks every mask with exactly `j` bits set in strictly ascending integer
//! order (Gosper's hack). Ascending order of equal-popcount masks coincides
//! with colexicographic order, so the position of a mask in that walk has a
//! closed form via the combinatorial number system ([`colex_rank`]).

use num_integer::binomial;
use thiserror::Error;

/// Largest universe size supported by the `u64` representation.
pub const MAX_UNIVERSE: u32 = 63;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubsetError {
    #[error("subset size {size} exceeds universe size {universe}")]
    SizeExceedsUniverse { size: u32, universe: u32 },
    #[error("universe size {0} exceeds the supported maximum of {MAX_UNIVERSE}")]
    UniverseTooLarge(u32),
}

/// Iterator over all `size`-element subsets of `{0, .., universe-1}`.
#[derive(Debug, Clone)]
pub struct KSubsets {
    next: Option<u64>,
    limit: u64,
}

impl KSubsets {
    pub fn new(universe: u32, size: u32) -> Result<Self, SubsetError> {
        if universe > MAX_UNIVERSE {
            return Err(SubsetError::UniverseTooLarge(universe));
        }
        if size > universe {
            return Err(SubsetError::SizeExceedsUniverse { size, universe });
        }
        Ok(Self {
            next: Some((1u64 << size) - 1),
            limit: 1u64 << universe,
        })
    }
}

impl Iterator for KSubsets {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let current = self.next?;
        self.next = if current == 0 {
            // The empty set is the only 0-subset.
            None
        } else {
            let lowest = current & current.wrapping_neg();
            let ripple = current + lowest;
            let successor = (((ripple ^ current) >> 2) / lowest) | ripple;
            (successor < self.limit).then_some(successor)
        };
        Some(current)
    }
}

/// All `size`-subsets of a `universe`-element set in ascending mask order.
pub fn enumerate_k_subsets(universe: u32, size: u32) -> Result<Vec<u64>, SubsetError> {
    Ok(KSubsets::new(universe, size)?.collect())
}

/// Position of `mask` among the masks of equal popcount in ascending order.
pub fn colex_rank(mask: u64) -> u64 {
    let mut rank = 0;
    let mut bits = mask;
    let mut j = 1;
    while bits != 0 {
        let pos = bits.trailing_zeros() as u64;
        rank += binomial(pos, j);
        bits &= bits - 1;
        j += 1;
    }
    rank
}

/// Inverse of [`colex_rank`] for masks with `size` bits set.
pub fn colex_unrank(mut rank: u64, size: u32) -> u64 {
    let mut mask = 0u64;
    for j in (1..=size as u64).rev() {
        // Largest position p with C(p, j) <= rank.
        let mut pos = j - 1;
        while binomial(pos + 1, j) <= rank {
            pos += 1;
        }
        rank -= binomial(pos, j);
        mask |= 1 << pos;
    }
    mask
}

/// Indices of the set bits of `mask`, ascending.
pub fn members(mask: u64) -> impl Iterator<Item = usize> {
    let mut bits = mask;
    std::iter::from_fn(move || {
        if bits == 0 {
            None
        } else {
            let pos = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(pos)
        }
    })
}
