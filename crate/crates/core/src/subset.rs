//! Index subsets as 64-bit occupancy words, subset enumeration and binomials.

use std::fmt;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::Error;

/// Largest supported index; a subset of `{1..=63}` fits one machine word.
pub const MAX_INDEX: usize = 63;

/// A set of indices from `1..=63`. Index `i` occupies bit `i - 1`.
///
/// `Ord` compares occupancy words, so `{1} < {2} < {1,2} < {3}`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Subset(u64);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn from_bits(bits: u64) -> Self {
        Subset(bits & !(1 << MAX_INDEX))
    }

    pub fn singleton(index: usize) -> Result<Self, Error> {
        check_index(index)?;
        Ok(Subset(1 << (index - 1)))
    }

    pub fn pair(i: usize, j: usize) -> Result<Self, Error> {
        Ok(Subset::singleton(i)?.union(Subset::singleton(j)?))
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Result<Self, Error> {
        let mut bits = 0u64;
        for index in indices {
            check_index(index)?;
            bits |= 1 << (index - 1);
        }
        Ok(Subset(bits))
    }

    /// `{1..=n}`.
    pub fn full(n: usize) -> Result<Self, Error> {
        check_count(n)?;
        Ok(Subset((1u64 << n) - 1))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, index: usize) -> bool {
        (1..=MAX_INDEX).contains(&index) && self.0 & (1 << (index - 1)) != 0
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn intersection(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub fn difference(self, other: Subset) -> Subset {
        Subset(self.0 & !other.0)
    }

    pub fn is_disjoint(self, other: Subset) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    /// Largest index present, or 0 for the empty set.
    pub fn max_index(self) -> usize {
        64 - self.0.leading_zeros() as usize
    }

    /// Members in ascending order.
    pub fn indices(self) -> Indices {
        Indices(self.0)
    }

    /// Sort key for canonical listings: larger subsets first, then by word.
    pub fn listing_key(self) -> (std::cmp::Reverse<usize>, u64) {
        (std::cmp::Reverse(self.len()), self.0)
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.indices()).finish()
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.indices().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("}")
    }
}

pub struct Indices(u64);

impl Iterator for Indices {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i + 1)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Indices {}

pub(crate) fn check_index(index: usize) -> Result<(), Error> {
    if (1..=MAX_INDEX).contains(&index) {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange {
            index,
            n: MAX_INDEX,
        })
    }
}

pub(crate) fn check_count(n: usize) -> Result<(), Error> {
    if (1..=MAX_INDEX).contains(&n) {
        Ok(())
    } else {
        Err(Error::IndexCount { n })
    }
}

/// Subsets of `parent`, optionally restricted to one cardinality, in
/// ascending occupancy-word order. The empty set is included when allowed.
pub fn subsets_of(parent: Subset, cardinality: Option<usize>) -> SubsetsOf {
    let positions: Vec<u64> = parent.indices().map(|i| 1u64 << (i - 1)).collect();
    let state = match cardinality {
        None => State::All { mask: parent.0, next: Some(0) },
        Some(k) if k > positions.len() => State::Done,
        Some(k) => State::Fixed {
            limit: 1u64 << positions.len(),
            next: (1u64 << k) - 1,
            k,
        },
    };
    SubsetsOf { positions, state }
}

pub struct SubsetsOf {
    positions: Vec<u64>,
    state: State,
}

enum State {
    All { mask: u64, next: Option<u64> },
    Fixed { limit: u64, next: u64, k: usize },
    Done,
}

impl SubsetsOf {
    fn deposit(&self, compressed: u64) -> u64 {
        let mut out = 0;
        let mut rest = compressed;
        while rest != 0 {
            out |= self.positions[rest.trailing_zeros() as usize];
            rest &= rest - 1;
        }
        out
    }
}

impl Iterator for SubsetsOf {
    type Item = Subset;

    fn next(&mut self) -> Option<Subset> {
        match self.state {
            State::Done => None,
            State::All { mask, ref mut next } => {
                let current = (*next)?;
                let following = current.wrapping_sub(mask) & mask;
                *next = (following != 0).then_some(following);
                Some(Subset(current))
            }
            State::Fixed { limit, next, k } => {
                if next >= limit {
                    self.state = State::Done;
                    return None;
                }
                let out = Subset(self.deposit(next));
                if k == 0 {
                    self.state = State::Done;
                } else {
                    // Gosper's hack: next word with the same popcount.
                    let low = next & next.wrapping_neg();
                    let ripple = next + low;
                    let successor = ripple | (((ripple ^ next) >> 2) / low);
                    self.state = State::Fixed { limit, next: successor, k };
                }
                Some(out)
            }
        }
    }
}

/// `C(n, k)`, zero when `k < 0` or `k > n`.
pub fn binomial(n: u64, k: i64) -> BigUint {
    if k < 0 || k as u64 > n {
        return BigUint::default();
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `C(n, k)` as a `u128`, saturating. Used for size estimates only.
pub(crate) fn binomial_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn set(ix: &[usize]) -> Subset {
        Subset::from_indices(ix.iter().copied()).unwrap()
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(4, 2), BigUint::from(6u32));
        assert_eq!(binomial(5, -1), BigUint::default());
        assert_eq!(binomial(5, 6), BigUint::default());
        assert_eq!(binomial(0, 0), BigUint::one());
        assert_eq!(binomial(62, 31), "465428353255261088".parse::<BigUint>().unwrap());
    }

    #[test]
    fn pascal_recurrence() {
        for n in 3..=20u64 {
            for k in 2..n as i64 {
                assert_eq!(
                    binomial(n - 2, k - 2) + binomial(n - 2, k - 1),
                    binomial(n - 1, k - 1),
                    "n={n} k={k}"
                );
            }
        }
    }

    #[test]
    fn pairs_of_three() {
        let got: Vec<_> = subsets_of(set(&[1, 2, 3]), Some(2)).collect();
        assert_eq!(got, vec![set(&[1, 2]), set(&[1, 3]), set(&[2, 3])]);
    }

    #[test]
    fn power_set_of_two() {
        let got: Vec<_> = subsets_of(set(&[1, 2]), None).collect();
        assert_eq!(got, vec![Subset::EMPTY, set(&[1]), set(&[2]), set(&[1, 2])]);
    }

    #[test]
    fn sparse_parent_and_edge_cardinalities() {
        let parent = set(&[2, 5, 9]);
        let all: Vec<_> = subsets_of(parent, None).collect();
        assert_eq!(all.len(), 8);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(subsets_of(parent, Some(0)).collect::<Vec<_>>(), vec![Subset::EMPTY]);
        assert_eq!(subsets_of(parent, Some(3)).collect::<Vec<_>>(), vec![parent]);
        assert_eq!(subsets_of(parent, Some(4)).count(), 0);
        assert_eq!(subsets_of(Subset::EMPTY, None).count(), 1);
    }

    #[test]
    fn large_parent_small_cardinality() {
        let full = Subset::full(63).unwrap();
        assert_eq!(subsets_of(full, Some(2)).count(), 63 * 62 / 2);
        assert_eq!(subsets_of(full, Some(63)).count(), 1);
    }

    #[test]
    fn enumeration_counts_match_binomials() {
        for n in 0..=12usize {
            let parent = Subset::from_bits((1u64 << n) - 1);
            let all: HashSet<_> = subsets_of(parent, None).collect();
            assert_eq!(all.len(), 1 << n);
            for k in 0..=n {
                let sized: Vec<_> = subsets_of(parent, Some(k)).collect();
                // brute-force filter of the power set is the oracle
                let brute = (0u64..1 << n).filter(|w| w.count_ones() as usize == k).count();
                assert_eq!(sized.len(), brute);
                assert_eq!(BigUint::from(sized.len()), binomial(n as u64, k as i64));
                assert!(sized.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    #[test]
    fn index_bounds() {
        assert!(Subset::singleton(0).is_err());
        assert!(Subset::singleton(64).is_err());
        assert!(Subset::singleton(63).is_ok());
        assert!(Subset::full(64).is_err());
        assert!(Subset::full(0).is_err());
        assert_eq!(set(&[3, 1]).to_string(), "{1,3}");
        assert_eq!(set(&[3, 1]).max_index(), 3);
        assert_eq!(binomial_u128(60, 30), 118264581564861424);
    }
}
