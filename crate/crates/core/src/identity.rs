//! `PlainIdentity`: a finite sum `Σ c_A ‖x_A‖²` asserted to vanish.

use std::collections::BTreeMap;

use crate::error::Error;
use crate::rational::Rational;
use crate::subset::{check_count, Subset};

/// Coefficients `c_A` over nonempty subsets of `{1..=n}`.
///
/// Zero coefficients are never stored, so two identities are equal exactly
/// when their coefficient tables agree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlainIdentity {
    n: usize,
    terms: BTreeMap<Subset, Rational>,
}

impl PlainIdentity {
    pub fn new(n: usize) -> Result<Self, Error> {
        check_count(n)?;
        Ok(PlainIdentity {
            n,
            terms: BTreeMap::new(),
        })
    }

    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self, Error>
    where
        I: IntoIterator<Item = (Subset, Rational)>,
    {
        let mut id = PlainIdentity::new(n)?;
        for (subset, coeff) in terms {
            id.add_term(subset, &coeff)?;
        }
        Ok(id)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Adds `coeff` to the coefficient of `subset`, pruning the entry when it
    /// cancels. `‖x_∅‖² = 0`, so an empty subset is dropped with a log note.
    pub fn add_term(&mut self, subset: Subset, coeff: &Rational) -> Result<(), Error> {
        if subset.max_index() > self.n {
            return Err(Error::IndexOutOfRange {
                index: subset.max_index(),
                n: self.n,
            });
        }
        if subset.is_empty() {
            if !coeff.is_zero() {
                log::debug!("discarding coefficient {coeff} of the empty subset");
            }
            return Ok(());
        }
        if coeff.is_zero() {
            return Ok(());
        }
        let slot = self.terms.entry(subset).or_default();
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&subset);
        }
        Ok(())
    }

    pub fn coeff(&self, subset: Subset) -> Rational {
        self.terms.get(&subset).cloned().unwrap_or_default()
    }

    /// Stored terms in ascending occupancy-word order.
    pub fn terms(&self) -> impl Iterator<Item = (Subset, &Rational)> {
        self.terms.iter().map(|(s, c)| (*s, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scaled(&self, factor: &Rational) -> PlainIdentity {
        if factor.is_zero() {
            return PlainIdentity {
                n: self.n,
                terms: BTreeMap::new(),
            };
        }
        PlainIdentity {
            n: self.n,
            terms: self.terms.iter().map(|(s, c)| (*s, c * factor)).collect(),
        }
    }

    /// Coefficient-wise sum; the result lives over the larger ambient count.
    pub fn plus(&self, other: &PlainIdentity) -> PlainIdentity {
        let mut out = self.clone();
        out.n = self.n.max(other.n);
        for (s, c) in other.terms() {
            out.add_term(s, c).expect("subset within the larger ambient count");
        }
        out
    }

    /// Same identity over a larger ambient count.
    pub fn with_n(mut self, n: usize) -> Result<Self, Error> {
        check_count(n)?;
        let needed = self.terms.keys().map(|s| s.max_index()).max().unwrap_or(0);
        if needed > n {
            return Err(Error::IndexOutOfRange { index: needed, n });
        }
        self.n = n;
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn set(ix: &[usize]) -> Subset {
        Subset::from_indices(ix.iter().copied()).unwrap()
    }

    #[test]
    fn insert_then_subtract_leaves_nothing() {
        let mut id = PlainIdentity::new(3).unwrap();
        id.add_term(set(&[1, 3]), &ratio(2, 3)).unwrap();
        id.add_term(set(&[1, 3]), &ratio(-2, 3)).unwrap();
        assert!(id.is_empty());
    }

    #[test]
    fn empty_subset_and_zero_coefficients_are_dropped() {
        let mut id = PlainIdentity::new(2).unwrap();
        id.add_term(Subset::EMPTY, &ratio(5, 1)).unwrap();
        id.add_term(set(&[1]), &Rational::zero()).unwrap();
        assert!(id.is_empty());
    }

    #[test]
    fn rejects_out_of_range_subsets() {
        let mut id = PlainIdentity::new(2).unwrap();
        assert_eq!(
            id.add_term(set(&[3]), &Rational::one()),
            Err(Error::IndexOutOfRange { index: 3, n: 2 })
        );
        assert!(PlainIdentity::new(64).is_err());
        assert!(PlainIdentity::new(0).is_err());
    }

    #[test]
    fn scaling_and_summing() {
        let a = PlainIdentity::from_terms(2, [(set(&[1, 2]), ratio(1, 2))]).unwrap();
        let b = PlainIdentity::from_terms(3, [(set(&[1, 2]), ratio(-1, 1)), (set(&[3]), ratio(1, 1))])
            .unwrap();
        let sum = a.scaled(&ratio(2, 1)).plus(&b);
        assert_eq!(sum.n(), 3);
        assert_eq!(sum.len(), 1);
        assert_eq!(sum.coeff(set(&[3])), Rational::one());
        assert!(a.scaled(&Rational::zero()).is_empty());
    }
}
