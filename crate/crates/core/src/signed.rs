//! Sign-sum identities: terms `a·‖x_J − x_K‖²` for disjoint `J`, `K`.
//!
//! A signed term is rewritten into plain squared norms with
//! `‖x_J − x_K‖² = 2‖x_J‖² + 2‖x_K‖² − ‖x_{J∪K}‖²`, which holds in every
//! inner-product space. Weighted families `Σ_I a_I Σ_{J⊆I} ‖x_J − x_{I∖J}‖²`
//! additionally admit a closed-form validity test: the identity holds iff
//! `Σ_{I∋i} 2^{|I|} a_I = 0` for every index `i`, and for product weights
//! `a_I = Π_{i∈I} a_i` that sum factors as `2a_i Π_{j≠i} (1 + 2a_j)`.

use std::collections::BTreeMap;

use crate::error::Error;
use crate::identity::PlainIdentity;
use crate::rational::Rational;
use crate::subset::{check_count, subsets_of, Subset};

/// Upper bound on the number of split terms a family may expand into.
pub const MAX_SPLIT_TERMS: u128 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedTerm {
    plus: Subset,
    minus: Subset,
    coeff: Rational,
}

impl SignedTerm {
    pub fn new(plus: Subset, minus: Subset, coeff: Rational) -> Result<Self, Error> {
        if !plus.is_disjoint(minus) {
            return Err(Error::InvalidTerm(format!(
                "indices {} appear with both signs",
                plus.intersection(minus)
            )));
        }
        if plus.union(minus).is_empty() {
            return Err(Error::InvalidTerm("term has no indices".into()));
        }
        Ok(SignedTerm { plus, minus, coeff })
    }

    pub fn plus(&self) -> Subset {
        self.plus
    }

    pub fn minus(&self) -> Subset {
        self.minus
    }

    pub fn coeff(&self) -> &Rational {
        &self.coeff
    }

    pub fn support(&self) -> Subset {
        self.plus.union(self.minus)
    }

    /// Larger supports first, then by support word, then by the minus part.
    fn listing_key(&self) -> (std::cmp::Reverse<usize>, u64, u64) {
        let (size, word) = self.support().listing_key();
        (size, word, self.minus.bits())
    }
}

/// An ordered list of signed terms over `{1..=n}`.
///
/// Terms are kept as written; [`SignedIdentity::canonical`] merges repeats.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedIdentity {
    n: usize,
    terms: Vec<SignedTerm>,
}

impl SignedIdentity {
    pub fn new(n: usize) -> Result<Self, Error> {
        check_count(n)?;
        Ok(SignedIdentity { n, terms: Vec::new() })
    }

    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self, Error>
    where
        I: IntoIterator<Item = SignedTerm>,
    {
        let mut sid = SignedIdentity::new(n)?;
        for t in terms {
            sid.push(t)?;
        }
        Ok(sid)
    }

    pub fn from_plain(id: &PlainIdentity) -> Self {
        SignedIdentity {
            n: id.n(),
            terms: id
                .terms()
                .map(|(s, c)| SignedTerm {
                    plus: s,
                    minus: Subset::EMPTY,
                    coeff: c.clone(),
                })
                .collect(),
        }
    }

    pub fn push(&mut self, term: SignedTerm) -> Result<(), Error> {
        let top = term.support().max_index();
        if top > self.n {
            return Err(Error::IndexOutOfRange { index: top, n: self.n });
        }
        self.terms.push(term);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[SignedTerm] {
        &self.terms
    }

    pub fn is_plain(&self) -> bool {
        self.terms.iter().all(|t| t.minus.is_empty())
    }

    /// Repeated `(plus, minus)` atoms merged, zero coefficients dropped and
    /// terms sorted: larger supports first, then support word, then minus word.
    pub fn canonical(&self) -> SignedIdentity {
        let mut merged: BTreeMap<(Subset, Subset), Rational> = BTreeMap::new();
        for t in &self.terms {
            *merged.entry((t.plus, t.minus)).or_default() += &t.coeff;
        }
        let mut terms: Vec<SignedTerm> = merged
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|((plus, minus), coeff)| SignedTerm { plus, minus, coeff })
            .collect();
        terms.sort_by_key(SignedTerm::listing_key);
        SignedIdentity { n: self.n, terms }
    }

    pub fn scaled(&self, factor: &Rational) -> SignedIdentity {
        SignedIdentity {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|t| SignedTerm {
                    coeff: &t.coeff * factor,
                    ..t.clone()
                })
                .collect(),
        }
    }
}

/// Rewrites every `c·‖x_J − x_K‖²` as `c·(2‖x_J‖² + 2‖x_K‖² − ‖x_{J∪K}‖²)`.
///
/// A term with an empty minus part reduces to `c·‖x_J‖²`.
pub fn signed_to_plain(sid: &SignedIdentity) -> PlainIdentity {
    let mut out = PlainIdentity::new(sid.n).expect("ambient count already validated");
    let two = Rational::from(2);
    for t in &sid.terms {
        let twice = &t.coeff * &two;
        let parts = [
            (t.plus, twice.clone()),
            (t.minus, twice),
            (t.support(), -&t.coeff),
        ];
        for (subset, coeff) in parts {
            out.add_term(subset, &coeff)
                .expect("term support already checked against n");
        }
    }
    out
}

/// Weights `a_I` over nonempty subsets `I` of `{1..=n}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedFamily {
    n: usize,
    weights: BTreeMap<Subset, Rational>,
}

impl WeightedFamily {
    pub fn new(n: usize) -> Result<Self, Error> {
        check_count(n)?;
        Ok(WeightedFamily {
            n,
            weights: BTreeMap::new(),
        })
    }

    pub fn from_weights<I>(n: usize, weights: I) -> Result<Self, Error>
    where
        I: IntoIterator<Item = (Subset, Rational)>,
    {
        let mut wf = WeightedFamily::new(n)?;
        for (s, w) in weights {
            wf.add_weight(s, &w)?;
        }
        Ok(wf)
    }

    /// The full family over every nonempty `I ⊆ {1..=n}` with
    /// `a_I = Π_{i∈I} a_i`, where `n = scalars.len()`.
    pub fn product_form(scalars: &[Rational]) -> Result<Self, Error> {
        let n = scalars.len();
        check_count(n)?;
        let sets = (1u128 << n) - 1;
        if sets > MAX_SPLIT_TERMS {
            return Err(Error::ResourceLimit {
                terms: sets,
                limit: MAX_SPLIT_TERMS,
            });
        }
        let mut wf = WeightedFamily::new(n)?;
        // a_I = a_{I∖{top}} · a_top, filled in ascending word order.
        let mut table: Vec<Rational> = Vec::with_capacity(1 << n);
        table.push(Rational::one());
        for word in 1u64..(1 << n) {
            let top = 63 - word.leading_zeros() as usize;
            let w = &table[(word & !(1 << top)) as usize] * &scalars[top];
            wf.add_weight(Subset::from_bits(word), &w)?;
            table.push(w);
        }
        Ok(wf)
    }

    pub fn add_weight(&mut self, subset: Subset, weight: &Rational) -> Result<(), Error> {
        if subset.is_empty() {
            return Err(Error::InvalidTerm("family members must be nonempty".into()));
        }
        if subset.max_index() > self.n {
            return Err(Error::IndexOutOfRange {
                index: subset.max_index(),
                n: self.n,
            });
        }
        let slot = self.weights.entry(subset).or_default();
        *slot += weight;
        if slot.is_zero() {
            self.weights.remove(&subset);
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weight(&self, subset: Subset) -> Rational {
        self.weights.get(&subset).cloned().unwrap_or_default()
    }

    pub fn weights(&self) -> impl Iterator<Item = (Subset, &Rational)> {
        self.weights.iter().map(|(s, w)| (*s, w))
    }

    /// Number of split terms `Σ_I 2^{|I|}` the family expands into.
    pub fn split_term_count(&self) -> u128 {
        self.weights
            .keys()
            .map(|s| 1u128 << s.len())
            .fold(0u128, u128::saturating_add)
    }
}

/// Emits every split `(J, I∖J, a_I)` for `J ⊆ I`, including `J = ∅` and
/// `J = I`, so each unordered sign pattern appears twice.
pub fn expand_sign_family(wf: &WeightedFamily) -> Result<SignedIdentity, Error> {
    let total = wf.split_term_count();
    if total > MAX_SPLIT_TERMS {
        return Err(Error::ResourceLimit {
            terms: total,
            limit: MAX_SPLIT_TERMS,
        });
    }
    let mut terms = Vec::with_capacity(total as usize);
    for (set, weight) in wf.weights() {
        for part in subsets_of(set, None) {
            terms.push(SignedTerm {
                plus: part,
                minus: set.difference(part),
                coeff: weight.clone(),
            });
        }
    }
    Ok(SignedIdentity { n: wf.n, terms })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyCheck {
    pub valid: bool,
    /// `t_i = Σ_{I∋i} 2^{|I|} a_I` for every `i` in `1..=n`.
    pub per_index: BTreeMap<usize, Rational>,
}

/// Decides a weighted sign-sum family without expanding it.
pub fn check_family(wf: &WeightedFamily) -> FamilyCheck {
    let mut per_index: BTreeMap<usize, Rational> =
        (1..=wf.n).map(|i| (i, Rational::zero())).collect();
    for (set, weight) in wf.weights() {
        let contribution = weight * Rational::pow2(set.len() as i64);
        for i in set.indices() {
            *per_index.get_mut(&i).expect("index within n") += &contribution;
        }
    }
    let valid = per_index.values().all(Rational::is_zero);
    FamilyCheck { valid, per_index }
}

/// Closed-form test for the full product family: holds iff
/// `2a_i Π_{j≠i} (1 + 2a_j) = 0` for every `i`.
pub fn check_product_weights(scalars: &[Rational]) -> Result<bool, Error> {
    if scalars.len() < 2 {
        return Err(Error::Parameter(format!(
            "product weights need at least 2 scalars, got {}",
            scalars.len()
        )));
    }
    let two = Rational::from(2);
    let factors: Vec<Rational> = scalars.iter().map(|a| Rational::one() + a * &two).collect();
    Ok((0..scalars.len()).all(|i| {
        if scalars[i].is_zero() {
            return true;
        }
        factors
            .iter()
            .enumerate()
            .any(|(j, f)| j != i && f.is_zero())
    }))
}
