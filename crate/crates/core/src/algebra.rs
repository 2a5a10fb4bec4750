//! Reduction to pair/singleton form and the exact validity decision.
//!
//! In an inner-product space, for every `A` with `|A| > 2`,
//!
//! ```text
//! ‖x_A‖² = Σ_{B⊆A, |B|=2} ‖x_B‖² − (|A| − 2) Σ_{i∈A} ‖x_i‖²
//! ```
//!
//! so any identity `Σ c_A ‖x_A‖² = 0` rewrites into one whose terms have at
//! most two indices. On a space of dimension at least 2 the identity holds iff
//!
//! 1. every pair coefficient `a_{i,j}` of the rewritten form is zero, and
//! 2. every singleton sum `s_i = Σ_{A∋i} c_A` is zero (the value of the
//!    identity at `x_i = u`, all other vectors zero, for a unit vector `u`).
//!
//! Dimension-one spaces are not covered: there the pair terms are collinear
//! and an identity can hold with nonzero pair coefficients.

use std::collections::BTreeMap;

use crate::error::Error;
use crate::eval::{Evaluate, ExactAssignment};
use crate::identity::PlainIdentity;
use crate::rational::Rational;
use crate::subset::{subsets_of, Subset};

/// An identity rewritten so that only `‖x_B‖²` with `|B| ∈ {1, 2}` remain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedForm {
    n: usize,
    pairs: BTreeMap<Subset, Rational>,
    singletons: BTreeMap<usize, Rational>,
}

impl ReducedForm {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Nonzero pair coefficients in ascending occupancy-word order.
    pub fn pair_coeffs(&self) -> &BTreeMap<Subset, Rational> {
        &self.pairs
    }

    /// Nonzero singleton coefficients by index.
    pub fn singleton_coeffs(&self) -> &BTreeMap<usize, Rational> {
        &self.singletons
    }

    pub fn is_zero(&self) -> bool {
        self.pairs.is_empty() && self.singletons.is_empty()
    }

    /// The reduced form as an ordinary identity over the same indices.
    pub fn to_plain(&self) -> PlainIdentity {
        let singles = self
            .singletons
            .iter()
            .map(|(i, c)| (Subset::singleton(*i).expect("index in range"), c.clone()));
        let pairs = self.pairs.iter().map(|(s, c)| (*s, c.clone()));
        PlainIdentity::from_terms(self.n, pairs.chain(singles)).expect("subsets within n")
    }

    fn bump_pair(&mut self, pair: Subset, coeff: &Rational) {
        let slot = self.pairs.entry(pair).or_default();
        *slot += coeff;
        if slot.is_zero() {
            self.pairs.remove(&pair);
        }
    }

    fn bump_singleton(&mut self, index: usize, coeff: &Rational) {
        let slot = self.singletons.entry(index).or_default();
        *slot += coeff;
        if slot.is_zero() {
            self.singletons.remove(&index);
        }
    }
}

/// Rewrites every term with more than two indices into pair and singleton
/// terms and merges like terms.
pub fn expand_to_pairs(id: &PlainIdentity) -> ReducedForm {
    let mut out = ReducedForm {
        n: id.n(),
        pairs: BTreeMap::new(),
        singletons: BTreeMap::new(),
    };
    for (set, coeff) in id.terms() {
        match set.len() {
            1 => out.bump_singleton(set.max_index(), coeff),
            2 => out.bump_pair(set, coeff),
            size => {
                for pair in subsets_of(set, Some(2)) {
                    out.bump_pair(pair, coeff);
                }
                let correction = -(coeff * Rational::from(size as i64 - 2));
                for i in set.indices() {
                    out.bump_singleton(i, &correction);
                }
            }
        }
    }
    out
}

/// `s_i = Σ_{A∋i} c_A` for every `i` in `1..=n`, zeros included.
pub fn singleton_sums(id: &PlainIdentity) -> BTreeMap<usize, Rational> {
    let mut sums: BTreeMap<usize, Rational> = (1..=id.n()).map(|i| (i, Rational::zero())).collect();
    for (set, coeff) in id.terms() {
        for i in set.indices() {
            *sums.get_mut(&i).expect("index within n") += coeff;
        }
    }
    sums
}

/// Why an identity fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// `a_{i,j} ≠ 0` in the reduced form.
    PairCoefficient { pair: Subset, coeff: Rational },
    /// `s_i ≠ 0`.
    SingletonSum { index: usize, sum: Rational },
}

impl Certificate {
    pub fn value(&self) -> &Rational {
        match self {
            Certificate::PairCoefficient { coeff, .. } => coeff,
            Certificate::SingletonSum { sum, .. } => sum,
        }
    }
}

/// Rational plane vectors on which an invalid identity is nonzero.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub assignment: ExactAssignment,
    pub residual: Rational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Refutation {
    pub certificate: Certificate,
    pub witness: Witness,
}

/// Outcome of [`verify`]. The reduced form and singleton sums are always
/// present, so callers can print the full coefficient table either way.
#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub reduced: ReducedForm,
    pub singleton_sums: BTreeMap<usize, Rational>,
    pub refutation: Option<Refutation>,
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        self.refutation.is_none()
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        self.refutation.as_ref().map(|r| &r.certificate)
    }
}

/// Decides whether `id` holds in every inner-product space of dimension ≥ 2.
///
/// The certificate is the first nonzero pair coefficient in ascending
/// occupancy-word order, or failing that the first nonzero singleton sum.
pub fn verify(id: &PlainIdentity) -> Verdict {
    let reduced = expand_to_pairs(id);
    let sums = singleton_sums(id);
    let certificate = reduced
        .pairs
        .iter()
        .next()
        .map(|(pair, coeff)| Certificate::PairCoefficient {
            pair: *pair,
            coeff: coeff.clone(),
        })
        .or_else(|| {
            sums.iter()
                .find(|(_, s)| !s.is_zero())
                .map(|(i, s)| Certificate::SingletonSum {
                    index: *i,
                    sum: s.clone(),
                })
        });
    let refutation = certificate.map(|certificate| {
        let witness = make_witness(id, &certificate)
            .expect("certificate computed from this identity is consistent");
        Refutation {
            certificate,
            witness,
        }
    });
    Verdict {
        reduced,
        singleton_sums: sums,
        refutation,
    }
}

fn plane_assignment(n: usize, placed: &[(usize, [i64; 2])]) -> ExactAssignment {
    let mut vectors = vec![vec![Rational::zero(), Rational::zero()]; n];
    for (i, [a, b]) in placed {
        vectors[i - 1] = vec![Rational::from(*a), Rational::from(*b)];
    }
    ExactAssignment::new(vectors).expect("uniform plane vectors")
}

/// Builds explicit plane vectors on which `id` evaluates to a nonzero value.
///
/// For a pair certificate `{i, j}` it sets `x_i = (1, 0)` and tries
/// `x_j = (1, 0)`, `(−1, 0)`, `(0, 1)` in turn, all other vectors zero. Along
/// `x_j = (cos θ, sin θ)` the value is affine in `cos θ` with slope
/// `2·a_{i,j}`, so the first two trials cannot both vanish. For a singleton
/// certificate `x_i = (1, 0)` alone gives the value `s_i`.
pub fn make_witness(id: &PlainIdentity, certificate: &Certificate) -> Result<Witness, Error> {
    let n = id.n();
    match certificate {
        Certificate::PairCoefficient { pair, coeff } => {
            let expected = pair_coefficient(id, *pair)?;
            if coeff.is_zero() || &expected != coeff {
                return Err(Error::Internal(format!(
                    "pair certificate {pair} = {coeff} does not match the identity ({expected})"
                )));
            }
            let mut ix = pair.indices();
            let (i, j) = (ix.next().unwrap(), ix.next().unwrap());
            for partner in [[1, 0], [-1, 0], [0, 1]] {
                let assignment = plane_assignment(n, &[(i, [1, 0]), (j, partner)]);
                let residual = id.eval_exact(&assignment)?;
                if !residual.is_zero() {
                    return Ok(Witness {
                        assignment,
                        residual,
                    });
                }
            }
            Err(Error::Internal(format!(
                "no trial vector refuted the nonzero pair coefficient of {pair}"
            )))
        }
        Certificate::SingletonSum { index, sum } => {
            if *index == 0 || *index > n {
                return Err(Error::IndexOutOfRange { index: *index, n });
            }
            let assignment = plane_assignment(n, &[(*index, [1, 0])]);
            let residual = id.eval_exact(&assignment)?;
            if sum.is_zero() || &residual != sum {
                return Err(Error::Internal(format!(
                    "singleton certificate s_{index} = {sum} does not match the identity ({residual})"
                )));
            }
            Ok(Witness {
                assignment,
                residual,
            })
        }
    }
}

/// `a_{i,j} = Σ_{A ⊇ {i,j}} c_A`, read straight off the original terms.
fn pair_coefficient(id: &PlainIdentity, pair: Subset) -> Result<Rational, Error> {
    if pair.len() != 2 || pair.max_index() > id.n() {
        return Err(Error::Internal(format!("{pair} is not a pair within 1..={}", id.n())));
    }
    Ok(id
        .terms()
        .filter(|(s, _)| pair.is_subset_of(*s))
        .map(|(_, c)| c)
        .sum())
}
