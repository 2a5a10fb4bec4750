//! Named identity families.

use crate::error::Error;
use crate::identity::PlainIdentity;
use crate::rational::Rational;
use crate::signed::{expand_sign_family, SignedIdentity, SignedTerm, WeightedFamily, MAX_SPLIT_TERMS};
use crate::subset::{binomial, binomial_u128, check_count, subsets_of, Subset};

/// Largest plain family we are willing to materialise.
pub const MAX_PLAIN_TERMS: u128 = MAX_SPLIT_TERMS;

fn set(indices: &[usize]) -> Subset {
    Subset::from_indices(indices.iter().copied()).expect("small literal indices")
}

/// `‖x+y+z‖² − ‖x+y‖² − ‖x+z‖² − ‖y+z‖² + ‖x‖² + ‖y‖² + ‖z‖² = 0`.
pub fn frechet() -> PlainIdentity {
    let one = Rational::one();
    let minus = -Rational::one();
    PlainIdentity::from_terms(
        3,
        [
            (set(&[1, 2, 3]), one.clone()),
            (set(&[1, 2]), minus.clone()),
            (set(&[1, 3]), minus.clone()),
            (set(&[2, 3]), minus),
            (set(&[1]), one.clone()),
            (set(&[2]), one.clone()),
            (set(&[3]), one),
        ],
    )
    .expect("fixed terms")
}

/// `‖x_1 + x_2‖² + ‖x_1 − x_2‖² − 2‖x_1‖² − 2‖x_2‖² = 0`.
pub fn parallelogram() -> SignedIdentity {
    let term = |plus: &[usize], minus: &[usize], c: i64| {
        SignedTerm::new(set(plus), set(minus), Rational::from(c)).expect("fixed term")
    };
    SignedIdentity::from_terms(
        2,
        [
            term(&[1, 2], &[], 1),
            term(&[1], &[2], 1),
            term(&[1], &[], -2),
            term(&[2], &[], -2),
        ],
    )
    .expect("fixed terms")
}

/// `C(n−2,k−2)‖x_1+…+x_n‖² − Σ_{|A|=k} ‖x_A‖² + C(n−2,k−1) Σ_i ‖x_i‖² = 0`.
///
/// `k = n` is accepted; the identity then cancels to `0 = 0`.
pub fn binomial_family(n: usize, k: usize) -> Result<PlainIdentity, Error> {
    check_count(n)?;
    if k < 2 || k > n {
        return Err(Error::Parameter(format!("need 2 <= k <= n, got n = {n}, k = {k}")));
    }
    let size = binomial_u128(n as u64, k as u64);
    if size > MAX_PLAIN_TERMS {
        return Err(Error::ResourceLimit {
            terms: size,
            limit: MAX_PLAIN_TERMS,
        });
    }
    let full = Subset::full(n)?;
    let mut id = PlainIdentity::new(n)?;
    id.add_term(full, &binomial(n as u64 - 2, k as i64 - 2).into())?;
    let minus = -Rational::one();
    for a in subsets_of(full, Some(k)) {
        id.add_term(a, &minus)?;
    }
    let single: Rational = binomial(n as u64 - 2, k as i64 - 1).into();
    for i in 1..=n {
        id.add_term(Subset::singleton(i)?, &single)?;
    }
    Ok(id)
}

/// `Σ_{I⊆{1..n}} (−1)^{|I|} ‖x_I‖² = 0`, valid for `n ≥ 3`.
pub fn alternating(n: usize) -> Result<PlainIdentity, Error> {
    if n < 3 {
        return Err(Error::Parameter(format!(
            "the alternating identity requires n >= 3 (it fails for n = 2), got n = {n}"
        )));
    }
    check_count(n)?;
    let size = (1u128 << n) - 1;
    if size > MAX_PLAIN_TERMS {
        return Err(Error::ResourceLimit {
            terms: size,
            limit: MAX_PLAIN_TERMS,
        });
    }
    let (plus, minus) = (Rational::one(), -Rational::one());
    PlainIdentity::from_terms(
        n,
        subsets_of(Subset::full(n)?, None)
            .skip(1)
            .map(|s| (s, if s.len() % 2 == 0 { plus.clone() } else { minus.clone() })),
    )
}

/// Sign sums over every nonempty `I` with `|I| = k`, each of the `2^k`
/// sign patterns weighted by `(−1)^k 2^{n−k}`.
pub fn parallelepiped(n: usize) -> Result<SignedIdentity, Error> {
    if n < 2 {
        return Err(Error::Parameter(format!("need n >= 2, got n = {n}")));
    }
    check_count(n)?;
    let sets = (1u128 << n) - 1;
    if sets > MAX_SPLIT_TERMS {
        return Err(Error::ResourceLimit {
            terms: sets,
            limit: MAX_SPLIT_TERMS,
        });
    }
    let mut wf = WeightedFamily::new(n)?;
    for set in subsets_of(Subset::full(n)?, None).skip(1) {
        let k = set.len() as i64;
        let sign = if k % 2 == 0 { Rational::one() } else { -Rational::one() };
        wf.add_weight(set, &(sign * Rational::pow2(n as i64 - k)))?;
    }
    expand_sign_family(&wf)
}

/// The full product family `a_I = Π_{i∈I} a_i`, expanded into split terms.
pub fn product_sign_sum(scalars: &[Rational]) -> Result<SignedIdentity, Error> {
    if scalars.len() < 2 {
        return Err(Error::Parameter(format!(
            "need at least 2 scalars, got {}",
            scalars.len()
        )));
    }
    expand_sign_family(&WeightedFamily::product_form(scalars)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{singleton_sums, verify};
    use crate::rational::ratio;
    use crate::signed::signed_to_plain;

    #[test]
    fn frechet_is_valid_with_zero_singleton_sums() {
        let f = frechet();
        assert!(verify(&f).is_valid());
        assert!(singleton_sums(&f).values().all(Rational::is_zero));
    }

    #[test]
    fn frechet_is_negated_alternating_three() {
        let alt = alternating(3).unwrap();
        assert_eq!(frechet(), alt.scaled(&ratio(-1, 1)));
    }

    #[test]
    fn parallelogram_is_valid() {
        assert!(verify(&signed_to_plain(&parallelogram())).is_valid());
    }

    #[test]
    fn binomial_family_at_k_two_matches_pair_expansion() {
        for n in 3..=7 {
            let id = binomial_family(n, 2).unwrap();
            let full = Subset::full(n).unwrap();
            assert_eq!(id.coeff(full), Rational::one());
            for pair in subsets_of(full, Some(2)) {
                assert_eq!(id.coeff(pair), ratio(-1, 1));
            }
            for i in 1..=n {
                assert_eq!(id.coeff(Subset::singleton(i).unwrap()), Rational::from(n as i64 - 2));
            }
        }
    }

    #[test]
    fn binomial_family_singleton_sums_vanish() {
        let sums = singleton_sums(&binomial_family(5, 3).unwrap());
        assert!(sums.values().all(Rational::is_zero));
        assert!(verify(&binomial_family(5, 3).unwrap()).is_valid());
    }

    #[test]
    fn binomial_family_parameters() {
        assert!(binomial_family(5, 1).is_err());
        assert!(binomial_family(5, 6).is_err());
        assert!(binomial_family(5, 5).unwrap().is_empty());
        assert!(binomial_family(2, 2).unwrap().is_empty());
        assert!(matches!(binomial_family(60, 30), Err(Error::ResourceLimit { .. })));
    }

    #[test]
    fn alternating_needs_three_indices() {
        assert!(matches!(alternating(2), Err(Error::Parameter(_))));
        let two = PlainIdentity::from_terms(
            2,
            [
                (set(&[1, 2]), Rational::one()),
                (set(&[1]), ratio(-1, 1)),
                (set(&[2]), ratio(-1, 1)),
            ],
        )
        .unwrap();
        let v = verify(&two);
        assert_eq!(v.certificate().unwrap().value(), &Rational::one());
        assert!(verify(&alternating(4).unwrap()).is_valid());
    }

    #[test]
    fn alternating_terms_through_index_one() {
        // Sets of size j+1 containing 1 carry (-1)^{j+1}; there are C(n-1, j).
        let n = 6;
        let id = alternating(n).unwrap();
        for j in 0..n {
            let with_one: Vec<_> = id
                .terms()
                .filter(|(s, _)| s.contains(1) && s.len() == j + 1)
                .collect();
            assert_eq!(with_one.len() as u128, binomial_u128(n as u64 - 1, j as u64));
            let expected = if (j + 1) % 2 == 0 { Rational::one() } else { ratio(-1, 1) };
            assert!(with_one.iter().all(|(_, c)| **c == expected));
        }
    }

    #[test]
    fn parallelepiped_two_is_twice_parallelogram() {
        let ppd = signed_to_plain(&parallelepiped(2).unwrap());
        let pg = signed_to_plain(&parallelogram());
        assert_eq!(ppd, pg.scaled(&ratio(2, 1)));
    }

    #[test]
    fn parallelepiped_full_sign_coefficient() {
        for n in 2..=5 {
            let sid = parallelepiped(n).unwrap();
            let full = Subset::full(n).unwrap();
            let expected = if n % 2 == 0 { Rational::one() } else { ratio(-1, 1) };
            let full_terms: Vec<_> = sid.terms().iter().filter(|t| t.support() == full).collect();
            assert_eq!(full_terms.len(), 1 << n);
            assert!(full_terms.iter().all(|t| *t.coeff() == expected));
        }
        assert!(parallelepiped(1).is_err());
    }

    #[test]
    fn half_product_family_is_scaled_parallelepiped() {
        for n in 2..=5 {
            let scalars = vec![ratio(-1, 2); n];
            let product = product_sign_sum(&scalars).unwrap();
            let ppd = parallelepiped(n).unwrap().scaled(&Rational::pow2(-(n as i64)));
            assert_eq!(product.canonical(), ppd.canonical());
        }
    }

    #[test]
    fn product_family_examples() {
        let ok = product_sign_sum(&[ratio(-1, 2), ratio(-1, 2), ratio(7, 1)]).unwrap();
        assert!(verify(&signed_to_plain(&ok)).is_valid());
        let bad = product_sign_sum(&[Rational::one(), Rational::one()]).unwrap();
        assert!(!verify(&signed_to_plain(&bad)).is_valid());
        assert!(product_sign_sum(&[Rational::one()]).is_err());
    }
}
