#![allow(dead_code)]

use normid_core::eval::ExactAssignment;
use normid_core::signed::{SignedIdentity, SignedTerm, WeightedFamily};
use normid_core::{PlainIdentity, Rational, Subset};
use rand::Rng;

pub fn small_rational<R: Rng>(rng: &mut R) -> Rational {
    Rational::new(rng.gen_range(-9i64..=9), rng.gen_range(1i64..=6)).unwrap()
}

pub fn nonzero_rational<R: Rng>(rng: &mut R) -> Rational {
    loop {
        let r = small_rational(rng);
        if !r.is_zero() {
            return r;
        }
    }
}

pub fn nonempty_subset<R: Rng>(rng: &mut R, n: usize) -> Subset {
    loop {
        let s = Subset::from_bits(rng.gen_range(1u64..1 << n));
        if !s.is_empty() {
            return s;
        }
    }
}

pub fn plain_identity<R: Rng>(rng: &mut R, max_n: usize, max_terms: usize) -> PlainIdentity {
    let n = rng.gen_range(1..=max_n);
    let terms = rng.gen_range(1..=max_terms);
    PlainIdentity::from_terms(
        n,
        (0..terms).map(|_| (nonempty_subset(rng, n), nonzero_rational(rng))),
    )
    .unwrap()
}

pub fn signed_identity<R: Rng>(rng: &mut R, max_n: usize, max_terms: usize) -> SignedIdentity {
    let n = rng.gen_range(1..=max_n);
    let terms = rng.gen_range(1..=max_terms);
    let mut sid = SignedIdentity::new(n).unwrap();
    for _ in 0..terms {
        let support = nonempty_subset(rng, n);
        let minus = Subset::from_bits(support.bits() & rng.gen::<u64>());
        let plus = support.difference(minus);
        sid.push(SignedTerm::new(plus, minus, small_rational(rng)).unwrap())
            .unwrap();
    }
    sid
}

pub fn exact_assignment<R: Rng>(rng: &mut R, n: usize, dim: usize) -> ExactAssignment {
    ExactAssignment::new(
        (0..n)
            .map(|_| (0..dim).map(|_| small_rational(rng)).collect())
            .collect(),
    )
    .unwrap()
}

/// Random weights; when `force_valid`, the singleton weights are chosen so
/// that every per-index sum `Σ_{I∋i} 2^{|I|} a_I` vanishes.
pub fn weighted_family<R: Rng>(rng: &mut R, max_n: usize, force_valid: bool) -> WeightedFamily {
    let n = rng.gen_range(1..=max_n);
    let mut wf = WeightedFamily::new(n).unwrap();
    for _ in 0..rng.gen_range(1..=6) {
        let s = nonempty_subset(rng, n);
        if force_valid && s.len() == 1 {
            continue;
        }
        wf.add_weight(s, &small_rational(rng)).unwrap();
    }
    if force_valid {
        for i in 1..=n {
            let mut t = Rational::zero();
            for (s, w) in wf.weights() {
                if s.contains(i) && s.len() > 1 {
                    t += w * Rational::pow2(s.len() as i64);
                }
            }
            let fix = -(t * Rational::new(1, 2).unwrap());
            let single = Subset::singleton(i).unwrap();
            let current = wf.weight(single);
            wf.add_weight(single, &(fix - current)).unwrap();
        }
    }
    wf
}

/// Scalars drawn mostly from {-1/2, 0} plus random rationals, so both
/// outcomes of the product-family test occur often.
pub fn product_scalars<R: Rng>(rng: &mut R, max_n: usize) -> Vec<Rational> {
    let n = rng.gen_range(2..=max_n);
    (0..n)
        .map(|_| match rng.gen_range(0..4) {
            0 => Rational::new(-1, 2).unwrap(),
            1 => Rational::zero(),
            _ => small_rational(rng),
        })
        .collect()
}
