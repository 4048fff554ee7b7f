use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use clrank::arith::is_prime_u64;
use clrank::numberfield::{
    factor_rational_prime, ideal_nth_root, principal_ideal, QuadField, QuadIdeal, QuadInt, SplitType,
};

const FIELDS: [i64; 10] = [-1, -2, -3, -5, -23, -31, -107, 2, 3, 5];

fn field(i: usize) -> QuadField {
    QuadField::new(FIELDS[i % FIELDS.len()]).unwrap()
}

fn elt(f: QuadField, u: i64, v: i64) -> QuadInt {
    QuadInt::new(f, BigInt::from(u), BigInt::from(v))
}

fn ideal(f: QuadField, g: [(i64, i64); 2]) -> QuadIdeal {
    let gens: Vec<QuadInt> = g.iter().map(|&(u, v)| elt(f, u, v)).collect();
    QuadIdeal::from_generators(f, &gens).unwrap()
}

fn nonzero() -> impl Strategy<Value = (i64, i64)> {
    (-40i64..40, -40i64..40).prop_filter("nonzero", |&(u, v)| u != 0 || v != 0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn norm_is_multiplicative(fi in 0usize..10, g in [nonzero(), nonzero()], h in [nonzero(), nonzero()]) {
        let f = field(fi);
        let (i, j) = (ideal(f, g), ideal(f, h));
        prop_assert_eq!(i.mul(&j).unwrap().norm(), i.norm() * j.norm());
    }

    #[test]
    fn conjugation_is_an_automorphism(fi in 0usize..10, g in [nonzero(), nonzero()], h in [nonzero(), nonzero()]) {
        let f = field(fi);
        let (i, j) = (ideal(f, g), ideal(f, h));
        prop_assert_eq!(i.mul(&j).unwrap().conj(), i.conj().mul(&j.conj()).unwrap());
        prop_assert_eq!(i.conj().conj(), i);
    }

    #[test]
    fn principal_norm_matches_element_norm(fi in 0usize..10, g in nonzero()) {
        let f = field(fi);
        let a = elt(f, g.0, g.1);
        prop_assert_eq!(principal_ideal(&a).unwrap().norm(), a.norm().abs());
        prop_assert!(principal_ideal(&a).unwrap().contains(&a));
    }

    #[test]
    fn nth_root_of_power_is_exact(fi in 0usize..10, g in [nonzero(), nonzero()], n in 1u32..6) {
        let f = field(fi);
        let i = ideal(f, g);
        let p = i.pow(n);
        let r = ideal_nth_root(&p, n).unwrap();
        prop_assert_eq!(r.pow(n), p);
        prop_assert_eq!(r, i);
    }

    #[test]
    fn gcd_contains_both(fi in 0usize..10, g in [nonzero(), nonzero()], h in [nonzero(), nonzero()]) {
        let f = field(fi);
        let (i, j) = (ideal(f, g), ideal(f, h));
        let d = i.gcd(&j).unwrap();
        for x in i.basis().iter().chain(j.basis().iter()) {
            prop_assert!(d.contains(x));
        }
    }
}

#[test]
fn prime_factorization_round_trip() {
    for fi in 0..FIELDS.len() {
        let f = field(fi);
        for p in (2u64..=200).filter(|&p| is_prime_u64(p)) {
            let pz = BigInt::from(p);
            let (kind, primes) = factor_rational_prime(f, &pz).unwrap();
            let mut prod = QuadIdeal::unit(f);
            for q in &primes {
                let e = if kind == SplitType::Ramified { 2 } else { 1 };
                prod = prod.mul(&q.pow(e)).unwrap();
            }
            let expect = principal_ideal(&f.int(pz.clone())).unwrap();
            assert_eq!(prod, expect, "{f}, p = {p}");
            let n: BigInt = primes.iter().map(|q| q.norm()).product();
            let expected_norm = match kind {
                SplitType::Ramified => pz.clone(),
                _ => &pz * &pz,
            };
            assert_eq!(n, expected_norm, "{f}, p = {p}");
        }
    }
}

#[test]
fn decomposition_follows_kronecker_symbol() {
    // Split iff the discriminant is a nonzero square mod 4p.
    for fi in 0..FIELDS.len() {
        let f = field(fi);
        let d = f.disc();
        for p in (2u64..=200).filter(|&p| is_prime_u64(p)) {
            let modulus = 4 * p as i64;
            let kind = factor_rational_prime(f, &BigInt::from(p)).unwrap().0;
            let expect = if d % p as i64 == 0 {
                SplitType::Ramified
            } else if (0..modulus).any(|x| (x * x - d).rem_euclid(modulus) == 0) {
                SplitType::Split
            } else {
                SplitType::Inert
            };
            assert_eq!(kind, expect, "{f}, p = {p}");
        }
    }
}

#[test]
fn coprime_root_elements_generate_unit_ideal() {
    let f = QuadField::new(-31).unwrap();
    let x = f.omega();
    let y = x.sub(&f.one());
    let i = principal_ideal(&x).unwrap().gcd(&principal_ideal(&y).unwrap()).unwrap();
    assert!(i.is_unit());
    let z = elt(f, 0, 0);
    assert!(z.is_zero() && BigInt::zero() == z.norm());
}
