use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use proptest::prelude::*;

use clrank::lattice::{
    count_report, davenport_check, enumerate_bounded, lattice_point_count, small_at_one_place_count, PlaceBounds,
    Shape,
};
use clrank::numberfield::QuadField;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

// α = u + vω written as (a + b√m)/k with k ∈ {1, 2}.
fn half_coords(m: i64, u: i64, v: i64) -> (i64, i64, i64) {
    if m.rem_euclid(4) == 1 {
        (2 * u + v, v, 2)
    } else {
        (u, v, 1)
    }
}

// max_v |α|_v ≤ B with B = bn/bd, decided in exact integers.
fn inside(m: i64, u: i64, v: i64, bn: i64, bd: i64) -> bool {
    let (a, b, k) = half_coords(m, u, v);
    let (a, b, k, bn, bd) = (a as i128, b as i128, k as i128, bn as i128, bd as i128);
    if m < 0 {
        // (a² − m b²)/k² ≤ B²
        (a * a - m as i128 * b * b) * bd * bd <= bn * bn * k * k
    } else {
        // |a| + |b|√m ≤ kB
        let r = k * bn - a.abs() * bd;
        r >= 0 && b * b * m as i128 * bd * bd <= r * r
    }
}

fn naive_count(m: i64, bn: i64, bd: i64) -> u64 {
    let r = 3 * bn / bd + 3;
    let mut n = 0;
    for u in -r..=r {
        for v in -r..=r {
            if inside(m, u, v, bn, bd) {
                n += 1;
            }
        }
    }
    n
}

// a + c√m ≤ k, exactly.
fn sqrt_le(a: i64, c: i64, m: i64, k: i64) -> bool {
    let (x, c, m) = ((k - a) as i128, c as i128, m as i128);
    if c >= 0 {
        x >= 0 && c * c * m <= x * x
    } else {
        x >= 0 || c * c * m >= x * x
    }
}

const FIELDS: [i64; 7] = [-1, -3, -2, -7, 2, 3, 5];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn enumeration_matches_naive_count(fi in 0usize..7, bn in 1i64..120, bd in 1i64..5) {
        let m = FIELDS[fi];
        let f = QuadField::new(m).unwrap();
        let pb = PlaceBounds::uniform(f, q(bn, bd)).unwrap();
        let pts = enumerate_bounded(&pb).unwrap();
        prop_assert_eq!(pts.len() as u64, naive_count(m, bn, bd));
        for p in &pts {
            let (u, v) = (p.u.to_i64().unwrap(), p.v.to_i64().unwrap());
            prop_assert!(inside(m, u, v, bn, bd));
        }
    }

    #[test]
    fn enumeration_is_closed_under_symmetries(fi in 0usize..7, bn in 1i64..60) {
        let f = QuadField::new(FIELDS[fi]).unwrap();
        let pb = PlaceBounds::uniform(f, q(bn, 1)).unwrap();
        let pts: BTreeSet<(BigInt, BigInt)> = enumerate_bounded(&pb).unwrap().into_iter().map(|x| (x.u, x.v)).collect();
        for x in enumerate_bounded(&pb).unwrap() {
            let n = x.neg();
            prop_assert!(pts.contains(&(n.u.clone(), n.v.clone())));
            let c = x.conj();
            prop_assert!(pts.contains(&(c.u.clone(), c.v.clone())));
        }
    }

    #[test]
    fn small_at_one_place_matches_naive(fi in 0usize..7, b in 2i64..40, e in 1i64..40) {
        let m = FIELDS[fi];
        let f = QuadField::new(m).unwrap();
        let got = small_at_one_place_count(&f, &q(b, 1), &q(e, 1)).unwrap();
        // Oracle: both embeddings ≤ B and at least one ≤ E.
        let r = 3 * b + 3;
        let mut expect = 0;
        for u in -r..=r {
            for v in -r..=r {
                if !inside(m, u, v, b, 1) {
                    continue;
                }
                let small = if m < 0 {
                    inside(m, u, v, e.min(b), 1)
                } else {
                    let (a, bb, k) = half_coords(m, u, v);
                    let ke = k * e;
                    (sqrt_le(a, bb, m, ke) && sqrt_le(-a, -bb, m, ke))
                        || (sqrt_le(a, -bb, m, ke) && sqrt_le(-a, bb, m, ke))
                };
                if small {
                    expect += 1;
                }
            }
        }
        prop_assert_eq!(got, expect);
    }

    #[test]
    fn lattice_count_matches_coefficient_enumeration(a in 1i64..5, b in -4i64..5, c in 1i64..5, rn in 1i64..60, shape in 0usize..2) {
        let basis = [[a, b], [0, c]];
        let r = q(rn, 2);
        let region = if shape == 0 { Shape::Disk { radius: r.clone() } } else { Shape::Box { half_x: r.clone(), half_y: r.clone() } };
        let got = lattice_point_count(basis, &region).unwrap();
        let lim = 5 * (rn + 4);
        let mut expect = 0u64;
        for i in -lim..=lim {
            for j in -lim..=lim {
                let (x, y) = ((i * a) as i128, (i * b + j * c) as i128);
                // rn/2 bound, doubled to stay integral.
                let (x2, y2, r2) = (2 * x, 2 * y, rn as i128);
                let hit = if shape == 0 { x2 * x2 + y2 * y2 <= r2 * r2 } else { x2.abs() <= r2 && y2.abs() <= r2 };
                if hit {
                    expect += 1;
                }
            }
        }
        prop_assert_eq!(got, expect);
    }
}

#[test]
fn gaussian_relative_error_shrinks() {
    let f = QuadField::new(-1).unwrap();
    let mut errs = Vec::new();
    for b in [10i64, 20, 40, 80, 160] {
        let r = count_report(&PlaceBounds::uniform(f, q(b, 1)).unwrap(), 4.0).unwrap();
        assert_eq!(r.exact_count, naive_count(-1, b, 1));
        assert!(r.within_budget, "B = {b}");
        errs.push(r.relative_error.hi);
    }
    // At most one non-monotone step on the geometric sequence.
    let rises = errs.windows(2).filter(|w| w[1] > w[0]).count();
    assert!(rises <= 1, "relative errors {errs:?} rise {rises} times");
}

#[test]
fn davenport_unit_disk_and_box() {
    let id = [[1, 0], [0, 1]];
    let disk = Shape::Disk { radius: q(1, 1) };
    let r = davenport_check(id, &disk, &q(1, 1), 10.0).unwrap();
    assert_eq!(r.count, 5);
    let sq = Shape::Box { half_x: q(1, 1), half_y: q(1, 1) };
    let r = davenport_check(id, &sq, &q(10, 1), 10.0).unwrap();
    assert_eq!(r.count, 441);
    assert!(!r.violation);
    assert!(lattice_point_count([[1, 2], [2, 4]], &disk).is_err());
}
