//! Class groups of imaginary quadratic fields through reduced binary
//! quadratic forms.
//!
//! The group law is transported from ideal multiplication: a form is turned
//! into its ideal, ideals are multiplied in [`crate::numberfield`], and the
//! product is mapped back and reduced. The form attached to the ideal
//! `[a, b + cω]` (primitive part `[a', b' + ω]`) is
//! `(a', Tr(b'+ω), N(b'+ω)/a')`.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith;
use crate::numberfield::{principal_ideal, FieldError, QuadField, QuadIdeal, QuadInt};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassGroupError {
    #[error("form is not positive definite")]
    NotPositiveDefinite,
    #[error("{0} is not a negative discriminant")]
    BadDiscriminant(i64),
    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),
    #[error("discriminants differ")]
    DiscMismatch,
    #[error("real quadratic fields are not supported")]
    RealFieldUnsupported,
    #[error("|D| = {0} is beyond the enumeration range")]
    TooLarge(i64),
    #[error("failed to split the class group into cyclic factors")]
    Decomposition,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A positive definite form `ax² + bxy + cy²`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BQForm {
    #[serde(with = "crate::serde_big")]
    pub a: BigInt,
    #[serde(with = "crate::serde_big")]
    pub b: BigInt,
    #[serde(with = "crate::serde_big")]
    pub c: BigInt,
}

impl Ord for BQForm {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.a, &self.b, &self.c).cmp(&(&other.a, &other.b, &other.c))
    }
}

impl PartialOrd for BQForm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BQForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

/// Integer 2×2 matrix `[[m00, m01], [m10, m11]]`.
pub type Transform = [[BigInt; 2]; 2];

fn identity_transform() -> Transform {
    [
        [BigInt::one(), BigInt::zero()],
        [BigInt::zero(), BigInt::one()],
    ]
}

fn mat_mul(x: &Transform, y: &Transform) -> Transform {
    let e = |i: usize, j: usize| &x[i][0] * &y[0][j] + &x[i][1] * &y[1][j];
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

impl BQForm {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>) -> Self {
        Self {
            a: a.into(),
            b: b.into(),
            c: c.into(),
        }
    }

    pub fn disc(&self) -> BigInt {
        &self.b * &self.b - &self.a * &self.c * 4
    }

    pub fn disc_i64(&self) -> i64 {
        self.disc().to_i64().expect("discriminant fits in i64")
    }

    /// `|b| ≤ a ≤ c`, with `b ≥ 0` when `|b| = a` or `a = c`.
    pub fn is_reduced(&self) -> bool {
        let ab = self.b.abs();
        ab <= self.a
            && self.a <= self.c
            && (!(ab == self.a || self.a == self.c) || !self.b.is_negative())
    }

    pub fn eval(&self, x: &BigInt, y: &BigInt) -> BigInt {
        &self.a * x * x + &self.b * x * y + &self.c * y * y
    }

    /// The identity class of discriminant `disc`.
    pub fn principal(disc: i64) -> Self {
        let t = disc.rem_euclid(2);
        Self::new(1, t, (t - disc) / 4)
    }

    pub fn is_principal(&self) -> bool {
        self.a.is_one()
    }

    /// `(a, −b, c)` in reduced form.
    pub fn inverse(&self) -> Self {
        reduce_form(&Self::new(self.a.clone(), -&self.b, self.c.clone()))
            .expect("inverse of a positive definite form")
    }
}

/// Reduces a positive definite form, returning the transform `M` with
/// `reduced(x, y) = f(M·(x, y))`.
pub fn reduce_with_transform(f: &BQForm) -> Result<(BQForm, Transform), ClassGroupError> {
    if !f.a.is_positive() || !f.disc().is_negative() {
        return Err(ClassGroupError::NotPositiveDefinite);
    }
    let (mut a, mut b, mut c) = (f.a.clone(), f.b.clone(), f.c.clone());
    let mut m = identity_transform();
    loop {
        // Normalize b into (−a, a].
        if !(b > -&a && b <= a) {
            let two_a = &a * 2;
            // k with b + 2ak ∈ (−a, a]
            let k: BigInt = -Integer::div_floor(&(&b + &a - 1), &two_a);
            let nb = &b + &two_a * &k;
            c = &a * &k * &k + &b * &k + &c;
            b = nb;
            m = mat_mul(&m, &[[BigInt::one(), k], [BigInt::zero(), BigInt::one()]]);
        }
        if a > c || (a == c && b.is_negative()) {
            std::mem::swap(&mut a, &mut c);
            b = -b;
            m = mat_mul(
                &m,
                &[
                    [BigInt::zero(), -BigInt::one()],
                    [BigInt::one(), BigInt::zero()],
                ],
            );
            continue;
        }
        break;
    }
    Ok((BQForm { a, b, c }, m))
}

pub fn reduce_form(f: &BQForm) -> Result<BQForm, ClassGroupError> {
    reduce_with_transform(f).map(|(g, _)| g)
}

fn check_disc(disc: i64) -> Result<(), ClassGroupError> {
    if disc >= 0 || !matches!(disc.rem_euclid(4), 0 | 1) {
        return Err(ClassGroupError::BadDiscriminant(disc));
    }
    if disc.unsigned_abs() >= 1 << 60 {
        return Err(ClassGroupError::TooLarge(disc));
    }
    Ok(())
}

/// All reduced forms of discriminant `disc`, sorted by `(a, b, c)`.
pub fn enumerate_reduced_forms(disc: i64) -> Result<Vec<BQForm>, ClassGroupError> {
    check_disc(disc)?;
    let abs = disc.unsigned_abs();
    let a_max = (abs / 3).sqrt() as i64;
    let mut out = Vec::new();
    let mut b = disc.rem_euclid(2);
    while b <= a_max {
        // ac = (b² − D)/4 with b ≤ a ≤ c
        let nac = (b * b - disc) / 4;
        let mut a = b.max(1);
        while a * a <= nac {
            if nac % a == 0 {
                let c = nac / a;
                out.push(BQForm::new(a, b, c));
                if b != 0 && b != a && a != c {
                    out.push(BQForm::new(a, -b, c));
                }
            }
            a += 1;
        }
        b += 2;
    }
    out.sort();
    Ok(out)
}

fn field_of(disc: i64) -> Result<QuadField, ClassGroupError> {
    check_disc(disc)?;
    QuadField::from_discriminant(disc).map_err(|_| ClassGroupError::NotFundamental(disc))
}

/// The ideal `[a, (b − t)/2 + ω]` attached to a form of fundamental
/// discriminant.
pub fn form_to_ideal(f: &BQForm) -> Result<QuadIdeal, ClassGroupError> {
    let disc = f.disc_i64();
    let field = field_of(disc)?;
    let t = field.omega_trace();
    let bp = (&f.b - t) / 2;
    QuadIdeal::from_generators(
        field,
        &[field.int(f.a.clone()), QuadInt::new(field, bp, BigInt::one())],
    )
    .map_err(Into::into)
}

/// Unreduced form of the primitive part of `I`, with its Z-basis.
fn ideal_form(ideal: &QuadIdeal) -> Result<(BQForm, [QuadInt; 2]), ClassGroupError> {
    let field = ideal.field;
    if !field.is_imaginary() {
        return Err(ClassGroupError::RealFieldUnsupported);
    }
    let ap = &ideal.a / &ideal.c;
    let beta = QuadInt::new(field, &ideal.b / &ideal.c, BigInt::one());
    let (n, t) = beta.norm_trace();
    let form = BQForm::new(ap.clone(), t, n / &ap);
    Ok((form, [field.int(ap), beta]))
}

/// Reduced form representing the class of `I`.
pub fn ideal_class(ideal: &QuadIdeal) -> Result<BQForm, ClassGroupError> {
    reduce_form(&ideal_form(ideal)?.0)
}

/// A generator of `I` when it is principal.
pub fn principal_generator(ideal: &QuadIdeal) -> Result<Option<QuadInt>, ClassGroupError> {
    let (form, [x1, x2]) = ideal_form(ideal)?;
    let (reduced, m) = reduce_with_transform(&form)?;
    if !reduced.is_principal() {
        return Ok(None);
    }
    let gen = x1.scale(&m[0][0]).add(&x2.scale(&m[1][0]));
    let gen = gen.scale(&ideal.c);
    debug_assert_eq!(gen.norm().abs(), ideal.norm());
    Ok(Some(gen))
}

pub fn compose(f: &BQForm, g: &BQForm) -> Result<BQForm, ClassGroupError> {
    if f.disc() != g.disc() {
        return Err(ClassGroupError::DiscMismatch);
    }
    let i = form_to_ideal(f)?;
    let j = form_to_ideal(g)?;
    ideal_class(&i.mul(&j)?)
}

pub fn form_pow(f: &BQForm, mut e: u64) -> Result<BQForm, ClassGroupError> {
    let mut base = reduce_form(f)?;
    let mut acc = BQForm::principal(f.disc_i64());
    while e > 0 {
        if e & 1 == 1 {
            acc = compose(&acc, &base)?;
        }
        e >>= 1;
        if e > 0 {
            base = compose(&base, &base)?;
        }
    }
    Ok(acc)
}

/// Order of a form class, by repeated composition.
pub fn form_order(f: &BQForm) -> Result<u64, ClassGroupError> {
    let f = reduce_form(f)?;
    let mut cur = f.clone();
    let mut k = 1;
    while !cur.is_principal() {
        cur = compose(&cur, &f)?;
        k += 1;
    }
    Ok(k)
}

/// Least `k ≥ 1` with `I^k` principal.
pub fn class_order(ideal: &QuadIdeal) -> Result<u64, ClassGroupError> {
    form_order(&ideal_class(ideal)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassGroupStructure {
    pub disc: i64,
    pub h: u64,
    /// Elementary divisors `d₁ | d₂ | …`, all > 1.
    pub divisors: Vec<u64>,
    pub generators: Vec<BQForm>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankReport {
    pub n: u64,
    pub rank: u32,
    pub witnesses: Vec<BQForm>,
}

/// Invariant factors of `⊕ Z/oᵢ`, ascending, trivial factors dropped.
pub fn invariant_factors(orders: &[u64]) -> Vec<u64> {
    let mut by_prime: HashMap<u64, Vec<u32>> = HashMap::new();
    for &o in orders {
        for (p, e) in arith::factor_u64(o) {
            by_prime.entry(p).or_default().push(e);
        }
    }
    let len = by_prime.values().map(Vec::len).max().unwrap_or(0);
    let mut out = vec![1u64; len];
    for (p, mut es) in by_prime {
        es.sort_unstable_by(|a, b| b.cmp(a));
        for (i, e) in es.into_iter().enumerate() {
            out[len - 1 - i] *= p.pow(e);
        }
    }
    out
}

/// Number of invariant factors divisible by `n`.
pub fn n_rank_of_divisors(divisors: &[u64], n: u64) -> u32 {
    assert!(n >= 2, "n-rank needs n ≥ 2");
    divisors.iter().filter(|&&d| d % n == 0).count() as u32
}

pub fn n_rank(s: &ClassGroupStructure, n: u64) -> RankReport {
    let witnesses = s
        .divisors
        .iter()
        .zip(&s.generators)
        .filter(|(d, _)| *d % n == 0)
        .map(|(_, g)| g.clone())
        .collect();
    RankReport {
        n,
        rank: n_rank_of_divisors(&s.divisors, n),
        witnesses,
    }
}

/// Closure of `set ∪ {x}` under composition, given `set` is a subgroup.
fn extend_subgroup(
    set: &mut Vec<BQForm>,
    seen: &mut HashSet<BQForm>,
    x: &BQForm,
) -> Result<(), ClassGroupError> {
    let base: Vec<BQForm> = set.clone();
    let mut power = x.clone();
    while !seen.contains(&power) {
        for h in &base {
            let y = compose(h, &power)?;
            if seen.insert(y.clone()) {
                set.push(y);
            }
        }
        power = compose(&power, x)?;
    }
    Ok(())
}

/// Exponents `e` with `ord(x) = p^e`, for each element of a p-group.
fn p_orders(elements: &[BQForm], p: u64) -> Result<Vec<u32>, ClassGroupError> {
    elements
        .iter()
        .map(|x| {
            let mut y = x.clone();
            let mut e = 0;
            while !y.is_principal() {
                y = form_pow(&y, p)?;
                e += 1;
            }
            Ok(e)
        })
        .collect()
}

/// Cyclic decomposition of the Sylow p-subgroup: `(exponent, generator)`
/// pairs, largest exponent first.
fn sylow_decomposition(
    forms: &[BQForm],
    h: u64,
    p: u64,
    e: u32,
) -> Result<Vec<(u32, BQForm)>, ClassGroupError> {
    let disc = forms[0].disc_i64();
    let size = p.pow(e);
    let cofactor = h / size;
    let identity = BQForm::principal(disc);
    let mut sylow = vec![identity.clone()];
    let mut seen: HashSet<BQForm> = sylow.iter().cloned().collect();
    for g in forms {
        if sylow.len() as u64 == size {
            break;
        }
        let x = form_pow(g, cofactor)?;
        if !seen.contains(&x) {
            extend_subgroup(&mut sylow, &mut seen, &x)?;
        }
    }
    if sylow.len() as u64 != size {
        return Err(ClassGroupError::Decomposition);
    }
    sylow.sort();
    if e == 1 {
        return Ok(vec![(1, sylow[1].clone())]);
    }
    let orders = p_orders(&sylow, p)?;
    // r_j = #{cyclic factors with exponent ≥ j} from |G[p^j]| = p^{Σ min(j, e_i)}
    let max_e = *orders.iter().max().unwrap_or(&0);
    let mut exps = Vec::new();
    let mut prev_log = 0u32;
    let mut ranks = Vec::new();
    for j in 1..=max_e {
        let count = orders.iter().filter(|&&o| o <= j).count() as u64;
        let log = count.ilog(p);
        ranks.push(log - prev_log);
        prev_log = log;
    }
    for j in (1..=max_e).rev() {
        let r_j = ranks[(j - 1) as usize];
        let r_next = ranks.get(j as usize).copied().unwrap_or(0);
        for _ in 0..(r_j - r_next) {
            exps.push(j);
        }
    }
    // Greedy basis: each new generator meets the span so far trivially.
    let mut span = vec![identity];
    let mut span_set: HashSet<BQForm> = span.iter().cloned().collect();
    let mut basis = Vec::new();
    for &target in &exps {
        let mut found = None;
        for (x, &o) in sylow.iter().zip(&orders) {
            if o != target {
                continue;
            }
            let socle = form_pow(x, p.pow(target - 1))?;
            if !span_set.contains(&socle) {
                found = Some(x.clone());
                break;
            }
        }
        let x = found.ok_or(ClassGroupError::Decomposition)?;
        extend_subgroup(&mut span, &mut span_set, &x)?;
        basis.push((target, x));
    }
    if span.len() as u64 != size {
        return Err(ClassGroupError::Decomposition);
    }
    Ok(basis)
}

/// Class group of the fundamental discriminant `disc < 0`.
pub fn class_group_structure(disc: i64) -> Result<ClassGroupStructure, ClassGroupError> {
    field_of(disc)?;
    let forms = enumerate_reduced_forms(disc)?;
    let h = forms.len() as u64;
    let mut per_prime: Vec<Vec<(u64, BQForm)>> = Vec::new();
    for (p, e) in arith::factor_u64(h) {
        let part = sylow_decomposition(&forms, h, p, e)?;
        per_prime.push(part.into_iter().map(|(k, g)| (p.pow(k), g)).collect());
    }
    let len = per_prime.iter().map(Vec::len).max().unwrap_or(0);
    let mut divisors = vec![1u64; len];
    let mut generators = vec![BQForm::principal(disc); len];
    for part in per_prime {
        // Largest p-power goes with the largest invariant factor.
        for (i, (q, g)) in part.into_iter().enumerate() {
            let slot = len - 1 - i;
            divisors[slot] *= q;
            generators[slot] = compose(&generators[slot], &g)?;
        }
    }
    Ok(ClassGroupStructure {
        disc,
        h,
        divisors,
        generators,
    })
}

/// Clones of computed structures keyed by discriminant. Readers share the
/// lock; a miss computes outside the lock and inserts (identical values, so
/// the last writer winning is harmless).
#[derive(Debug, Default)]
pub struct ClassGroupCache {
    inner: RwLock<HashMap<i64, Arc<ClassGroupStructure>>>,
}

impl ClassGroupCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, disc: i64) -> Result<Arc<ClassGroupStructure>, ClassGroupError> {
        if let Some(s) = self.inner.read().expect("cache lock").get(&disc) {
            return Ok(Arc::clone(s));
        }
        let s = Arc::new(class_group_structure(disc)?);
        self.inner
            .write()
            .expect("cache lock")
            .insert(disc, Arc::clone(&s));
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.inner.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Size of the torsion unit group of an imaginary quadratic field.
fn roots_of_unity(field: &QuadField) -> u64 {
    match field.m() {
        -1 => 4,
        -3 => 6,
        _ => 2,
    }
}

/// `rank_n(O_F^× / n)` for imaginary quadratic `F`.
pub fn unit_rank_mod_n(field: &QuadField, n: u64) -> Result<u32, ClassGroupError> {
    if !field.is_imaginary() {
        return Err(ClassGroupError::RealFieldUnsupported);
    }
    Ok(u32::from(roots_of_unity(field) % n == 0))
}

/// An order-n class `[a]` together with `β` such that `(β) = a^n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KummerWitness {
    pub class: BQForm,
    pub ideal: QuadIdeal,
    pub beta: QuadInt,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KummerReport {
    pub n: u64,
    pub unit_rank: u32,
    pub class_rank: u32,
    pub witnesses: Vec<KummerWitness>,
}

impl KummerReport {
    /// `rank_n(O^×/n) + rank_n Cl[n]`.
    pub fn total(&self) -> u32 {
        self.unit_rank + self.class_rank
    }
}

pub fn kummer_rank(field: &QuadField, n: u64) -> Result<KummerReport, ClassGroupError> {
    kummer_rank_from(field, n, &class_group_structure(field.disc())?)
}

/// As [`kummer_rank`], reusing an already computed class group.
pub fn kummer_rank_from(
    field: &QuadField,
    n: u64,
    s: &ClassGroupStructure,
) -> Result<KummerReport, ClassGroupError> {
    let unit_rank = unit_rank_mod_n(field, n)?;
    if s.disc != field.disc() {
        return Err(ClassGroupError::DiscMismatch);
    }
    let report = n_rank(s, n);
    let mut witnesses = Vec::new();
    for (g, d) in s.generators.iter().zip(&s.divisors) {
        if d % n != 0 {
            continue;
        }
        let class = form_pow(g, d / n)?;
        let ideal = form_to_ideal(&class)?;
        let power = ideal.pow(n as u32);
        let beta = principal_generator(&power)?.ok_or(ClassGroupError::Decomposition)?;
        debug_assert_eq!(principal_ideal(&beta)?, power);
        witnesses.push(KummerWitness { class, ideal, beta });
    }
    Ok(KummerReport {
        n,
        unit_rank,
        class_rank: report.rank,
        witnesses,
    })
}

pub fn is_fundamental(disc: i64) -> bool {
    QuadField::from_discriminant(disc).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numberfield::factor_rational_prime;

    fn forms(disc: i64) -> Vec<(i64, i64, i64)> {
        enumerate_reduced_forms(disc)
            .unwrap()
            .into_iter()
            .map(|f| {
                (
                    f.a.to_i64().unwrap(),
                    f.b.to_i64().unwrap(),
                    f.c.to_i64().unwrap(),
                )
            })
            .collect()
    }

    #[test]
    fn reduction_examples() {
        let f = BQForm::new(1, 1, 8);
        assert_eq!(reduce_form(&f).unwrap(), f);
        assert_eq!(reduce_form(&BQForm::new(8, 1, 1)).unwrap(), f);
        let g = BQForm::new(2, -1, 4);
        assert!(g.is_reduced());
        assert_eq!(reduce_form(&g).unwrap(), g);
        assert_eq!(
            reduce_form(&BQForm::new(-1, 1, 8)),
            Err(ClassGroupError::NotPositiveDefinite)
        );
        assert_eq!(
            reduce_form(&BQForm::new(1, 3, 1)),
            Err(ClassGroupError::NotPositiveDefinite)
        );
    }

    #[test]
    fn reduction_transform_is_consistent() {
        let f = BQForm::new(57, 131, 76);
        let (g, m) = reduce_with_transform(&f).unwrap();
        assert!(g.is_reduced());
        assert_eq!(g.disc(), f.disc());
        assert_eq!(f.eval(&m[0][0], &m[1][0]), g.a);
        assert_eq!(f.eval(&m[0][1], &m[1][1]), g.c);
        let det = &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0];
        assert_eq!(det, BigInt::one());
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(forms(-23), vec![(1, 1, 6), (2, -1, 3), (2, 1, 3)]);
        assert_eq!(forms(-31).len(), 3);
        assert_eq!(forms(-3), vec![(1, 1, 1)]);
        assert_eq!(forms(-4), vec![(1, 0, 1)]);
        assert_eq!(
            enumerate_reduced_forms(-5),
            Err(ClassGroupError::BadDiscriminant(-5))
        );
        assert_eq!(
            enumerate_reduced_forms(5),
            Err(ClassGroupError::BadDiscriminant(5))
        );
    }

    #[test]
    fn composition_examples() {
        let g = BQForm::new(2, 1, 3);
        assert_eq!(compose(&g, &g).unwrap(), BQForm::new(2, -1, 3));
        let p = BQForm::principal(-23);
        assert_eq!(compose(&g, &p).unwrap(), g);
        assert_eq!(
            compose(&BQForm::new(2, 1, 4), &BQForm::new(2, -1, 4)).unwrap(),
            BQForm::new(1, 1, 8)
        );
        assert_eq!(
            compose(&g, &BQForm::new(2, 1, 4)),
            Err(ClassGroupError::DiscMismatch)
        );
    }

    #[test]
    fn structure_examples() {
        let s = class_group_structure(-31).unwrap();
        assert_eq!((s.h, s.divisors.clone()), (3, vec![3]));
        assert_eq!(form_order(&s.generators[0]).unwrap(), 3);
        let s = class_group_structure(-127).unwrap();
        assert_eq!((s.h, s.divisors.clone()), (5, vec![5]));
        let s = class_group_structure(-4).unwrap();
        assert_eq!((s.h, s.divisors.clone()), (1, vec![]));
        assert_eq!(
            class_group_structure(-16),
            Err(ClassGroupError::NotFundamental(-16))
        );
        // Cl(−255) ≅ Z/2 × Z/6
        let s = class_group_structure(-255).unwrap();
        assert_eq!((s.h, s.divisors.clone()), (12, vec![2, 6]));
        for (g, d) in s.generators.iter().zip(&s.divisors) {
            assert_eq!(form_order(g).unwrap(), *d);
        }
    }

    #[test]
    fn rank_examples() {
        let s = class_group_structure(-31).unwrap();
        assert_eq!(n_rank(&s, 3).rank, 1);
        let s = class_group_structure(-4).unwrap();
        assert_eq!(n_rank(&s, 3).rank, 0);
        assert_eq!(n_rank_of_divisors(&[3, 12], 3), 2);
        assert_eq!(invariant_factors(&[4, 6, 3]), vec![6, 12]);
        assert_eq!(invariant_factors(&[1]), Vec::<u64>::new());
    }

    #[test]
    fn ideal_class_examples() {
        let k = QuadField::new(-31).unwrap();
        let (_, ps) = factor_rational_prime(k, &BigInt::from(2)).unwrap();
        assert_eq!(ideal_class(&ps[0]).unwrap(), BQForm::new(2, 1, 4));
        assert_eq!(
            ideal_class(&QuadIdeal::unit(k)).unwrap(),
            BQForm::new(1, 1, 8)
        );
        let x = principal_ideal(&k.omega()).unwrap();
        assert!(ideal_class(&x).unwrap().is_principal());
        assert_eq!(class_order(&ps[0]).unwrap(), 3);
        assert_eq!(class_order(&x).unwrap(), 1);
        let k = QuadField::new(-127).unwrap();
        let (_, ps) = factor_rational_prime(k, &BigInt::from(2)).unwrap();
        assert_eq!(class_order(&ps[0]).unwrap(), 5);
        let real = QuadField::new(5).unwrap();
        assert_eq!(
            ideal_class(&QuadIdeal::unit(real)),
            Err(ClassGroupError::RealFieldUnsupported)
        );
    }

    #[test]
    fn principal_generators() {
        let k = QuadField::new(-31).unwrap();
        let (_, ps) = factor_rational_prime(k, &BigInt::from(2)).unwrap();
        let g = principal_generator(&ps[0].pow(3)).unwrap().unwrap();
        assert_eq!(principal_ideal(&g).unwrap(), ps[0].pow(3));
        assert!(principal_generator(&ps[0]).unwrap().is_none());
    }

    #[test]
    fn unit_ranks() {
        let f = |m| QuadField::new(m).unwrap();
        assert_eq!(unit_rank_mod_n(&f(-31), 3).unwrap(), 0);
        assert_eq!(unit_rank_mod_n(&f(-3), 3).unwrap(), 1);
        assert_eq!(unit_rank_mod_n(&f(-31), 2).unwrap(), 1);
        assert_eq!(unit_rank_mod_n(&f(-1), 4).unwrap(), 1);
        assert_eq!(unit_rank_mod_n(&f(-1), 3).unwrap(), 0);
        assert_eq!(
            unit_rank_mod_n(&f(2), 3),
            Err(ClassGroupError::RealFieldUnsupported)
        );
    }

    #[test]
    fn kummer_examples() {
        let k = QuadField::new(-31).unwrap();
        let r = kummer_rank(&k, 3).unwrap();
        assert_eq!((r.unit_rank, r.class_rank, r.total()), (0, 1, 1));
        let w = &r.witnesses[0];
        assert_eq!(w.beta.norm(), BigInt::from(8));
        assert_eq!(principal_ideal(&w.beta).unwrap(), w.ideal.pow(3));
        assert_eq!(class_order(&w.ideal).unwrap(), 3);
        let r = kummer_rank(&QuadField::new(-3).unwrap(), 3).unwrap();
        assert_eq!((r.unit_rank, r.class_rank, r.total()), (1, 0, 1));
        let r = kummer_rank(&QuadField::new(-1).unwrap(), 3).unwrap();
        assert_eq!(r.total(), 0);
    }

    #[test]
    fn cache_shares_results() {
        let cache = ClassGroupCache::new();
        let a = cache.get(-255).unwrap();
        let b = cache.get(-255).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(cache.len(), 1);
    }
}
