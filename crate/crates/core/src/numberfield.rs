//! Exact arithmetic in the maximal order of a quadratic field `Q(√m)`.
//!
//! Elements are written `u + v·ω` in the integral basis `{1, ω}` with
//! `ω = (1+√m)/2` when `m ≡ 1 (mod 4)` and `ω = √m` otherwise. Ideals are
//! kept in Hermite normal form `aZ + (b + cω)Z` with `c | a`, `c | b` and
//! `0 ≤ b < a`, so equality is a field-by-field comparison.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{self, ArithError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not squarefree")]
    NonSquarefree(i64),
    #[error("m = {0} does not define a quadratic field")]
    Degenerate(i64),
    #[error("|m| = {0} exceeds the supported range")]
    OutOfRange(i64),
    #[error("zero element has no principal ideal")]
    ZeroElement,
    #[error("operands live in different fields")]
    FieldMismatch,
    #[error("ideal is not an n-th power")]
    NoRoot,
    #[error("{0} is not prime")]
    NotPrime(BigInt),
    #[error(transparent)]
    Factor(#[from] ArithError),
}

/// Selects the second integral basis element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BasisKind {
    /// `ω = (1+√m)/2`
    HalfInteger,
    /// `ω = √m`
    Root,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadField {
    m: i64,
    disc: i64,
}

impl QuadField {
    /// Builds `Q(√m)` for squarefree `m ∉ {0, 1}`.
    pub fn new(m: i64) -> Result<Self, FieldError> {
        if m == 0 || m == 1 {
            return Err(FieldError::Degenerate(m));
        }
        if m.unsigned_abs() >= 1 << 60 {
            return Err(FieldError::OutOfRange(m));
        }
        if !arith::is_squarefree(&BigInt::from(m))? {
            return Err(FieldError::NonSquarefree(m));
        }
        let disc = if m.rem_euclid(4) == 1 { m } else { 4 * m };
        Ok(Self { m, disc })
    }

    /// The field whose discriminant is the fundamental discriminant `disc`.
    pub fn from_discriminant(disc: i64) -> Result<Self, FieldError> {
        let m = if disc.rem_euclid(4) == 0 { disc / 4 } else { disc };
        let f = Self::new(m)?;
        if f.disc != disc {
            return Err(FieldError::NonSquarefree(disc));
        }
        Ok(f)
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn disc(&self) -> i64 {
        self.disc
    }

    /// `(s1, s2)`: number of real and complex places.
    pub fn signature(&self) -> (u32, u32) {
        if self.m > 0 {
            (2, 0)
        } else {
            (0, 1)
        }
    }

    pub fn is_imaginary(&self) -> bool {
        self.m < 0
    }

    pub fn basis_kind(&self) -> BasisKind {
        if self.m.rem_euclid(4) == 1 {
            BasisKind::HalfInteger
        } else {
            BasisKind::Root
        }
    }

    /// Trace of `ω`.
    pub fn omega_trace(&self) -> i64 {
        match self.basis_kind() {
            BasisKind::HalfInteger => 1,
            BasisKind::Root => 0,
        }
    }

    /// Norm of `ω`; `ω² = tr(ω)·ω − N(ω)`.
    pub fn omega_norm(&self) -> i64 {
        match self.basis_kind() {
            BasisKind::HalfInteger => (1 - self.m) / 4,
            BasisKind::Root => -self.m,
        }
    }

    pub fn one(&self) -> QuadInt {
        QuadInt::new(*self, BigInt::one(), BigInt::zero())
    }

    pub fn omega(&self) -> QuadInt {
        QuadInt::new(*self, BigInt::zero(), BigInt::one())
    }

    pub fn int(&self, n: impl Into<BigInt>) -> QuadInt {
        QuadInt::new(*self, n.into(), BigInt::zero())
    }

    /// The element `(x + y√m)/2`, if it lies in the maximal order.
    pub fn from_half_sqrt(&self, x: &BigInt, y: &BigInt) -> Option<QuadInt> {
        match self.basis_kind() {
            // (x + y√m)/2 = (x - y)/2 + y·ω
            BasisKind::HalfInteger => {
                let u = x - y;
                u.is_even().then(|| QuadInt::new(*self, u / 2, y.clone()))
            }
            BasisKind::Root => (x.is_even() && y.is_even())
                .then(|| QuadInt::new(*self, x / 2, y / 2)),
        }
    }
}

impl fmt::Display for QuadField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(√{})", self.m)
    }
}

/// An element `u + v·ω` of the maximal order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadInt {
    #[serde(with = "crate::serde_big")]
    pub u: BigInt,
    #[serde(with = "crate::serde_big")]
    pub v: BigInt,
    pub field: QuadField,
}

impl QuadInt {
    pub fn new(field: QuadField, u: BigInt, v: BigInt) -> Self {
        Self { u, v, field }
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }

    pub fn norm(&self) -> BigInt {
        let t = self.field.omega_trace();
        let n = self.field.omega_norm();
        &self.u * &self.u + &self.u * &self.v * t + &self.v * &self.v * n
    }

    pub fn trace(&self) -> BigInt {
        &self.u * 2 + &self.v * self.field.omega_trace()
    }

    pub fn norm_trace(&self) -> (BigInt, BigInt) {
        (self.norm(), self.trace())
    }

    pub fn conj(&self) -> Self {
        let t = self.field.omega_trace();
        Self::new(self.field, &self.u + &self.v * t, -&self.v)
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.field, other.field);
        let t = self.field.omega_trace();
        let n = self.field.omega_norm();
        let vv = &self.v * &other.v;
        let u = &self.u * &other.u - &vv * n;
        let v = &self.u * &other.v + &other.u * &self.v + vv * t;
        Self::new(self.field, u, v)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.field, &self.u + &other.u, &self.v + &other.v)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(self.field, &self.u - &other.u, &self.v - &other.v)
    }

    pub fn neg(&self) -> Self {
        Self::new(self.field, -&self.u, -&self.v)
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::new(self.field, &self.u * k, &self.v * k)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = self.field.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Coordinates `(x, y)` with `α = (x + y√m)/2`.
    pub fn half_sqrt_coords(&self) -> (BigInt, BigInt) {
        match self.field.basis_kind() {
            BasisKind::HalfInteger => (&self.u * 2 + &self.v, self.v.clone()),
            BasisKind::Root => (&self.u * 2, &self.v * 2),
        }
    }
}

impl fmt::Display for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}·ω", self.u, self.v)
    }
}

/// Decomposition type of a rational prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SplitType {
    Split,
    Inert,
    Ramified,
}

/// The ideal `aZ + (b + cω)Z` of the maximal order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadIdeal {
    #[serde(with = "crate::serde_big")]
    pub a: BigInt,
    #[serde(with = "crate::serde_big")]
    pub b: BigInt,
    #[serde(with = "crate::serde_big")]
    pub c: BigInt,
    pub field: QuadField,
}

/// Hermite normal form of the Z-lattice spanned by `gens ⊂ Z²`.
fn hnf(gens: impl IntoIterator<Item = (BigInt, BigInt)>) -> Option<(BigInt, BigInt, BigInt)> {
    let mut a = BigInt::zero();
    let mut row: Option<(BigInt, BigInt)> = None;
    for (u, v) in gens {
        if v.is_zero() {
            a = a.gcd(&u);
            continue;
        }
        match row.take() {
            None => row = Some((u, v)),
            Some((b, c)) => {
                let e = c.extended_gcd(&v);
                let g = e.gcd;
                let nb = &e.x * &b + &e.y * &u;
                // The combination with second coordinate zero.
                let k = (&v / &g) * &b - (&c / &g) * &u;
                a = a.gcd(&k);
                row = Some((nb, g));
            }
        }
    }
    let (mut b, mut c) = row?;
    if a.is_zero() {
        return None;
    }
    if c.is_negative() {
        b = -b;
        c = -c;
    }
    let a = a.abs();
    b = b.mod_floor(&a);
    Some((a, b, c))
}

impl QuadIdeal {
    pub fn unit(field: QuadField) -> Self {
        Self {
            a: BigInt::one(),
            b: BigInt::zero(),
            c: BigInt::one(),
            field,
        }
    }

    /// The O-ideal generated by `gens` (not all zero).
    pub fn from_generators(field: QuadField, gens: &[QuadInt]) -> Result<Self, FieldError> {
        let omega = field.omega();
        let mut vecs = Vec::with_capacity(gens.len() * 2);
        for g in gens {
            if g.field != field {
                return Err(FieldError::FieldMismatch);
            }
            let gw = g.mul(&omega);
            vecs.push((g.u.clone(), g.v.clone()));
            vecs.push((gw.u, gw.v));
        }
        let (a, b, c) = hnf(vecs).ok_or(FieldError::ZeroElement)?;
        Ok(Self { a, b, c, field })
    }

    /// Z-basis `(a, b + cω)`.
    pub fn basis(&self) -> [QuadInt; 2] {
        [
            self.field.int(self.a.clone()),
            QuadInt::new(self.field, self.b.clone(), self.c.clone()),
        ]
    }

    pub fn norm(&self) -> BigInt {
        &self.a * &self.c
    }

    pub fn is_unit(&self) -> bool {
        self.a.is_one()
    }

    pub fn contains(&self, x: &QuadInt) -> bool {
        // x = s·a + r·(b + cω)
        let (r, rem) = x.v.div_rem(&self.c);
        if !rem.is_zero() {
            return false;
        }
        (&x.u - &r * &self.b).mod_floor(&self.a).is_zero()
    }

    pub fn conj(&self) -> Self {
        let [x, y] = self.basis();
        let (a, b, c) = hnf([(x.u, x.v), {
            let y = y.conj();
            (y.u, y.v)
        }])
        .expect("conjugate of a nonzero ideal");
        Self {
            a,
            b,
            c,
            field: self.field,
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, FieldError> {
        if self.field != other.field {
            return Err(FieldError::FieldMismatch);
        }
        let [x1, y1] = self.basis();
        let [x2, y2] = other.basis();
        let prods = [x1.mul(&x2), x1.mul(&y2), y1.mul(&x2), y1.mul(&y2)];
        let (a, b, c) = hnf(prods.into_iter().map(|p| (p.u, p.v))).expect("nonzero product");
        Ok(Self {
            a,
            b,
            c,
            field: self.field,
        })
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::unit(self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("same field");
            }
            base = base.mul(&base).expect("same field");
            e >>= 1;
        }
        acc
    }

    /// `I + J`, the smallest ideal containing both.
    pub fn gcd(&self, other: &Self) -> Result<Self, FieldError> {
        if self.field != other.field {
            return Err(FieldError::FieldMismatch);
        }
        let vecs = self
            .basis()
            .into_iter()
            .chain(other.basis())
            .map(|x| (x.u, x.v));
        let (a, b, c) = hnf(vecs).expect("nonzero sum");
        Ok(Self {
            a,
            b,
            c,
            field: self.field,
        })
    }

    /// `I / k` when every element of `I` is divisible by the integer `k`.
    pub fn div_integer(&self, k: &BigInt) -> Option<Self> {
        let k = k.abs();
        let divides = |x: &BigInt| x.mod_floor(&k).is_zero();
        (divides(&self.a) && divides(&self.b) && divides(&self.c)).then(|| Self {
            a: &self.a / &k,
            b: &self.b / &k,
            c: &self.c / &k,
            field: self.field,
        })
    }
}

impl fmt::Display for QuadIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {} + {}·ω]", self.a, self.b, self.c)
    }
}

/// Normal form of `(α)`.
pub fn principal_ideal(alpha: &QuadInt) -> Result<QuadIdeal, FieldError> {
    if alpha.is_zero() {
        return Err(FieldError::ZeroElement);
    }
    QuadIdeal::from_generators(alpha.field, std::slice::from_ref(alpha))
}

/// Decomposition of the rational prime `p` in `field`.
///
/// Split primes come back as `[(p, r₁ + ω), (p, r₂ + ω)]` with `r₁ < r₂`.
pub fn factor_rational_prime(
    field: QuadField,
    p: &BigInt,
) -> Result<(SplitType, Vec<QuadIdeal>), FieldError> {
    let pu = p
        .to_biguint()
        .filter(|n| arith::is_prime(n) == Some(true))
        .ok_or_else(|| FieldError::NotPrime(p.clone()))?;
    let disc = BigInt::from(field.disc());
    let t = BigInt::from(field.omega_trace());
    let n = BigInt::from(field.omega_norm());
    let two = BigInt::from(2);
    let prime_above = |r: BigInt| {
        QuadIdeal::from_generators(
            field,
            &[field.int(p.clone()), QuadInt::new(field, r, BigInt::one())],
        )
        .expect("nonzero generators")
    };
    let kron = match pu.to_u64() {
        Some(small) => arith::kronecker_prime(&disc, small),
        None => {
            let r = disc.mod_floor(p);
            if r.is_zero() {
                0
            } else if r.modpow(&((p - 1u32) / 2u32), p).is_one() {
                1
            } else {
                -1
            }
        }
    };
    match kron {
        -1 => Ok((
            SplitType::Inert,
            vec![QuadIdeal::from_generators(field, &[field.int(p.clone())])?],
        )),
        0 => {
            // Double root of x² + t x + n modulo p.
            let r = if p == &two {
                n.mod_floor(&two)
            } else {
                let inv2 = arith::inv_mod(&two, p).expect("odd prime");
                (-&t * inv2).mod_floor(p)
            };
            Ok((SplitType::Ramified, vec![prime_above(r)]))
        }
        _ => {
            let (r1, r2) = if p == &two {
                (BigInt::zero(), BigInt::one())
            } else {
                let s = arith::sqrt_mod_prime(&disc, p).expect("split prime has a root");
                let inv2 = arith::inv_mod(&two, p).expect("odd prime");
                let a = ((-&t + &s) * &inv2).mod_floor(p);
                let b = ((-&t - &s) * &inv2).mod_floor(p);
                if a < b {
                    (a, b)
                } else {
                    (b, a)
                }
            };
            Ok((SplitType::Split, vec![prime_above(r1), prime_above(r2)]))
        }
    }
}

/// Exponent of the prime ideal `prime` in `ideal`.
pub fn prime_valuation(ideal: &QuadIdeal, prime: &QuadIdeal) -> u32 {
    let pn = prime.norm();
    let pc = prime.conj();
    let mut cur = ideal.clone();
    let mut v = 0;
    loop {
        let next = cur.mul(&pc).expect("same field");
        match next.div_integer(&pn) {
            Some(q) => {
                cur = q;
                v += 1;
            }
            None => return v,
        }
    }
}

/// Prime ideal factorization `[(P, e)]` of a nonzero ideal.
pub fn factor_ideal(ideal: &QuadIdeal, bound: u64) -> Result<Vec<(QuadIdeal, u32)>, FieldError> {
    let mut out = Vec::new();
    for (p, _) in arith::factor_biguint(ideal.norm().magnitude(), bound)? {
        let p = arith::bigint_from_biguint(p);
        let (_, primes) = factor_rational_prime(ideal.field, &p)?;
        for prime in primes {
            let e = prime_valuation(ideal, &prime);
            if e > 0 {
                out.push((prime, e));
            }
        }
    }
    Ok(out)
}

/// `J` with `J^n = I`, using the default factoring bound.
pub fn ideal_nth_root(ideal: &QuadIdeal, n: u32) -> Result<QuadIdeal, FieldError> {
    ideal_nth_root_with_bound(ideal, n, arith::DEFAULT_TRIAL_BOUND)
}

pub fn ideal_nth_root_with_bound(
    ideal: &QuadIdeal,
    n: u32,
    bound: u64,
) -> Result<QuadIdeal, FieldError> {
    assert!(n >= 1, "root index must be positive");
    let mut root = QuadIdeal::unit(ideal.field);
    for (prime, e) in factor_ideal(ideal, bound)? {
        if e % n != 0 {
            return Err(FieldError::NoRoot);
        }
        root = root.mul(&prime.pow(e / n))?;
    }
    Ok(root)
}
