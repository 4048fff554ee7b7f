//! Superelliptic families `y^m = f(x)`, their fibers over `t = 1/y`, the
//! shifted parameter enumeration `τ = a/(a·t* − 1)` and per-fiber
//! discriminant bookkeeping.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{self, ArithError};
use crate::heights::{discriminant_bound, fiber_height_bound, rational_height, HeightValue};
use crate::localcheck::{padic_factor_type, Tri};
use crate::poly::IntPoly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("gcd(m = {m}, deg f = {d}) ≠ 1")]
    NotCoprime { m: u32, d: usize },
    #[error("f has zero discriminant")]
    NotSeparable,
    #[error("exponent m = {0} must be at least 2")]
    BadExponent(u32),
    #[error("τ = 0 has no fiber")]
    ZeroParameter,
    #[error("degree {0} is not supported here")]
    DegreeUnsupported(usize),
    #[error("record at τ = {0} is reducible")]
    Reducible(String),
    #[error("{0} is not a root of f")]
    NotARoot(String),
    #[error("unknown preset family {0}")]
    UnknownPreset(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// `y^m = f(x)` with the degree-`d` map `t = 1/y`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveFamily {
    pub label: String,
    pub m: u32,
    pub f: IntPoly,
    #[serde(with = "crate::serde_big::rational_vec", default)]
    pub roots_hint: Vec<BigRational>,
    #[serde(default)]
    pub s_override: Option<Vec<u64>>,
    #[serde(with = "opt_rational", default)]
    pub epsilon: Option<BigRational>,
}

mod opt_rational {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref().map(arith::format_rational).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigRational>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| arith::parse_rational(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

pub fn make_family(m: u32, f: IntPoly) -> Result<CurveFamily, SpecError> {
    if m < 2 {
        return Err(SpecError::BadExponent(m));
    }
    let d = f.degree();
    if f.is_zero() || d == 0 {
        return Err(SpecError::DegreeUnsupported(0));
    }
    if (m as usize).gcd(&d) != 1 {
        return Err(SpecError::NotCoprime { m, d });
    }
    if d >= 2 && f.discriminant().is_zero() {
        return Err(SpecError::NotSeparable);
    }
    Ok(CurveFamily {
        label: format!("y^{m} = {f}"),
        m,
        f,
        roots_hint: Vec::new(),
        s_override: None,
        epsilon: None,
    })
}

impl CurveFamily {
    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Attach rational roots of `f`, each checked exactly.
    pub fn with_roots(mut self, roots: Vec<BigRational>) -> Result<Self, SpecError> {
        for r in &roots {
            if !self.f.eval_rational(r).is_zero() {
                return Err(SpecError::NotARoot(arith::format_rational(r)));
            }
        }
        self.roots_hint = roots;
        Ok(self)
    }

    pub fn degree(&self) -> usize {
        self.f.degree()
    }

    /// Height of `F(T, X) = T^m f(X) − 1`.
    pub fn bivariate_height(&self) -> BigInt {
        self.f.max_abs_coeff().max(BigInt::one())
    }

    /// Primes dividing `m · disc f · lead f`, unless overridden.
    pub fn s_primes(&self) -> Result<Vec<u64>, SpecError> {
        if let Some(s) = &self.s_override {
            return Ok(s.clone());
        }
        let disc = if self.degree() >= 2 {
            self.f.discriminant()
        } else {
            BigInt::one()
        };
        let n = disc * self.f.lead() * BigInt::from(self.m);
        Ok(arith::factor(&n)?
            .into_iter()
            .map(|(p, _)| p.to_u64().expect("small prime"))
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fiber {
    pub poly: IntPoly,
    /// Lowest-terms numerator of τ is ±1.
    pub monic_integral: bool,
}

/// `p^m f(X) − q^m` for `τ = p/q`, made primitive with positive lead.
pub fn fiber_polynomial(family: &CurveFamily, tau: &BigRational) -> Result<Fiber, SpecError> {
    if tau.is_zero() {
        return Err(SpecError::ZeroParameter);
    }
    let (p, q) = (tau.numer(), tau.denom());
    let pm = num_traits::pow(p.clone(), family.m as usize);
    let qm = num_traits::pow(q.clone(), family.m as usize);
    let raw = family.f.scale(&pm).sub(&IntPoly::constant(qm));
    Ok(Fiber {
        poly: raw.primitive_part(),
        monic_integral: p.abs().is_one(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftParams {
    #[serde(with = "crate::serde_big")]
    pub a: BigInt,
    pub e: u64,
    pub s_finite: Vec<u64>,
    #[serde(with = "crate::serde_big::rational")]
    pub epsilon: BigRational,
}

/// Smallest `a = ∏ p^{e_p}` with `|a|_p < min(ε, 1)` on `S`, and the
/// smallest integer `E ≥ 2` with `E > 1/ε + 1/a`.
pub fn shift_parameters(s_finite: &[u64], epsilon: &BigRational) -> ShiftParams {
    assert!(epsilon.is_positive(), "ε must be positive");
    let cap = epsilon.clone().min(BigRational::one());
    let target = cap.recip();
    let mut a = BigInt::one();
    let mut primes: Vec<u64> = s_finite.to_vec();
    primes.sort_unstable();
    primes.dedup();
    for &p in &primes {
        let mut pe = BigInt::from(p);
        while BigRational::from_integer(pe.clone()) <= target {
            pe *= p;
        }
        a *= pe;
    }
    let bound = epsilon.recip() + BigRational::new(BigInt::one(), a.clone());
    let e: BigInt = bound.floor().to_integer() + 1;
    let e = e.to_u64().expect("E fits in u64").max(2);
    ShiftParams {
        a,
        e,
        s_finite: primes,
        epsilon: epsilon.clone(),
    }
}

/// `τ = a/(a·t* − 1)` for `E ≤ |t*| ≤ B`, ordered by `|t*|` with the
/// positive value first.
pub fn enumerate_parameters(sp: &ShiftParams, b: f64) -> Vec<BigRational> {
    let top = if b.is_finite() && b >= 0.0 { b.floor() as u64 } else { 0 };
    let mut out = Vec::new();
    for t in sp.e..=top {
        for sign in [1i64, -1] {
            let ts = BigInt::from(t) * sign;
            let tau = BigRational::new(sp.a.clone(), &sp.a * ts - 1);
            out.push(tau);
        }
    }
    assert!(out.iter().all(|t| is_small_at_s(t, sp)), "S-adic smallness violated");
    out
}

/// `|τ|_v < ε` at every `v ∈ S ∪ {∞}`.
pub fn is_small_at_s(tau: &BigRational, sp: &ShiftParams) -> bool {
    if tau.is_zero() {
        return true;
    }
    if tau.abs() >= sp.epsilon {
        return false;
    }
    sp.s_finite.iter().all(|&p| {
        // |τ|_p = p^{−v}
        let v = arith::valuation_rational(tau, p);
        let abs = if v >= 0 {
            BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(p), v as usize))
        } else {
            BigRational::from_integer(num_traits::pow(BigInt::from(p), (-v) as usize))
        };
        abs < sp.epsilon
    })
}

/// Irreducibility over `Q`: exact up to degree 3, otherwise certified by
/// a single-part p-adic type at some `p ≤ 100`.
pub fn is_irreducible(f: &IntPoly) -> Tri {
    let f = f.primitive_part();
    let d = f.degree();
    if d == 0 {
        return Tri::False;
    }
    if d == 1 {
        return Tri::True;
    }
    if f.coeff(0).is_zero() {
        return Tri::False;
    }
    match d {
        2 => Tri::from_bool(!arith::is_perfect_square(&f.discriminant())),
        3 => match has_rational_root(&f) {
            Some(b) => Tri::from_bool(!b),
            None => Tri::Inconclusive,
        },
        _ => {
            for p in (2u64..=100).filter(|&p| arith::is_prime_u64(p)) {
                if let Ok(t) = padic_factor_type(&f, p, 40) {
                    if t.is_irreducible() {
                        return Tri::True;
                    }
                }
            }
            Tri::Inconclusive
        }
    }
}

fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let mut out = vec![BigInt::one()];
    for (p, e) in arith::factor(n).ok()? {
        let p = BigInt::from(p);
        let base = out.clone();
        let mut pk = BigInt::one();
        for _ in 0..e {
            pk *= &p;
            out.extend(base.iter().map(|d| d * &pk));
        }
    }
    Some(out)
}

/// Rational-root test; `None` if a coefficient cannot be factored.
fn has_rational_root(f: &IntPoly) -> Option<bool> {
    let nums = divisors(&f.coeff(0))?;
    let dens = divisors(&f.lead())?;
    for p in &nums {
        for q in &dens {
            if p.gcd(q) != BigInt::one() {
                continue;
            }
            for s in [p.clone(), -p] {
                if f.eval_rational(&BigRational::new(s, q.clone())).is_zero() {
                    return Some(true);
                }
            }
        }
    }
    Some(false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SpecFlag {
    ThinSetSuspect,
    NonSquarefreeDisc,
    RealField,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecRecord {
    #[serde(with = "crate::serde_big::rational")]
    pub tau: BigRational,
    pub fiber_poly: IntPoly,
    #[serde(with = "crate::serde_big")]
    pub poly_disc: BigInt,
    #[serde(with = "opt_big", default)]
    pub field_disc: Option<BigInt>,
    pub irreducible: bool,
    pub h_tau: HeightValue,
    pub d_bound: HeightValue,
    pub monic_integral: bool,
    pub flags: BTreeSet<SpecFlag>,
}

mod opt_big {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref().map(|b| b.to_string()).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigInt>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| s.parse().map_err(serde::de::Error::custom))
            .transpose()
    }
}

impl SpecRecord {
    pub fn has(&self, flag: SpecFlag) -> bool {
        self.flags.contains(&flag)
    }

    /// `|field_disc| ≤ D_bound` checked against the interval's upper end;
    /// `None` when no field discriminant is recorded.
    pub fn within_disc_bound(&self) -> Option<bool> {
        self.field_disc
            .as_ref()
            .map(|d| BigRational::from_integer(d.abs()) <= *self.d_bound.upper())
    }
}

pub fn specialization_record(family: &CurveFamily, tau: &BigRational) -> Result<SpecRecord, SpecError> {
    let fiber = fiber_polynomial(family, tau)?;
    let d = family.degree();
    let poly = fiber.poly;
    let poly_disc = if d >= 2 { poly.discriminant() } else { BigInt::one() };
    let irreducible = is_irreducible(&poly) == Tri::True;
    let mut flags = BTreeSet::new();
    if !irreducible {
        flags.insert(SpecFlag::ThinSetSuspect);
    }
    let field_disc = if d == 2 && irreducible {
        let fd = arith::fundamental_discriminant(&poly_disc)?;
        if fd != poly_disc {
            flags.insert(SpecFlag::NonSquarefreeDisc);
        }
        if fd.is_positive() {
            flags.insert(SpecFlag::RealField);
        }
        Some(fd)
    } else {
        None
    };
    let h_tau = rational_height(tau);
    let h_f = HeightValue::from_int(family.bivariate_height());
    let d_bound = if d >= 2 {
        discriminant_bound(d, &fiber_height_bound(&h_f, family.m, &h_tau))
            .expect("degree at least 2")
    } else {
        HeightValue::from_int(1)
    };
    Ok(SpecRecord {
        tau: tau.clone(),
        fiber_poly: poly,
        poly_disc,
        field_disc,
        irreducible,
        h_tau,
        d_bound,
        monic_integral: fiber.monic_integral,
        flags,
    })
}

/// Group quadratic records by fundamental discriminant.
pub fn dedupe_fields(records: &[SpecRecord]) -> Result<BTreeMap<BigInt, Vec<BigRational>>, SpecError> {
    let mut out: BTreeMap<BigInt, Vec<BigRational>> = BTreeMap::new();
    for r in records {
        let d = r.fiber_poly.degree();
        if d != 2 {
            return Err(SpecError::DegreeUnsupported(d));
        }
        let key = r
            .field_disc
            .clone()
            .ok_or_else(|| SpecError::Reducible(arith::format_rational(&r.tau)))?;
        let taus = out.entry(key).or_default();
        if !taus.contains(&r.tau) {
            taus.push(r.tau.clone());
        }
    }
    Ok(out)
}

pub const PRESET_LABELS: [&str; 3] = ["AI-3", "AI-5", "GREENBERG-5-1"];

/// Built-in families: `y^3 = x² − x`, `y^5 = x² − x` and `y^5 = x(1 − x)`.
pub fn preset(label: &str) -> Result<CurveFamily, SpecError> {
    let (m, coeffs): (u32, [i64; 3]) = match label {
        "AI-3" => (3, [0, -1, 1]),
        "AI-5" => (5, [0, -1, 1]),
        "GREENBERG-5-1" => (5, [0, 1, -1]),
        _ => return Err(SpecError::UnknownPreset(label.to_string())),
    };
    let roots = vec![BigRational::zero(), BigRational::one()];
    make_family(m, IntPoly::from_i64(&coeffs))?
        .with_label(label)
        .with_roots(roots)
}

/// `τ = sign/k` for `k` in `lo..=hi`.
pub fn reciprocal_parameters(sign: i64, lo: u64, hi: u64) -> Vec<BigRational> {
    (lo.max(1)..=hi)
        .map(|k| BigRational::new(BigInt::from(sign.signum()), BigInt::from(k)))
        .collect()
}

/// `v_p(τ)` for each `p ∈ S`.
pub fn s_valuations(tau: &BigRational, s: &[u64]) -> Vec<(u64, i64)> {
    s.iter()
        .map(|&p| (p, arith::valuation_rational(tau, p)))
        .collect()
}

/// Number of `k ≤ b` for which the fiber at `τ = 1/k` is reducible.
pub fn reducible_count(family: &CurveFamily, b: u64) -> Result<usize, SpecError> {
    let mut n = 0;
    for tau in reciprocal_parameters(1, 1, b) {
        let fiber = fiber_polynomial(family, &tau)?;
        if is_irreducible(&fiber.poly) == Tri::False {
            n += 1;
        }
    }
    Ok(n)
}
