//! End-to-end rank experiments: specialize a family, compute the class
//! group of each fiber field, certify the rank bound by an explicit ideal
//! `a` with `a^m = (x − a_i)`, and audit local splitness and counting.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith;
use crate::classgroup::{
    class_order, form_order, kummer_rank_from, n_rank, unit_rank_mod_n, ClassGroupCache,
    ClassGroupError, ClassGroupStructure, KummerReport,
};
use crate::localcheck::{is_nth_power_archimedean, nth_power_places, LocalError, Tri};
use crate::numberfield::{ideal_nth_root, principal_ideal, FieldError, QuadField, QuadIdeal, QuadInt};
use crate::specialize::{
    dedupe_fields, enumerate_parameters, fiber_polynomial, preset, specialization_record,
    CurveFamily, ShiftParams, SpecError, SpecFlag, SpecRecord,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExperimentError {
    #[error("degree {0} is outside the quadratic scope")]
    DegreeUnsupported(usize),
    #[error("fiber root is not an algebraic integer")]
    NotIntegral,
    #[error("Z[x] is not the maximal order")]
    NonMaximalOrder,
    #[error("(α) is not an n-th power of an ideal")]
    NoRoot,
    #[error("family has no rational roots recorded")]
    NoRootsHint,
    #[error("record has no field")]
    NoField,
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    ClassGroup(#[from] ClassGroupError),
    #[error(transparent)]
    Field(FieldError),
    #[error(transparent)]
    Local(#[from] LocalError),
}

impl From<FieldError> for ExperimentError {
    fn from(e: FieldError) -> Self {
        match e {
            FieldError::NoRoot => ExperimentError::NoRoot,
            e => ExperimentError::Field(e),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyClaim {
    pub family: CurveFamily,
    pub n: u64,
    pub predicted_rank: u32,
    pub provenance: String,
    /// Sign `s` of the reciprocal parameters `τ = s/k` giving imaginary fibers.
    pub imaginary_sign: i64,
}

/// Claim attached to a preset: `n = m` and rank `⌊d/2⌋`.
pub fn preset_claim(label: &str) -> Result<FamilyClaim, SpecError> {
    let family = preset(label)?;
    let (provenance, sign) = match label {
        "GREENBERG-5-1" => ("Greenberg curve y^5 = x(1 - x)", 1),
        _ => ("rank_p Cl(L) >= floor(d/2) for y^p = (x - a_1)...(x - a_d)", -1),
    };
    Ok(claim_for(family, provenance, sign))
}

pub fn claim_for(family: CurveFamily, provenance: &str, imaginary_sign: i64) -> FamilyClaim {
    FamilyClaim {
        n: family.m as u64,
        predicted_rank: (family.degree() / 2) as u32,
        provenance: provenance.to_string(),
        imaginary_sign,
        family,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealWitness {
    pub generator_element: QuadInt,
    pub root_ideal: QuadIdeal,
    pub order: u64,
    pub coprimality_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "reason")]
pub enum Verdict {
    Pass,
    ThinSetException(String),
    Skipped(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankExperimentRecord {
    pub spec: SpecRecord,
    pub class_structure: Option<ClassGroupStructure>,
    pub n: u64,
    pub n_rank: Option<u32>,
    pub predicted_rank: u32,
    pub witness: Option<IdealWitness>,
    pub kummer: Option<KummerReport>,
    pub local_audit: BTreeMap<String, Tri>,
    pub verdict: Verdict,
}

fn field_of(spec: &SpecRecord) -> Result<QuadField, ExperimentError> {
    let d = spec.field_disc.as_ref().ok_or(ExperimentError::NoField)?;
    let d = d.to_i64().ok_or(ExperimentError::NoField)?;
    QuadField::from_discriminant(d).map_err(ExperimentError::from)
}

/// `A·x` and `A`, where `A = p^m·lead(f)` for `τ = p/q` scales the fiber
/// `A X² + B X + C` so that `A·x` is integral.
fn scaled_root(family: &CurveFamily, spec: &SpecRecord, field: &QuadField) -> Result<(QuadInt, BigInt), ExperimentError> {
    if family.degree() != 2 {
        return Err(ExperimentError::DegreeUnsupported(family.degree()));
    }
    let p = spec.tau.numer();
    let q = spec.tau.denom();
    let pm = num_traits::pow(p.clone(), family.m as usize);
    let qm = num_traits::pow(q.clone(), family.m as usize);
    let a = &pm * family.f.coeff(2);
    let b = &pm * family.f.coeff(1);
    let c = &pm * family.f.coeff(0) - qm;
    let delta = &b * &b - BigInt::from(4) * &a * &c;
    let m = BigInt::from(field.m());
    if !(&delta % &m).is_zero() {
        return Err(ExperimentError::NoField);
    }
    let s2 = &delta / &m;
    if !arith::is_perfect_square(&s2) {
        return Err(ExperimentError::NoField);
    }
    let y = field
        .from_half_sqrt(&-&b, &s2.sqrt())
        .ok_or(ExperimentError::NotIntegral)?;
    debug_assert_eq!(y.norm(), &a * &c);
    Ok((y, a))
}

/// `A·(x − a_i)`, an integral element in the same Kummer class as
/// `x − a_i` whenever `A` is an `m`-th power.
pub fn kummer_element(
    family: &CurveFamily,
    spec: &SpecRecord,
    a_i: &BigRational,
) -> Result<QuadInt, ExperimentError> {
    let field = field_of(spec)?;
    let (y, a) = scaled_root(family, spec, &field)?;
    let shift = BigRational::from_integer(a) * a_i;
    if !shift.is_integer() {
        return Err(ExperimentError::NotIntegral);
    }
    Ok(y.sub(&field.int(shift.to_integer())))
}

/// Ideal `a` with `a^m = (x − a_i)` and its class order.
pub fn cube_ideal_witness(
    family: &CurveFamily,
    spec: &SpecRecord,
    a_i: &BigRational,
) -> Result<IdealWitness, ExperimentError> {
    if !spec.monic_integral {
        return Err(ExperimentError::NotIntegral);
    }
    if spec.has(SpecFlag::NonSquarefreeDisc) {
        return Err(ExperimentError::NonMaximalOrder);
    }
    let field = field_of(spec)?;
    let (_, a) = scaled_root(family, spec, &field)?;
    if !a.abs().is_one() {
        return Err(ExperimentError::NotIntegral);
    }
    let alpha = kummer_element(family, spec, a_i)?;
    let ideals: Vec<QuadIdeal> = family
        .roots_hint
        .iter()
        .map(|r| kummer_element(family, spec, r).and_then(|x| Ok(principal_ideal(&x)?)))
        .collect::<Result<_, _>>()?;
    let mut coprimality_ok = true;
    for i in 0..ideals.len() {
        for j in i + 1..ideals.len() {
            coprimality_ok &= ideals[i].gcd(&ideals[j])?.is_unit();
        }
    }
    let root_ideal = ideal_nth_root(&principal_ideal(&alpha)?, family.m)?;
    let order = class_order(&root_ideal)?;
    Ok(IdealWitness {
        generator_element: alpha,
        root_ideal,
        order,
        coprimality_ok,
    })
}

/// `α` is an `m`-th power at each place of `S` and at infinity.
pub fn local_split_audit(
    family: &CurveFamily,
    spec: &SpecRecord,
    a_i: &BigRational,
    s: &[u64],
    precision: u32,
) -> Result<BTreeMap<String, Tri>, ExperimentError> {
    let alpha = kummer_element(family, spec, a_i)?;
    let n = family.m as u64;
    let mut out = BTreeMap::new();
    for &p in s {
        for pv in nth_power_places(&alpha, n, p, precision)? {
            out.insert(pv.place, pv.verdict);
        }
    }
    out.insert(
        "inf".to_string(),
        Tri::from_bool(is_nth_power_archimedean(&alpha, n)),
    );
    Ok(out)
}

fn rank_record(
    claim: &FamilyClaim,
    tau: &BigRational,
    cache: &ClassGroupCache,
    audit_primes: &[u64],
) -> Result<RankExperimentRecord, ExperimentError> {
    let family = &claim.family;
    let spec = specialization_record(family, tau)?;
    let mut rec = RankExperimentRecord {
        spec,
        class_structure: None,
        n: claim.n,
        n_rank: None,
        predicted_rank: claim.predicted_rank,
        witness: None,
        kummer: None,
        local_audit: BTreeMap::new(),
        verdict: Verdict::Pass,
    };
    if !rec.spec.irreducible {
        rec.verdict = Verdict::ThinSetException("reducible fiber".into());
        return Ok(rec);
    }
    if rec.spec.has(SpecFlag::RealField) {
        rec.verdict = Verdict::Skipped("real quadratic field".into());
        return Ok(rec);
    }
    if rec.spec.has(SpecFlag::NonSquarefreeDisc) {
        rec.verdict = Verdict::Skipped("non-squarefree discriminant".into());
        return Ok(rec);
    }
    let field = field_of(&rec.spec)?;
    let s = cache.get(field.disc())?;
    let rank = n_rank(&s, claim.n).rank;
    rec.n_rank = Some(rank);
    rec.kummer = Some(kummer_rank_from(&field, claim.n, &s)?);
    rec.class_structure = Some((*s).clone());
    let mut reasons = Vec::new();
    if rank < claim.predicted_rank {
        reasons.push(format!("{}-rank {rank} below {}", claim.n, claim.predicted_rank));
    }
    if rec.spec.monic_integral {
        let a_i = family.roots_hint.first().ok_or(ExperimentError::NoRootsHint)?;
        match cube_ideal_witness(family, &rec.spec, a_i) {
            Ok(w) => {
                if w.order != claim.n {
                    reasons.push(format!("witness order {}", w.order));
                }
                if !w.coprimality_ok {
                    reasons.push("root ideals not coprime".into());
                }
                rec.witness = Some(w);
            }
            Err(ExperimentError::NoRoot) => reasons.push("(x - a) is not an m-th power".into()),
            Err(e) => return Err(e),
        }
        rec.local_audit = local_split_audit(family, &rec.spec, a_i, audit_primes, 30)?;
    }
    if !reasons.is_empty() {
        rec.verdict = Verdict::ThinSetException(reasons.join("; "));
    }
    Ok(rec)
}

/// One record per `τ`, in input order.
pub fn run_rank_experiment(
    claim: &FamilyClaim,
    taus: &[BigRational],
    cache: &ClassGroupCache,
) -> Result<Vec<RankExperimentRecord>, ExperimentError> {
    let d = claim.family.degree();
    if d != 2 {
        return Err(ExperimentError::DegreeUnsupported(d));
    }
    let s = claim.family.s_primes()?;
    taus.par_iter()
        .map(|t| rank_record(claim, t, cache, &s))
        .collect()
}

/// `n_rank ≥ predicted` and `kummer_rank = unit_rank + n_rank` with each
/// witness `(β) = a^n` of class order `n`.
pub fn verify_thold_identity(rec: &RankExperimentRecord) -> bool {
    if rec.verdict != Verdict::Pass {
        return true;
    }
    let (Some(rank), Some(k)) = (rec.n_rank, rec.kummer.as_ref()) else {
        return false;
    };
    let Ok(field) = field_of(&rec.spec) else {
        return false;
    };
    let Ok(units) = unit_rank_mod_n(&field, rec.n) else {
        return false;
    };
    if rank < rec.predicted_rank || k.unit_rank != units || k.class_rank != rank {
        return false;
    }
    if k.total() != units + rank || k.witnesses.len() != rank as usize {
        return false;
    }
    k.witnesses.iter().all(|w| {
        form_order(&w.class) == Ok(rec.n)
            && principal_ideal(&w.beta).ok() == Some(w.ideal.pow(rec.n as u32))
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub b: f64,
    pub parameters: usize,
    pub irreducible: usize,
    pub distinct: usize,
    pub ratio: f64,
}

/// Distinct quadratic fields among shifted parameters up to each `B`, and
/// `distinct · log B / B`.
pub fn dz_growth_experiment(
    claim: &FamilyClaim,
    sp: &ShiftParams,
    b_list: &[f64],
) -> Result<Vec<GrowthRow>, ExperimentError> {
    let d = claim.family.degree();
    if d != 2 {
        return Err(ExperimentError::DegreeUnsupported(d));
    }
    let top = b_list.iter().cloned().fold(0.0, f64::max);
    let taus = enumerate_parameters(sp, top);
    let records: Vec<SpecRecord> = taus
        .par_iter()
        .map(|t| specialization_record(&claim.family, t))
        .collect::<Result<_, _>>()?;
    // |t*| = |1/τ + 1/a| for each parameter.
    let inv_a = BigRational::new(BigInt::one(), sp.a.clone());
    let tstar: Vec<BigRational> = taus.iter().map(|t| (t.recip() + &inv_a).abs()).collect();
    let mut rows = Vec::new();
    for &b in b_list {
        let limit = BigRational::from_integer(BigInt::from(b.floor().max(0.0) as u64));
        let in_range: Vec<&SpecRecord> = records
            .iter()
            .zip(&tstar)
            .filter(|(_, t)| **t <= limit)
            .map(|(r, _)| r)
            .collect();
        let params = in_range.len();
        let within: Vec<SpecRecord> = in_range.into_iter().filter(|r| r.irreducible).cloned().collect();
        let distinct = dedupe_fields(&within)?.len();
        let ratio = if b > 1.0 { distinct as f64 * b.ln() / b } else { 0.0 };
        rows.push(GrowthRow {
            b,
            parameters: params,
            irreducible: within.len(),
            distinct,
            ratio,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantRow {
    pub x: f64,
    pub count: usize,
    pub exponent: f64,
    pub ratio: f64,
    pub bound_violations: usize,
}

/// Reciprocal parameters `τ = s/k` whose fibers can have `|disc| ≤ x`:
/// the fiber discriminant is `disc f ± 4·lead(f)·k^m`.
pub fn thquant_parameters(claim: &FamilyClaim, x: f64) -> Vec<BigRational> {
    let m = claim.family.m as i32;
    let f = &claim.family.f;
    let slack = f.discriminant().abs().to_f64().unwrap_or(f64::INFINITY);
    let lead = f.lead().abs().to_f64().unwrap_or(1.0);
    let mut out = Vec::new();
    let mut k = 2u64;
    while 4.0 * lead * (k as f64).powi(m) <= x + slack {
        out.push(BigRational::new(BigInt::from(claim.imaginary_sign.signum()), BigInt::from(k)));
        k += 1;
    }
    out
}

/// Distinct Pass fields with `|field_disc| ≤ X`, normalized by
/// `X^{1/(2m(d−1))} / log X`; also counts discriminant-bound violations.
pub fn thquant_table(
    claim: &FamilyClaim,
    x_list: &[f64],
    cache: &ClassGroupCache,
) -> Result<(Vec<QuantRow>, Vec<RankExperimentRecord>), ExperimentError> {
    let d = claim.family.degree();
    if d != 2 {
        return Err(ExperimentError::DegreeUnsupported(d));
    }
    let top = x_list.iter().cloned().fold(0.0, f64::max);
    let taus = thquant_parameters(claim, top);
    let records = run_rank_experiment(claim, &taus, cache)?;
    let exponent = 1.0 / (2.0 * claim.family.m as f64 * (d as f64 - 1.0));
    let violations = records
        .iter()
        .filter(|r| r.spec.within_disc_bound() == Some(false))
        .count();
    let mut rows = Vec::new();
    for &x in x_list {
        let xb = BigInt::from(x.floor().max(0.0) as u64);
        let fields: BTreeSet<BigInt> = records
            .iter()
            .filter(|r| r.verdict == Verdict::Pass)
            .filter_map(|r| r.spec.field_disc.clone())
            .filter(|d| d.abs() <= xb)
            .collect();
        let count = fields.len();
        let ratio = if x > 1.0 { count as f64 * x.ln() / x.powf(exponent) } else { 0.0 };
        rows.push(QuantRow {
            x,
            count,
            exponent,
            ratio,
            bound_violations: violations,
        });
    }
    Ok((rows, records))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThinRow {
    pub b: u64,
    pub reducible: usize,
    pub envelope: f64,
    pub within: bool,
}

/// Reducible fibers over `τ = 1/k`, `k ≤ B`, against `3√B`.
pub fn thin_set_table(family: &CurveFamily, b_list: &[u64]) -> Result<Vec<ThinRow>, ExperimentError> {
    let top = b_list.iter().copied().max().unwrap_or(0);
    let mut flags = Vec::with_capacity(top as usize);
    for k in 1..=top {
        let tau = BigRational::new(BigInt::one(), BigInt::from(k));
        let fiber = fiber_polynomial(family, &tau)?;
        flags.push(crate::specialize::is_irreducible(&fiber.poly) == Tri::False);
    }
    Ok(b_list
        .iter()
        .map(|&b| {
            let reducible = flags[..b as usize].iter().filter(|&&r| r).count();
            let envelope = 3.0 * (b as f64).sqrt();
            ThinRow {
                b,
                reducible,
                envelope,
                within: (reducible as f64) <= envelope,
            }
        })
        .collect())
}
