use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::config::{ExperimentConfig, Kind};
use super::output::OutputRecord;
use super::HarnessError;
use crate::arith;
use crate::classgroup::ClassGroupCache;
use crate::experiments::{
    dz_growth_experiment, local_split_audit, run_rank_experiment, thin_set_table, thquant_table,
    verify_thold_identity, FamilyClaim, Verdict,
};
use crate::lattice::{count_report, davenport_check, PlaceBounds};
use crate::localcheck::Tri;
use crate::numberfield::{principal_ideal, QuadField};
use crate::specialize::specialization_record;

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub kind: Kind,
    pub records: Vec<OutputRecord>,
    pub csv_header: Vec<String>,
    pub csv_rows: Vec<Vec<String>>,
    pub violations: Vec<String>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> u8 {
        if self.violations.is_empty() {
            0
        } else {
            2
        }
    }

    /// Data records, without the trailing summary.
    pub fn data(&self) -> &[OutputRecord] {
        let n = self.records.len().saturating_sub(1);
        &self.records[..n]
    }

    pub fn summary(&self) -> &serde_json::Value {
        &self.records.last().expect("summary record").payload
    }
}

struct Builder {
    kind: Kind,
    records: Vec<OutputRecord>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
    violations: Vec<String>,
}

impl Builder {
    fn new(kind: Kind, header: &[&str]) -> Self {
        Builder {
            kind,
            records: Vec::new(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            violations: Vec::new(),
        }
    }

    fn push<T: Serialize>(&mut self, payload: &T, verdict: &str, row: Vec<String>) {
        let i = self.records.len();
        self.records
            .push(OutputRecord::new(self.kind.name(), i, payload, verdict));
        self.rows.push(row);
    }

    fn finish(mut self, mut summary: serde_json::Value) -> RunOutcome {
        summary["violations"] = json!(self.violations);
        let verdict = if self.violations.is_empty() { "pass" } else { "violation" };
        let i = self.records.len();
        self.records
            .push(OutputRecord::new("summary", i, &summary, verdict));
        RunOutcome {
            kind: self.kind,
            records: self.records,
            csv_header: self.header,
            csv_rows: self.rows,
            violations: self.violations,
        }
    }
}

fn exp_err(e: impl std::fmt::Display) -> HarnessError {
    HarnessError::Experiment(e.to_string())
}

fn fmt_q(q: &BigRational) -> String {
    arith::format_rational(q)
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn verdict_name(v: &Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::ThinSetException(_) => "thin-set-exception",
        Verdict::Skipped(_) => "skipped",
    }
}

pub fn run(cfg: &ExperimentConfig) -> Result<RunOutcome, HarnessError> {
    cfg.validate()?;
    match cfg.kind()? {
        Kind::Rank => run_rank(cfg),
        Kind::DzCount => run_dz(cfg),
        Kind::Thquant => run_thquant(cfg),
        Kind::CountLattice => run_lattice(cfg),
        Kind::Davenport => run_davenport(cfg),
        Kind::LocalAudit => run_audit(cfg),
        Kind::ThinSet => run_thin(cfg),
    }
}

fn require_quadratic(claim: &FamilyClaim) -> Result<(), HarnessError> {
    let d = claim.family.degree();
    if d != 2 {
        return Err(HarnessError::Config(format!(
            "experiment.f: degree {d} is outside the quadratic scope"
        )));
    }
    Ok(())
}

fn run_rank(cfg: &ExperimentConfig) -> Result<RunOutcome, HarnessError> {
    let claim = cfg.claim()?;
    require_quadratic(&claim)?;
    let taus = cfg.taus(&claim)?;
    let cache = ClassGroupCache::new();
    let recs = run_rank_experiment(&claim, &taus, &cache).map_err(exp_err)?;
    let mut b = Builder::new(
        Kind::Rank,
        &["tau", "field_disc", "h", "n_rank", "witness_order", "verdict"],
    );
    let (mut pass, mut skipped, mut exceptions) = (0, 0, 0);
    for r in &recs {
        let t = fmt_q(&r.spec.tau);
        match r.verdict {
            Verdict::Pass => pass += 1,
            Verdict::Skipped(_) => skipped += 1,
            Verdict::ThinSetException(_) => exceptions += 1,
        }
        if !verify_thold_identity(r) {
            b.violations.push(format!("τ = {t}: rank identity fails"));
        }
        if r.verdict == Verdict::Pass {
            if let Some(w) = &r.witness {
                let sound = principal_ideal(&w.generator_element)
                    .map(|i| i == w.root_ideal.pow(claim.family.m))
                    .unwrap_or(false);
                if !sound || w.order != claim.n {
                    b.violations.push(format!("τ = {t}: witness unsound"));
                }
            }
        }
        if r.spec.within_disc_bound() == Some(false) {
            b.violations.push(format!("τ = {t}: |field_disc| exceeds D_bound"));
        }
        let row = vec![
            t,
            opt(r.spec.field_disc.as_ref()),
            opt(r.class_structure.as_ref().map(|s| s.h)),
            opt(r.n_rank),
            opt(r.witness.as_ref().map(|w| w.order)),
            verdict_name(&r.verdict).to_string(),
        ];
        b.push(r, verdict_name(&r.verdict), row);
    }
    let envelope = (3.0 * (taus.len() as f64).sqrt()).ceil() as usize;
    if exceptions > envelope {
        b.violations
            .push(format!("{exceptions} thin-set exceptions exceed envelope {envelope}"));
    }
    Ok(b.finish(json!({
        "family": claim.family.label,
        "records": recs.len(),
        "pass": pass,
        "skipped": skipped,
        "exceptions": exceptions,
        "exception_envelope": envelope,
    })))
}

fn run_dz(cfg: &ExperimentConfig) -> Result<RunOutcome, HarnessError> {
    let claim = cfg.claim()?;
    require_quadratic(&claim)?;
    let (sp, bs) = cfg.shift_params(&claim)?.expect("validated");
    let rows = dz_growth_experiment(&claim, &sp, &bs).map_err(exp_err)?;
    let c = cfg.calibration.dz_c;
    let mut b = Builder::new(
        Kind::DzCount,
        &["b", "parameters", "irreducible", "distinct", "ratio", "c"],
    );
    for r in &rows {
        let ok = c.map_or(true, |c| r.ratio >= c);
        if !ok {
            b.violations
                .push(format!("B = {}: ratio {} below c = {}", r.b, r.ratio, c.unwrap()));
        }
        let row = vec![
            r.b.to_string(),
            r.parameters.to_string(),
            r.irreducible.to_string(),
            r.distinct.to_string(),
            r.ratio.to_string(),
            opt(c),
        ];
        b.push(r, if ok { "pass" } else { "violation" }, row);
    }
    Ok(b.finish(json!({
        "family": claim.family.label,
        "shift": sp,
        "calibrated": c.is_some(),
        "c": c,
    })))
}

fn run_thquant(cfg: &ExperimentConfig) -> Result<RunOutcome, HarnessError> {
    let claim = cfg.claim()?;
    require_quadratic(&claim)?;
    let xs = &cfg.thquant.as_ref().expect("validated").x;
    let cache = ClassGroupCache::new();
    let (rows, recs) = thquant_table(&claim, xs, &cache).map_err(exp_err)?;
    let c = cfg.calibration.thquant_c;
    let mut b = Builder::new(
        Kind::Thquant,
        &["x", "count", "exponent", "ratio", "bound_violations", "c"],
    );
    for r in &rows {
        let ok = c.map_or(true, |c| r.ratio >= c) && r.bound_violations == 0;
        if !ok {
            b.violations.push(format!(
                "X = {}: ratio {} (c = {}), {} bound violations",
                r.x,
                r.ratio,
                opt(c),
                r.bound_violations
            ));
        }
        let row = vec![
            r.x.to_string(),
            r.count.to_string(),
            r.exponent.to_string(),
            r.ratio.to_string(),
            r.bound_violations.to_string(),
            opt(c),
        ];
        b.push(r, if ok { "pass" } else { "violation" }, row);
    }
    Ok(b.finish(json!({
        "family": claim.family.label,
        "parameters": recs.len(),
        "calibrated": c.is_some(),
        "c": c,
    })))
}

#[derive(Serialize)]
struct LatticeRow {
    m: i64,
    b: u64,
    report: crate::lattice::CountReport,
    /// `relative_error · B`, the quantity the constant bounds.
    scaled_error: f64,
}

fn lattice_rows(cfg: &ExperimentConfig, bounds: &[u64], c: f64) -> Result<Vec<LatticeRow>, HarnessError> {
    let l = cfg.lattice.as_ref().expect("validated");
    let mut jobs = Vec::new();
    for &m in &l.fields {
        let field = QuadField::new(m).map_err(|e| HarnessError::Config(format!("lattice.fields: {e}")))?;
        for &bd in bounds {
            jobs.push((m, field, bd));
        }
    }
    jobs.par_iter()
        .map(|&(m, field, bd)| {
            let pb = PlaceBounds::uniform(field, BigRational::from_integer(BigInt::from(bd)))
                .map_err(|e| HarnessError::Config(format!("lattice.bounds: {e}")))?;
            let report = count_report(&pb, c).map_err(exp_err)?;
            let scaled_error = report.relative_error.hi * bd as f64;
            Ok(LatticeRow {
                m,
                b: bd,
                report,
                scaled_error,
            })
        })
        .collect()
}

fn run_lattice(cfg: &ExperimentConfig) -> Result<RunOutcome, HarnessError> {
    let c = cfg.calibration.lattice_c;
    let bounds = &cfg.lattice.as_ref().expect("validated").bounds;
    let rows = lattice_rows(cfg, bounds, c.unwrap_or(f64::INFINITY))?;
    let mut b = Builder::new(
        Kind::CountLattice,
        &["m", "b", "exact_count", "main_term", "relative_error", "budget", "within"],
    );
    for r in &rows {
        let ok = c.is_none() || r.report.within_budget;
        if !ok {
            b.violations.push(format!(
                "Q(√{}), B = {}: relative error {} over budget {}",
                r.m, r.b, r.report.relative_error.hi, r.report.error_budget
            ));
        }
        let row = vec![
            r.m.to_string(),
            r.b.to_string(),
            r.report.exact_count.to_string(),
            r.report.main_term.mid().to_string(),
            r.report.relative_error.hi.to_string(),
            r.report.error_budget.to_string(),
            ok.to_string(),
        ];
        b.push(r, if ok { "pass" } else { "violation" }, row);
    }
    Ok(b.finish(json!({ "calibrated": c.is_some(), "c": c })))
}

#[derive(Serialize)]
struct DavenportRow {
    shape: String,
    #[serde(with = "crate::serde_big::rational")]
    scale: BigRational,
    report: crate::lattice::DavenportReport,
}

fn davenport_rows(cfg: &ExperimentConfig, scales: &[BigRational], c: f64) -> Result<Vec<DavenportRow>, HarnessError> {
    let d = cfg.davenport.as_ref().expect("validated");
    let basis = d.basis.unwrap_or([[1, 0], [0, 1]]);
    let shapes = cfg.davenport_shapes()?;
    let mut jobs = Vec::new();
    for (name, shape) in d.shapes.iter().zip(&shapes) {
        for s in scales {
            jobs.push((name.clone(), shape.clone(), s.clone()));
        }
    }
    jobs.into_par_iter()
        .map(|(name, shape, s)| {
            let report = davenport_check(basis, &shape, &s, c).map_err(exp_err)?;
            Ok(DavenportRow {
                shape: name,
                scale: s,
                report,
            })
        })
        .collect()
}

fn run_davenport(cfg: &ExperimentConfig) -> Result<RunOutcome, HarnessError> {
    let c = cfg.calibration.davenport_c;
    let scales = cfg.davenport_scales()?;
    let rows = davenport_rows(cfg, &scales, c.unwrap_or(f64::INFINITY))?;
    let mut b = Builder::new(
        Kind::Davenport,
        &["shape", "scale", "count", "volume", "ratio", "constant", "violation"],
    );
    for r in &rows {
        let bad = c.is_some() && r.report.violation;
        if bad {
            b.violations.push(format!(
                "{} at scale {}: ratio {} above C = {}",
                r.shape,
                fmt_q(&r.scale),
                r.report.ratio.lo,
                r.report.constant
            ));
        }
        let row = vec![
            r.shape.clone(),
            fmt_q(&r.scale),
            r.report.count.to_string(),
            r.report.volume.mid().to_string(),
            r.report.ratio.hi.to_string(),
            opt(c),
            bad.to_string(),
        ];
        b.push(r, if bad { "violation" } else { "pass" }, row);
    }
    Ok(b.finish(json!({ "calibrated": c.is_some(), "c": c })))
}

#[derive(Serialize)]
struct AuditRow {
    #[serde(with = "crate::serde_big::rational")]
    tau: BigRational,
    #[serde(with = "crate::serde_big::rational")]
    root: BigRational,
    min_valuation: i64,
    small: bool,
    places: BTreeMap<String, Tri>,
    all_true: bool,
}

fn run_audit(cfg: &ExperimentConfig) -> Result<RunOutcome, HarnessError> {
    let claim = cfg.claim()?;
    require_quadratic(&claim)?;
    let taus = cfg.taus(&claim)?;
    let audit = cfg.audit.clone().unwrap_or(super::config::AuditSection {
        primes: None,
        precision: 40,
        small_exponent: 6,
    });
    let primes = match &audit.primes {
        Some(p) => p.clone(),
        None => claim.family.s_primes().map_err(exp_err)?,
    };
    let fam = &claim.family;
    if fam.roots_hint.is_empty() {
        return Err(HarnessError::Config("experiment.roots: local audit needs rational roots of f".into()));
    }
    let per_tau: Vec<Vec<AuditRow>> = taus
        .par_iter()
        .map(|tau| {
            let spec = specialization_record(fam, tau).map_err(exp_err)?;
            if spec.field_disc.is_none() {
                return Ok(Vec::new());
            }
            let minv = primes
                .iter()
                .map(|&p| arith::valuation_rational(tau, p))
                .min()
                .unwrap_or(0);
            fam.roots_hint
                .iter()
                .map(|r| {
                    let places =
                        local_split_audit(fam, &spec, r, &primes, audit.precision).map_err(exp_err)?;
                    let all_true = places.values().all(|v| *v == Tri::True);
                    Ok(AuditRow {
                        tau: tau.clone(),
                        root: r.clone(),
                        min_valuation: minv,
                        small: minv >= audit.small_exponent,
                        places,
                        all_true,
                    })
                })
                .collect()
        })
        .collect::<Result<_, HarnessError>>()?;
    let mut b = Builder::new(Kind::LocalAudit, &["tau", "root", "min_valuation", "place", "verdict"]);
    let mut worst_fail: Option<i64> = None;
    let mut audited = 0;
    for row in per_tau.into_iter().flatten() {
        audited += 1;
        if !row.all_true {
            worst_fail = Some(worst_fail.map_or(row.min_valuation, |w| w.max(row.min_valuation)));
            if row.small {
                b.violations.push(format!(
                    "τ = {}, root {}: not split at every place",
                    fmt_q(&row.tau),
                    fmt_q(&row.root)
                ));
            }
        }
        let verdict = if row.all_true { "pass" } else { "not-split" };
        let first = row
            .places
            .iter()
            .map(|(pl, v)| {
                vec![
                    fmt_q(&row.tau),
                    fmt_q(&row.root),
                    row.min_valuation.to_string(),
                    pl.clone(),
                    serde_json::to_value(v).unwrap().as_str().unwrap_or("").to_string(),
                ]
            })
            .collect::<Vec<_>>();
        let i = b.records.len();
        b.records
            .push(OutputRecord::new(Kind::LocalAudit.name(), i, &row, verdict));
        b.rows.extend(first);
    }
    Ok(b.finish(json!({
        "family": fam.label,
        "primes": primes,
        "audited": audited,
        // Every τ with min_p v_p(τ) at or above this level passed.
        "pass_threshold_valuation": worst_fail.map(|w| w + 1),
    })))
}

fn run_thin(cfg: &ExperimentConfig) -> Result<RunOutcome, HarnessError> {
    let claim = cfg.claim()?;
    let bs = &cfg.thin.as_ref().expect("validated").b;
    let rows = thin_set_table(&claim.family, bs).map_err(exp_err)?;
    let mut b = Builder::new(Kind::ThinSet, &["b", "reducible", "envelope", "within"]);
    for r in &rows {
        if !r.within {
            b.violations
                .push(format!("B = {}: {} reducible fibers exceed {}", r.b, r.reducible, r.envelope));
        }
        let row = vec![
            r.b.to_string(),
            r.reducible.to_string(),
            r.envelope.to_string(),
            r.within.to_string(),
        ];
        b.push(r, if r.within { "pass" } else { "violation" }, row);
    }
    Ok(b.finish(json!({ "family": claim.family.label })))
}

/// Freeze the constant of a counting experiment from its smallest scale.
/// Returns the updated config and whether anything changed.
pub fn calibrate(cfg: &ExperimentConfig) -> Result<(ExperimentConfig, bool), HarnessError> {
    cfg.validate()?;
    let kind = cfg.kind()?;
    let mut out = cfg.clone();
    let zero = |what: &str| HarnessError::Config(format!("calibration: {what} is zero at the smallest scale"));
    match kind {
        Kind::Rank | Kind::LocalAudit | Kind::ThinSet => {
            return Err(HarnessError::Config(format!(
                "experiment.kind: {kind} has no constant to calibrate"
            )))
        }
        Kind::DzCount => {
            if cfg.calibration.dz_c.is_some() {
                return Ok((out, false));
            }
            let claim = cfg.claim()?;
            require_quadratic(&claim)?;
            let (sp, bs) = cfg.shift_params(&claim)?.expect("validated");
            let b0 = bs.iter().cloned().fold(f64::INFINITY, f64::min);
            let rows = dz_growth_experiment(&claim, &sp, &[b0]).map_err(exp_err)?;
            let r = rows[0].ratio;
            if r <= 0.0 {
                return Err(zero("distinct-field ratio"));
            }
            out.calibration.dz_c = Some(0.5 * r);
        }
        Kind::Thquant => {
            if cfg.calibration.thquant_c.is_some() {
                return Ok((out, false));
            }
            let claim = cfg.claim()?;
            require_quadratic(&claim)?;
            let xs = &cfg.thquant.as_ref().expect("validated").x;
            let x0 = xs.iter().cloned().fold(f64::INFINITY, f64::min);
            let (rows, _) = thquant_table(&claim, &[x0], &ClassGroupCache::new()).map_err(exp_err)?;
            let r = rows[0].ratio;
            if r <= 0.0 {
                return Err(zero("field-count ratio"));
            }
            out.calibration.thquant_c = Some(0.5 * r);
        }
        Kind::CountLattice => {
            if cfg.calibration.lattice_c.is_some() {
                return Ok((out, false));
            }
            let bounds = &cfg.lattice.as_ref().expect("validated").bounds;
            let b0 = *bounds.iter().min().ok_or_else(|| HarnessError::Config("lattice.bounds: empty".into()))?;
            let rows = lattice_rows(cfg, &[b0], f64::INFINITY)?;
            let m = rows.iter().map(|r| r.scaled_error).fold(0.0, f64::max);
            if m <= 0.0 {
                return Err(zero("scaled counting error"));
            }
            out.calibration.lattice_c = Some(2.0 * m);
        }
        Kind::Davenport => {
            if cfg.calibration.davenport_c.is_some() {
                return Ok((out, false));
            }
            let scales = cfg.davenport_scales()?;
            let s0 = scales.iter().min().cloned().expect("non-empty scales");
            let rows = davenport_rows(cfg, &[s0], f64::INFINITY)?;
            let m = rows.iter().map(|r| r.report.ratio.hi).fold(0.0, f64::max);
            if m <= 0.0 {
                return Err(zero("Davenport ratio"));
            }
            out.calibration.davenport_c = Some(2.0 * m);
        }
    }
    Ok((out, true))
}
