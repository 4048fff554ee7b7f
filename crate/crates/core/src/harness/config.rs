//! TOML experiment configuration.

use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::arith;
use crate::experiments::{claim_for, preset_claim, FamilyClaim};
use crate::lattice::Shape;
use crate::poly::IntPoly;
use crate::specialize::{enumerate_parameters, make_family, shift_parameters, ShiftParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Rank,
    DzCount,
    Thquant,
    #[serde(alias = "lattice")]
    CountLattice,
    Davenport,
    LocalAudit,
    ThinSet,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Rank => "rank",
            Kind::DzCount => "dz-count",
            Kind::Thquant => "thquant",
            Kind::CountLattice => "count-lattice",
            Kind::Davenport => "davenport",
            Kind::LocalAudit => "local-audit",
            Kind::ThinSet => "thin-set",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<TauSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thquant: Option<ThquantSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<LatticeSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub davenport: Option<DavenportSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub audit: Option<AuditSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thin: Option<ThinSection>,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub calibration: Calibration,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<Kind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    /// Coefficients of `f`, constant term first.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roots: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predicted_rank: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub imaginary_sign: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TauSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reciprocal: Option<Reciprocal>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<Shift>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shifted: Option<Shifted>,
}

/// `τ = sign/k` for `from ≤ k ≤ to`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Reciprocal {
    pub sign: i64,
    pub from: u64,
    pub to: u64,
}

/// Shift enumeration with `a`, `E` derived from `S` and `ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Shift {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<String>,
    pub b: Vec<f64>,
}

/// `τ = a/(a·t − 1)` for `from ≤ |t| ≤ to` with an explicit `a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Shifted {
    pub a: i64,
    pub from: u64,
    pub to: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThquantSection {
    pub x: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSection {
    /// Squarefree `m` of each field `Q(√m)`.
    pub fields: Vec<i64>,
    pub bounds: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DavenportSection {
    pub shapes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scales: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<ScaleRange>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<[[i64; 2]; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaleRange {
    pub from: i64,
    pub to: i64,
    pub step: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub primes: Option<Vec<u64>>,
    #[serde(default = "default_precision")]
    pub precision: u32,
    /// Parameters with `v_p(τ) ≥ small_exponent` at every `p` must pass.
    #[serde(default = "default_small_exponent")]
    pub small_exponent: i64,
}

fn default_precision() -> u32 {
    40
}

fn default_small_exponent() -> i64 {
    6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThinSection {
    pub b: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_jsonl")]
    pub jsonl: String,
    #[serde(default = "default_csv")]
    pub csv: String,
}

fn default_jsonl() -> String {
    "out.jsonl".into()
}

fn default_csv() -> String {
    "out.csv".into()
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            jsonl: default_jsonl(),
            csv: default_csv(),
        }
    }
}

/// Frozen constants; `None` means not yet calibrated.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Calibration {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dz_c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thquant_c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice_c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub davenport_c: Option<f64>,
}

fn cfg_err(field: &str, msg: impl fmt::Display) -> HarnessError {
    HarnessError::Config(format!("{field}: {msg}"))
}

fn parse_q(field: &str, s: &str) -> Result<BigRational, HarnessError> {
    arith::parse_rational(s).map_err(|e| cfg_err(field, e))
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn kind(&self) -> Result<Kind, HarnessError> {
        self.experiment
            .kind
            .ok_or_else(|| cfg_err("experiment.kind", "missing"))
    }

    /// Structural checks that do not need any computation.
    pub fn validate(&self) -> Result<(), HarnessError> {
        let kind = self.kind()?;
        if let Some(t) = &self.tau {
            let n = [
                t.values.is_some(),
                t.reciprocal.is_some(),
                t.shift.is_some(),
                t.shifted.is_some(),
            ]
            .iter()
            .filter(|b| **b)
            .count();
            if n != 1 {
                return Err(cfg_err(
                    "tau",
                    format!("exactly one of values, reciprocal, shift, shifted is required, found {n}"),
                ));
            }
            if let Some(r) = &t.reciprocal {
                if r.sign == 0 || r.from == 0 || r.from > r.to {
                    return Err(cfg_err("tau.reciprocal", "need sign ≠ 0 and 1 ≤ from ≤ to"));
                }
            }
            if let Some(s) = &t.shifted {
                if s.a == 0 || s.from == 0 || s.from > s.to {
                    return Err(cfg_err("tau.shifted", "need a ≠ 0 and 1 ≤ from ≤ to"));
                }
            }
        }
        for (name, c) in [
            ("calibration.dz_c", self.calibration.dz_c),
            ("calibration.thquant_c", self.calibration.thquant_c),
            ("calibration.lattice_c", self.calibration.lattice_c),
            ("calibration.davenport_c", self.calibration.davenport_c),
        ] {
            if let Some(c) = c {
                if !(c.is_finite() && c > 0.0) {
                    return Err(cfg_err(name, format!("constant must be positive, got {c}")));
                }
            }
        }
        let need = |present: bool, section: &str| {
            if present {
                Ok(())
            } else {
                Err(cfg_err(section, format!("required for {kind}")))
            }
        };
        match kind {
            Kind::Rank | Kind::LocalAudit => need(self.tau.is_some(), "tau")?,
            Kind::DzCount => need(
                self.tau.as_ref().is_some_and(|t| t.shift.is_some()),
                "tau.shift",
            )?,
            Kind::Thquant => need(self.thquant.is_some(), "thquant")?,
            Kind::CountLattice => need(self.lattice.is_some(), "lattice")?,
            Kind::Davenport => {
                let d = self.davenport.as_ref().ok_or_else(|| cfg_err("davenport", "required"))?;
                if d.scales.is_some() == d.range.is_some() {
                    return Err(cfg_err("davenport", "exactly one of scales, range is required"));
                }
                for s in &d.shapes {
                    if !matches!(s.as_str(), "disk" | "box") {
                        return Err(cfg_err("davenport.shapes", format!("unknown shape {s}")));
                    }
                }
            }
            Kind::ThinSet => need(self.thin.is_some(), "thin")?,
        }
        Ok(())
    }

    pub fn claim(&self) -> Result<FamilyClaim, HarnessError> {
        let e = &self.experiment;
        let mut claim = match (&e.family, e.m, &e.f) {
            (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
                return Err(cfg_err("experiment.family", "give either a preset label or inline m and f"))
            }
            (Some(label), None, None) => preset_claim(label).map_err(|err| cfg_err("experiment.family", err))?,
            (None, Some(m), Some(f)) => {
                let fam = make_family(m, IntPoly::from_i64(f)).map_err(|err| cfg_err("experiment.m/f", err))?;
                claim_for(fam, "inline family", e.imaginary_sign.unwrap_or(-1))
            }
            _ => return Err(cfg_err("experiment", "family label or both m and f required")),
        };
        if let Some(roots) = &e.roots {
            let rs = roots
                .iter()
                .map(|r| parse_q("experiment.roots", r))
                .collect::<Result<Vec<_>, _>>()?;
            claim.family = claim
                .family
                .with_roots(rs)
                .map_err(|err| cfg_err("experiment.roots", err))?;
        }
        if let Some(s) = &e.s {
            if let Some(&p) = s.iter().find(|&&p| !arith::is_prime_u64(p)) {
                return Err(cfg_err("experiment.s", format!("{p} is not prime")));
            }
            claim.family.s_override = Some(s.clone());
        }
        if let Some(eps) = &e.epsilon {
            let q = parse_q("experiment.epsilon", eps)?;
            if q <= BigRational::from_integer(0.into()) {
                return Err(cfg_err("experiment.epsilon", "must be positive"));
            }
            claim.family.epsilon = Some(q);
        }
        if let Some(n) = e.n {
            claim.n = n;
        }
        if let Some(r) = e.predicted_rank {
            claim.predicted_rank = r;
        }
        if let Some(s) = e.imaginary_sign {
            claim.imaginary_sign = s;
        }
        Ok(claim)
    }

    pub fn shift_params(&self, claim: &FamilyClaim) -> Result<Option<(ShiftParams, Vec<f64>)>, HarnessError> {
        let Some(shift) = self.tau.as_ref().and_then(|t| t.shift.as_ref()) else {
            return Ok(None);
        };
        let s = match &shift.s {
            Some(s) => s.clone(),
            None => claim
                .family
                .s_primes()
                .map_err(|e| cfg_err("tau.shift.s", e))?,
        };
        let eps = match &shift.epsilon {
            Some(e) => parse_q("tau.shift.epsilon", e)?,
            None => claim.family.epsilon.clone().unwrap_or_else(BigRational::one),
        };
        if shift.b.is_empty() {
            return Err(cfg_err("tau.shift.b", "empty"));
        }
        Ok(Some((shift_parameters(&s, &eps), shift.b.clone())))
    }

    /// The parameter list of the configured strategy.
    pub fn taus(&self, claim: &FamilyClaim) -> Result<Vec<BigRational>, HarnessError> {
        let t = self.tau.as_ref().ok_or_else(|| cfg_err("tau", "missing"))?;
        if let Some(v) = &t.values {
            let out = v
                .iter()
                .map(|s| parse_q("tau.values", s))
                .collect::<Result<Vec<_>, _>>()?;
            if out.iter().any(|q| q == &BigRational::from_integer(0.into())) {
                return Err(cfg_err("tau.values", "τ = 0 has no fiber"));
            }
            return Ok(out);
        }
        if let Some(r) = &t.reciprocal {
            return Ok((r.from..=r.to)
                .map(|k| BigRational::new(BigInt::from(r.sign.signum()), BigInt::from(k)))
                .collect());
        }
        if let Some(s) = &t.shifted {
            let a = BigInt::from(s.a);
            let mut out = Vec::new();
            for k in s.from..=s.to {
                for sign in [1i64, -1] {
                    let ts = BigInt::from(k) * sign;
                    out.push(BigRational::new(a.clone(), &a * ts - 1));
                }
            }
            return Ok(out);
        }
        let (sp, b) = self.shift_params(claim)?.expect("shift strategy");
        let top = b.iter().cloned().fold(0.0, f64::max);
        Ok(enumerate_parameters(&sp, top))
    }

    pub fn davenport_scales(&self) -> Result<Vec<BigRational>, HarnessError> {
        let d = self.davenport.as_ref().ok_or_else(|| cfg_err("davenport", "missing"))?;
        let out = if let Some(s) = &d.scales {
            s.iter()
                .map(|x| parse_q("davenport.scales", x))
                .collect::<Result<Vec<_>, _>>()?
        } else {
            let r = d.range.as_ref().expect("validated");
            if r.step <= 0 || r.from <= 0 || r.from > r.to {
                return Err(cfg_err("davenport.range", "need 0 < from ≤ to and step > 0"));
            }
            (r.from..=r.to)
                .step_by(r.step as usize)
                .map(|x| BigRational::from_integer(x.into()))
                .collect()
        };
        if out.is_empty() {
            return Err(cfg_err("davenport.scales", "empty"));
        }
        if out.iter().any(|q| q <= &BigRational::from_integer(0.into())) {
            return Err(cfg_err("davenport.scales", "scales must be positive"));
        }
        Ok(out)
    }

    pub fn davenport_shapes(&self) -> Result<Vec<Shape>, HarnessError> {
        let d = self.davenport.as_ref().ok_or_else(|| cfg_err("davenport", "missing"))?;
        d.shapes
            .iter()
            .map(|s| Shape::parse(s, &[BigRational::one()]).map_err(|e| cfg_err("davenport.shapes", e)))
            .collect()
    }

    /// Built-in configuration for a subcommand run without a file.
    pub fn default_for(kind: Kind, family: Option<&str>) -> Self {
        let label = family.unwrap_or("AI-3").to_string();
        let sign = if label == "GREENBERG-5-1" { 1 } else { -1 };
        let mut cfg = ExperimentConfig {
            experiment: ExperimentSection {
                kind: Some(kind),
                family: Some(label),
                ..Default::default()
            },
            tau: None,
            thquant: None,
            lattice: None,
            davenport: None,
            audit: None,
            thin: None,
            output: OutputSection {
                jsonl: format!("{}.jsonl", kind.name()),
                csv: format!("{}.csv", kind.name()),
            },
            calibration: Calibration::default(),
        };
        match kind {
            Kind::Rank => {
                cfg.tau = Some(TauSection {
                    reciprocal: Some(Reciprocal { sign, from: 2, to: 60 }),
                    ..Default::default()
                })
            }
            Kind::DzCount => {
                cfg.tau = Some(TauSection {
                    shift: Some(Shift {
                        s: None,
                        epsilon: None,
                        b: vec![100.0, 200.0, 400.0, 800.0, 1600.0],
                    }),
                    ..Default::default()
                })
            }
            Kind::Thquant => {
                cfg.thquant = Some(ThquantSection {
                    x: vec![1e3, 1e4, 1e5, 1e6],
                })
            }
            Kind::CountLattice => {
                cfg.lattice = Some(LatticeSection {
                    fields: vec![-1, -3, 2],
                    bounds: vec![10, 20, 40, 80, 160],
                });
                cfg.calibration.lattice_c = Some(4.0);
            }
            Kind::Davenport => {
                cfg.davenport = Some(DavenportSection {
                    shapes: vec!["disk".into()],
                    scales: None,
                    range: Some(ScaleRange { from: 10, to: 200, step: 10 }),
                    basis: None,
                });
                cfg.calibration.davenport_c = Some(1.0);
            }
            Kind::LocalAudit => {
                cfg.experiment.s = Some(vec![2, 3]);
                cfg.tau = Some(TauSection {
                    shifted: Some(Shifted { a: 46656, from: 2, to: 6 }),
                    ..Default::default()
                });
                cfg.audit = Some(AuditSection {
                    primes: None,
                    precision: default_precision(),
                    small_exponent: default_small_exponent(),
                });
            }
            Kind::ThinSet => {
                cfg.thin = Some(ThinSection {
                    b: vec![100, 400, 1600, 6400],
                })
            }
        }
        cfg
    }
}
