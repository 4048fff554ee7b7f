//! Counting integers of quadratic fields with bounded archimedean
//! absolute values, and lattice points of Z² in symmetric convex sets.
//!
//! Membership is decided in exact integer arithmetic; only the volume
//! side of each comparison (which involves π and square roots) is a
//! floating interval with outward rounding.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numberfield::{QuadField, QuadInt};

pub const DEFAULT_CELL_CAP: u64 = 1_000_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatticeError {
    #[error("search box of {cells} cells exceeds cap {cap}")]
    BoxTooLarge { cells: u128, cap: u64 },
    #[error("bound {0} must be a rational ≥ 1 with numerator and denominator below 2^62")]
    BadBound(String),
    #[error("{expected} place bounds required, {got} given")]
    PlaceCount { expected: usize, got: usize },
    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),
    #[error("lattice basis is degenerate")]
    DegenerateLattice,
}

/// Closed real interval with outward-rounded endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    /// Smallest interval guaranteed to contain a value computed as `x`
    /// with one rounding.
    pub fn around(x: f64) -> Self {
        Self {
            lo: x.next_down(),
            hi: x.next_up(),
        }
    }

    pub fn pi() -> Self {
        Self::around(std::f64::consts::PI)
    }

    pub fn from_rational(q: &BigRational) -> Self {
        Self::around(crate::heights::rational_to_f64(q))
    }

    pub fn mul(self, o: Self) -> Self {
        let p = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        let lo = p.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self {
            lo: lo.next_down(),
            hi: hi.next_up(),
        }
    }

    /// Division by a strictly positive interval.
    pub fn div(self, o: Self) -> Self {
        assert!(o.lo > 0.0, "division by interval touching zero");
        self.mul(Self {
            lo: (1.0 / o.hi).next_down(),
            hi: (1.0 / o.lo).next_up(),
        })
    }

    pub fn sub(self, o: Self) -> Self {
        Self {
            lo: (self.lo - o.hi).next_down(),
            hi: (self.hi - o.lo).next_up(),
        }
    }

    pub fn sqrt(self) -> Self {
        Self {
            lo: self.lo.max(0.0).sqrt().next_down().max(0.0),
            hi: self.hi.sqrt().next_up(),
        }
    }

    pub fn abs(self) -> Self {
        if self.lo >= 0.0 {
            self
        } else if self.hi <= 0.0 {
            Self {
                lo: -self.hi,
                hi: -self.lo,
            }
        } else {
            Self {
                lo: 0.0,
                hi: self.hi.max(-self.lo),
            }
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// Upper bounds `B_v`, one per infinite place. Real fields order the
/// places as `√m ↦ +√m`, `√m ↦ −√m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaceBounds {
    pub field: QuadField,
    #[serde(with = "crate::serde_big::rational_vec")]
    pub bounds: Vec<BigRational>,
}

impl PlaceBounds {
    pub fn new(field: QuadField, bounds: Vec<BigRational>) -> Result<Self, LatticeError> {
        let expected = if field.is_imaginary() { 1 } else { 2 };
        if bounds.len() != expected {
            return Err(LatticeError::PlaceCount {
                expected,
                got: bounds.len(),
            });
        }
        for b in &bounds {
            to_ratio(b)?;
        }
        Ok(Self { field, bounds })
    }

    /// The same bound at every place.
    pub fn uniform(field: QuadField, b: BigRational) -> Result<Self, LatticeError> {
        let k = if field.is_imaginary() { 1 } else { 2 };
        Self::new(field, vec![b; k])
    }

    pub fn min_bound(&self) -> &BigRational {
        self.bounds.iter().min().unwrap()
    }
}

/// `(p, q)` with `B = p/q`, checked to be at least 1 and small enough for
/// 128-bit membership tests.
fn to_ratio(b: &BigRational) -> Result<(i128, i128), LatticeError> {
    let bad = || LatticeError::BadBound(crate::arith::format_rational(b));
    let p = b.numer().to_i64().ok_or_else(bad)?;
    let q = b.denom().to_i64().ok_or_else(bad)?;
    if p < q || p >= 1 << 62 {
        return Err(bad());
    }
    Ok((p as i128, q as i128))
}

fn isqrt_u128(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// Sign of `a + b√d` for integers `a, b` and a non-square `d > 0`.
fn sign_surd(a: i128, b: i128, d: i128) -> Ordering {
    let (sa, sb) = (a.cmp(&0), b.cmp(&0));
    if sb == Ordering::Equal {
        return sa;
    }
    if sa == Ordering::Equal || sa == sb {
        return sb;
    }
    // Opposite signs: whichever square dominates.
    let lhs_rhs = a
        .checked_mul(a)
        .zip(b.checked_mul(b).and_then(|b2| b2.checked_mul(d)));
    let cmp = match lhs_rhs {
        Some((l, r)) => l.cmp(&r),
        None => {
            let (a, b, d) = (BigInt::from(a), BigInt::from(b), BigInt::from(d));
            (&a * &a).cmp(&(&b * &b * d))
        }
    };
    match cmp {
        Ordering::Greater => sa,
        Ordering::Less => sb,
        Ordering::Equal => Ordering::Equal,
    }
}

/// `|x + s·y√d| ≤ 2p/q` with `s = ±1`.
fn surd_within(x: i128, y: i128, d: i128, p: i128, q: i128) -> bool {
    // q·x + q·y√d − 2p ≤ 0 and q·x + q·y√d + 2p ≥ 0
    sign_surd(q * x - 2 * p, q * y, d) != Ordering::Greater
        && sign_surd(q * x + 2 * p, q * y, d) != Ordering::Less
}

/// Basis coordinates `(u, v)` of every `α = u + vω` with `|α|_v ≤ B_v` at
/// every infinite place, sorted lexicographically.
pub fn enumerate_coords(pb: &PlaceBounds, cap: u64) -> Result<Vec<(i64, i64)>, LatticeError> {
    let f = &pb.field;
    let t = f.omega_trace() as i128;
    let n = f.omega_norm() as i128;
    let d = f.disc() as i128;
    let ratios: Vec<(i128, i128)> = pb.bounds.iter().map(to_ratio).collect::<Result<_, _>>()?;
    let mut out: Vec<(i64, i64)> = if f.is_imaginary() {
        let (p, q) = ratios[0];
        // N(α) = (u + tv/2)² + |D| v²/4, so v² ≤ 4B²/|D| and |u| ≤ B + |t v|/2.
        let vmax = isqrt_u128((4 * p * p / (q * q * (-d))) as u128) as i128;
        let bceil = (p + q - 1) / q;
        let umax = bceil + (t.abs() * vmax + 1) / 2;
        let cells = (2 * umax + 1) as u128 * (2 * vmax + 1) as u128;
        if cells > cap as u128 {
            return Err(LatticeError::BoxTooLarge { cells, cap });
        }
        (-vmax..=vmax)
            .into_par_iter()
            .flat_map_iter(|v| {
                (-umax..=umax).filter_map(move |u| {
                    let norm = u * u + t * u * v + n * v * v;
                    (norm * q * q <= p * p).then_some((u as i64, v as i64))
                })
            })
            .collect()
    } else {
        let (p1, q1) = ratios[0];
        let (p2, q2) = ratios[1];
        // With x = 2u + tv, y = v: σ(α) = (x ± y√D)/2, so |x| ≤ B1 + B2
        // and |y|√D ≤ B1 + B2.
        let s_num = p1 * q2 + p2 * q1;
        let s_den = q1 * q2;
        let xmax = s_num / s_den + 1;
        let ymax = isqrt_u128((s_num * s_num / (s_den * s_den * d)) as u128) as i128 + 1;
        let cells = (2 * xmax + 1) as u128 * (2 * ymax + 1) as u128;
        if cells > cap as u128 {
            return Err(LatticeError::BoxTooLarge { cells, cap });
        }
        (-ymax..=ymax)
            .into_par_iter()
            .flat_map_iter(|y| {
                let lo = -xmax;
                (lo..=xmax).filter_map(move |x| {
                    if (x - t * y).rem_euclid(2) != 0 {
                        return None;
                    }
                    (surd_within(x, y, d, p1, q1) && surd_within(x, -y, d, p2, q2))
                        .then(|| (((x - t * y) / 2) as i64, y as i64))
                })
            })
            .collect()
    };
    out.sort_unstable();
    Ok(out)
}

/// The integers `α ∈ O_F` with `|α|_v ≤ B_v` at every infinite place.
pub fn enumerate_bounded(pb: &PlaceBounds) -> Result<Vec<QuadInt>, LatticeError> {
    enumerate_bounded_with_cap(pb, DEFAULT_CELL_CAP)
}

pub fn enumerate_bounded_with_cap(pb: &PlaceBounds, cap: u64) -> Result<Vec<QuadInt>, LatticeError> {
    Ok(enumerate_coords(pb, cap)?
        .into_iter()
        .map(|(u, v)| QuadInt::new(pb.field, BigInt::from(u), BigInt::from(v)))
        .collect())
}

/// `2^{s1+s2} π^{s2} ∏ B_v^{e_v} / |D|^{1/2}`.
pub fn main_term(pb: &PlaceBounds) -> Interval {
    let f = &pb.field;
    let (s1, s2) = f.signature();
    let mut x = Interval::point(2f64.powi((s1 + s2) as i32));
    for _ in 0..s2 {
        x = x.mul(Interval::pi());
    }
    let e = if f.is_imaginary() { 2 } else { 1 };
    for b in &pb.bounds {
        let bi = Interval::from_rational(b);
        for _ in 0..e {
            x = x.mul(bi);
        }
    }
    let root_d = Interval::point(f.disc().unsigned_abs() as f64).sqrt();
    x.div(root_d)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    pub exact_count: u64,
    pub main_term: Interval,
    pub relative_error: Interval,
    /// `C / min_v B_v`.
    pub error_budget: f64,
    pub within_budget: bool,
}

/// Exact count against the main term, with budget `C / min B_v`.
pub fn count_report(pb: &PlaceBounds, c: f64) -> Result<CountReport, LatticeError> {
    let count = enumerate_coords(pb, DEFAULT_CELL_CAP)?.len() as u64;
    let mt = main_term(pb);
    let rel = Interval::point(count as f64).sub(mt).abs().div(mt);
    let bmin = Interval::from_rational(pb.min_bound());
    let budget = Interval::point(c).div(bmin).lo;
    Ok(CountReport {
        exact_count: count,
        main_term: mt,
        relative_error: rel,
        error_budget: budget,
        within_budget: rel.hi <= budget,
    })
}

/// Symmetric convex region scaled by a rational factor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum Shape {
    Disk {
        #[serde(with = "crate::serde_big::rational")]
        radius: BigRational,
    },
    Box {
        #[serde(with = "crate::serde_big::rational")]
        half_x: BigRational,
        #[serde(with = "crate::serde_big::rational")]
        half_y: BigRational,
    },
    Ellipse {
        #[serde(with = "crate::serde_big::rational")]
        a: BigRational,
        #[serde(with = "crate::serde_big::rational")]
        b: BigRational,
    },
}

impl Shape {
    pub fn parse(kind: &str, params: &[BigRational]) -> Result<Self, LatticeError> {
        match (kind, params) {
            ("disk", [r]) => Ok(Shape::Disk { radius: r.clone() }),
            ("box", [h]) => Ok(Shape::Box {
                half_x: h.clone(),
                half_y: h.clone(),
            }),
            ("box", [hx, hy]) => Ok(Shape::Box {
                half_x: hx.clone(),
                half_y: hy.clone(),
            }),
            ("ellipse", [a, b]) => Ok(Shape::Ellipse {
                a: a.clone(),
                b: b.clone(),
            }),
            _ => Err(LatticeError::UnsupportedShape(format!(
                "{kind} with {} parameters",
                params.len()
            ))),
        }
    }

    pub fn scaled(&self, s: &BigRational) -> Self {
        match self {
            Shape::Disk { radius } => Shape::Disk { radius: radius * s },
            Shape::Box { half_x, half_y } => Shape::Box {
                half_x: half_x * s,
                half_y: half_y * s,
            },
            Shape::Ellipse { a, b } => Shape::Ellipse { a: a * s, b: b * s },
        }
    }

    pub fn volume(&self) -> Interval {
        match self {
            Shape::Disk { radius } => {
                let r = Interval::from_rational(radius);
                Interval::pi().mul(r).mul(r)
            }
            Shape::Box { half_x, half_y } => Interval::point(4.0)
                .mul(Interval::from_rational(half_x))
                .mul(Interval::from_rational(half_y)),
            Shape::Ellipse { a, b } => Interval::pi()
                .mul(Interval::from_rational(a))
                .mul(Interval::from_rational(b)),
        }
    }

    /// Inner radius: the largest centered disk inside the region.
    pub fn inner_radius(&self) -> BigRational {
        match self {
            Shape::Disk { radius } => radius.clone(),
            Shape::Box { half_x, half_y } => half_x.clone().min(half_y.clone()),
            Shape::Ellipse { a, b } => a.clone().min(b.clone()),
        }
    }

    /// Circumradius bound used to size the search box.
    fn outer(&self) -> BigRational {
        match self {
            Shape::Disk { radius } => radius.clone(),
            Shape::Box { half_x, half_y } => half_x + half_y,
            Shape::Ellipse { a, b } => a.clone().max(b.clone()),
        }
    }

    fn ratios(&self) -> Result<Vec<(i128, i128)>, LatticeError> {
        let v = match self {
            Shape::Disk { radius } => vec![radius],
            Shape::Box { half_x, half_y } => vec![half_x, half_y],
            Shape::Ellipse { a, b } => vec![a, b],
        };
        v.into_iter()
            .map(|r| {
                let bad = || LatticeError::BadBound(crate::arith::format_rational(r));
                if !r.is_positive() {
                    return Err(bad());
                }
                let p = r.numer().to_i64().ok_or_else(bad)?;
                let q = r.denom().to_i64().ok_or_else(bad)?;
                if p >= 1 << 31 || q >= 1 << 31 {
                    return Err(bad());
                }
                Ok((p as i128, q as i128))
            })
            .collect()
    }
}

/// Exact membership; products saturate, and a saturated left side
/// exceeds every right side (all below 2^124).
fn member(ratios: &[(i128, i128)], kind: &Shape, x: i128, y: i128) -> bool {
    let sq = |z: i128| z.saturating_mul(z);
    match kind {
        Shape::Disk { .. } => {
            let (p, q) = ratios[0];
            sq(x).saturating_add(sq(y)).saturating_mul(q * q) <= p * p
        }
        Shape::Box { .. } => {
            let ((px, qx), (py, qy)) = (ratios[0], ratios[1]);
            x.abs().saturating_mul(qx) <= px && y.abs().saturating_mul(qy) <= py
        }
        Shape::Ellipse { .. } => {
            // x²/a² + y²/b² ≤ 1 ⟺ x² qa² pb² + y² qb² pa² ≤ pa² pb²
            let ((pa, qa), (pb, qb)) = (ratios[0], ratios[1]);
            let lhs = sq(x)
                .saturating_mul(qa * qa * pb * pb)
                .saturating_add(sq(y).saturating_mul(qb * qb * pa * pa));
            lhs <= pa * pa * pb * pb
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DavenportReport {
    pub count: u64,
    pub volume: Interval,
    pub determinant: i64,
    #[serde(with = "crate::serde_big::rational")]
    pub inner_radius: BigRational,
    /// `|count − Vol/det| · innr / Vol`, the quantity bounded by `C`.
    pub ratio: Interval,
    pub constant: f64,
    pub violation: bool,
}

/// Points of the lattice spanned by the rows of `basis` inside `U`.
pub fn lattice_point_count(basis: [[i64; 2]; 2], region: &Shape) -> Result<u64, LatticeError> {
    let det = basis[0][0] as i128 * basis[1][1] as i128 - basis[0][1] as i128 * basis[1][0] as i128;
    if det == 0 {
        return Err(LatticeError::DegenerateLattice);
    }
    let ratios = region.ratios()?;
    // Coefficients of a point of norm ≤ R are bounded by R·‖Γ^{-1}‖ ≤
    // R·max|entry|·2/|det|.
    let r = region.outer();
    let rr = (r.numer() / r.denom()).to_i64().unwrap_or(i64::MAX) as i128 + 1;
    let max_entry = basis.iter().flatten().map(|x| x.unsigned_abs()).max().unwrap() as i128;
    let cmax = (2 * rr * max_entry + det.abs() - 1) / det.abs() + 1;
    let cells = (2 * cmax + 1) as u128 * (2 * cmax + 1) as u128;
    if cells > DEFAULT_CELL_CAP as u128 {
        return Err(LatticeError::BoxTooLarge {
            cells,
            cap: DEFAULT_CELL_CAP,
        });
    }
    let (b0, b1) = (basis[0], basis[1]);
    let count: u64 = (-cmax..=cmax)
        .into_par_iter()
        .map(|i| {
            (-cmax..=cmax)
                .filter(|&j| {
                    let x = i * b0[0] as i128 + j * b1[0] as i128;
                    let y = i * b0[1] as i128 + j * b1[1] as i128;
                    member(&ratios, region, x, y)
                })
                .count() as u64
        })
        .sum();
    Ok(count)
}

/// Compares the lattice-point count of `scale · U` against `Vol/det Γ`
/// with error allowance `C · Vol / innr`.
pub fn davenport_check(
    basis: [[i64; 2]; 2],
    shape: &Shape,
    scale: &BigRational,
    c: f64,
) -> Result<DavenportReport, LatticeError> {
    let region = shape.scaled(scale);
    let count = lattice_point_count(basis, &region)?;
    let det = (basis[0][0] * basis[1][1] - basis[0][1] * basis[1][0]).abs();
    let vol = region.volume();
    let innr = region.inner_radius();
    let expected = vol.div(Interval::point(det as f64));
    let ratio = Interval::point(count as f64)
        .sub(expected)
        .abs()
        .mul(Interval::from_rational(&innr))
        .div(vol);
    Ok(DavenportReport {
        count,
        volume: vol,
        determinant: det,
        inner_radius: innr,
        ratio,
        constant: c,
        violation: ratio.lo > c,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallAtOnePlaceReport {
    pub count: u64,
    /// `C · E · B^{ℓ−1}`.
    pub envelope: f64,
    pub within: bool,
}

/// Number of `α ∈ O_F` with `max_v |α|_v ≤ B` and `min_v |α|_v ≤ E`.
pub fn small_at_one_place_count(
    field: &QuadField,
    b: &BigRational,
    e: &BigRational,
) -> Result<u64, LatticeError> {
    let pb = PlaceBounds::uniform(*field, b.clone())?;
    if field.is_imaginary() {
        let pe = PlaceBounds::uniform(*field, e.min(b).clone())?;
        return Ok(enumerate_coords(&pe, DEFAULT_CELL_CAP)?.len() as u64);
    }
    if e >= b {
        return Ok(enumerate_coords(&pb, DEFAULT_CELL_CAP)?.len() as u64);
    }
    // Inclusion–exclusion over which place is small.
    let one = PlaceBounds::new(*field, vec![e.clone(), b.clone()])?;
    let two = PlaceBounds::new(*field, vec![b.clone(), e.clone()])?;
    let both = PlaceBounds::uniform(*field, e.clone())?;
    let n1 = enumerate_coords(&one, DEFAULT_CELL_CAP)?.len() as u64;
    let n2 = enumerate_coords(&two, DEFAULT_CELL_CAP)?.len() as u64;
    let n12 = enumerate_coords(&both, DEFAULT_CELL_CAP)?.len() as u64;
    Ok(n1 + n2 - n12)
}

pub fn small_at_one_place_report(
    field: &QuadField,
    b: &BigRational,
    e: &BigRational,
    c: f64,
) -> Result<SmallAtOnePlaceReport, LatticeError> {
    let count = small_at_one_place_count(field, b, e)?;
    let l = 2;
    let env = Interval::point(c)
        .mul(Interval::from_rational(e))
        .mul(Interval::from_rational(&num_traits::pow(b.clone(), l - 1)));
    Ok(SmallAtOnePlaceReport {
        count,
        envelope: env.lo,
        within: (count as f64) <= env.lo,
    })
}
