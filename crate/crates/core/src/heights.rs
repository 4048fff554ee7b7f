//! Multiplicative Weil heights and the discriminant-bound calculus built
//! on them.
//!
//! Heights of rationals, projective heights of coefficient vectors and the
//! bound formulas are exact rationals. Heights of algebraic numbers are
//! certified intervals obtained from the Mahler measure of the minimal
//! polynomial by interval Graeffe iteration.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::IntPoly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HeightError {
    #[error("projective point with all coordinates zero")]
    AllZero,
    #[error("polynomial {0} is not primitive")]
    NotPrimitive(String),
    #[error("polynomial must have degree at least 1")]
    Constant,
    #[error("degree {0} is below the supported range")]
    DegreeTooSmall(usize),
    #[error("discriminant is zero")]
    ZeroDiscriminant,
    #[error("root-modulus refinement did not converge in {0} iterations")]
    NoConvergence(u32),
}

/// Positive rational interval enclosing a height.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeightValue {
    #[serde(with = "crate::serde_big::rational")]
    lower: BigRational,
    #[serde(with = "crate::serde_big::rational")]
    upper: BigRational,
}

impl HeightValue {
    pub fn exact(q: BigRational) -> Self {
        Self {
            lower: q.clone(),
            upper: q,
        }
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Self::exact(BigRational::from_integer(n.into()))
    }

    pub fn interval(lower: BigRational, upper: BigRational) -> Self {
        assert!(lower <= upper, "empty height interval");
        Self { lower, upper }
    }

    pub fn lower(&self) -> &BigRational {
        &self.lower
    }

    pub fn upper(&self) -> &BigRational {
        &self.upper
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    /// The exact value, when the interval is a point.
    pub fn value(&self) -> Option<&BigRational> {
        self.is_exact().then_some(&self.lower)
    }

    pub fn contains(&self, q: &BigRational) -> bool {
        &self.lower <= q && q <= &self.upper
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self {
            lower: &self.lower * &o.lower,
            upper: &self.upper * &o.upper,
        }
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Self {
            lower: &self.lower * k,
            upper: &self.upper * k,
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        Self {
            lower: num_traits::pow(self.lower.clone(), e as usize),
            upper: num_traits::pow(self.upper.clone(), e as usize),
        }
    }

    /// `(upper − lower) / lower`.
    pub fn relative_width(&self) -> BigRational {
        (&self.upper - &self.lower) / &self.lower
    }

    pub fn midpoint_f64(&self) -> f64 {
        let mid = (&self.lower + &self.upper) / BigRational::from_integer(2.into());
        rational_to_f64(&mid)
    }
}

pub(crate) fn rational_to_f64(q: &BigRational) -> f64 {
    // Scale to keep both parts inside f64 range.
    let nb = q.numer().bits() as i64;
    let db = q.denom().bits() as i64;
    let shift = nb - db - 60;
    let scaled = if shift > 0 {
        q.numer() / (q.denom() << shift as usize)
    } else {
        (q.numer() << (-shift) as usize) / q.denom()
    };
    scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32)
}

/// `H(p/s) = max(|p|, |s|)` in lowest terms.
pub fn rational_height(q: &BigRational) -> HeightValue {
    HeightValue::from_int(q.numer().abs().max(q.denom().abs()))
}

/// Projective height of a rational vector: clear denominators, divide by
/// the content, take the largest absolute value.
pub fn projective_height(v: &[BigRational]) -> Result<HeightValue, HeightError> {
    if v.iter().all(Zero::is_zero) {
        return Err(HeightError::AllZero);
    }
    let lcm = v.iter().fold(BigInt::one(), |l, q| l.lcm(q.denom()));
    let ints: Vec<BigInt> = v
        .iter()
        .map(|q| q.numer() * (&lcm / q.denom()))
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    let max = ints.iter().map(|x| x.abs() / &g).max().unwrap();
    Ok(HeightValue::from_int(max))
}

/// Projective height of an integer coefficient vector.
pub fn poly_height(f: &IntPoly) -> Result<HeightValue, HeightError> {
    let v: Vec<BigRational> = f
        .coeffs()
        .iter()
        .map(|c| BigRational::from_integer(c.clone()))
        .collect();
    projective_height(&v)
}

#[derive(Debug, Clone)]
pub struct HeightOptions {
    /// Target relative width of the returned interval.
    pub tolerance: BigRational,
    pub max_iterations: u32,
}

impl Default for HeightOptions {
    fn default() -> Self {
        Self {
            tolerance: BigRational::new(1.into(), BigInt::from(10u64).pow(10)),
            max_iterations: 200,
        }
    }
}

/// Height of a root of the primitive irreducible polynomial `f`.
pub fn algebraic_height(f: &IntPoly) -> Result<HeightValue, HeightError> {
    algebraic_height_with(f, &HeightOptions::default())
}

pub fn algebraic_height_with(f: &IntPoly, opts: &HeightOptions) -> Result<HeightValue, HeightError> {
    if f.degree() == 0 {
        return Err(HeightError::Constant);
    }
    if !f.is_primitive() {
        return Err(HeightError::NotPrimitive(f.to_string()));
    }
    if f.degree() == 1 {
        let q = BigRational::new(-f.coeff(0), f.coeff(1));
        return Ok(rational_height(&q));
    }
    let m = mahler_measure(f, opts)?;
    let d = f.degree() as u32;
    Ok(m.root(d, grid_bits(&opts.tolerance)))
}

/// Nonnegative dyadic number `m · 2^e`.
#[derive(Debug, Clone)]
struct Dyadic {
    m: BigInt,
    e: BigInt,
}

impl Dyadic {
    fn new(m: BigInt, e: BigInt) -> Self {
        debug_assert!(!m.is_negative());
        Self { m, e }
    }

    /// Rounded-outward `n`-th root keeping about `prec` bits.
    fn nth_root(&self, n: u32, up: bool, prec: u64) -> Self {
        if self.m.is_zero() {
            return self.clone();
        }
        let nb = BigInt::from(n);
        let bits = self.m.bits();
        let want = n as u64 * prec;
        let t = BigInt::from(want.saturating_sub(bits));
        let shift = &t + (&self.e - &t).mod_floor(&nb);
        let s = shift.to_usize().expect("shift fits");
        let mm = &self.m << s;
        let mut r = mm.nth_root(n);
        if up && num_traits::pow(r.clone(), n as usize) != mm {
            r += 1;
        }
        Self::new(r, (&self.e - &shift) / nb)
    }

    /// Quotient by a positive integer, rounded outward.
    fn div_int(&self, k: &BigInt, up: bool, prec: usize) -> Self {
        let num = &self.m << prec;
        let q = if up {
            Integer::div_ceil(&num, k)
        } else {
            Integer::div_floor(&num, k)
        };
        Self::new(q, &self.e - BigInt::from(prec))
    }

    fn to_rational(&self) -> BigRational {
        let e = self.e.to_i64().expect("exponent fits after root extraction");
        if e >= 0 {
            BigRational::from_integer(&self.m << e as usize)
        } else {
            BigRational::new(self.m.clone(), BigInt::one() << (-e) as usize)
        }
    }

    fn from_rational(q: &BigRational, up: bool, prec: usize) -> Self {
        let num = q.numer().abs() << prec;
        let d = q.denom().abs();
        let m = if up {
            Integer::div_ceil(&num, &d)
        } else {
            Integer::div_floor(&num, &d)
        };
        Self::new(m, -BigInt::from(prec))
    }
}

/// Enclosure `[lower, upper]` of a positive real kept as dyadics, used
/// while root extraction is still pending.
#[derive(Debug, Clone)]
struct DyadicBounds {
    lo: Dyadic,
    hi: Dyadic,
    prec: u64,
}

impl DyadicBounds {
    fn root_pow2(mut self, k: u32) -> Self {
        for _ in 0..k {
            self.lo = self.lo.nth_root(2, false, self.prec);
            self.hi = self.hi.nth_root(2, true, self.prec);
        }
        self
    }
}

/// `q^{1/n}` rounded outward to the grid `2^{−bits}`.
fn grid_root(q: &BigRational, n: u32, bits: u64, up: bool) -> BigRational {
    let num = q.numer() << (n as u64 * bits) as usize;
    let x = if up {
        Integer::div_ceil(&num, q.denom())
    } else {
        Integer::div_floor(&num, q.denom())
    };
    let mut r = x.nth_root(n);
    if up && num_traits::pow(r.clone(), n as usize) < x {
        r += 1;
    }
    BigRational::new(r, BigInt::one() << bits as usize)
}

impl HeightValue {
    /// Outward `n`-th root on a fixed dyadic grid; finer grids for larger
    /// `bits` are nested, so a larger `bits` never widens the enclosure.
    fn root(&self, n: u32, bits: u64) -> Self {
        if n == 1 {
            return self.clone();
        }
        let lo = grid_root(&self.lower, n, bits, false);
        let hi = grid_root(&self.upper, n, bits, true);
        Self::interval(lo, hi)
    }
}

/// Grid bits for a relative tolerance `tol` on values `≥ 1`.
fn grid_bits(tol: &BigRational) -> u64 {
    let inv = tol.recip().ceil().to_integer();
    64 + inv.bits()
}

fn binomial(n: usize, k: usize) -> BigInt {
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Interval coefficient vector with a common binary exponent.
struct IntervalPoly {
    lo: Vec<BigInt>,
    hi: Vec<BigInt>,
    exp: BigInt,
}

fn interval_mul(a: (&BigInt, &BigInt), b: (&BigInt, &BigInt)) -> (BigInt, BigInt) {
    let p = [a.0 * b.0, a.0 * b.1, a.1 * b.0, a.1 * b.1];
    let lo = p.iter().min().unwrap().clone();
    let hi = p.iter().max().unwrap().clone();
    (lo, hi)
}

fn interval_sq(lo: &BigInt, hi: &BigInt) -> (BigInt, BigInt) {
    if !lo.is_negative() {
        (lo * lo, hi * hi)
    } else if !hi.is_positive() {
        (hi * hi, lo * lo)
    } else {
        let m = lo.abs().max(hi.abs());
        (BigInt::zero(), &m * &m)
    }
}

impl IntervalPoly {
    fn exact(f: &IntPoly) -> Self {
        Self {
            lo: f.coeffs().to_vec(),
            hi: f.coeffs().to_vec(),
            exp: BigInt::zero(),
        }
    }

    /// One Graeffe step `g(X²) = (−1)^d f(X) f(−X)`, then rounding back to
    /// `prec` bits.
    fn graeffe(&self, prec: u64) -> Self {
        let d = self.lo.len() - 1;
        let mut lo = vec![BigInt::zero(); d + 1];
        let mut hi = vec![BigInt::zero(); d + 1];
        for k in 0..=d {
            for i in 0..=d {
                let j = 2 * k as isize - i as isize;
                if j < 0 || j as usize > d || (j as usize) < i {
                    continue;
                }
                let j = j as usize;
                let (mut pl, mut ph) = if i == j {
                    interval_sq(&self.lo[i], &self.hi[i])
                } else {
                    let (a, b) =
                        interval_mul((&self.lo[i], &self.hi[i]), (&self.lo[j], &self.hi[j]));
                    (a * 2, b * 2)
                };
                if (d + j) % 2 == 1 {
                    (pl, ph) = (-ph, -pl);
                }
                lo[k] += pl;
                hi[k] += ph;
            }
        }
        let bits = lo.iter().chain(hi.iter()).map(|x| x.bits()).max().unwrap_or(0);
        let mut exp = &self.exp * 2;
        if bits > prec {
            let s = bits - prec;
            let div = BigInt::one() << s as usize;
            for x in lo.iter_mut() {
                *x = Integer::div_floor(&*x, &div);
            }
            for x in hi.iter_mut() {
                *x = Integer::div_ceil(&*x, &div);
            }
            exp += BigInt::from(s);
        }
        Self { lo, hi, exp }
    }

    /// Bounds on the Mahler measure of the represented polynomial: the
    /// coefficient bound `|a_j| ≤ C(d, j) M` below and Landau's inequality
    /// `M ≤ ‖f‖₂` above.
    fn mahler_bounds(&self) -> (Dyadic, Dyadic) {
        let d = self.lo.len() - 1;
        let mut best_lo = Dyadic::new(BigInt::zero(), self.exp.clone());
        let mut sum_sq = BigInt::zero();
        for j in 0..=d {
            let (l, h) = (&self.lo[j], &self.hi[j]);
            let absmax = l.abs().max(h.abs());
            sum_sq += &absmax * &absmax;
            let absmin = if l.sign() != h.sign() || l.is_zero() || h.is_zero() {
                BigInt::zero()
            } else {
                l.abs().min(h.abs())
            };
            let cand = Dyadic::new(absmin, self.exp.clone()).div_int(&binomial(d, j), false, 64);
            if cand.m > best_lo.m || best_lo.m.is_zero() {
                best_lo = cand;
            }
        }
        if best_lo.m.is_zero() {
            best_lo.e = &self.exp - 64;
        }
        let up = Dyadic::new(sum_sq, &self.exp * 2).nth_root(2, true, 64 + self.lo.len() as u64);
        (best_lo, up)
    }
}

/// Certified enclosure of `M(f) = |lead| ∏ max(1, |r_i|)`.
pub fn mahler_measure(f: &IntPoly, opts: &HeightOptions) -> Result<HeightValue, HeightError> {
    let d = f.degree();
    if d == 0 {
        return Err(HeightError::Constant);
    }
    // Worst-case relative error growth per Graeffe step, in bits.
    let growth = (2.0 * ((d + 1) as f64).powf(1.5) * binomial(d, d / 2).to_f64().unwrap().powi(2))
        .log2()
        .ceil() as u64;
    let prec = 128 + 48 * growth + f.max_abs_coeff().bits();
    let root_prec = prec + 64;
    let lead = f.lead().abs();
    let a0 = f.coeff(0).abs();
    // M(f) ≥ max(|lead|, |a_0|) holds before any iteration.
    let mut best_lo = BigRational::from_integer(lead.max(a0));
    let mut best_hi: Option<BigRational> = None;
    let mut poly = IntervalPoly::exact(f);
    for k in 0..=opts.max_iterations {
        if k > 0 {
            poly = poly.graeffe(prec);
        }
        let (lo, hi) = poly.mahler_bounds();
        let b = DyadicBounds {
            lo,
            hi,
            prec: root_prec,
        }
        .root_pow2(k);
        if !b.lo.m.is_zero() {
            let lo = b.lo.to_rational();
            if lo > best_lo {
                best_lo = lo;
            }
        }
        let hi = b.hi.to_rational();
        if best_hi.as_ref().map_or(true, |h| &hi < h) {
            best_hi = Some(hi);
        }
        let hi = best_hi.as_ref().unwrap();
        debug_assert!(hi >= &best_lo, "inconsistent Mahler enclosure");
        if (hi - &best_lo) <= &opts.tolerance * &best_lo {
            return Ok(HeightValue::interval(best_lo, hi.clone()));
        }
    }
    Err(HeightError::NoConvergence(opts.max_iterations))
}

/// Exact Graeffe step on an integer polynomial.
fn graeffe_exact(f: &IntPoly) -> IntPoly {
    let d = f.degree();
    let neg = IntPoly::new(
        f.coeffs()
            .iter()
            .enumerate()
            .map(|(j, c)| if j % 2 == 1 { -c } else { c.clone() })
            .collect(),
    );
    let prod = f.mul(&neg);
    let sign = if d % 2 == 1 { -BigInt::one() } else { BigInt::one() };
    IntPoly::new(
        prod.coeffs()
            .iter()
            .step_by(2)
            .map(|c| c * &sign)
            .collect(),
    )
}

/// Certified bounds on the largest root modulus of `f`, sharpened by
/// `steps` exact Graeffe iterations.
pub fn root_modulus_bounds(f: &IntPoly, steps: u32) -> Result<(BigRational, BigRational), HeightError> {
    let d = f.degree();
    if d == 0 {
        return Err(HeightError::Constant);
    }
    let mut g = f.clone();
    for _ in 0..steps {
        g = graeffe_exact(&g);
    }
    let lead = g.lead().abs();
    // Fractional bits: 128 beyond the smallest magnitude that can occur.
    let gap = (0..d)
        .map(|i| g.coeff(i).abs())
        .filter(|c| !c.is_zero())
        .map(|c| lead.bits().saturating_sub(c.bits()))
        .max()
        .unwrap_or(0);
    let prec = 128 + gap + d as u64;
    let mut lo = BigRational::zero();
    let mut hi = BigRational::zero();
    for j in 1..=d {
        let c = g.coeff(d - j).abs();
        if c.is_zero() {
            continue;
        }
        let r_lo = BigRational::new(c.clone(), &lead * binomial(d, j));
        let r_hi = BigRational::new(c, lead.clone());
        let l = Dyadic::from_rational(&r_lo, false, prec as usize * j)
            .nth_root(j as u32, false, prec);
        let h = Dyadic::from_rational(&r_hi, true, prec as usize * j).nth_root(j as u32, true, prec);
        let (l, h) = (l.to_rational(), h.to_rational() * BigRational::from_integer(2.into()));
        if l > lo {
            lo = l;
        }
        if h > hi {
            hi = h;
        }
    }
    if hi.is_zero() {
        // Only the root 0.
        return Ok((BigRational::zero(), BigRational::zero()));
    }
    let b = DyadicBounds {
        lo: Dyadic::from_rational(&lo, false, prec as usize),
        hi: Dyadic::from_rational(&hi, true, prec as usize),
        prec,
    }
    .root_pow2(steps);
    Ok((b.lo.to_rational(), b.hi.to_rational()))
}

/// `(m + 1) · H_F · H_α^m`.
pub fn fiber_height_bound(h_f: &HeightValue, m: u32, h_alpha: &HeightValue) -> HeightValue {
    h_f.mul(&h_alpha.pow(m))
        .scale(&BigRational::from_integer(BigInt::from(m + 1)))
}

/// `d^{3d} · H^{2(d−1)}`.
pub fn discriminant_bound(d: usize, h_pf: &HeightValue) -> Result<HeightValue, HeightError> {
    if d < 2 {
        return Err(HeightError::DegreeTooSmall(d));
    }
    let c = BigInt::from(d).pow(3 * d as u32);
    Ok(h_pf
        .pow(2 * (d as u32 - 1))
        .scale(&BigRational::from_integer(c)))
}

/// `|Δ|^{1/ℓ}`, exact when `|Δ|` is a perfect `ℓ`-th power.
pub fn relative_disc_norm(delta: &BigInt, l: u32) -> Result<HeightValue, HeightError> {
    if delta.is_zero() {
        return Err(HeightError::ZeroDiscriminant);
    }
    assert!(l >= 1, "degree must be positive");
    let a = delta.abs();
    let r = a.nth_root(l);
    if num_traits::pow(r.clone(), l as usize) == a {
        return Ok(HeightValue::from_int(r));
    }
    Ok(HeightValue::exact(BigRational::from_integer(a)).root(l, grid_bits(&HeightOptions::default().tolerance)))
}
