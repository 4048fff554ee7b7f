//! Dense univariate polynomials over Z, with the handful of exact
//! algorithms the rest of the crate leans on: discriminants, Sturm
//! sequences, Taylor shifts, and arithmetic over `F_p` and `Z/p^k`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Integer polynomial, constant term first, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntPoly {
    #[serde(with = "crate::serde_big::vec")]
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    /// `X − r`
    pub fn linear_root(r: BigInt) -> Self {
        Self::new(vec![-r, BigInt::one()])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn lead(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn content(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    pub fn is_primitive(&self) -> bool {
        self.content().is_one()
    }

    /// Primitive part with positive leading coefficient.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.lead().is_negative() {
            g = -g;
        }
        Self::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| {
            acc * x + BigRational::from_integer(c.clone())
        })
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * i)
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::constant(BigInt::one()), |acc, _| acc.mul(self))
    }

    /// `X^deg · f(1/X)`.
    pub fn reverse(&self) -> Self {
        let mut c = self.coeffs.clone();
        c.reverse();
        Self::new(c)
    }

    /// `f(X + s)`.
    pub fn shift(&self, s: &BigInt) -> Self {
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let t = &c[j + 1] * s;
                c[j] += t;
            }
        }
        Self::new(c)
    }

    /// `f(s·X)`.
    pub fn scale_var(&self, s: &BigInt) -> Self {
        let mut pw = BigInt::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            out.push(c * &pw);
            pw *= s;
        }
        Self::new(out)
    }

    /// `coeff · X^deg`.
    pub fn monomial(coeff: BigInt, deg: usize) -> Self {
        let mut c = vec![BigInt::zero(); deg + 1];
        c[deg] = coeff;
        Self::new(c)
    }

    /// Exact division by a divisor known to divide.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let (q, r) = self.pseudo_divrem(d);
        if !r.is_zero() {
            return None;
        }
        // lead(d)^k · f = q·d; undo the scaling.
        let k = (self.degree() + 1).saturating_sub(d.degree());
        let scale = num_traits::pow(d.lead(), k);
        let coeffs: Option<Vec<BigInt>> = q
            .coeffs
            .iter()
            .map(|c| {
                let (qq, rr) = c.div_rem(&scale);
                rr.is_zero().then_some(qq)
            })
            .collect();
        coeffs.map(Self::new)
    }

    /// Pseudo-division: `lead(d)^(deg f − deg d + 1) · f = q·d + r`.
    pub fn pseudo_divrem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.degree() < d.degree() || self.is_zero() {
            let k = (self.degree() + 1).saturating_sub(d.degree());
            let s = num_traits::pow(d.lead(), k);
            return (Self::zero(), self.scale(&s));
        }
        let lc = d.lead();
        let dd = d.degree();
        let mut r = self.coeffs.clone();
        let steps = self.degree() - dd + 1;
        let mut q = vec![BigInt::zero(); steps];
        for step in (0..steps).rev() {
            let top = r[step + dd].clone();
            for c in q.iter_mut() {
                *c *= &lc;
            }
            q[step] = top.clone();
            for c in r.iter_mut() {
                *c *= &lc;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[step + j] -= &top * dc;
            }
        }
        (Self::new(q), Self::new(r))
    }

    /// Resultant via the Sylvester matrix (fraction-free Bareiss elimination).
    pub fn resultant(&self, other: &Self) -> BigInt {
        let m = self.degree();
        let n = other.degree();
        if self.is_zero() || other.is_zero() {
            return BigInt::zero();
        }
        let size = m + n;
        if size == 0 {
            return BigInt::one();
        }
        let mut mat = vec![vec![BigInt::zero(); size]; size];
        for i in 0..n {
            for (j, c) in self.coeffs.iter().rev().enumerate() {
                mat[i][i + j] = c.clone();
            }
        }
        for i in 0..m {
            for (j, c) in other.coeffs.iter().rev().enumerate() {
                mat[n + i][i + j] = c.clone();
            }
        }
        bareiss_det(mat)
    }

    /// `(−1)^{n(n−1)/2} · Res(f, f') / lead(f)`.
    pub fn discriminant(&self) -> BigInt {
        let n = self.degree();
        if n == 0 {
            return BigInt::zero();
        }
        if n == 1 {
            return BigInt::one();
        }
        if n == 2 {
            let (c, b, a) = (&self.coeffs[0], &self.coeffs[1], &self.coeffs[2]);
            return b * b - a * c * 4;
        }
        let r = self.resultant(&self.derivative());
        let d = r / self.lead();
        if (n * (n - 1) / 2) % 2 == 1 {
            -d
        } else {
            d
        }
    }

    pub fn is_squarefree(&self) -> bool {
        !self.discriminant().is_zero()
    }

    /// Number of distinct real roots, by a Sturm sequence on the
    /// squarefree part.
    pub fn count_real_roots(&self) -> usize {
        if self.degree() == 0 {
            return 0;
        }
        let seq = sturm_sequence(self);
        let at = |positive: bool| -> usize {
            let signs: Vec<i32> = seq
                .iter()
                .map(|p| {
                    let lc = p.lead();
                    let s = if lc.is_positive() { 1 } else { -1 };
                    if positive || p.degree() % 2 == 0 {
                        s
                    } else {
                        -s
                    }
                })
                .collect();
            signs.windows(2).filter(|w| w[0] != w[1]).count()
        };
        at(false) - at(true)
    }

    pub fn max_abs_coeff(&self) -> BigInt {
        self.coeffs
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_default()
    }

    /// `f mod p` as a polynomial over `F_p`.
    pub fn to_fp(&self, p: u64) -> FpPoly {
        let pb = BigInt::from(p);
        FpPoly::new(
            p,
            self.coeffs
                .iter()
                .map(|c| c.mod_floor(&pb).to_u64().unwrap())
                .collect(),
        )
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match (i, a.is_one()) {
                (0, _) => write!(f, "{a}")?,
                (1, true) => write!(f, "X")?,
                (1, false) => write!(f, "{a}X")?,
                (_, true) => write!(f, "X^{i}")?,
                (_, false) => write!(f, "{a}X^{i}")?,
            }
        }
        Ok(())
    }
}

fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Sturm sequence `f, f', −rem(…)` with primitive-part normalization that
/// preserves signs.
fn sturm_sequence(f: &IntPoly) -> Vec<IntPoly> {
    let mut seq = vec![f.clone(), f.derivative()];
    while !seq.last().unwrap().is_zero() && seq.last().unwrap().degree() > 0 {
        let n = seq.len();
        let (_, r) = seq[n - 2].pseudo_divrem(&seq[n - 1]);
        if r.is_zero() {
            break;
        }
        // Pseudo-division scales by lead^k; correct the sign when lead < 0
        // and k is odd.
        let k = seq[n - 2].degree() - seq[n - 1].degree() + 1;
        let neg_scale = seq[n - 1].lead().is_negative() && k % 2 == 1;
        let mut next = r.scale(&BigInt::from(if neg_scale { 1 } else { -1 }));
        let g = next.content();
        next = IntPoly::new(next.coeffs.iter().map(|c| c / &g).collect());
        seq.push(next);
    }
    seq.retain(|p| !p.is_zero());
    seq
}

/// Polynomial over `F_p`, `p < 2^32`, constant term first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpPoly {
    pub p: u64,
    pub coeffs: Vec<u64>,
}

fn fp_inv(a: u64, p: u64) -> u64 {
    let mut r = 1u64;
    let mut b = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

impl FpPoly {
    pub fn new(p: u64, mut coeffs: Vec<u64>) -> Self {
        assert!(p < 1 << 32, "F_p arithmetic needs p < 2^32");
        for c in coeffs.iter_mut() {
            *c %= p;
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Self { p, coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn lead(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn x(p: u64) -> Self {
        Self::new(p, vec![0, 1])
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = fp_inv(self.lead(), self.p);
        Self::new(self.p, self.coeffs.iter().map(|c| c * inv % self.p).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let p = self.p;
        Self::new(
            p,
            (0..n)
                .map(|i| {
                    let a = self.coeffs.get(i).copied().unwrap_or(0);
                    let b = o.coeffs.get(i).copied().unwrap_or(0);
                    (a + p - b) % p
                })
                .collect(),
        )
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::new(self.p, vec![]);
        }
        let p = self.p;
        let mut out = vec![0u64; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + a * b) % p;
            }
        }
        Self::new(p, out)
    }

    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let p = self.p;
        let mut r = self.coeffs.clone();
        if r.len() < d.coeffs.len() {
            return (Self::new(p, vec![]), self.clone());
        }
        let inv = fp_inv(d.lead(), p);
        let dd = d.degree();
        let mut q = vec![0u64; r.len() - dd];
        for i in (0..q.len()).rev() {
            let t = r[i + dd] * inv % p;
            q[i] = t;
            for (j, c) in d.coeffs.iter().enumerate() {
                r[i + j] = (r[i + j] + p - t * c % p) % p;
            }
        }
        (Self::new(p, q), Self::new(p, r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.divrem(d).1
    }

    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `(g, s, t)` with `s·self + t·o = g` monic.
    pub fn ext_gcd(&self, o: &Self) -> (Self, Self, Self) {
        let p = self.p;
        let zero = Self::new(p, vec![]);
        let one = Self::new(p, vec![1]);
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (one.clone(), zero.clone());
        let (mut t0, mut t1) = (zero, one);
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = s0.sub(&q.mul(&s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = t0.sub(&q.mul(&t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        let inv = fp_inv(r0.lead(), p);
        let k = Self::new(p, vec![inv]);
        (r0.mul(&k), s0.mul(&k), t0.mul(&k))
    }

    pub fn derivative(&self) -> Self {
        let p = self.p;
        Self::new(
            p,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| (i as u64 % p) * c % p)
                .collect(),
        )
    }

    pub fn powmod(&self, mut e: u128, m: &Self) -> Self {
        let mut base = self.rem(m);
        let mut acc = Self::new(self.p, vec![1]).rem(m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            e >>= 1;
        }
        acc
    }

    pub fn is_squarefree(&self) -> bool {
        if self.degree() == 0 {
            return true;
        }
        self.gcd(&self.derivative()).degree() == 0
    }

    /// Degrees of the irreducible factors of a squarefree polynomial
    /// (distinct-degree factorization), with the product of each degree
    /// class.
    pub fn distinct_degree(&self) -> Vec<(usize, Self)> {
        let p = self.p;
        let mut out = Vec::new();
        let mut f = self.monic();
        let x = Self::x(p);
        let mut xp = x.clone();
        let mut d = 0;
        while f.degree() > 0 {
            d += 1;
            if 2 * d > f.degree() {
                out.push((f.degree(), f.clone()));
                break;
            }
            xp = xp.powmod(p as u128, &f);
            let g = f.gcd(&xp.sub(&x));
            if g.degree() > 0 {
                f = f.divrem(&g).0.monic();
                xp = xp.rem(&f);
                out.push((d, g));
            }
        }
        out
    }

    /// Irreducible factor degrees, sorted.
    pub fn factor_degrees(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (d, g) in self.distinct_degree() {
            for _ in 0..g.degree() / d {
                out.push(d);
            }
        }
        out.sort_unstable();
        out
    }

    /// Roots in `F_p` with multiplicity, by exhaustive evaluation.
    pub fn roots_with_multiplicity(&self) -> Vec<(u64, usize)> {
        let p = self.p;
        let mut out = Vec::new();
        for r in 0..p {
            let lin = Self::new(p, vec![(p - r) % p, 1]);
            let mut g = self.clone();
            let mut k = 0;
            while !g.is_zero() && g.rem(&lin).is_zero() {
                g = g.divrem(&lin).0;
                k += 1;
            }
            if k > 0 {
                out.push((r, k));
            }
        }
        out
    }

    fn to_int(&self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }
}

/// Reduces coefficients into `[0, m)`.
fn reduce_mod(f: &IntPoly, m: &BigInt) -> IntPoly {
    IntPoly::new(f.coeffs().iter().map(|c| c.mod_floor(m)).collect())
}

/// Division by a monic polynomial over `Z/m`.
pub fn divrem_monic_mod(f: &IntPoly, d: &IntPoly, m: &BigInt) -> (IntPoly, IntPoly) {
    debug_assert!(d.lead().is_one());
    let mut r: Vec<BigInt> = f.coeffs().to_vec();
    let dd = d.degree();
    if r.len() <= dd {
        return (IntPoly::zero(), reduce_mod(f, m));
    }
    let mut q = vec![BigInt::zero(); r.len() - dd];
    for i in (0..q.len()).rev() {
        let t = r[i + dd].mod_floor(m);
        for (j, c) in d.coeffs().iter().enumerate() {
            r[i + j] = (&r[i + j] - &t * c).mod_floor(m);
        }
        q[i] = t;
    }
    (IntPoly::new(q), reduce_mod(&IntPoly::new(r), m))
}

/// Lifts `f ≡ lc · g · h (mod p)` (g, h monic, coprime mod p, lc a unit)
/// to a factorization modulo `p^k`, returning monic `(G, H)` with
/// `f ≡ lc·G·H (mod p^k)`.
pub fn hensel_lift_pair(
    f: &IntPoly,
    g: &FpPoly,
    h: &FpPoly,
    p: u64,
    k: u32,
) -> Option<(IntPoly, IntPoly)> {
    let (one, s, t) = g.ext_gcd(h);
    if one.degree() != 0 {
        return None;
    }
    let pb = BigInt::from(p);
    let modulus = num_traits::pow(pb.clone(), k as usize);
    let lc = f.lead();
    let lc_inv = crate::arith::inv_mod(&lc, &modulus)?;
    // Work with the monic associate.
    let fm = reduce_mod(&f.scale(&lc_inv), &modulus);
    let (mut gg, mut hh) = (g.to_int(), h.to_int());
    let (s, t) = (s.to_int(), t.to_int());
    let mut pk = pb.clone();
    for _ in 1..k {
        // e = (f − g·h)/p^j mod p
        let e = fm.sub(&gg.mul(&hh));
        let e = IntPoly::new(e.coeffs().iter().map(|c| c / &pk).collect());
        let e = e.to_fp(p);
        // Solve σ·g + τ·h ≡ e with deg σ < deg h, deg τ < deg g.
        let hp = h.clone();
        let (q, sigma) = s.to_fp(p).mul(&e).divrem(&hp);
        let tau = t.to_fp(p).mul(&e).add_fp(&q.mul(g));
        hh = hh.add(&sigma.to_int().scale(&pk));
        gg = gg.add(&tau.to_int().scale(&pk));
        pk *= &pb;
    }
    let gg = reduce_mod(&gg, &modulus);
    let hh = reduce_mod(&hh, &modulus);
    reduce_mod(&fm.sub(&gg.mul(&hh)), &modulus)
        .is_zero()
        .then_some((gg, hh))
}

impl FpPoly {
    fn add_fp(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let p = self.p;
        Self::new(
            p,
            (0..n)
                .map(|i| {
                    self.coeffs.get(i).copied().unwrap_or(0) + o.coeffs.get(i).copied().unwrap_or(0)
                })
                .collect(),
        )
    }
}

/// Lifts a factorization of `f mod p` into pairwise coprime monic pieces
/// to `Z/p^k`, by recursive splitting. Returns the lifted pieces.
pub fn hensel_lift(f: &IntPoly, pieces: &[FpPoly], p: u64, k: u32) -> Option<Vec<IntPoly>> {
    match pieces.len() {
        0 => None,
        1 => {
            let modulus = num_traits::pow(BigInt::from(p), k as usize);
            let lc_inv = crate::arith::inv_mod(&f.lead(), &modulus)?;
            Some(vec![reduce_mod(&f.scale(&lc_inv), &modulus)])
        }
        _ => {
            let mid = pieces.len() / 2;
            let left = pieces[..mid]
                .iter()
                .fold(FpPoly::new(p, vec![1]), |a, b| a.mul(b));
            let right = pieces[mid..]
                .iter()
                .fold(FpPoly::new(p, vec![1]), |a, b| a.mul(b));
            let (gl, gr) = hensel_lift_pair(f, &left, &right, p, k)?;
            let mut out = hensel_lift(&gl, &pieces[..mid], p, k)?;
            out.extend(hensel_lift(&gr, &pieces[mid..], p, k)?);
            Some(out)
        }
    }
}

/// Checks `f ≡ lead(f) · ∏ pieces (mod p^k)`.
pub fn verify_lift(f: &IntPoly, pieces: &[IntPoly], p: u64, k: u32) -> bool {
    let modulus = num_traits::pow(BigInt::from(p), k as usize);
    let prod = pieces
        .iter()
        .fold(IntPoly::constant(f.lead()), |a, b| a.mul(b));
    reduce_mod(&f.sub(&prod), &modulus).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64(c)
    }

    #[test]
    fn discriminants() {
        assert_eq!(p(&[8, -1, 1]).discriminant(), BigInt::from(-31));
        assert_eq!(p(&[-1, -1, 1]).discriminant(), BigInt::from(5));
        // X³ − 2: −27·4
        assert_eq!(p(&[-2, 0, 0, 1]).discriminant(), BigInt::from(-108));
        // X³ − X: 4
        assert_eq!(p(&[0, -1, 0, 1]).discriminant(), BigInt::from(4));
        // 2X³ + X + 1: −4·2·1 − 27·4·1 = −116
        assert_eq!(p(&[1, 1, 0, 2]).discriminant(), BigInt::from(-116));
        assert_eq!(p(&[1, 2, 1]).discriminant(), BigInt::zero());
    }

    #[test]
    fn discriminant_matches_root_product() {
        // ∏(r_i − r_j)² for roots 1, 2, −3, 5
        let f = [1i64, 2, -3, 5]
            .iter()
            .fold(p(&[1]), |acc, &r| acc.mul(&IntPoly::linear_root(BigInt::from(r))));
        let roots = [1i64, 2, -3, 5];
        let mut d = 1i64;
        for i in 0..4 {
            for j in i + 1..4 {
                d *= (roots[i] - roots[j]).pow(2);
            }
        }
        assert_eq!(f.discriminant(), BigInt::from(d));
    }

    #[test]
    fn sturm_counts() {
        assert_eq!(p(&[1, 0, 1]).count_real_roots(), 0);
        assert_eq!(p(&[-2, 0, 1]).count_real_roots(), 2);
        assert_eq!(p(&[0, -1, 0, 1]).count_real_roots(), 3);
        assert_eq!(p(&[-2, 0, 0, 1]).count_real_roots(), 1);
        assert_eq!(p(&[8, -1, 1]).count_real_roots(), 0);
        // −X³ + 3X − 1 has three real roots
        assert_eq!(p(&[-1, 3, 0, -1]).count_real_roots(), 3);
        // (X−1)(X−2)(X−3)(X−4) with negative lead
        let f = [1i64, 2, 3, 4]
            .iter()
            .fold(p(&[-1]), |acc, &r| acc.mul(&IntPoly::linear_root(BigInt::from(r))));
        assert_eq!(f.count_real_roots(), 4);
    }

    #[test]
    fn shifts_and_display() {
        let f = p(&[8, -1, 1]);
        let g = f.shift(&BigInt::from(16));
        assert_eq!(g, p(&[248, 31, 1]));
        assert_eq!(format!("{f}"), "X^2 - X + 8");
        assert_eq!(f.reverse(), p(&[1, -1, 8]));
        assert_eq!(p(&[0, 2, 4]).primitive_part(), p(&[0, 1, 2]));
        assert_eq!(p(&[0, -2, -4]).primitive_part(), p(&[0, 1, 2]));
    }

    #[test]
    fn fp_factor_degrees() {
        // X² + X + 1 irreducible mod 2
        assert_eq!(p(&[1, 1, 1]).to_fp(2).factor_degrees(), vec![2]);
        // X² − 2 splits mod 7 (3² = 2), X² − 3 is irreducible mod 7
        assert_eq!(p(&[-2, 0, 1]).to_fp(7).factor_degrees(), vec![1, 1]);
        assert_eq!(p(&[-3, 0, 1]).to_fp(7).factor_degrees(), vec![2]);
        // (X²+1)(X−1) mod 3
        let f = p(&[1, 0, 1]).mul(&p(&[-1, 1]));
        assert_eq!(f.to_fp(3).factor_degrees(), vec![1, 2]);
        assert!(!p(&[1, 2, 1]).to_fp(5).is_squarefree());
    }

    #[test]
    fn hensel_lifting_reproduces_product() {
        // X² − X + 8 ≡ X(X+1) mod 2
        let f = p(&[8, -1, 1]);
        let pieces = vec![FpPoly::new(2, vec![0, 1]), FpPoly::new(2, vec![1, 1])];
        let lifted = hensel_lift(&f, &pieces, 2, 12).unwrap();
        assert!(verify_lift(&f, &lifted, 2, 12));
        // X³ − 2 mod 5: (X − 3)(X² + 3X + 4)
        let f = p(&[-2, 0, 0, 1]);
        let fp = f.to_fp(5);
        let dd = fp.distinct_degree();
        let pieces: Vec<FpPoly> = dd.into_iter().map(|(_, g)| g).collect();
        assert_eq!(pieces.len(), 2);
        let lifted = hensel_lift(&f, &pieces, 5, 9).unwrap();
        assert!(verify_lift(&f, &lifted, 5, 9));
        // Non-monic with unit leading coefficient.
        let f = p(&[1, 0, 3]);
        let fp = f.to_fp(7);
        let roots = fp.roots_with_multiplicity();
        let pieces: Vec<FpPoly> = roots
            .iter()
            .map(|&(r, _)| FpPoly::new(7, vec![7 - r, 1]))
            .collect();
        let lifted = hensel_lift(&f, &pieces, 7, 6).unwrap();
        assert!(verify_lift(&f, &lifted, 7, 6));
    }
}
