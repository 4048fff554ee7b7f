//! Local analysis at p-adic and archimedean places.
//!
//! p-adic factorization types are certified from Newton polygons and
//! residual polynomials: a segment whose residual polynomial is
//! squarefree over `F_p` yields one irreducible factor per irreducible
//! residual factor. Repeated linear residual factors of integer slope are
//! resolved by translating the variable onto the cluster of roots and
//! recursing. Everything else is reported uncertified.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{self, valuation};
use crate::heights::{rational_to_f64, root_modulus_bounds};
use crate::numberfield::{factor_rational_prime, QuadInt, SplitType};
use crate::poly::{hensel_lift, verify_lift, FpPoly, IntPoly};
use crate::specialize::{fiber_polynomial, CurveFamily};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LocalError {
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("zero element has no local power class")]
    ZeroElement,
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("polynomials of different degree")]
    DegreeMismatch,
}

/// True, false, or not decidable with the information at hand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tri {
    True,
    False,
    Inconclusive,
}

impl Tri {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Tri::True
        } else {
            Tri::False
        }
    }

    /// Conjunction: any `False` wins, then any `Inconclusive`.
    pub fn and(self, o: Tri) -> Tri {
        match (self, o) {
            (Tri::False, _) | (_, Tri::False) => Tri::False,
            (Tri::True, Tri::True) => Tri::True,
            _ => Tri::Inconclusive,
        }
    }

    pub fn is_true(self) -> bool {
        self == Tri::True
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewtonPolygon {
    pub vertices: Vec<(usize, i64)>,
    /// `(slope, horizontal length)`, slopes increasing.
    #[serde(with = "slopes_serde")]
    pub slopes: Vec<(BigRational, usize)>,
}

mod slopes_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[(BigRational, usize)], s: S) -> Result<S::Ok, S::Error> {
        let out: Vec<(String, usize)> = v
            .iter()
            .map(|(q, l)| (arith::format_rational(q), *l))
            .collect();
        out.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<(BigRational, usize)>, D::Error> {
        let v = Vec::<(String, usize)>::deserialize(d)?;
        v.into_iter()
            .map(|(q, l)| {
                arith::parse_rational(&q)
                    .map(|q| (q, l))
                    .map_err(serde::de::Error::custom)
            })
            .collect()
    }
}

fn check_prime(p: u64) -> Result<(), LocalError> {
    if arith::is_prime_u64(p) {
        Ok(())
    } else {
        Err(LocalError::NotPrime(p))
    }
}

/// Lower convex hull of the points, which must be sorted by abscissa.
fn lower_hull(points: &[(usize, i64)]) -> Vec<(usize, i64)> {
    let mut hull: Vec<(usize, i64)> = Vec::new();
    for &pt in points {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            // Drop the middle point unless it lies strictly below the chord.
            let cross = (x2 as i128 - x1 as i128) * (pt.1 as i128 - y1 as i128)
                - (y2 as i128 - y1 as i128) * (pt.0 as i128 - x1 as i128);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    hull
}

fn segments(vertices: &[(usize, i64)]) -> Vec<(BigRational, usize)> {
    vertices
        .windows(2)
        .map(|w| {
            let len = w[1].0 - w[0].0;
            (
                BigRational::new(BigInt::from(w[1].1 - w[0].1), BigInt::from(len)),
                len,
            )
        })
        .collect()
}

/// Newton polygon of `f` at `p`: the lower hull of `(i, v_p(a_i))`.
/// A segment of slope `−λ` and length `n` accounts for `n` roots of
/// valuation `λ`.
pub fn newton_polygon(f: &IntPoly, p: u64) -> Result<NewtonPolygon, LocalError> {
    if f.is_zero() {
        return Err(LocalError::ZeroPolynomial);
    }
    check_prime(p)?;
    let points: Vec<(usize, i64)> = f
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i, valuation(c, p) as i64))
        .collect();
    let vertices = lower_hull(&points);
    let slopes = segments(&vertices);
    Ok(NewtonPolygon { vertices, slopes })
}

/// Multiset of `(e, f)` over the irreducible factors of `f` over `Q_p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PadicFactorType {
    pub p: u64,
    pub precision: u32,
    pub parts: Vec<(u32, u32)>,
    pub certified: bool,
}

impl PadicFactorType {
    pub fn degree(&self) -> u32 {
        self.parts.iter().map(|(e, f)| e * f).sum()
    }

    /// A single part of full degree: `f` is irreducible over `Q_p`.
    pub fn is_irreducible(&self) -> bool {
        self.certified && self.parts.len() == 1
    }
}

#[derive(Clone, Copy)]
enum Lower {
    AtLeastZero,
    Above(i64),
}

impl Lower {
    fn admits(self, lambda: &BigRational) -> bool {
        match self {
            Lower::AtLeastZero => !lambda.is_negative(),
            Lower::Above(l) => lambda > &BigRational::from_integer(l.into()),
        }
    }
}

const MAX_SHIFTS: u32 = 8;
const EXHAUSTIVE_ROOT_LIMIT: u64 = 100_000;

/// Parts contributed by the roots of `g` whose valuation passes `lower`.
/// `g` carries its coefficients reduced mod `p^k`; a zero residue means
/// "valuation at least `k`" and is only tolerated strictly above the hull.
fn analyze(g: &[BigInt], p: u64, k: u32, lower: Lower, depth: u32) -> Option<Vec<(u32, u32)>> {
    let d = g.len() - 1;
    if g[d].is_zero() {
        return None;
    }
    // An unknown constant term enters as the lower bound (0, k); this is
    // only conclusive when it isolates a single root.
    let open_const = g[0].is_zero();
    let known: Vec<(usize, i64)> = g
        .iter()
        .enumerate()
        .filter(|(i, c)| !c.is_zero() || (*i == 0 && open_const))
        .map(|(i, c)| (i, if c.is_zero() { k as i64 } else { valuation(c, p) as i64 }))
        .collect();
    let vertices = lower_hull(&known);
    if open_const && vertices.get(1).map(|v| v.0) != Some(1) {
        return None;
    }
    // Unknown coefficients must sit strictly above the hull.
    for (i, c) in g.iter().enumerate() {
        if !c.is_zero() || i == 0 {
            continue;
        }
        let w = vertices.windows(2).find(|w| w[0].0 <= i && i <= w[1].0)?;
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        // hull(i) < k ⟺ y0·(x1−x0) + (y1−y0)(i−x0) < k·(x1−x0)
        let lhs = y0 as i128 * (x1 - x0) as i128 + (y1 - y0) as i128 * (i - x0) as i128;
        if lhs >= k as i128 * (x1 - x0) as i128 {
            return None;
        }
    }
    let pb = BigInt::from(p);
    let mut parts = Vec::new();
    for w in vertices.windows(2) {
        let ((i0, v0), (i1, v1)) = (w[0], w[1]);
        let len = i1 - i0;
        let lambda = BigRational::new(BigInt::from(v0 - v1), BigInt::from(len));
        if open_const && i0 == 0 {
            // The true slope is at least this steep.
            if !lower.admits(&lambda) {
                return None;
            }
            parts.push((1, 1));
            continue;
        }
        if !lower.admits(&lambda) {
            continue;
        }
        let e = lambda.denom().to_u64()? as usize;
        let h = lambda.numer().to_i64()?;
        let rdeg = len / e;
        let mut res = Vec::with_capacity(rdeg + 1);
        for j in 0..=rdeg {
            let idx = i0 + j * e;
            let line = v0 - j as i64 * h;
            let c = &g[idx];
            let r = if !c.is_zero() && valuation(c, p) as i64 == line {
                let unit = c / num_traits::pow(pb.clone(), line as usize);
                unit.mod_floor(&pb).to_u64()?
            } else {
                0
            };
            res.push(r);
        }
        if p >= 1 << 32 {
            return None;
        }
        let rpoly = FpPoly::new(p, res);
        if rpoly.is_squarefree() {
            parts.extend(rpoly.factor_degrees().into_iter().map(|f| (e as u32, f as u32)));
            continue;
        }
        if p > EXHAUSTIVE_ROOT_LIMIT {
            return None;
        }
        let roots = rpoly.roots_with_multiplicity();
        let mut rest = rpoly.clone();
        for &(r, mult) in &roots {
            let lin = FpPoly::new(p, vec![(p - r) % p, 1]);
            for _ in 0..mult {
                rest = rest.divrem(&lin).0;
            }
        }
        if !rest.is_squarefree() {
            return None;
        }
        parts.extend(rest.factor_degrees().into_iter().map(|f| (e as u32, f as u32)));
        for &(r, mult) in &roots {
            if mult == 1 {
                parts.push((e as u32, 1));
                continue;
            }
            if e != 1 || depth >= MAX_SHIFTS || h < 0 {
                return None;
            }
            // Translate onto the cluster r·p^λ and read off the deeper roots.
            let modulus = num_traits::pow(pb.clone(), k as usize);
            let c = BigInt::from(r) * num_traits::pow(pb.clone(), h as usize);
            let shifted = IntPoly::new(g.to_vec()).shift(&c);
            let mut sg: Vec<BigInt> = shifted.coeffs().iter().map(|x| x.mod_floor(&modulus)).collect();
            sg.resize(d + 1, BigInt::zero());
            let sub = analyze(&sg, p, k, Lower::Above(h), depth + 1)?;
            if sub.iter().map(|(e, f)| (e * f) as usize).sum::<usize>() != mult {
                return None;
            }
            parts.extend(sub);
        }
    }
    Some(parts)
}

/// Certified `(e, f)` type of `f` over `Q_p` from `f mod p^k`.
pub fn padic_factor_type(f: &IntPoly, p: u64, k: u32) -> Result<PadicFactorType, LocalError> {
    if f.is_zero() {
        return Err(LocalError::ZeroPolynomial);
    }
    check_prime(p)?;
    let f = f.primitive_part();
    let uncertified = |parts: Vec<(u32, u32)>| PadicFactorType {
        p,
        precision: k,
        parts,
        certified: false,
    };
    // Rational roots at 0.
    let zeros = f.coeffs().iter().take_while(|c| c.is_zero()).count();
    let g = IntPoly::new(f.coeffs()[zeros..].to_vec());
    let mut parts = vec![(1u32, 1u32); zeros];
    if g.degree() == 0 {
        return Ok(PadicFactorType {
            p,
            precision: k,
            parts,
            certified: true,
        });
    }
    let modulus = num_traits::pow(BigInt::from(p), k as usize);
    let reduce = |h: &IntPoly| -> Vec<BigInt> { h.coeffs().iter().map(|c| c.mod_floor(&modulus)).collect() };
    let forward = analyze(&reduce(&g), p, k, Lower::AtLeastZero, 0);
    let backward = analyze(&reduce(&g.reverse()), p, k, Lower::Above(0), 0);
    let (Some(a), Some(b)) = (forward, backward) else {
        return Ok(uncertified(Vec::new()));
    };
    parts.extend(a);
    parts.extend(b);
    parts.sort_unstable();
    if parts.iter().map(|(e, f)| e * f).sum::<u32>() as usize != f.degree() {
        return Ok(uncertified(parts));
    }
    // Cross-check: a unit-leading polynomial that is squarefree mod p must
    // Hensel-lift its coprime factorization.
    let fp = g.to_fp(p);
    if p < 1 << 32 && fp.degree() == g.degree() && fp.is_squarefree() && k <= 64 {
        let pieces: Vec<FpPoly> = fp.distinct_degree().into_iter().map(|(_, h)| h).collect();
        match hensel_lift(&g, &pieces, p, k) {
            Some(l) if verify_lift(&g, &l, p, k) => {}
            _ => return Ok(uncertified(parts)),
        }
    }
    Ok(PadicFactorType {
        p,
        precision: k,
        parts,
        certified: true,
    })
}

/// `20 + 2·v_p(disc f)`, doubling on an uncertified answer up to 160.
pub fn padic_factor_type_auto(f: &IntPoly) -> impl Fn(u64) -> Result<PadicFactorType, LocalError> + '_ {
    move |p| {
        let disc = f.discriminant();
        let vd = if disc.is_zero() { 0 } else { valuation(&disc, p) };
        let mut k = 20 + 2 * vd;
        loop {
            let t = padic_factor_type(f, p, k)?;
            if t.certified || k >= 160 {
                return Ok(t);
            }
            k = (2 * k).min(160);
        }
    }
}

/// Whether `f1` and `f2` have the same factorization type over `Q_p`.
pub fn splitting_match(f1: &IntPoly, f2: &IntPoly, p: u64, k: u32) -> Result<Tri, LocalError> {
    if f1.degree() != f2.degree() {
        return Err(LocalError::DegreeMismatch);
    }
    let a = padic_factor_type(f1, p, k)?;
    let b = padic_factor_type(f2, p, k)?;
    if !(a.certified && b.certified) {
        return Ok(Tri::Inconclusive);
    }
    Ok(Tri::from_bool(a.parts == b.parts))
}

/// Real roots and complex-conjugate pairs.
pub fn archimedean_type(f: &IntPoly) -> (usize, usize) {
    let r = f.count_real_roots();
    (r, (f.degree() - r) / 2)
}

/// Archimedean analogue of [`splitting_match`].
pub fn archimedean_match(f1: &IntPoly, f2: &IntPoly) -> bool {
    archimedean_type(f1) == archimedean_type(f2)
}

/// `Z_p`-algebra `Z_p[θ]/(θ² − aθ − b)` truncated for power tests; a
/// one-dimensional ring is encoded by `dim = 1`.
#[derive(Clone, Copy)]
struct LocalRing {
    dim: u8,
    a: i128,
    b: i128,
    /// Ramification index of `θ`-adic filtration (2 when θ is a uniformizer).
    e: u32,
}

impl LocalRing {
    fn mul(&self, x: (i128, i128), y: (i128, i128), m: i128) -> (i128, i128) {
        if self.dim == 1 {
            return ((x.0 * y.0).rem_euclid(m), 0);
        }
        let yy = (x.1 * y.1).rem_euclid(m);
        (
            (x.0 * y.0 + self.b * yy).rem_euclid(m),
            (x.0 * y.1 + x.1 * y.0 + self.a * yy).rem_euclid(m),
        )
    }

    fn pow(&self, x: (i128, i128), mut n: u64, m: i128) -> (i128, i128) {
        let mut acc = (1 % m, 0);
        let mut base = x;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(acc, base, m);
            }
            base = self.mul(base, base, m);
            n >>= 1;
        }
        acc
    }

    /// Residue class modulo `θ^N` (for `e = 2`) or `p^N` (for `e = 1`).
    fn key(&self, x: (i128, i128), p: i128, big_n: u32) -> (i128, i128) {
        if self.e == 1 {
            let m = p.pow(big_n);
            (x.0.rem_euclid(m), if self.dim == 1 { 0 } else { x.1.rem_euclid(m) })
        } else {
            let m0 = p.pow(big_n.div_ceil(2));
            let m1 = p.pow(big_n / 2);
            (x.0.rem_euclid(m0), x.1.rem_euclid(m1))
        }
    }
}

/// Filtration level above which every unit is an `n`-th power: units
/// agreeing with an `n`-th power modulo `θ^N` are `n`-th powers.
fn power_level(p: u64, n: u64, e: u32) -> u32 {
    let j = valuation(&BigInt::from(n), p);
    if j == 0 {
        return 1;
    }
    (e as u64 / (p - 1)) as u32 + 1 + j * e
}

/// Whether the unit `w` (coordinates reduced modulo a high power of `p`)
/// is an `n`-th power in the completion.
fn unit_is_nth_power(ring: LocalRing, w: (BigInt, BigInt), p: u64, n: u64) -> Option<bool> {
    let big_n = power_level(p, n, ring.e);
    let j = valuation(&BigInt::from(n), p);
    if j == 0 && p != 2 {
        // Residue field criterion.
        let pb = BigInt::from(p);
        let q = if ring.dim == 2 && ring.e == 1 { &pb * &pb } else { pb.clone() };
        let g = BigInt::from(n).gcd(&(&q - 1u32));
        let exp = (&q - 1u32) / g;
        let (x, y) = (w.0.mod_floor(&pb), w.1.mod_floor(&pb));
        let r = if ring.dim == 2 && ring.e == 1 {
            fp2_pow((x, y), &exp, &pb, &BigInt::from(ring.a), &BigInt::from(ring.b))
        } else {
            (x.modpow(&exp, &pb), BigInt::zero())
        };
        return Some(r.0.is_one() && r.1.is_zero());
    }
    // Exhaustive image of the n-th power map on units modulo θ^N.
    let pi = p as i128;
    let levels = if ring.e == 2 { big_n.div_ceil(2) } else { big_n };
    let m = pi.checked_pow(levels)?;
    if m > 1 << 14 && ring.dim == 2 || m > 1 << 24 {
        return None;
    }
    let n_pow: HashSet<(i128, i128)> = {
        let mut s = HashSet::new();
        let range1 = if ring.dim == 2 { m } else { 1 };
        for x0 in 0..m {
            for x1 in 0..range1 {
                let unit = if ring.dim == 2 && ring.e == 1 {
                    x0 % pi != 0 || x1 % pi != 0
                } else {
                    x0 % pi != 0
                };
                if unit {
                    s.insert(ring.key(ring.pow((x0, x1), n, m), pi, big_n));
                }
            }
        }
        s
    };
    let mb = BigInt::from(m);
    let w0 = w.0.mod_floor(&mb).to_i128()?;
    let w1 = w.1.mod_floor(&mb).to_i128()?;
    Some(n_pow.contains(&ring.key((w0, w1), pi, big_n)))
}

fn fp2_pow(
    x: (BigInt, BigInt),
    e: &BigInt,
    p: &BigInt,
    a: &BigInt,
    b: &BigInt,
) -> (BigInt, BigInt) {
    let mul = |x: &(BigInt, BigInt), y: &(BigInt, BigInt)| {
        let yy = &x.1 * &y.1;
        (
            (&x.0 * &y.0 + b * &yy).mod_floor(p),
            (&x.0 * &y.1 + &x.1 * &y.0 + a * &yy).mod_floor(p),
        )
    };
    let mut acc = (BigInt::one(), BigInt::zero());
    let mut base = x;
    let bits = e.bits();
    for i in 0..bits {
        if e.bit(i) {
            acc = mul(&acc, &base);
        }
        base = mul(&base, &base);
    }
    acc
}

/// One place above `p` and the local verdict there.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaceVerdict {
    pub place: String,
    pub valuation: Option<i64>,
    pub verdict: Tri,
}

/// Local test of a rational at `Q_p`.
pub fn is_nth_power_local_rational(a: &BigRational, n: u64, p: u64, k: u32) -> Result<Tri, LocalError> {
    check_prime(p)?;
    if a.is_zero() {
        return Err(LocalError::ZeroElement);
    }
    let v = arith::valuation_rational(a, p);
    if v.rem_euclid(n as i64) != 0 {
        return Ok(Tri::False);
    }
    let ring = LocalRing {
        dim: 1,
        a: 0,
        b: 0,
        e: 1,
    };
    let big_n = power_level(p, n, 1);
    if big_n > k {
        return Ok(Tri::Inconclusive);
    }
    let pb = BigInt::from(p);
    let modulus = num_traits::pow(pb.clone(), k as usize);
    let num = a.numer() / num_traits::pow(pb.clone(), valuation(a.numer(), p) as usize);
    let den = a.denom() / num_traits::pow(pb.clone(), valuation(a.denom(), p) as usize);
    let w = (num * arith::inv_mod(&den, &modulus).expect("p-free denominator")).mod_floor(&modulus);
    Ok(match unit_is_nth_power(ring, (w, BigInt::zero()), p, n) {
        Some(b) => Tri::from_bool(b),
        None => Tri::Inconclusive,
    })
}

/// Hensel root of `X² − tX + c` modulo `p^k` from a simple root mod `p`.
fn hensel_root(t: &BigInt, c: &BigInt, r0: u64, p: u64, k: u32) -> Option<BigInt> {
    let modulus = num_traits::pow(BigInt::from(p), k as usize);
    let mut r = BigInt::from(r0);
    for _ in 0..=k.ilog2() + 2 {
        let g = &r * &r - t * &r + c;
        let dg = &r * 2 - t;
        let inv = arith::inv_mod(&dg, &modulus)?;
        r = (&r - g * inv).mod_floor(&modulus);
    }
    let g = (&r * &r - t * &r + c).mod_floor(&modulus);
    g.is_zero().then_some(r)
}

/// Per-place test of whether `α` is an `n`-th power in each completion of
/// its field above `p`, working modulo `p^k`.
pub fn nth_power_places(alpha: &QuadInt, n: u64, p: u64, k: u32) -> Result<Vec<PlaceVerdict>, LocalError> {
    check_prime(p)?;
    if alpha.is_zero() {
        return Err(LocalError::ZeroElement);
    }
    let field = alpha.field;
    let pb = BigInt::from(p);
    let (kind, _) = factor_rational_prime(field, &pb).map_err(|_| LocalError::NotPrime(p))?;
    let t = BigInt::from(field.omega_trace());
    let nw = BigInt::from(field.omega_norm());
    let modulus = num_traits::pow(pb.clone(), k as usize);
    let mut out = Vec::new();
    match kind {
        SplitType::Split => {
            let fp = FpPoly::new(
                p,
                vec![
                    nw.mod_floor(&pb).to_u64().unwrap(),
                    (-&t).mod_floor(&pb).to_u64().unwrap(),
                    1,
                ],
            );
            let roots: Vec<u64> = fp.roots_with_multiplicity().into_iter().map(|(r, _)| r).collect();
            for (idx, r0) in roots.iter().enumerate() {
                let place = format!("{p}.{}", idx + 1);
                let Some(rho) = hensel_root(&t, &nw, *r0, p, k) else {
                    out.push(PlaceVerdict {
                        place,
                        valuation: None,
                        verdict: Tri::Inconclusive,
                    });
                    continue;
                };
                let x = (&alpha.u + &alpha.v * rho).mod_floor(&modulus);
                out.push(split_place_verdict(place, &x, n, p, k));
            }
        }
        SplitType::Inert => {
            let v = if alpha.u.is_zero() {
                valuation(&alpha.v, p)
            } else if alpha.v.is_zero() {
                valuation(&alpha.u, p)
            } else {
                valuation(&alpha.u, p).min(valuation(&alpha.v, p))
            };
            let place = format!("{p}");
            let verdict = if v as u64 % n != 0 {
                Tri::False
            } else if v + power_level(p, n, 1) > k {
                Tri::Inconclusive
            } else {
                let pv = num_traits::pow(pb.clone(), v as usize);
                let ring = LocalRing {
                    dim: 2,
                    a: t.to_i128().unwrap(),
                    b: (-&nw).to_i128().unwrap(),
                    e: 1,
                };
                match unit_is_nth_power(ring, (&alpha.u / &pv, &alpha.v / &pv), p, n) {
                    Some(b) => Tri::from_bool(b),
                    None => Tri::Inconclusive,
                }
            };
            out.push(PlaceVerdict {
                place,
                valuation: Some(v as i64),
                verdict,
            });
        }
        SplitType::Ramified => {
            out.push(ramified_place_verdict(alpha, n, p, k));
        }
    }
    Ok(out)
}

fn split_place_verdict(place: String, x: &BigInt, n: u64, p: u64, k: u32) -> PlaceVerdict {
    if x.is_zero() {
        return PlaceVerdict {
            place,
            valuation: None,
            verdict: Tri::Inconclusive,
        };
    }
    let v = valuation(x, p);
    let verdict = if v as u64 % n != 0 {
        Tri::False
    } else if v + power_level(p, n, 1) > k {
        Tri::Inconclusive
    } else {
        let w = x / num_traits::pow(BigInt::from(p), v as usize);
        let ring = LocalRing {
            dim: 1,
            a: 0,
            b: 0,
            e: 1,
        };
        match unit_is_nth_power(ring, (w, BigInt::zero()), p, n) {
            Some(b) => Tri::from_bool(b),
            None => Tri::Inconclusive,
        }
    };
    PlaceVerdict {
        place,
        valuation: Some(v as i64),
        verdict,
    }
}

fn ramified_place_verdict(alpha: &QuadInt, n: u64, p: u64, k: u32) -> PlaceVerdict {
    let field = alpha.field;
    let m = BigInt::from(field.m());
    let pb = BigInt::from(p);
    let place = format!("{p}");
    let v = valuation(&alpha.norm(), p);
    if v as u64 % n != 0 {
        return PlaceVerdict {
            place,
            valuation: Some(v as i64),
            verdict: Tri::False,
        };
    }
    let big_n = power_level(p, n, 2);
    if (v + big_n).div_ceil(2) > k {
        return PlaceVerdict {
            place,
            valuation: Some(v as i64),
            verdict: Tri::Inconclusive,
        };
    }
    // Uniformizer π = √m, or 1 + √m at p = 2 when m ≡ 3 (mod 4).
    let shifted = p == 2 && m.mod_floor(&BigInt::from(4)) == BigInt::from(3);
    let pi = if shifted {
        (BigInt::one(), BigInt::one())
    } else {
        (BigInt::zero(), BigInt::one())
    };
    let (x, y) = alpha.half_sqrt_coords();
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut a = BigRational::from_integer(x) * &half;
    let mut b = BigRational::from_integer(y) * &half;
    let mr = BigRational::from_integer(m.clone());
    let pib = (BigRational::from_integer(pi.0.clone()), -BigRational::from_integer(pi.1.clone()));
    let npi = BigRational::from_integer(&pi.0 * &pi.0 - &m * &pi.1 * &pi.1);
    for _ in 0..v {
        let na = (&a * &pib.0 + &b * &pib.1 * &mr) / &npi;
        let nb = (&a * &pib.1 + &b * &pib.0) / &npi;
        a = na;
        b = nb;
    }
    // In the basis (1, π): √m = π, or √m = π − 1.
    let (c0, c1) = if shifted { (&a - &b, b) } else { (a, b) };
    let levels = big_n.div_ceil(2) + 1;
    let modulus = num_traits::pow(pb.clone(), levels as usize);
    let reduce = |q: &BigRational| -> Option<BigInt> {
        let inv = arith::inv_mod(q.denom(), &modulus)?;
        Some((q.numer() * inv).mod_floor(&modulus))
    };
    let (Some(w0), Some(w1)) = (reduce(&c0), reduce(&c1)) else {
        return PlaceVerdict {
            place,
            valuation: Some(v as i64),
            verdict: Tri::Inconclusive,
        };
    };
    let (ra, rb) = if shifted {
        (BigInt::from(2), &m - 1)
    } else {
        (BigInt::zero(), m)
    };
    let ring = LocalRing {
        dim: 2,
        a: ra.to_i128().unwrap(),
        b: rb.to_i128().unwrap(),
        e: 2,
    };
    let verdict = match unit_is_nth_power(ring, (w0, w1), p, n) {
        Some(b) => Tri::from_bool(b),
        None => Tri::Inconclusive,
    };
    PlaceVerdict {
        place,
        valuation: Some(v as i64),
        verdict,
    }
}

/// Whether `α` is an `n`-th power at every place above `p`.
pub fn is_nth_power_local(alpha: &QuadInt, n: u64, p: u64, k: u32) -> Result<Tri, LocalError> {
    Ok(nth_power_places(alpha, n, p, k)?
        .iter()
        .fold(Tri::True, |acc, pv| acc.and(pv.verdict)))
}

/// Archimedean counterpart: odd `n` or a complex place always succeeds;
/// real places need a positive embedding.
pub fn is_nth_power_archimedean(alpha: &QuadInt, n: u64) -> bool {
    if n % 2 == 1 || alpha.field.is_imaginary() {
        return true;
    }
    // (x ± y√m)/2 > 0 at both embeddings.
    let (x, y) = alpha.half_sqrt_coords();
    let m = BigInt::from(alpha.field.m());
    let pos = |s: &BigInt| -> bool {
        let y = s * &y;
        match (x.is_positive(), y.is_positive() || y.is_zero()) {
            (true, true) => true,
            (false, false) => false,
            (true, false) => &x * &x > &y * &y * &m,
            (false, true) => &x * &x < &y * &y * &m,
        }
    };
    pos(&BigInt::one()) && pos(&-BigInt::one())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PuiseuxFit {
    pub beta: f64,
    pub log_c: f64,
    pub points: Vec<(f64, f64)>,
}

/// Least-squares exponent `β` in `max |u| ≈ C |τ|^β` for the chart
/// function `u = 1/x` along a sequence of parameters tending to 0.
pub fn puiseux_exponent(family: &CurveFamily, taus: &[BigRational]) -> Result<PuiseuxFit, LocalError> {
    if taus.len() < 8 {
        return Err(LocalError::DegenerateFit(format!(
            "{} points, at least 8 required",
            taus.len()
        )));
    }
    let abs: Vec<BigRational> = taus.iter().map(|t| t.abs()).collect();
    if abs.windows(2).any(|w| w[1] >= w[0]) {
        return Err(LocalError::DegenerateFit(
            "parameters must strictly decrease in absolute value".into(),
        ));
    }
    let mut points = Vec::with_capacity(taus.len());
    for (tau, a) in taus.iter().zip(&abs) {
        let fiber = fiber_polynomial(family, tau)
            .map_err(|e| LocalError::DegenerateFit(e.to_string()))?
            .poly;
        let (lo, hi) = root_modulus_bounds(&fiber.reverse(), 6)
            .map_err(|e| LocalError::DegenerateFit(e.to_string()))?;
        if lo.is_zero() {
            return Err(LocalError::DegenerateFit("vanishing root bound".into()));
        }
        let lu = 0.5 * (rational_to_f64(&lo).ln() + rational_to_f64(&hi).ln());
        points.push((rational_to_f64(a).ln(), lu));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= f64::EPSILON {
        return Err(LocalError::DegenerateFit("no spread in |τ|".into()));
    }
    let beta = sxy / sxx;
    Ok(PuiseuxFit {
        beta,
        log_c: my - beta * mx,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numberfield::QuadField;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64(c)
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn polygons() {
        let np = newton_polygon(&p(&[8, -1, 1]), 2).unwrap();
        assert_eq!(np.vertices, vec![(0, 3), (1, 0), (2, 0)]);
        assert_eq!(np.slopes, vec![(q(-3, 1), 1), (q(0, 1), 1)]);
        let np = newton_polygon(&p(&[1, 0, 1]), 3).unwrap();
        assert_eq!(np.slopes, vec![(q(0, 1), 2)]);
        let np = newton_polygon(&p(&[-5, 0, 1]), 5).unwrap();
        assert_eq!(np.slopes, vec![(q(-1, 2), 2)]);
    }

    #[test]
    fn factor_types() {
        let t = padic_factor_type(&p(&[8, -1, 1]), 2, 8).unwrap();
        assert!(t.certified);
        assert_eq!(t.parts, vec![(1, 1), (1, 1)]);
        let t = padic_factor_type(&p(&[8, -1, 1]), 31, 20).unwrap();
        assert_eq!((t.certified, t.parts), (true, vec![(2, 1)]));
        let t = padic_factor_type(&p(&[1, 1, 1]), 2, 20).unwrap();
        assert_eq!((t.certified, t.parts), (true, vec![(1, 2)]));
        // X² − 17 at 2: residual (X+1)² needs the translation step; splits.
        let t = padic_factor_type(&p(&[-17, 0, 1]), 2, 20).unwrap();
        assert_eq!((t.certified, t.parts), (true, vec![(1, 1), (1, 1)]));
        // X² + 3 at 2: Q₂(√−3) is unramified.
        let t = padic_factor_type(&p(&[3, 0, 1]), 2, 20).unwrap();
        assert_eq!((t.certified, t.parts), (true, vec![(1, 2)]));
        // Non-integral roots: 8X² − 1 at 2.
        let t = padic_factor_type(&p(&[-1, 0, 8]), 2, 20).unwrap();
        assert_eq!((t.certified, t.parts), (true, vec![(2, 1)]));
        // (X − 1)(X − 1 − 2^30) is beyond precision 20.
        let f = p(&[-1, 1]).mul(&IntPoly::new(vec![-(BigInt::one() + (BigInt::one() << 30u32)), BigInt::one()]));
        assert!(!padic_factor_type(&f, 2, 20).unwrap().certified);
        assert!(padic_factor_type(&f, 2, 64).unwrap().certified);
    }

    #[test]
    fn splitting_matches() {
        let f = p(&[8, -1, 1]);
        let g = p(&[8 + 256, -1, 1]);
        assert_eq!(splitting_match(&f, &g, 2, 8).unwrap(), Tri::True);
        assert_eq!(
            splitting_match(&p(&[1, 0, 1]), &p(&[1 + 729, 0, 1]), 3, 6).unwrap(),
            Tri::True
        );
        assert_eq!(
            splitting_match(&p(&[-2, 0, 1]), &p(&[-3, 0, 1]), 5, 10).unwrap(),
            Tri::True
        );
        assert_eq!(
            splitting_match(&p(&[-2, 0, 1]), &p(&[-6, 0, 1]), 5, 10).unwrap(),
            Tri::False
        );
    }

    #[test]
    fn local_powers_over_q() {
        assert_eq!(is_nth_power_local_rational(&q(-8, 1), 3, 5, 10).unwrap(), Tri::True);
        assert_eq!(is_nth_power_local_rational(&q(2, 1), 3, 7, 10).unwrap(), Tri::False);
        assert_eq!(is_nth_power_local_rational(&q(3, 1), 3, 3, 10).unwrap(), Tri::False);
        // 10 ≡ 1 mod 9 is a cube in Z₃; 2 is not (cubes mod 9 are ±1).
        assert_eq!(is_nth_power_local_rational(&q(10, 1), 3, 3, 10).unwrap(), Tri::True);
        assert_eq!(is_nth_power_local_rational(&q(2, 1), 3, 3, 10).unwrap(), Tri::False);
        // 17 is a square in Q₂, 5 is not.
        assert_eq!(is_nth_power_local_rational(&q(17, 1), 2, 2, 10).unwrap(), Tri::True);
        assert_eq!(is_nth_power_local_rational(&q(5, 1), 2, 2, 10).unwrap(), Tri::False);
    }

    #[test]
    fn local_powers_in_quadratic_fields() {
        let f = QuadField::new(-31).unwrap();
        // ω has norm 8 = 2³; at 2 it splits with valuations (3, 0).
        let w = f.omega();
        let places = nth_power_places(&w, 3, 2, 20).unwrap();
        assert_eq!(places.len(), 2);
        for a in [f.int(7), w.clone(), QuadInt::new(f, 3.into(), 5.into())] {
            let c = a.pow(3);
            for pr in [2u64, 3, 5, 7, 31] {
                assert_eq!(is_nth_power_local(&c, 3, pr, 30).unwrap(), Tri::True, "{a} at {pr}");
            }
        }
        // A uniformizer at a ramified place is never a cube.
        assert_eq!(is_nth_power_local(&QuadInt::new(f, (-1).into(), 2.into()), 3, 31, 20).unwrap(), Tri::False);
        let g = QuadField::new(-1).unwrap();
        let a = QuadInt::new(g, 1.into(), 1.into());
        assert_eq!(is_nth_power_local(&a.pow(2), 2, 2, 30).unwrap(), Tri::True);
        assert_eq!(is_nth_power_local(&a, 2, 2, 30).unwrap(), Tri::False);
    }
}
