//! Integer toolkit shared by every module: trial-division factoring with a
//! deterministic Miller–Rabin backstop, Kronecker symbols, modular square
//! roots, p-adic valuations and squarefree kernels.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Default trial-division bound for norm factoring.
pub const DEFAULT_TRIAL_BOUND: u64 = 10_000_000;

/// Miller–Rabin with the first 13 prime bases is deterministic below this value.
const MR_DETERMINISTIC_LIMIT: u128 = 3_317_044_064_679_887_385_961_981;

const MR_BASES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    /// A composite cofactor survived trial division and could not be split
    /// exactly.
    #[error("cannot factor {cofactor}: composite part beyond trial bound {bound}")]
    FactorizationTooLarge { cofactor: BigUint, bound: u64 },
    #[error("cannot parse rational {0:?}")]
    BadRational(String),
}

/// Prime factorization `[(p, e)]` with primes in increasing order.
pub type Factorization = Vec<(BigUint, u32)>;

fn small_primes(bound: u64) -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    let all = PRIMES.get_or_init(|| sieve(DEFAULT_TRIAL_BOUND as usize));
    let end = all.partition_point(|&p| (p as u64) <= bound);
    &all[..end]
}

fn sieve(limit: usize) -> Vec<u32> {
    let mut composite = vec![false; limit + 1];
    let mut out = Vec::with_capacity(limit / 10);
    for i in 2..=limit {
        if !composite[i] {
            out.push(i as u32);
            let mut j = i * i;
            while j <= limit {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn mul_mod(a: u128, b: u128, m: u128) -> u128 {
    if m <= u64::MAX as u128 {
        return a * b % m;
    }
    // Russian-peasant multiplication keeps intermediates below 2m.
    let (mut a, mut b, mut r) = (a % m, b % m, 0u128);
    while b > 0 {
        if b & 1 == 1 {
            r = add_mod(r, a, m);
        }
        a = add_mod(a, a, m);
        b >>= 1;
    }
    r
}

fn add_mod(a: u128, b: u128, m: u128) -> u128 {
    let s = a.wrapping_add(b);
    if s < a || s >= m {
        s.wrapping_sub(m)
    } else {
        s
    }
}

fn pow_mod(mut b: u128, mut e: u128, m: u128) -> u128 {
    let mut r = 1u128 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic primality test for `n` below ~3.3·10^24.
///
/// Returns `None` when `n` is beyond the range where the fixed bases are
/// proven deterministic.
pub fn is_prime_u128(n: u128) -> Option<bool> {
    if n < 2 {
        return Some(false);
    }
    for &p in &MR_BASES {
        let p = p as u128;
        if n == p {
            return Some(true);
        }
        if n % p == 0 {
            return Some(false);
        }
    }
    if n >= MR_DETERMINISTIC_LIMIT {
        return None;
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &MR_BASES {
        let mut x = pow_mod(a as u128, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return Some(false);
    }
    Some(true)
}

pub fn is_prime_u64(n: u64) -> bool {
    is_prime_u128(n as u128).expect("u64 is inside the deterministic range")
}

/// Primality of an arbitrary natural number, `None` if undecidable with the
/// deterministic bases.
pub fn is_prime(n: &BigUint) -> Option<bool> {
    match n.to_u128() {
        Some(v) => is_prime_u128(v),
        None => None,
    }
}

/// Factor `n ≥ 1` by trial division up to `bound`, finishing with a
/// primality certificate for the cofactor.
///
/// A cofactor whose prime factors all exceed the bound is accepted when it is
/// below `bound²` (then prime), proven prime by Miller–Rabin, or a perfect
/// square of such a prime. Anything else is refused.
pub fn factor_biguint(n: &BigUint, bound: u64) -> Result<Factorization, ArithError> {
    let mut out: Factorization = Vec::new();
    if n.is_zero() {
        return Err(ArithError::FactorizationTooLarge {
            cofactor: n.clone(),
            bound,
        });
    }
    let mut rem = n.clone();
    let mut last_check = 0u64;
    let mut exhausted = false;
    let primes = small_primes(bound);
    for &p in primes {
        let p = p as u64;
        if p > bound {
            break;
        }
        let pb = BigUint::from(p);
        if &pb * &pb > rem {
            exhausted = true;
            break;
        }
        let mut e = 0;
        loop {
            let (q, r) = rem.div_rem(&pb);
            if !r.is_zero() {
                break;
            }
            rem = q;
            e += 1;
        }
        if e > 0 {
            out.push((pb, e));
        }
        // Occasionally short-circuit a large prime cofactor.
        if p >= last_check.saturating_mul(4).max(1000) {
            last_check = p;
            if rem > BigUint::one() && is_prime(&rem) == Some(true) {
                exhausted = true;
                break;
            }
        }
    }
    if !exhausted && bound > DEFAULT_TRIAL_BOUND {
        // Bounds beyond the cached table fall back to odd candidates.
        let mut d = DEFAULT_TRIAL_BOUND + 1;
        while d <= bound {
            let db = BigUint::from(d);
            if &db * &db > rem {
                break;
            }
            let mut e = 0;
            while (&rem % &db).is_zero() {
                rem /= &db;
                e += 1;
            }
            if e > 0 {
                out.push((db, e));
            }
            d += 2;
        }
    }
    if rem.is_one() {
        return Ok(out);
    }
    if let Some(parts) = rem.to_u128().and_then(split_u128) {
        for (q, e) in parts {
            out.push((BigUint::from(q), e));
        }
        out.sort();
        return Ok(out);
    }
    let b = BigUint::from(bound);
    let certified = if rem <= &b * &b {
        Some((rem.clone(), 1))
    } else if is_prime(&rem) == Some(true) {
        Some((rem.clone(), 1))
    } else {
        let r = rem.sqrt();
        if &r * &r == rem && is_prime(&r) == Some(true) {
            Some((r, 2))
        } else {
            None
        }
    };
    match certified {
        Some(pe) => {
            out.push(pe);
            out.sort();
            Ok(out)
        }
        None => Err(ArithError::FactorizationTooLarge {
            cofactor: rem,
            bound,
        }),
    }
}

/// Brent's variant of Pollard rho; `None` when the iteration cap is hit.
fn pollard_brent(n: u128) -> Option<u128> {
    const CAP: u64 = 1 << 24;
    for c in 1..20u128 {
        let f = |x: u128| add_mod(mul_mod(x, x, n), c, n);
        let (mut y, mut r, mut q, mut g) = (2u128, 1u64, 1u128, 1u128);
        let (mut x, mut ys) = (y, y);
        let mut steps = 0u64;
        while g == 1 && steps < CAP {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..(r - k).min(128) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += 128;
            }
            steps += r;
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != 1 && g != n {
            return Some(g);
        }
    }
    None
}

/// Complete factorization of a cofactor inside the deterministic
/// Miller–Rabin range, or `None`.
fn split_u128(n: u128) -> Option<Vec<(u128, u32)>> {
    if n >= MR_DETERMINISTIC_LIMIT {
        return None;
    }
    let mut stack = vec![n];
    let mut primes: Vec<u128> = Vec::new();
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime_u128(m)? {
            primes.push(m);
            continue;
        }
        let d = pollard_brent(m)?;
        stack.push(d);
        stack.push(m / d);
    }
    primes.sort_unstable();
    let mut out: Vec<(u128, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    Some(out)
}

pub fn factor(n: &BigInt) -> Result<Factorization, ArithError> {
    factor_biguint(n.magnitude(), DEFAULT_TRIAL_BOUND)
}

pub fn factor_u64(n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut rem = n;
    let mut d = 2u64;
    while d * d <= rem {
        let mut e = 0;
        while rem % d == 0 {
            rem /= d;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if rem > 1 {
        out.push((rem, 1));
    }
    out
}

/// Exponent of the prime `p` in `n ≠ 0`.
pub fn valuation(n: &BigInt, p: u64) -> u32 {
    assert!(!n.is_zero(), "valuation of zero");
    let pb = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&pb);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// p-adic valuation of a nonzero rational.
pub fn valuation_rational(q: &BigRational, p: u64) -> i64 {
    valuation(q.numer(), p) as i64 - valuation(q.denom(), p) as i64
}

/// Writes `n = s² · k` with `k` squarefree (sign carried by `k`).
pub fn squarefree_decompose(n: &BigInt) -> Result<(BigInt, BigInt), ArithError> {
    assert!(!n.is_zero(), "squarefree kernel of zero");
    let mut square = BigInt::one();
    let mut kernel = if n.is_negative() {
        -BigInt::one()
    } else {
        BigInt::one()
    };
    for (p, e) in factor(n)? {
        let p = BigInt::from(p);
        square *= num_traits::pow(p.clone(), (e / 2) as usize);
        if e % 2 == 1 {
            kernel *= p;
        }
    }
    Ok((square, kernel))
}

pub fn is_squarefree(n: &BigInt) -> Result<bool, ArithError> {
    Ok(factor(n)?.iter().all(|(_, e)| *e == 1))
}

/// Fundamental discriminant of `Q(√n)` for a non-square `n`.
pub fn fundamental_discriminant(n: &BigInt) -> Result<BigInt, ArithError> {
    let (_, k) = squarefree_decompose(n)?;
    Ok(if k.mod_floor(&BigInt::from(4)) == BigInt::one() {
        k
    } else {
        k * 4
    })
}

pub fn is_perfect_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

/// Kronecker symbol `(a | p)` for a prime `p`.
pub fn kronecker_prime(a: &BigInt, p: u64) -> i32 {
    if p == 2 {
        let r = a.mod_floor(&BigInt::from(8)).to_u32().unwrap();
        return match r {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => 0,
        };
    }
    let pb = BigInt::from(p);
    let r = a.mod_floor(&pb);
    if r.is_zero() {
        return 0;
    }
    let e = BigInt::from((p - 1) / 2);
    if r.modpow(&e, &pb).is_one() {
        1
    } else {
        -1
    }
}

/// Square root of `a` modulo an odd prime `p` (Tonelli–Shanks).
pub fn sqrt_mod_prime(a: &BigInt, p: &BigInt) -> Option<BigInt> {
    let a = a.mod_floor(p);
    if a.is_zero() {
        return Some(BigInt::zero());
    }
    let two = BigInt::from(2);
    if p == &two {
        return Some(a);
    }
    let one = BigInt::one();
    let pm1 = p - &one;
    if !a.modpow(&(&pm1 / &two), p).is_one() {
        return None;
    }
    let mut q = pm1.clone();
    let mut s = 0u32;
    while q.is_even() {
        q /= 2;
        s += 1;
    }
    let mut z = two.clone();
    while z.modpow(&(&pm1 / &two), p) != pm1 {
        z += 1;
    }
    let mut m = s;
    let mut c = z.modpow(&q, p);
    let mut t = a.modpow(&q, p);
    let mut r = a.modpow(&((&q + &one) / &two), p);
    while !t.is_one() {
        let mut i = 0;
        let mut tt = t.clone();
        while !tt.is_one() {
            tt = (&tt * &tt).mod_floor(p);
            i += 1;
        }
        let mut b = c.clone();
        for _ in 0..(m - i - 1) {
            b = (&b * &b).mod_floor(p);
        }
        m = i;
        c = (&b * &b).mod_floor(p);
        t = (&t * &c).mod_floor(p);
        r = (&r * &b).mod_floor(p);
    }
    Some(r)
}

/// Modular inverse of `a` modulo `m` when it exists.
pub fn inv_mod(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// Parses `"p/q"` or `"p"` into a reduced rational.
pub fn parse_rational(s: &str) -> Result<BigRational, ArithError> {
    let s = s.trim();
    let bad = || ArithError::BadRational(s.to_string());
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn bigint_from_biguint(n: BigUint) -> BigInt {
    BigInt::from_biguint(Sign::Plus, n)
}

/// Floor of the `n`-th root of a nonnegative integer.
pub fn iroot(x: &BigUint, n: u32) -> BigUint {
    x.nth_root(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_small_and_large() {
        let primes: Vec<u64> = (2..200).filter(|&n| is_prime_u64(n)).collect();
        assert_eq!(primes.len(), 46);
        assert!(is_prime_u64(1_000_000_007));
        assert!(!is_prime_u64(1_000_000_007 * 3));
        // Carmichael number
        assert!(!is_prime_u64(561));
        assert_eq!(is_prime_u128(170_141_183_460_469_231_731_687_303_715_884_105_727), None);
    }

    #[test]
    fn factoring_round_trip() {
        for n in [1u64, 2, 12, 255, 864_000, 999_983 * 999_979, 4_095_999_999] {
            let f = factor_biguint(&BigUint::from(n), DEFAULT_TRIAL_BOUND).unwrap();
            let prod: BigUint = f
                .iter()
                .map(|(p, e)| num_traits::pow(p.clone(), *e as usize))
                .product();
            assert_eq!(prod, BigUint::from(n));
            assert_eq!(
                f.iter()
                    .map(|(p, e)| (p.to_u64().unwrap(), *e))
                    .collect::<Vec<_>>(),
                factor_u64(n)
            );
        }
    }

    #[test]
    fn factoring_refuses_unverifiable_cofactor() {
        // Composite cofactor beyond the deterministic primality range.
        let m89 = (BigUint::one() << 89u32) - 1u32;
        let m61 = (BigUint::one() << 61u32) - 1u32;
        let err = factor_biguint(&(&m89 * &m61), 100).unwrap_err();
        assert!(matches!(err, ArithError::FactorizationTooLarge { .. }));
        // Composite cofactors inside the range are split by rho.
        let n = BigUint::from(1009u64 * 1013);
        assert_eq!(
            factor_biguint(&n, 100).unwrap(),
            vec![(BigUint::from(1009u32), 1), (BigUint::from(1013u32), 1)]
        );
        let n = BigUint::from(1_000_003u64) * BigUint::from(998_244_353u64) * BigUint::from(1_000_000_007u64);
        assert_eq!(factor_biguint(&n, 1000).unwrap().len(), 3);
        // Cofactor p² is recognized exactly.
        let sq = BigUint::from(1009u64 * 1009);
        assert_eq!(
            factor_biguint(&sq, 100).unwrap(),
            vec![(BigUint::from(1009u32), 2)]
        );
    }

    #[test]
    fn kronecker_and_sqrt() {
        let d = BigInt::from(-31);
        assert_eq!(kronecker_prime(&d, 2), 1);
        assert_eq!(kronecker_prime(&d, 31), 0);
        assert_eq!(kronecker_prime(&BigInt::from(-4), 3), -1);
        for p in [3u64, 5, 7, 13, 17, 97, 1_000_000_007] {
            let pb = BigInt::from(p);
            for a in 1..30i64 {
                let a = BigInt::from(a);
                if let Some(r) = sqrt_mod_prime(&a, &pb) {
                    assert_eq!((&r * &r).mod_floor(&pb), a.mod_floor(&pb));
                } else {
                    assert_eq!(kronecker_prime(&a, p), -1);
                }
            }
        }
    }

    #[test]
    fn squarefree_kernels() {
        let (s, k) = squarefree_decompose(&BigInt::from(-255)).unwrap();
        assert_eq!((s, k), (BigInt::one(), BigInt::from(-255)));
        let (s, k) = squarefree_decompose(&BigInt::from(-108)).unwrap();
        assert_eq!((s, k), (BigInt::from(6), BigInt::from(-3)));
        assert_eq!(
            fundamental_discriminant(&BigInt::from(-4)).unwrap(),
            BigInt::from(-4)
        );
        assert_eq!(
            fundamental_discriminant(&BigInt::from(-108)).unwrap(),
            BigInt::from(-3)
        );
        assert_eq!(
            fundamental_discriminant(&BigInt::from(12)).unwrap(),
            BigInt::from(12)
        );
        assert!(!is_squarefree(&BigInt::from(12)).unwrap());
    }

    #[test]
    fn rationals_parse() {
        let q = parse_rational("-2/4").unwrap();
        assert_eq!(format_rational(&q), "-1/2");
        assert_eq!(format_rational(&parse_rational("7").unwrap()), "7");
        assert!(parse_rational("1/0").is_err());
        assert_eq!(valuation_rational(&parse_rational("27/4").unwrap(), 3), 3);
        assert_eq!(valuation_rational(&parse_rational("27/4").unwrap(), 2), -2);
    }
}
