//! Exact integer and rational arithmetic: desk-scale factorization, square
//! classes of rationals, and local Hilbert symbols with a brute-force oracle.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arbitrary-precision rational; always stored reduced with positive denominator.
pub type Rational = BigRational;

/// Largest magnitude accepted by [`factorize`].
pub const FACTOR_BOUND: u64 = 1 << 63;

/// Magnitude bound on the inputs of [`hilbert_oracle`].
pub const ORACLE_INPUT_BOUND: i64 = 10_000;

/// Largest modulus the oracle will enumerate.
const ORACLE_MODULUS_CAP: u64 = 1 << 31;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/q"` or `"n"` into a rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// A place of Q: a finite prime or the archimedean place.
///
/// The derived order puts primes first (ascending) and the archimedean place last.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Place {
    Prime(u64),
    Infinity,
}

impl Place {
    pub fn prime(p: u64) -> Result<Place> {
        if is_prime(p) {
            Ok(Place::Prime(p))
        } else {
            Err(Error::InvalidInput(format!("{p} is not prime")))
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Prime(p) => write!(f, "{p}"),
            Place::Infinity => f.write_str("∞"),
        }
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Factors a nonzero integer with `|n| ≤ 2^63` by trial division.
///
/// The sign is dropped; primes come out strictly increasing.
pub fn factorize(n: &BigInt) -> Result<Vec<(u64, u32)>> {
    if n.is_zero() {
        return Err(Error::InvalidInput("cannot factor zero".into()));
    }
    let m = n
        .magnitude()
        .to_u64()
        .filter(|&m| m <= FACTOR_BOUND)
        .ok_or_else(|| Error::OutOfRange(format!("{n} exceeds the factorization bound 2^63")))?;
    Ok(factor_u64(m))
}

pub(crate) fn factor_u64(mut m: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let candidates = [2u64, 3]
        .into_iter()
        .chain((5u64..).step_by(6).flat_map(|p| [p, p + 2]));
    let mut changed = true;
    for p in candidates {
        if m == 1 {
            break;
        }
        if (changed && is_prime(m)) || p.saturating_mul(p) > m {
            out.push((m, 1));
            break;
        }
        let mut e = 0;
        while m.is_multiple_of(p) {
            m /= p;
            e += 1;
        }
        changed = e > 0;
        if changed {
            out.push((p, e));
        }
    }
    out
}

/// Errors unless numerator and denominator are within the factorization bound.
pub(crate) fn check_factorable(r: &Rational) -> Result<()> {
    for n in [r.numer(), r.denom()] {
        if n.magnitude().to_u64().is_none_or(|m| m > FACTOR_BOUND) {
            return Err(Error::OutOfRange(format!("{r} exceeds the factorization bound 2^63")));
        }
    }
    Ok(())
}

/// Sign and sorted odd-exponent primes of a nonzero rational: its square class.
pub(crate) fn square_class_data(r: &Rational) -> Result<(bool, Vec<u64>)> {
    if r.is_zero() {
        return Err(Error::InvalidInput("zero has no square class".into()));
    }
    let mut primes: Vec<u64> = factorize(r.numer())?
        .into_iter()
        .chain(factorize(r.denom())?)
        .filter(|&(_, e)| e % 2 == 1)
        .map(|(p, _)| p)
        .collect();
    primes.sort_unstable();
    // numerator and denominator are coprime, so no prime appears twice
    Ok((r.is_negative(), primes))
}

/// The squarefree integer `d` with `r / d` a nonzero square in Q.
pub fn squarefree_part(r: &Rational) -> Result<BigInt> {
    let (neg, primes) = square_class_data(r)?;
    let mut d = primes.iter().fold(BigInt::one(), |acc, &p| acc * BigInt::from(p));
    if neg {
        d = -d;
    }
    Ok(d)
}

/// Legendre symbol of an odd-prime-free square class datum `(neg, primes)`
/// modulo the odd prime `p`, where `p` does not occur in `primes`.
fn legendre_class(neg: bool, primes: &[u64], p: u64) -> i8 {
    let mut s = 1i8;
    if neg && p % 4 == 3 {
        s = -s;
    }
    for &q in primes {
        let r = q % p;
        debug_assert!(r != 0);
        if pow_mod(r, (p - 1) / 2, p) != 1 {
            s = -s;
        }
    }
    s
}

fn residue_mod8(neg: bool, primes: &[u64]) -> u64 {
    let mut r = primes.iter().fold(1u64, |acc, &q| (acc * (q % 8)) % 8);
    if neg {
        r = (8 - r) % 8;
    }
    r
}

/// Hilbert symbol on square-class data. `(a_neg, a_primes)` encode the squarefree
/// integer `±Π a_primes`.
pub(crate) fn local_symbol(a: (bool, &[u64]), b: (bool, &[u64]), v: Place) -> i8 {
    let (a_neg, a_primes) = a;
    let (b_neg, b_primes) = b;
    match v {
        Place::Infinity => {
            if a_neg && b_neg {
                -1
            } else {
                1
            }
        }
        Place::Prime(p) => {
            let alpha = a_primes.binary_search(&p).is_ok();
            let beta = b_primes.binary_search(&p).is_ok();
            let strip = |ps: &[u64]| ps.iter().copied().filter(|&q| q != p).collect::<Vec<_>>();
            let u = strip(a_primes);
            let w = strip(b_primes);
            if p == 2 {
                let u8_ = residue_mod8(a_neg, &u);
                let w8 = residue_mod8(b_neg, &w);
                let eps = |x: u64| ((x % 4) == 3) as u32;
                let omega = |x: u64| (x % 8 == 3 || x % 8 == 5) as u32;
                let e = eps(u8_) * eps(w8)
                    + (alpha as u32) * omega(w8)
                    + (beta as u32) * omega(u8_);
                if e.is_multiple_of(2) {
                    1
                } else {
                    -1
                }
            } else {
                let mut s = 1i8;
                if alpha && beta && p % 4 == 3 {
                    s = -s;
                }
                if beta {
                    s *= legendre_class(a_neg, &u, p);
                }
                if alpha {
                    s *= legendre_class(b_neg, &w, p);
                }
                s
            }
        }
    }
}

/// `(a, b)_v`: +1 iff `z² = a x² + b y²` has a nonzero solution over Q_v.
pub fn hilbert_symbol(a: &Rational, b: &Rational, v: Place) -> Result<i8> {
    let (an, ap) = square_class_data(a)?;
    let (bn, bp) = square_class_data(b)?;
    Ok(local_symbol((an, &ap), (bn, &bp), v))
}

fn valuation(mut n: i64, p: u64) -> u32 {
    let p = p as i64;
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

struct SquareTable {
    modulus: u64,
    bits: Vec<u64>,
}

impl SquareTable {
    fn build(modulus: u64) -> SquareTable {
        let mut bits = vec![0u64; (modulus as usize).div_ceil(64)];
        for z in 0..modulus {
            let s = mul_mod(z, z, modulus) as usize;
            bits[s / 64] |= 1 << (s % 64);
        }
        SquareTable { modulus, bits }
    }

    fn contains(&self, r: u64) -> bool {
        let r = r as usize;
        self.bits[r / 64] >> (r % 64) & 1 == 1
    }
}

fn square_table(modulus: u64) -> Arc<SquareTable> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<SquareTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.lock().unwrap().get(&modulus) {
        return t.clone();
    }
    let table = Arc::new(SquareTable::build(modulus));
    cache.lock().unwrap().insert(modulus, table.clone());
    table
}

/// Decides `(a, b)_v` by exhaustive search for a primitive solution of
/// `z² ≡ a x² + b y²` modulo `p^k`, with `k = v_p(a) + v_p(b) + 1` for odd `p`
/// and `k = v_2(a) + v_2(b) + 5` for `p = 2`, after removing factors of `p²`.
/// Independent of [`hilbert_symbol`].
pub fn hilbert_oracle(a: i64, b: i64, v: Place) -> Result<i8> {
    if a == 0 || b == 0 {
        return Err(Error::InvalidInput("Hilbert symbol of zero".into()));
    }
    if a.abs() > ORACLE_INPUT_BOUND || b.abs() > ORACLE_INPUT_BOUND {
        return Err(Error::OutOfRange(format!(
            "oracle inputs must satisfy |a|,|b| ≤ {ORACLE_INPUT_BOUND}"
        )));
    }
    let p = match v {
        Place::Infinity => return Ok(if a < 0 && b < 0 { -1 } else { 1 }),
        Place::Prime(p) => p,
    };
    // (a p², b)_p = (a, b)_p via x ↦ x/p, so only v_p mod 2 matters
    let strip = |mut n: i64| {
        let p2 = (p * p) as i64;
        while n % p2 == 0 {
            n /= p2;
        }
        n
    };
    let (a, b) = (strip(a), strip(b));
    // enough precision for a Hensel lift of any primitive solution
    let k = valuation(a, p) + valuation(b, p) + if p == 2 { 5 } else { 1 };
    let modulus = (p as u128)
        .checked_pow(k)
        .filter(|&m| m <= ORACLE_MODULUS_CAP as u128)
        .ok_or_else(|| Error::OutOfRange(format!("oracle modulus {p}^{k} too large")))?
        as u64;
    let squares = square_table(modulus);
    debug_assert_eq!(squares.modulus, modulus);
    let am = a.rem_euclid(modulus as i64) as u64;
    let bm = b.rem_euclid(modulus as i64) as u64;
    let form = |x: u64, y: u64| {
        (mul_mod(am, mul_mod(x, x, modulus), modulus) + mul_mod(bm, mul_mod(y, y, modulus), modulus))
            % modulus
    };
    // A primitive triple can be rescaled by a unit so that x = 1 (x a unit) or
    // y = 1 (p | x, y a unit). If p divides both x and y then p | z² and the
    // triple is not primitive.
    let found = (0..modulus).any(|y| squares.contains(form(1, y)))
        || (0..modulus).step_by(p as usize).any(|x| squares.contains(form(x, 1)));
    Ok(if found { 1 } else { -1 })
}

/// Rational square root, if `r` is the square of a rational.
pub fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| Rational::new(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(&b(12)).unwrap(), vec![(2, 2), (3, 1)]);
        assert_eq!(factorize(&b(-1)).unwrap(), vec![]);
        assert!(factorize(&b(0)).is_err());
        assert!(factorize(&(BigInt::from(1u64 << 63) + 1)).is_err());
        assert_eq!(factorize(&BigInt::from(1u64 << 63)).unwrap(), vec![(2, 63)]);
    }

    #[test]
    fn factorize_primorial_matches_trial_division() {
        // naive trial division oracle
        let mut n = 9_699_690u64;
        let mut expect = Vec::new();
        let mut d = 2;
        while n > 1 {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            if e > 0 {
                expect.push((d, e));
            }
            d += 1;
        }
        assert_eq!(factorize(&b(9_699_690)).unwrap(), expect);
        assert_eq!(expect.len(), 8);
    }

    #[test]
    fn factorize_large_semiprime() {
        let p = 4_294_967_291u64; // largest prime below 2^32
        let q = 2_147_483_647u64;
        let f = factorize(&BigInt::from(p * q)).unwrap();
        assert_eq!(f, vec![(q, 1), (p, 1)]);
    }

    #[test]
    fn primality() {
        let small: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]);
        assert!(is_prime(18_446_744_073_709_551_557));
        assert!(!is_prime(3_215_031_751));
        assert!(Place::prime(9).is_err());
    }

    #[test]
    fn squarefree_examples() {
        assert_eq!(squarefree_part(&ratio(8, 9)).unwrap(), b(2));
        assert_eq!(squarefree_part(&rat(-45)).unwrap(), b(-5));
        assert_eq!(squarefree_part(&rat(1)).unwrap(), b(1));
        assert_eq!(squarefree_part(&ratio(-3, 12)).unwrap(), b(-1));
        assert!(squarefree_part(&rat(0)).is_err());
    }

    #[test]
    fn hilbert_examples() {
        let inf = Place::Infinity;
        for v in [inf, Place::Prime(2), Place::Prime(3), Place::Prime(7)] {
            assert_eq!(hilbert_symbol(&rat(1), &rat(-7), v).unwrap(), 1);
        }
        assert_eq!(hilbert_symbol(&rat(-1), &rat(-1), inf).unwrap(), -1);
        assert_eq!(hilbert_symbol(&rat(2), &rat(3), Place::Prime(3)).unwrap(), -1);
        assert_eq!(hilbert_symbol(&rat(2), &rat(3), Place::Prime(2)).unwrap(), -1);
        assert_eq!(hilbert_symbol(&ratio(8, 9), &rat(12), Place::Prime(3)).unwrap(), -1);
        assert!(hilbert_symbol(&rat(0), &rat(3), inf).is_err());
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(hilbert_oracle(2, 3, Place::Prime(3)).unwrap(), -1);
        assert_eq!(hilbert_oracle(-1, -1, Place::Prime(2)).unwrap(), -1);
        assert_eq!(hilbert_oracle(5, 7, Place::Prime(11)).unwrap(), 1);
        assert_eq!(hilbert_oracle(2, 3, Place::Prime(2)).unwrap(), -1);
        assert_eq!(hilbert_oracle(-1, -1, Place::Infinity).unwrap(), -1);
        assert!(hilbert_oracle(20_000, 3, Place::Prime(3)).is_err());
        assert!(hilbert_oracle(0, 3, Place::Prime(3)).is_err());
    }

    #[test]
    fn oracle_agrees_on_small_window() {
        for a in -12i64..=12 {
            for bb in -12i64..=12 {
                if a == 0 || bb == 0 {
                    continue;
                }
                for v in [Place::Infinity, Place::Prime(2), Place::Prime(3), Place::Prime(5)] {
                    assert_eq!(
                        hilbert_symbol(&rat(a), &rat(bb), v).unwrap(),
                        hilbert_oracle(a, bb, v).unwrap(),
                        "({a},{bb})_{v}"
                    );
                }
            }
        }
    }

    #[test]
    fn steinberg_relations() {
        for a in -20i64..=20 {
            if a == 0 || a == 1 {
                continue;
            }
            for v in [Place::Infinity, Place::Prime(2), Place::Prime(3), Place::Prime(5), Place::Prime(7)] {
                assert_eq!(hilbert_symbol(&rat(a), &rat(-a), v).unwrap(), 1);
                assert_eq!(hilbert_symbol(&rat(a), &rat(1 - a), v).unwrap(), 1);
            }
        }
    }

    #[test]
    fn parse_rationals() {
        assert_eq!(parse_rational(" -3/6 ").unwrap(), ratio(-1, 2));
        assert_eq!(parse_rational("7").unwrap(), rat(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn rational_square_roots() {
        assert_eq!(rational_sqrt(&ratio(9, 4)), Some(ratio(3, 2)));
        assert_eq!(rational_sqrt(&rat(2)), None);
        assert_eq!(rational_sqrt(&rat(-4)), None);
    }
}
