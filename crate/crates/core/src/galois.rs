//! Degree-1 and degree-2 Galois cohomology of Q with Z/2 coefficients.
//!
//! `H¹(Q, Z/2) = Q*/Q*²` is modelled by [`SquareClass`]; `H²(Q, Z/2)`, the
//! 2-torsion of the Brauer group, by [`BrauerClass`], which records the places
//! where the local invariant is 1/2.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Mul};

use num_bigint::BigInt;
use num_traits::One;

use crate::arith::{self, local_symbol, Place, Rational};
use crate::error::{Error, Result};

/// A class in `Q*/Q*²`, stored as the sign and sorted prime support of its
/// squarefree representative.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SquareClass {
    negative: bool,
    primes: Vec<u64>,
}

impl SquareClass {
    pub fn one() -> SquareClass {
        SquareClass::default()
    }

    pub fn from_rational(r: &Rational) -> Result<SquareClass> {
        let (negative, primes) = arith::square_class_data(r)?;
        Ok(SquareClass { negative, primes })
    }

    pub fn from_int(n: i64) -> Result<SquareClass> {
        SquareClass::from_rational(&arith::rat(n))
    }

    pub fn from_bigint(n: &BigInt) -> Result<SquareClass> {
        SquareClass::from_rational(&Rational::from_integer(n.clone()))
    }

    /// The canonical squarefree integer representative.
    pub fn rep(&self) -> BigInt {
        let d = self.primes.iter().fold(BigInt::one(), |acc, &p| acc * BigInt::from(p));
        if self.negative {
            -d
        } else {
            d
        }
    }

    pub fn rep_i64(&self) -> Option<i64> {
        i64::try_from(self.rep()).ok()
    }

    pub fn is_trivial(&self) -> bool {
        !self.negative && self.primes.is_empty()
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub(crate) fn data(&self) -> (bool, &[u64]) {
        (self.negative, &self.primes)
    }

    /// Places outside which `cup(self, other)` is certainly unramified.
    fn bad_places(&self, other: &SquareClass) -> BTreeSet<Place> {
        let mut places: BTreeSet<Place> = self
            .primes
            .iter()
            .chain(&other.primes)
            .map(|&p| Place::Prime(p))
            .collect();
        places.insert(Place::Prime(2));
        places.insert(Place::Infinity);
        places
    }
}

impl Mul for &SquareClass {
    type Output = SquareClass;

    fn mul(self, rhs: &SquareClass) -> SquareClass {
        let lhs: BTreeSet<u64> = self.primes.iter().copied().collect();
        let rhs_set: BTreeSet<u64> = rhs.primes.iter().copied().collect();
        SquareClass {
            // signs multiply: XOR of the negative flags
            #[allow(clippy::suspicious_arithmetic_impl)]
            negative: self.negative ^ rhs.negative,
            primes: lhs.symmetric_difference(&rhs_set).copied().collect(),
        }
    }
}

impl Mul for SquareClass {
    type Output = SquareClass;

    fn mul(self, rhs: SquareClass) -> SquareClass {
        &self * &rhs
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{}⟩", self.rep())
    }
}

/// A 2-torsion Brauer class of Q, given by its (even) set of ramified places.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BrauerClass {
    ramified: BTreeSet<Place>,
}

impl BrauerClass {
    pub fn zero() -> BrauerClass {
        BrauerClass::default()
    }

    pub fn new(ramified: impl IntoIterator<Item = Place>) -> Result<BrauerClass> {
        let ramified: BTreeSet<Place> = ramified.into_iter().collect();
        if ramified.len() % 2 == 1 {
            return Err(Error::InvalidInput(format!(
                "a Brauer class of Q ramifies at an even number of places, got {}",
                ramified.len()
            )));
        }
        for place in &ramified {
            if let Place::Prime(p) = place {
                Place::prime(*p)?;
            }
        }
        Ok(BrauerClass { ramified })
    }

    pub fn ramified(&self) -> &BTreeSet<Place> {
        &self.ramified
    }

    pub fn is_zero(&self) -> bool {
        self.ramified.is_empty()
    }

    /// Local invariant at `v`, as an element of {0, 1} standing for {0, 1/2}.
    pub fn local_invariant(&self, v: Place) -> u8 {
        self.ramified.contains(&v) as u8
    }
}

impl Add for &BrauerClass {
    type Output = BrauerClass;

    fn add(self, rhs: &BrauerClass) -> BrauerClass {
        BrauerClass {
            ramified: self.ramified.symmetric_difference(&rhs.ramified).copied().collect(),
        }
    }
}

impl Add for BrauerClass {
    type Output = BrauerClass;

    fn add(self, rhs: BrauerClass) -> BrauerClass {
        &self + &rhs
    }
}

impl std::iter::Sum for BrauerClass {
    fn sum<I: Iterator<Item = BrauerClass>>(iter: I) -> BrauerClass {
        iter.fold(BrauerClass::zero(), |acc, x| &acc + &x)
    }
}

impl fmt::Display for BrauerClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.ramified.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}

/// The cup product `(a) ∪ (b)`: the class of the quaternion algebra `(a, b)_Q`.
pub fn cup(a: &SquareClass, b: &SquareClass) -> BrauerClass {
    let ramified: BTreeSet<Place> = a
        .bad_places(b)
        .into_iter()
        .filter(|&v| local_symbol(a.data(), b.data(), v) == -1)
        .collect();
    debug_assert!(ramified.len().is_multiple_of(2));
    BrauerClass { ramified }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sq(n: i64) -> SquareClass {
        SquareClass::from_int(n).unwrap()
    }

    fn br(places: &[Place]) -> BrauerClass {
        BrauerClass::new(places.iter().copied()).unwrap()
    }

    const P2: Place = Place::Prime(2);
    const P3: Place = Place::Prime(3);
    const INF: Place = Place::Infinity;

    #[test]
    fn square_class_group_law() {
        assert_eq!(&sq(2) * &sq(2), SquareClass::one());
        assert_eq!(&sq(2) * &sq(3), sq(6));
        assert_eq!(&sq(-5) * &sq(10), sq(-2));
        assert_eq!(sq(-45), sq(-5));
        assert_eq!(sq(12).rep(), BigInt::from(3));
    }

    #[test]
    fn cup_examples() {
        for b in [-7, -1, 2, 3, 30] {
            assert!(cup(&SquareClass::one(), &sq(b)).is_zero());
        }
        assert_eq!(cup(&sq(-1), &sq(-1)), br(&[P2, INF]));
        assert_eq!(cup(&sq(2), &sq(3)), br(&[P2, P3]));
        // ⟨a⟩ ∪ ⟨a⟩ = ⟨a⟩ ∪ ⟨-1⟩
        for a in [-6, -3, 2, 3, 5, 7] {
            assert_eq!(cup(&sq(a), &sq(a)), cup(&sq(a), &sq(-1)));
        }
    }

    #[test]
    fn brauer_addition() {
        assert!((&br(&[P2, P3]) + &br(&[P2, P3])).is_zero());
        assert_eq!(&br(&[P2, P3]) + &br(&[P3, INF]), br(&[P2, INF]));
        assert!((cup(&sq(2), &sq(3)) + cup(&sq(3), &sq(2))).is_zero());
    }

    #[test]
    fn brauer_rejects_odd_sets() {
        assert!(BrauerClass::new([P2]).is_err());
        assert!(BrauerClass::new([Place::Prime(4), P2]).is_err());
    }

    #[test]
    fn rendering() {
        assert_eq!(sq(-12).to_string(), "⟨-3⟩");
        assert_eq!(br(&[INF, P3]).to_string(), "{3,∞}");
        assert_eq!(BrauerClass::zero().to_string(), "{}");
    }

    #[test]
    fn cup_is_biadditive_and_symmetric() {
        let samples = [-6, -5, -3, -2, -1, 1, 2, 3, 5, 6, 7, 10, 15];
        for &a in &samples {
            for &a2 in &samples {
                for &b in &samples {
                    let lhs = cup(&(&sq(a) * &sq(a2)), &sq(b));
                    assert_eq!(lhs, cup(&sq(a), &sq(b)) + cup(&sq(a2), &sq(b)));
                }
                assert_eq!(cup(&sq(a), &sq(a2)), cup(&sq(a2), &sq(a)));
            }
        }
    }

    #[test]
    fn steinberg() {
        for a in -30i64..=30 {
            if a == 0 || a == 1 {
                continue;
            }
            let s = sq(a);
            assert!(cup(&s, &sq(-a)).is_zero(), "(a,-a) a={a}");
            assert!(cup(&s, &sq(1 - a)).is_zero(), "(a,1-a) a={a}");
        }
    }
}
