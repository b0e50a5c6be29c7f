//! Multiquadratic fields `Q(√r₁, …, √r_k)` with their `(Z/2)^k` Galois action.
//!
//! An element is a dense table of rational coefficients indexed by subsets
//! `T ⊆ {1..k}` (bitmasks), standing for `Σ c_T · Π_{i∈T} √r_i`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::{rat, rational_sqrt, Rational};
use crate::error::{Error, Result};
use crate::galois::SquareClass;
use crate::linalg::Scalar;

pub const MAX_RADICANDS: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiQuadField {
    radicands: Vec<i64>,
    /// `overlap[m] = Π_{i∈m} r_i`, the rational factor picked up when two
    /// basis monomials share the radicands in `m`.
    overlap: Vec<Rational>,
}

impl MultiQuadField {
    pub fn rationals() -> Arc<MultiQuadField> {
        Arc::new(MultiQuadField { radicands: Vec::new(), overlap: vec![Rational::one()] })
    }

    /// Builds `Q(√r₁, …, √r_k)`; the radicands must be squarefree and
    /// multiplicatively independent modulo squares.
    pub fn new(radicands: &[i64]) -> Result<Arc<MultiQuadField>> {
        if radicands.len() > MAX_RADICANDS {
            return Err(Error::OutOfRange(format!(
                "at most {MAX_RADICANDS} radicands supported, got {}",
                radicands.len()
            )));
        }
        let mut classes = Vec::with_capacity(radicands.len());
        for &r in radicands {
            let c = SquareClass::from_int(r)?;
            if c.rep() != BigInt::from(r) {
                return Err(Error::InvalidInput(format!("radicand {r} is not squarefree")));
            }
            classes.push(c);
        }
        let k = radicands.len();
        for mask in 1u32..(1 << k) {
            let prod = (0..k)
                .filter(|i| mask >> i & 1 == 1)
                .fold(SquareClass::one(), |acc, i| &acc * &classes[i]);
            if prod.is_trivial() {
                return Err(Error::InvalidInput(format!(
                    "radicands {radicands:?} are not independent modulo squares"
                )));
            }
        }
        let overlap = (0..1u32 << k)
            .map(|m| {
                (0..k)
                    .filter(|i| m >> i & 1 == 1)
                    .fold(Rational::one(), |acc, i| acc * rat(radicands[i]))
            })
            .collect();
        Ok(Arc::new(MultiQuadField { radicands: radicands.to_vec(), overlap }))
    }

    pub fn radicands(&self) -> &[i64] {
        &self.radicands
    }

    pub fn num_radicands(&self) -> usize {
        self.radicands.len()
    }

    /// `[L : Q] = 2^k`.
    pub fn degree(&self) -> usize {
        1 << self.radicands.len()
    }

    /// `Π_{i∈mask} r_i`.
    pub fn radicand_product(&self, mask: u32) -> &Rational {
        &self.overlap[mask as usize]
    }

    pub fn is_subfield_of(&self, other: &MultiQuadField) -> bool {
        other.radicands.starts_with(&self.radicands)
    }

    pub fn galois_group(&self) -> impl Iterator<Item = GaloisElement> {
        (0..1u32 << self.radicands.len()).map(GaloisElement)
    }

    /// Generators: the automorphisms flipping a single square root.
    pub fn galois_generators(&self) -> impl Iterator<Item = GaloisElement> {
        (0..self.radicands.len()).map(|i| GaloisElement(1 << i))
    }

    /// If `d` is a rational square times some `Π_{i∈T} r_i`, returns `(T, c)` with
    /// `d = c² · Π_{i∈T} r_i`, `c > 0`.
    pub fn find_square_root(&self, d: &Rational) -> Option<(u32, Rational)> {
        if d.is_zero() {
            return None;
        }
        (0..1u32 << self.radicands.len()).find_map(|mask| {
            rational_sqrt(&(d / self.radicand_product(mask))).map(|c| (mask, c))
        })
    }

    pub fn sqrt_of_rational(self: &Arc<Self>, d: &Rational) -> Option<FieldElement> {
        self.find_square_root(d)
            .map(|(mask, c)| FieldElement::monomial(self, mask, c))
    }

    /// `Q(√r₁,…,√r_k)` enlarged so that it contains `√d`.
    pub fn adjoin(self: &Arc<Self>, d: i64) -> Result<Adjoined> {
        if d == 0 {
            return Err(Error::InvalidInput("cannot adjoin √0".into()));
        }
        if let Some(sqrt) = self.sqrt_of_rational(&rat(d)) {
            return Ok(Adjoined { field: self.clone(), sqrt, extended: false });
        }
        let class = SquareClass::from_int(d)?;
        let rep = class
            .rep_i64()
            .ok_or_else(|| Error::OutOfRange(format!("radicand of {d} exceeds i64")))?;
        let mut radicands = self.radicands.clone();
        radicands.push(rep);
        let field = MultiQuadField::new(&radicands)?;
        let sqrt = field
            .sqrt_of_rational(&rat(d))
            .expect("√d lies in the enlarged field");
        Ok(Adjoined { field, sqrt, extended: true })
    }

    /// The squarefree `d` with `Q(√d)` the fixed field of the kernel of the
    /// character `g ↦ (-1)^{|g ∩ mask|}`.
    pub fn character_radicand(&self, mask: u32) -> SquareClass {
        SquareClass::from_rational(self.radicand_product(mask)).expect("nonzero")
    }
}

impl fmt::Display for MultiQuadField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Q(")?;
        for (i, r) in self.radicands.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "√{r}")?;
        }
        f.write_str(")")
    }
}

/// Result of [`MultiQuadField::adjoin`].
#[derive(Clone, Debug)]
pub struct Adjoined {
    pub field: Arc<MultiQuadField>,
    /// A square root of the adjoined number, inside `field`.
    pub sqrt: FieldElement,
    /// Whether a new radicand was appended. Galois elements of the new field
    /// restrict to the old one by dropping the last flip bit.
    pub extended: bool,
}

/// An automorphism of a multiquadratic field: the set of square roots it negates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GaloisElement(pub u32);

impl GaloisElement {
    pub fn identity() -> GaloisElement {
        GaloisElement(0)
    }

    pub fn flips(self) -> u32 {
        self.0
    }

    pub fn compose(self, other: GaloisElement) -> GaloisElement {
        GaloisElement(self.0 ^ other.0)
    }

    /// Restriction to the subfield generated by the first `k` radicands.
    pub fn restrict(self, k: usize) -> GaloisElement {
        GaloisElement(self.0 & ((1u32 << k) - 1))
    }

    /// `(-1)^{|flips ∩ mask|}` as a bit: 1 when `√r_mask` is negated.
    pub fn character(self, mask: u32) -> u8 {
        ((self.0 & mask).count_ones() % 2) as u8
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    field: Arc<MultiQuadField>,
    coeffs: Vec<Rational>,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FieldElement {
    pub fn zero(field: &Arc<MultiQuadField>) -> FieldElement {
        FieldElement { field: field.clone(), coeffs: vec![Rational::zero(); field.degree()] }
    }

    pub fn from_rational(field: &Arc<MultiQuadField>, r: Rational) -> FieldElement {
        FieldElement::monomial(field, 0, r)
    }

    pub fn from_int(field: &Arc<MultiQuadField>, n: i64) -> FieldElement {
        FieldElement::from_rational(field, rat(n))
    }

    /// `c · Π_{i∈mask} √r_i`.
    pub fn monomial(field: &Arc<MultiQuadField>, mask: u32, c: Rational) -> FieldElement {
        let mut x = FieldElement::zero(field);
        x.coeffs[mask as usize] = c;
        x
    }

    /// `√r_i` (zero-based index).
    pub fn sqrt_radicand(field: &Arc<MultiQuadField>, i: usize) -> FieldElement {
        FieldElement::monomial(field, 1 << i, Rational::one())
    }

    pub fn from_coefficients(field: &Arc<MultiQuadField>, coeffs: BTreeMap<u32, Rational>) -> Result<FieldElement> {
        let mut x = FieldElement::zero(field);
        for (mask, c) in coeffs {
            let slot = x.coeffs.get_mut(mask as usize).ok_or_else(|| {
                Error::InvalidInput(format!("subset {mask} out of range for {field}"))
            })?;
            *slot = c;
        }
        Ok(x)
    }

    pub fn field(&self) -> &Arc<MultiQuadField> {
        &self.field
    }

    pub fn coefficient(&self, mask: u32) -> &Rational {
        &self.coeffs[mask as usize]
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Nonzero `(subset, coefficient)` pairs.
    pub fn support(&self) -> impl Iterator<Item = (u32, &Rational)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| (m as u32, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.coeffs[1..].iter().all(Zero::is_zero).then(|| &self.coeffs[0])
    }

    /// `Some((mask, c))` when the element is a single monomial `c·√r_mask`.
    pub fn as_monomial(&self) -> Option<(u32, &Rational)> {
        let mut it = self.support();
        let first = it.next()?;
        it.next().is_none().then_some(first)
    }

    /// First nonzero coefficient in subset order.
    pub fn leading_coefficient(&self) -> Option<&Rational> {
        self.coeffs.iter().find(|c| !c.is_zero())
    }

    fn check_same_field(&self, rhs: &FieldElement) {
        assert!(
            Arc::ptr_eq(&self.field, &rhs.field) || self.field == rhs.field,
            "field elements from different fields: {} vs {}",
            self.field,
            rhs.field
        );
    }

    pub fn add(&self, rhs: &FieldElement) -> FieldElement {
        self.check_same_field(rhs);
        FieldElement {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, rhs: &FieldElement) -> FieldElement {
        self.check_same_field(rhs);
        FieldElement {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn neg(&self) -> FieldElement {
        FieldElement { field: self.field.clone(), coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn scale(&self, r: &Rational) -> FieldElement {
        FieldElement { field: self.field.clone(), coeffs: self.coeffs.iter().map(|c| c * r).collect() }
    }

    /// Subset convolution: `√r_S · √r_T = (Π_{i∈S∩T} r_i) · √r_{S△T}`.
    pub fn mul(&self, rhs: &FieldElement) -> FieldElement {
        self.check_same_field(rhs);
        let mut out = vec![Rational::zero(); self.coeffs.len()];
        for (s, a) in self.support() {
            for (t, b) in rhs.support() {
                let term = a * b;
                let overlap = s & t;
                let term = if overlap == 0 { term } else { term * self.field.radicand_product(overlap) };
                out[(s ^ t) as usize] += term;
            }
        }
        FieldElement { field: self.field.clone(), coeffs: out }
    }

    /// Multiplicative inverse by iterated conjugation: multiplying `x` by its
    /// conjugate under each generator in turn lands in Q.
    pub fn inv(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut cofactor = FieldElement::from_int(&self.field, 1);
        let mut current = self.clone();
        for g in self.field.galois_generators() {
            let conj = current.galois_act(g);
            cofactor = cofactor.mul(&conj);
            current = current.mul(&conj);
        }
        let norm = current.as_rational().expect("norm of a multiquadratic element is rational");
        Ok(cofactor.scale(&norm.recip()))
    }

    /// `c_T ↦ (-1)^{|T ∩ g|} c_T`.
    pub fn galois_act(&self, g: GaloisElement) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(t, c)| if g.character(t as u32) == 1 { -c } else { c.clone() })
                .collect(),
        }
    }

    /// The same number viewed in a larger field whose radicand list extends ours.
    pub fn embed(&self, target: &Arc<MultiQuadField>) -> Result<FieldElement> {
        if Arc::ptr_eq(&self.field, target) {
            return Ok(self.clone());
        }
        if !self.field.is_subfield_of(target) {
            return Err(Error::Mismatch(format!("{} does not embed in {}", self.field, target)));
        }
        let mut x = FieldElement::zero(target);
        x.coeffs[..self.coeffs.len()].clone_from_slice(&self.coeffs);
        Ok(x)
    }

    /// Sign of the first nonzero coefficient.
    pub fn leading_sign_negative(&self) -> bool {
        self.leading_coefficient().is_some_and(Signed::is_negative)
    }
}

impl Scalar for FieldElement {
    fn zero_like(&self) -> Self {
        FieldElement::zero(&self.field)
    }
    fn one_like(&self) -> Self {
        FieldElement::from_int(&self.field, 1)
    }
    fn eq_zero(&self) -> bool {
        FieldElement::is_zero(self)
    }
    fn plus(&self, rhs: &Self) -> Self {
        self.add(rhs)
    }
    fn minus(&self, rhs: &Self) -> Self {
        self.sub(rhs)
    }
    fn times(&self, rhs: &Self) -> Self {
        self.mul(rhs)
    }
    fn negated(&self) -> Self {
        self.neg()
    }
    fn inverse(&self) -> Option<Self> {
        self.inv().ok()
    }
    fn eq_one(&self) -> bool {
        self.as_rational().is_some_and(One::is_one)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (mask, c) in self.support() {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let roots: String = (0..self.field.num_radicands())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| format!("√{}", self.field.radicands[i]))
                .collect();
            if roots.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                f.write_str(&roots)?;
            } else {
                write!(f, "{mag}{roots}")?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_element(field: &Arc<MultiQuadField>, rng: &mut ChaCha8Rng) -> FieldElement {
        let coeffs = (0..field.degree() as u32)
            .filter(|_| rng.gen_bool(0.6))
            .collect::<Vec<_>>()
            .into_iter()
            .map(|m| (m, ratio(rng.gen_range(-9..=9), rng.gen_range(1..=4))))
            .collect();
        FieldElement::from_coefficients(field, coeffs).unwrap()
    }

    #[test]
    fn multiplication_examples() {
        let l = MultiQuadField::new(&[2]).unwrap();
        let s2 = FieldElement::sqrt_radicand(&l, 0);
        assert_eq!(s2.mul(&s2), FieldElement::from_int(&l, 2));
        let one = FieldElement::from_int(&l, 1);
        assert_eq!(one.add(&s2).mul(&one.sub(&s2)), FieldElement::from_int(&l, -1));
        assert_eq!(one.add(&s2).inv().unwrap(), s2.sub(&one));
        assert_eq!(FieldElement::zero(&l).inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn galois_action_examples() {
        let l = MultiQuadField::new(&[2, 3]).unwrap();
        let a = FieldElement::sqrt_radicand(&l, 0);
        let b = FieldElement::sqrt_radicand(&l, 1);
        assert_eq!(a.galois_act(GaloisElement(0b01)), a.neg());
        let x = a.add(&b.scale(&rat(5)));
        assert_eq!(x.galois_act(GaloisElement::identity()), x);
        let ab = a.mul(&b);
        assert_eq!(ab.galois_act(GaloisElement(0b11)), ab);
    }

    #[test]
    fn construction_rejects_dependent_radicands() {
        assert!(MultiQuadField::new(&[2, 3, 6]).is_err());
        assert!(MultiQuadField::new(&[4]).is_err());
        assert!(MultiQuadField::new(&[1]).is_err());
        assert!(MultiQuadField::new(&[-1, 2, 3, 5, 7, 11, 13]).is_err());
        assert!(MultiQuadField::new(&[-1, 2, 3, 5, 7, 11]).is_ok());
    }

    #[test]
    fn adjoin_examples() {
        let l = MultiQuadField::new(&[3]).unwrap();
        let a = l.adjoin(3).unwrap();
        assert!(!a.extended);
        assert_eq!(a.sqrt, FieldElement::sqrt_radicand(&l, 0));
        let a = l.adjoin(12).unwrap();
        assert!(!a.extended);
        assert_eq!(a.sqrt, FieldElement::sqrt_radicand(&l, 0).scale(&rat(2)));
        let a = l.adjoin(2).unwrap();
        assert!(a.extended);
        assert_eq!(a.field.radicands(), &[3, 2]);
        assert_eq!(a.field.galois_group().count(), 4);
        assert_eq!(a.sqrt.mul(&a.sqrt), FieldElement::from_int(&a.field, 2));
        let big = MultiQuadField::new(&[-1, 2, 3, 5, 7, 11]).unwrap();
        assert!(big.adjoin(13).is_err());
        assert!(!big.adjoin(-66).unwrap().extended);
    }

    #[test]
    fn homomorphism_and_inverse_on_random_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for radicands in [&[5][..], &[2, 3], &[-1, 2, 5], &[-3, 2, 7, 5]] {
            let l = MultiQuadField::new(radicands).unwrap();
            for _ in 0..100 {
                let x = random_element(&l, &mut rng);
                let y = random_element(&l, &mut rng);
                for g in l.galois_group() {
                    assert_eq!(x.mul(&y).galois_act(g), x.galois_act(g).mul(&y.galois_act(g)));
                }
                if !x.is_zero() {
                    assert!(x.mul(&x.inv().unwrap()).eq_one());
                }
            }
        }
    }

    #[test]
    fn galois_fixed_elements_are_rational() {
        let l = MultiQuadField::new(&[-1, 2, 3]).unwrap();
        // every basis monomial except 1 is moved by some generator
        for mask in 0..l.degree() as u32 {
            let x = FieldElement::monomial(&l, mask, rat(1));
            let fixed = l.galois_group().all(|g| x.galois_act(g) == x);
            assert_eq!(fixed, mask == 0);
        }
        // and so is any combination involving them
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let x = random_element(&l, &mut rng);
            let fixed = l.galois_group().all(|g| x.galois_act(g) == x);
            assert_eq!(fixed, x.as_rational().is_some());
        }
    }

    #[test]
    fn embedding_preserves_arithmetic() {
        let l = MultiQuadField::new(&[3]).unwrap();
        let big = l.adjoin(2).unwrap().field;
        let x = FieldElement::sqrt_radicand(&l, 0).add(&FieldElement::from_int(&l, 1));
        let y = x.embed(&big).unwrap();
        assert_eq!(x.mul(&x).embed(&big).unwrap(), y.mul(&y));
        let other = MultiQuadField::new(&[5]).unwrap();
        assert!(x.embed(&other).is_err());
    }

    #[test]
    fn display() {
        let l = MultiQuadField::new(&[2, 3]).unwrap();
        let x = FieldElement::from_int(&l, 1)
            .sub(&FieldElement::sqrt_radicand(&l, 0).mul(&FieldElement::sqrt_radicand(&l, 1)).scale(&ratio(1, 2)));
        assert_eq!(x.to_string(), "1 - 1/2√2√3");
        assert_eq!(FieldElement::zero(&l).to_string(), "0");
        assert_eq!(l.to_string(), "Q(√2,√3)");
    }
}
