//! The degree-≤2 truncation of `A[HW₁, HW₂, …]`, where `A` is the mod-2 étale
//! cohomology of the base, together with the classes `det[q]`, `[C_q]` and the
//! unit-group law on elements `1 + a₁ + a₂`.

use std::fmt;

use crate::galois::{cup, BrauerClass, SquareClass};

/// The graded base ring in degrees 1 and 2, with its cup product.
pub trait GradedBase {
    type H1: Clone + PartialEq + fmt::Debug + fmt::Display;
    type H2: Clone + PartialEq + fmt::Debug + fmt::Display;

    fn h1_zero() -> Self::H1;
    fn h1_add(a: &Self::H1, b: &Self::H1) -> Self::H1;
    fn h1_is_zero(a: &Self::H1) -> bool;
    fn h2_zero() -> Self::H2;
    fn h2_add(a: &Self::H2, b: &Self::H2) -> Self::H2;
    fn h2_is_zero(a: &Self::H2) -> bool;
    fn cup(a: &Self::H1, b: &Self::H1) -> Self::H2;
}

/// `H*(Spec Q, Z/2)` in degrees ≤ 2: square classes and 2-torsion Brauer classes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RationalBase;

impl GradedBase for RationalBase {
    type H1 = SquareClass;
    type H2 = BrauerClass;

    fn h1_zero() -> SquareClass {
        SquareClass::one()
    }
    fn h1_add(a: &SquareClass, b: &SquareClass) -> SquareClass {
        a * b
    }
    fn h1_is_zero(a: &SquareClass) -> bool {
        a.is_trivial()
    }
    fn h2_zero() -> BrauerClass {
        BrauerClass::zero()
    }
    fn h2_add(a: &BrauerClass, b: &BrauerClass) -> BrauerClass {
        a + b
    }
    fn h2_is_zero(a: &BrauerClass) -> bool {
        a.is_zero()
    }
    fn cup(a: &SquareClass, b: &SquareClass) -> BrauerClass {
        cup(a, b)
    }
}

/// `c0 + (c1_a + c1_hw1·HW₁) + (c2_a + c2_mix·HW₁ + c2_hw1sq·HW₁² + c2_hw2·HW₂)`.
pub struct UniversalElement<B: GradedBase = RationalBase> {
    pub c0: bool,
    pub c1_a: B::H1,
    pub c1_hw1: bool,
    pub c2_a: B::H2,
    pub c2_mix: B::H1,
    pub c2_hw1sq: bool,
    pub c2_hw2: bool,
}

impl<B: GradedBase> Clone for UniversalElement<B> {
    fn clone(&self) -> Self {
        UniversalElement {
            c0: self.c0,
            c1_a: self.c1_a.clone(),
            c1_hw1: self.c1_hw1,
            c2_a: self.c2_a.clone(),
            c2_mix: self.c2_mix.clone(),
            c2_hw1sq: self.c2_hw1sq,
            c2_hw2: self.c2_hw2,
        }
    }
}

impl<B: GradedBase> PartialEq for UniversalElement<B> {
    fn eq(&self, rhs: &Self) -> bool {
        self.c0 == rhs.c0
            && self.c1_a == rhs.c1_a
            && self.c1_hw1 == rhs.c1_hw1
            && self.c2_a == rhs.c2_a
            && self.c2_mix == rhs.c2_mix
            && self.c2_hw1sq == rhs.c2_hw1sq
            && self.c2_hw2 == rhs.c2_hw2
    }
}

impl<B: GradedBase> fmt::Debug for UniversalElement<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UniversalElement({self})")
    }
}

impl<B: GradedBase> UniversalElement<B> {
    pub fn zero() -> Self {
        UniversalElement {
            c0: false,
            c1_a: B::h1_zero(),
            c1_hw1: false,
            c2_a: B::h2_zero(),
            c2_mix: B::h1_zero(),
            c2_hw1sq: false,
            c2_hw2: false,
        }
    }

    pub fn one() -> Self {
        UniversalElement { c0: true, ..Self::zero() }
    }

    pub fn hw1() -> Self {
        UniversalElement { c1_hw1: true, ..Self::zero() }
    }

    pub fn hw2() -> Self {
        UniversalElement { c2_hw2: true, ..Self::zero() }
    }

    pub fn base1(a: B::H1) -> Self {
        UniversalElement { c1_a: a, ..Self::zero() }
    }

    pub fn base2(a: B::H2) -> Self {
        UniversalElement { c2_a: a, ..Self::zero() }
    }

    pub fn is_zero(&self) -> bool {
        *self == Self::zero()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        UniversalElement {
            c0: self.c0 ^ rhs.c0,
            c1_a: B::h1_add(&self.c1_a, &rhs.c1_a),
            c1_hw1: self.c1_hw1 ^ rhs.c1_hw1,
            c2_a: B::h2_add(&self.c2_a, &rhs.c2_a),
            c2_mix: B::h1_add(&self.c2_mix, &rhs.c2_mix),
            c2_hw1sq: self.c2_hw1sq ^ rhs.c2_hw1sq,
            c2_hw2: self.c2_hw2 ^ rhs.c2_hw2,
        }
    }

    fn degree1(&self) -> Self {
        UniversalElement { c1_a: self.c1_a.clone(), c1_hw1: self.c1_hw1, ..Self::zero() }
    }

    fn degree2(&self) -> Self {
        UniversalElement {
            c2_a: self.c2_a.clone(),
            c2_mix: self.c2_mix.clone(),
            c2_hw1sq: self.c2_hw1sq,
            c2_hw2: self.c2_hw2,
            ..Self::zero()
        }
    }

    fn times_f2(&self, c: bool) -> Self {
        if c {
            self.clone()
        } else {
            Self::zero()
        }
    }

    /// Product truncated above degree 2.
    pub fn mul(&self, rhs: &Self) -> Self {
        let pick = |c: bool, a: &B::H1| if c { a.clone() } else { B::h1_zero() };
        let cross = UniversalElement {
            c2_a: B::cup(&self.c1_a, &rhs.c1_a),
            c2_mix: B::h1_add(&pick(rhs.c1_hw1, &self.c1_a), &pick(self.c1_hw1, &rhs.c1_a)),
            c2_hw1sq: self.c1_hw1 && rhs.c1_hw1,
            ..Self::zero()
        };
        let deg0 = UniversalElement { c0: self.c0 && rhs.c0, ..Self::zero() };
        deg0.add(&rhs.degree1().add(&rhs.degree2()).times_f2(self.c0))
            .add(&self.degree1().add(&self.degree2()).times_f2(rhs.c0))
            .add(&cross)
    }
}

impl<B: GradedBase> fmt::Display for UniversalElement<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        if self.c0 {
            terms.push("1".to_string());
        }
        if !B::h1_is_zero(&self.c1_a) {
            terms.push(self.c1_a.to_string());
        }
        if self.c1_hw1 {
            terms.push("HW1".into());
        }
        if !B::h2_is_zero(&self.c2_a) {
            terms.push(self.c2_a.to_string());
        }
        if !B::h1_is_zero(&self.c2_mix) {
            terms.push(format!("{}·HW1", self.c2_mix));
        }
        if self.c2_hw1sq {
            terms.push("HW1²".into());
        }
        if self.c2_hw2 {
            terms.push("HW2".into());
        }
        if terms.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&terms.join(" + "))
        }
    }
}

/// An element `1 + a₁ + a₂` of the truncated ring.
pub struct TruncatedUnit<B: GradedBase = RationalBase> {
    elt: UniversalElement<B>,
}

impl<B: GradedBase> Clone for TruncatedUnit<B> {
    fn clone(&self) -> Self {
        TruncatedUnit { elt: self.elt.clone() }
    }
}

impl<B: GradedBase> PartialEq for TruncatedUnit<B> {
    fn eq(&self, rhs: &Self) -> bool {
        self.elt == rhs.elt
    }
}

impl<B: GradedBase> fmt::Debug for TruncatedUnit<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruncatedUnit({self})")
    }
}

impl<B: GradedBase> TruncatedUnit<B> {
    pub fn one() -> Self {
        TruncatedUnit { elt: UniversalElement::one() }
    }

    /// `1 + a1 + a2`, keeping only the degree-1 part of `a1` and the degree-2 part of `a2`.
    pub fn new(a1: &UniversalElement<B>, a2: &UniversalElement<B>) -> Self {
        TruncatedUnit { elt: UniversalElement::one().add(&a1.degree1()).add(&a2.degree2()) }
    }

    pub fn element(&self) -> &UniversalElement<B> {
        &self.elt
    }

    pub fn a1(&self) -> UniversalElement<B> {
        self.elt.degree1()
    }

    pub fn a2(&self) -> UniversalElement<B> {
        self.elt.degree2()
    }

    /// `(1+a₁+a₂)(1+b₁+b₂) = 1 + (a₁+b₁) + (a₂+b₂+a₁∪b₁)`.
    pub fn mul(&self, rhs: &Self) -> Self {
        TruncatedUnit { elt: self.elt.mul(&rhs.elt) }
    }

    /// `(1+a₁+a₂)⁻¹ = 1 + a₁ + (a₂ + a₁∪a₁)`.
    pub fn inv(&self) -> Self {
        let a1 = self.a1();
        TruncatedUnit::new(&a1, &self.a2().add(&a1.mul(&a1)))
    }
}

impl<B: GradedBase> fmt::Display for TruncatedUnit<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.elt.fmt(f)
    }
}

/// `det[q] = w₁(q) + HW₁(q)`.
pub fn det_class(w1: &SquareClass) -> UniversalElement {
    UniversalElement::base1(w1.clone()).add(&UniversalElement::hw1())
}

/// `[C_q] = (w₁(q)∪w₁(q) + w₂(q)) + w₁(q)·HW₁(q) + HW₂(q)`.
pub fn cq_class(w1: &SquareClass, w2: &BrauerClass) -> UniversalElement {
    UniversalElement {
        c2_a: &cup(w1, w1) + w2,
        c2_mix: w1.clone(),
        c2_hw2: true,
        ..UniversalElement::zero()
    }
}

/// `s_q = 1 + det[q] + [C_q]`.
pub fn sq_unit(w1: &SquareClass, w2: &BrauerClass) -> TruncatedUnit {
    TruncatedUnit::new(&det_class(w1), &cq_class(w1, w2))
}

/// Expands `T*(s_n)·Θ*(s_n)⁻¹` with `T*(s_n) = 1 + HW₁ + HW₂` and
/// `Θ*(s_n) = 1 + w₁(q) + w₂(q)` and compares it with `1 + det[q] + [C_q]`.
pub fn check_sq_identity(w1: &SquareClass, w2: &BrauerClass) -> bool {
    let universal: TruncatedUnit = TruncatedUnit::new(&UniversalElement::hw1(), &UniversalElement::hw2());
    let classical = TruncatedUnit::new(&UniversalElement::base1(w1.clone()), &UniversalElement::base2(w2.clone()));
    universal.mul(&classical.inv()) == sq_unit(w1, w2)
}

/// A value of the base ring in degrees 0, 1, 2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Specialized {
    pub deg0: bool,
    pub deg1: SquareClass,
    pub deg2: BrauerClass,
}

impl Specialized {
    /// Product in the base ring, truncated above degree 2.
    pub fn mul(&self, rhs: &Specialized) -> Specialized {
        let scale1 = |c: bool, a: &SquareClass| if c { a.clone() } else { SquareClass::one() };
        let scale2 = |c: bool, a: &BrauerClass| if c { a.clone() } else { BrauerClass::zero() };
        Specialized {
            deg0: self.deg0 && rhs.deg0,
            deg1: &scale1(self.deg0, &rhs.deg1) * &scale1(rhs.deg0, &self.deg1),
            deg2: &(&scale2(self.deg0, &rhs.deg2) + &scale2(rhs.deg0, &self.deg2)) + &cup(&self.deg1, &rhs.deg1),
        }
    }
}

/// Pullback along a torsor: `HW₁ ↦ w1α`, `HW₂ ↦ w2α`, `HW₁² ↦ w1α∪w1α`.
pub fn specialize(e: &UniversalElement, w1a: &SquareClass, w2a: &BrauerClass) -> Specialized {
    let deg1 = if e.c1_hw1 { &e.c1_a * w1a } else { e.c1_a.clone() };
    let mut deg2 = &e.c2_a + &cup(&e.c2_mix, w1a);
    if e.c2_hw1sq {
        deg2 = &deg2 + &cup(w1a, w1a);
    }
    if e.c2_hw2 {
        deg2 = &deg2 + w2a;
    }
    Specialized { deg0: e.c0, deg1, deg2 }
}
