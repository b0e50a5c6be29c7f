//! Clifford algebras of diagonal forms over Q or a multiquadratic field, the
//! norm `N(x) = xᵗ·x`, the Pin group `Õ(q) = ker N`, the covering map
//! `r_q(x): v ↦ ε·x·v·x⁻¹`, and Pin lifts of explicit isometries.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed};

use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::galois::SquareClass;
use crate::linalg::{Matrix, Scalar};
use crate::multiquad::{FieldElement, GaloisElement, MultiQuadField};
use crate::quadform::DiagonalForm;

pub const MAX_CLIFFORD_RANK: usize = 8;

/// Matrices over a multiquadratic field.
pub type LMatrix = Matrix<FieldElement>;

/// `C(q) ⊗ L` for a diagonal form `q = ⟨a₁..aₙ⟩` over Q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliffordAlgebra {
    form: DiagonalForm,
    field: Arc<MultiQuadField>,
    /// `a_product[S] = Π_{i∈S} aᵢ`.
    a_product: Vec<Rational>,
}

impl CliffordAlgebra {
    pub fn new(form: &DiagonalForm, field: &Arc<MultiQuadField>) -> Result<Arc<CliffordAlgebra>> {
        let n = form.rank();
        if n > MAX_CLIFFORD_RANK {
            return Err(Error::OutOfRange(format!(
                "Clifford algebras of rank above {MAX_CLIFFORD_RANK} are not supported"
            )));
        }
        let a_product = (0..1u32 << n)
            .map(|s| {
                (0..n)
                    .filter(|i| s >> i & 1 == 1)
                    .fold(Rational::one(), |acc, i| acc * &form.entries()[i])
            })
            .collect();
        Ok(Arc::new(CliffordAlgebra { form: form.clone(), field: field.clone(), a_product }))
    }

    pub fn rational(form: &DiagonalForm) -> Result<Arc<CliffordAlgebra>> {
        CliffordAlgebra::new(form, &MultiQuadField::rationals())
    }

    /// The same algebra with scalars extended to `field`.
    pub fn over(&self, field: &Arc<MultiQuadField>) -> Arc<CliffordAlgebra> {
        Arc::new(CliffordAlgebra {
            form: self.form.clone(),
            field: field.clone(),
            a_product: self.a_product.clone(),
        })
    }

    pub fn form(&self) -> &DiagonalForm {
        &self.form
    }

    pub fn field(&self) -> &Arc<MultiQuadField> {
        &self.field
    }

    pub fn rank(&self) -> usize {
        self.form.rank()
    }

    pub fn dim(&self) -> usize {
        1 << self.rank()
    }

    /// `e_S · e_T = ±(Π_{i∈S∩T} aᵢ) · e_{S△T}`; returns (negative, factor, S△T).
    fn blade_product(&self, s: u32, t: u32) -> (bool, &Rational, u32) {
        let mut swaps = 0;
        let mut rest = t;
        while rest != 0 {
            let j = rest.trailing_zeros();
            swaps += (s >> (j + 1)).count_ones();
            rest &= rest - 1;
        }
        (swaps % 2 == 1, &self.a_product[(s & t) as usize], s ^ t)
    }

    /// `q(v) = Σ aᵢ vᵢ²` for `v` over the field.
    pub fn quadratic_value(&self, v: &[FieldElement]) -> FieldElement {
        self.form
            .entries()
            .iter()
            .zip(v)
            .fold(FieldElement::zero(&self.field), |acc, (a, x)| acc.add(&x.mul(x).scale(a)))
    }

    pub fn bilinear(&self, v: &[FieldElement], w: &[FieldElement]) -> FieldElement {
        self.form
            .entries()
            .iter()
            .zip(v.iter().zip(w))
            .fold(FieldElement::zero(&self.field), |acc, (a, (x, y))| acc.add(&x.mul(y).scale(a)))
    }

    /// The Gram matrix `diag(a)` over the field.
    pub fn gram(&self) -> LMatrix {
        let entries: Vec<FieldElement> = self
            .form
            .entries()
            .iter()
            .map(|a| FieldElement::from_rational(&self.field, a.clone()))
            .collect();
        Matrix::diagonal(&entries)
    }

    pub fn is_isometry(&self, m: &LMatrix) -> bool {
        m.rows() == self.rank() && m.is_square() && m.congruence(&self.gram()) == self.gram()
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct CliffordElement {
    alg: Arc<CliffordAlgebra>,
    coeffs: Vec<FieldElement>,
}

impl fmt::Debug for CliffordElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CliffordElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (s, c) in self.support() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let blade: String = (0..self.alg.rank())
                .filter(|i| s >> i & 1 == 1)
                .map(|i| format!("e{}", i + 1))
                .collect();
            if blade.is_empty() {
                write!(f, "({c})")?;
            } else {
                write!(f, "({c}){blade}")?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl CliffordElement {
    pub fn zero(alg: &Arc<CliffordAlgebra>) -> CliffordElement {
        CliffordElement { alg: alg.clone(), coeffs: vec![FieldElement::zero(&alg.field); alg.dim()] }
    }

    pub fn scalar(alg: &Arc<CliffordAlgebra>, c: FieldElement) -> CliffordElement {
        CliffordElement::blade(alg, 0, c)
    }

    pub fn one(alg: &Arc<CliffordAlgebra>) -> CliffordElement {
        CliffordElement::scalar(alg, FieldElement::from_int(&alg.field, 1))
    }

    /// `c · e_S` for the basis blade `S` (bitmask of basis vectors).
    pub fn blade(alg: &Arc<CliffordAlgebra>, s: u32, c: FieldElement) -> CliffordElement {
        let mut x = CliffordElement::zero(alg);
        x.coeffs[s as usize] = c;
        x
    }

    /// The basis vector `e_i` (zero-based).
    pub fn basis_vector(alg: &Arc<CliffordAlgebra>, i: usize) -> CliffordElement {
        CliffordElement::blade(alg, 1 << i, FieldElement::from_int(&alg.field, 1))
    }

    pub fn vector(alg: &Arc<CliffordAlgebra>, v: &[FieldElement]) -> Result<CliffordElement> {
        if v.len() != alg.rank() {
            return Err(Error::Mismatch(format!(
                "vector of length {} in a rank-{} algebra",
                v.len(),
                alg.rank()
            )));
        }
        let mut x = CliffordElement::zero(alg);
        for (i, c) in v.iter().enumerate() {
            x.coeffs[1 << i] = c.embed(&alg.field)?;
        }
        Ok(x)
    }

    pub fn algebra(&self) -> &Arc<CliffordAlgebra> {
        &self.alg
    }

    pub fn coefficient(&self, s: u32) -> &FieldElement {
        &self.coeffs[s as usize]
    }

    pub fn support(&self) -> impl Iterator<Item = (u32, &FieldElement)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(s, c)| (s as u32, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(FieldElement::is_zero)
    }

    pub fn as_scalar(&self) -> Option<&FieldElement> {
        self.coeffs[1..].iter().all(FieldElement::is_zero).then(|| &self.coeffs[0])
    }

    /// Coordinates when the element lies in `V = span(e₁..eₙ)`.
    pub fn as_vector(&self) -> Option<Vec<FieldElement>> {
        self.support()
            .all(|(s, _)| s.count_ones() == 1)
            .then(|| (0..self.alg.rank()).map(|i| self.coeffs[1 << i].clone()).collect())
    }

    /// `Some(false)` if even, `Some(true)` if odd, `None` if mixed. Zero is even.
    pub fn parity(&self) -> Option<bool> {
        let mut parities = self.support().map(|(s, _)| s.count_ones() % 2 == 1);
        let Some(first) = parities.next() else {
            return Some(false);
        };
        parities.all(|p| p == first).then_some(first)
    }

    fn check_same_algebra(&self, rhs: &CliffordElement) -> Result<()> {
        if Arc::ptr_eq(&self.alg, &rhs.alg) || self.alg == rhs.alg {
            Ok(())
        } else {
            Err(Error::Mismatch(format!(
                "Clifford elements over {} / {} and {} / {}",
                self.alg.form, self.alg.field, rhs.alg.form, rhs.alg.field
            )))
        }
    }

    pub fn try_mul(&self, rhs: &CliffordElement) -> Result<CliffordElement> {
        self.check_same_algebra(rhs)?;
        let mut out = CliffordElement::zero(&self.alg);
        for (s, x) in self.support() {
            for (t, y) in rhs.support() {
                let (negative, factor, u) = self.alg.blade_product(s, t);
                let mut term = x.mul(y);
                if !factor.is_one() {
                    term = term.scale(factor);
                }
                let slot = &mut out.coeffs[u as usize];
                *slot = if negative { slot.sub(&term) } else { slot.add(&term) };
            }
        }
        Ok(out)
    }

    /// Clifford product; panics when the operands live in different algebras.
    pub fn mul(&self, rhs: &CliffordElement) -> CliffordElement {
        self.try_mul(rhs).expect("Clifford operands from the same algebra")
    }

    pub fn add(&self, rhs: &CliffordElement) -> CliffordElement {
        self.check_same_algebra(rhs).expect("Clifford operands from the same algebra");
        CliffordElement {
            alg: self.alg.clone(),
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn neg(&self) -> CliffordElement {
        CliffordElement { alg: self.alg.clone(), coeffs: self.coeffs.iter().map(FieldElement::neg).collect() }
    }

    pub fn scale(&self, c: &FieldElement) -> CliffordElement {
        CliffordElement { alg: self.alg.clone(), coeffs: self.coeffs.iter().map(|x| x.mul(c)).collect() }
    }

    /// The transpose (reversion) anti-automorphism: `e_{i₁}⋯e_{i_k} ↦ e_{i_k}⋯e_{i₁}`.
    pub fn reversion(&self) -> CliffordElement {
        CliffordElement {
            alg: self.alg.clone(),
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(s, c)| {
                    let k = (s as u32).count_ones();
                    if (k * (k.saturating_sub(1)) / 2) % 2 == 1 {
                        c.neg()
                    } else {
                        c.clone()
                    }
                })
                .collect(),
        }
    }

    /// The grade involution `e_S ↦ (−1)^{|S|} e_S`.
    pub fn grade_involution(&self) -> CliffordElement {
        CliffordElement {
            alg: self.alg.clone(),
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(s, c)| if (s as u32).count_ones() % 2 == 1 { c.neg() } else { c.clone() })
                .collect(),
        }
    }

    pub fn even_part(&self) -> CliffordElement {
        self.graded_part(false)
    }

    pub fn odd_part(&self) -> CliffordElement {
        self.graded_part(true)
    }

    fn graded_part(&self, odd: bool) -> CliffordElement {
        CliffordElement {
            alg: self.alg.clone(),
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(s, c)| {
                    if ((s as u32).count_ones() % 2 == 1) == odd {
                        c.clone()
                    } else {
                        c.zero_like()
                    }
                })
                .collect(),
        }
    }

    /// `N(x) = xᵗ·x`. Defined on the Clifford group, where it is a scalar.
    pub fn norm(&self) -> Result<FieldElement> {
        self.reversion()
            .mul(self)
            .as_scalar()
            .cloned()
            .ok_or_else(|| Error::InvalidInput("norm is not scalar: not a product of vectors".into()))
    }

    /// Acts on coefficients.
    pub fn galois_act(&self, g: GaloisElement) -> CliffordElement {
        CliffordElement { alg: self.alg.clone(), coeffs: self.coeffs.iter().map(|c| c.galois_act(g)).collect() }
    }

    /// The same element in `C(q) ⊗ L'` for a field `L'` extending the current one.
    pub fn embed(&self, field: &Arc<MultiQuadField>) -> Result<CliffordElement> {
        if Arc::ptr_eq(&self.alg.field, field) {
            return Ok(self.clone());
        }
        let alg = self.alg.over(field);
        Ok(CliffordElement {
            coeffs: self.coeffs.iter().map(|c| c.embed(field)).collect::<Result<_>>()?,
            alg,
        })
    }

    pub fn embed_into(&self, alg: &Arc<CliffordAlgebra>) -> Result<CliffordElement> {
        if alg.form != self.alg.form {
            return Err(Error::Mismatch("different forms".into()));
        }
        Ok(CliffordElement {
            coeffs: self.coeffs.iter().map(|c| c.embed(&alg.field)).collect::<Result<_>>()?,
            alg: alg.clone(),
        })
    }

    /// First nonzero rational coefficient, scanning blades then field subsets.
    fn leading_negative(&self) -> bool {
        self.support().next().is_some_and(|(_, c)| c.leading_sign_negative())
    }
}

/// An element of `Õ(q)`: homogeneous, with `N(x) = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PinElement {
    elt: CliffordElement,
    odd: bool,
}

impl PinElement {
    pub fn one(alg: &Arc<CliffordAlgebra>) -> PinElement {
        PinElement { elt: CliffordElement::one(alg), odd: false }
    }

    /// Validates homogeneity and `N(x) = 1`.
    pub fn new(elt: CliffordElement) -> Result<PinElement> {
        let odd = elt
            .parity()
            .ok_or_else(|| Error::InvalidInput("Pin elements are homogeneous".into()))?;
        if !elt.norm()?.eq_one() {
            return Err(Error::InvalidInput("Pin elements have norm 1".into()));
        }
        Ok(PinElement { elt, odd })
    }

    pub fn element(&self) -> &CliffordElement {
        &self.elt
    }

    pub fn is_odd(&self) -> bool {
        self.odd
    }

    pub fn epsilon(&self) -> i64 {
        if self.odd {
            -1
        } else {
            1
        }
    }

    pub fn algebra(&self) -> &Arc<CliffordAlgebra> {
        &self.elt.alg
    }

    pub fn mul(&self, rhs: &PinElement) -> PinElement {
        PinElement { elt: self.elt.mul(&rhs.elt), odd: self.odd ^ rhs.odd }
    }

    /// `x⁻¹ = xᵗ` since `xᵗ·x = N(x) = 1`.
    pub fn inverse(&self) -> PinElement {
        PinElement { elt: self.elt.reversion(), odd: self.odd }
    }

    pub fn neg(&self) -> PinElement {
        PinElement { elt: self.elt.neg(), odd: self.odd }
    }

    pub fn galois_act(&self, g: GaloisElement) -> PinElement {
        PinElement { elt: self.elt.galois_act(g), odd: self.odd }
    }

    pub fn embed(&self, field: &Arc<MultiQuadField>) -> Result<PinElement> {
        Ok(PinElement { elt: self.elt.embed(field)?, odd: self.odd })
    }

    /// `Some(±1)` when the element is the scalar ±1.
    pub fn as_sign(&self) -> Option<i8> {
        is_sign(&self.elt)
    }

    /// Representative of `±self` whose first nonzero coefficient is positive.
    pub fn canonical_sign(self) -> PinElement {
        if self.elt.leading_negative() {
            self.neg()
        } else {
            self
        }
    }

    /// `r_q(x)(v) = ε·x·v·x⁻¹`.
    pub fn apply(&self, v: &[FieldElement]) -> Result<Vec<FieldElement>> {
        let alg = &self.elt.alg;
        let v = CliffordElement::vector(alg, v)?;
        let mut w = self.elt.mul(&v).mul(&self.inverse().elt);
        if self.odd {
            w = w.neg();
        }
        w.as_vector()
            .ok_or_else(|| Error::InvalidInput("conjugate of a vector left V".into()))
    }

    /// Matrix of `r_q(x)` in the basis `e₁..eₙ` (columns are images).
    pub fn orthogonal_matrix(&self) -> LMatrix {
        let alg = &self.elt.alg;
        let n = alg.rank();
        let zero = FieldElement::zero(&alg.field);
        let one = FieldElement::from_int(&alg.field, 1);
        let cols: Vec<Vec<FieldElement>> = (0..n)
            .map(|j| {
                let e: Vec<FieldElement> = (0..n).map(|i| if i == j { one.clone() } else { zero.clone() }).collect();
                self.apply(&e).expect("Pin elements normalize V")
            })
            .collect();
        Matrix::from_fn(n, n, |i, j| cols[j][i].clone())
    }
}

/// `norm_N` for an element given as a Clifford-group element.
pub fn norm(x: &CliffordElement) -> Result<FieldElement> {
    x.norm()
}

/// A Pin lift together with the field it was built over.
#[derive(Clone, Debug)]
pub struct Lift {
    pub pin: PinElement,
    pub field: Arc<MultiQuadField>,
    /// Reflection vectors `v₁..v_m` with `M = τ_{v₁}⋯τ_{v_m}`, over the input field.
    pub reflections: Vec<Vec<FieldElement>>,
}

/// `v/√q(v)`, an odd Pin element whose image under `r_q` is the reflection in `v`.
///
/// The field is enlarged by `√q(v)` when needed; `q(v)` must be rational.
pub fn lift_reflection(alg: &Arc<CliffordAlgebra>, v: &[FieldElement]) -> Result<Lift> {
    let v: Vec<FieldElement> = v.iter().map(|x| x.embed(alg.field())).collect::<Result<_>>()?;
    let v = v.as_slice();
    let qv = alg.quadratic_value(v);
    if qv.is_zero() {
        return Err(Error::InvalidInput("cannot reflect in an isotropic vector".into()));
    }
    let norm = qv.as_rational().ok_or_else(|| {
        Error::UnsupportedSplittingField(format!("reflection norm {qv} is not rational"))
    })?;
    let class = SquareClass::from_rational(norm)?;
    let d = class.rep_i64().ok_or_else(|| {
        Error::UnsupportedSplittingField(format!("square class {class} exceeds the radicand range"))
    })?;
    let adjoined = alg.field().adjoin(d)?;
    let field = adjoined.field;
    let root = field.sqrt_of_rational(norm).expect("√q(v) lies in the enlarged field");
    let big = alg.over(&field);
    let vec = CliffordElement::vector(&big, v)?;
    let pin = PinElement { elt: vec.scale(&root.inv()?), odd: true };
    debug_assert!(pin.elt.norm().is_ok_and(|n| n.eq_one()));
    Ok(Lift { pin, field, reflections: vec![v.to_vec()] })
}

fn unit_vector(field: &Arc<MultiQuadField>, n: usize, i: usize) -> Vec<FieldElement> {
    (0..n)
        .map(|j| FieldElement::from_int(field, (i == j) as i64))
        .collect()
}

/// Applies the reflection `τ_v(x) = x − 2·b(x,v)/q(v)·v` to every column of `m`.
fn reflect_columns(alg: &CliffordAlgebra, m: &LMatrix, v: &[FieldElement]) -> Result<LMatrix> {
    let qv_inv = alg.quadratic_value(v).inv()?;
    let two = FieldElement::from_int(alg.field(), 2);
    let n = m.rows();
    let mut out = m.clone();
    for j in 0..n {
        let col = m.column(j);
        let c = two.mul(&alg.bilinear(&col, v)).mul(&qv_inv);
        for i in 0..n {
            out.set(i, j, col[i].sub(&c.mul(&v[i])));
        }
    }
    Ok(out)
}

/// Cartan–Dieudonné factorization `M = τ_{v₁}⋯τ_{v_m}` with `m ≤ 2n`.
///
/// Columns are processed left to right: the current column `u` is moved to
/// `eᵢ` by the reflection in `u − eᵢ`, or, when that vector is isotropic, by
/// the reflection in `u + eᵢ` followed by the reflection in `eᵢ`.
pub fn reflection_decomposition(alg: &Arc<CliffordAlgebra>, m: &LMatrix) -> Result<Vec<Vec<FieldElement>>> {
    let m = &embed_matrix(m, alg.field())?;
    if !alg.is_isometry(m) {
        return Err(Error::InvalidInput("matrix is not an isometry of the form".into()));
    }
    let n = alg.rank();
    let field = alg.field();
    let mut current = m.clone();
    let mut reflections = Vec::new();
    for i in 0..n {
        let u = current.column(i);
        let e = unit_vector(field, n, i);
        if u == e {
            continue;
        }
        let diff: Vec<FieldElement> = u.iter().zip(&e).map(|(a, b)| a.sub(b)).collect();
        if !alg.quadratic_value(&diff).is_zero() {
            current = reflect_columns(alg, &current, &diff)?;
            reflections.push(diff);
        } else {
            let sum: Vec<FieldElement> = u.iter().zip(&e).map(|(a, b)| a.add(b)).collect();
            current = reflect_columns(alg, &current, &sum)?;
            current = reflect_columns(alg, &current, &e)?;
            reflections.push(sum);
            reflections.push(e);
        }
    }
    debug_assert!(current.is_identity());
    // τ_m⋯τ_1·M = 1, so M = τ_1⋯τ_m
    Ok(reflections)
}

/// A Pin lift `s` of the isometry `M` (so `r_q(s) = M`), unique up to sign;
/// the representative returned has positive leading coefficient.
pub fn lift_isometry(alg: &Arc<CliffordAlgebra>, m: &LMatrix) -> Result<Lift> {
    let reflections = reflection_decomposition(alg, m)?;
    let mut field = alg.field().clone();
    let mut factors = Vec::with_capacity(reflections.len());
    for v in &reflections {
        let lift = lift_reflection(&alg.over(&field), v)?;
        field = lift.field;
        factors.push(lift.pin);
    }
    let big = alg.over(&field);
    let mut pin = PinElement::one(&big);
    for f in &factors {
        pin = pin.mul(&f.embed(&field)?);
    }
    Ok(Lift { pin: pin.canonical_sign(), field, reflections })
}

/// The graded automorphism `ψ̃_t` of `C(q)` extending an isometry `t`.
#[derive(Clone, Debug)]
pub struct CliffordAutomorphism {
    lift: PinElement,
    epsilon: i64,
}

impl CliffordAutomorphism {
    /// `ψ̃_t` from a Pin lift `s` of `t`: conjugation by `s` on the even part and
    /// `ε`-twisted conjugation on the odd part, `ε = det t`.
    pub fn from_lift(lift: PinElement) -> CliffordAutomorphism {
        let epsilon = lift.epsilon();
        CliffordAutomorphism { lift, epsilon }
    }

    pub fn apply(&self, x: &CliffordElement) -> Result<CliffordElement> {
        let field = common_field(self.lift.algebra().field(), x.algebra().field())?;
        let lift = self.lift.embed(&field)?;
        let x = x.embed(&field)?;
        let s = lift.element();
        let s_inv = lift.inverse();
        let even = s.mul(&x.even_part()).mul(s_inv.element());
        let mut odd = s.mul(&x.odd_part()).mul(s_inv.element());
        if self.epsilon == -1 {
            odd = odd.neg();
        }
        Ok(even.add(&odd))
    }

    pub fn epsilon(&self) -> i64 {
        self.epsilon
    }
}

/// `ψ̃_t` for the isometry `t`, computed from a Pin lift of `t`.
pub fn psi_conjugation(alg: &Arc<CliffordAlgebra>, t: &LMatrix) -> Result<CliffordAutomorphism> {
    Ok(CliffordAutomorphism::from_lift(lift_isometry(alg, t)?.pin))
}

/// The algebra map extending `t` directly: `e_{i₁}⋯e_{i_k} ↦ t(e_{i₁})⋯t(e_{i_k})`.
pub fn graded_extension(alg: &Arc<CliffordAlgebra>, t: &LMatrix, x: &CliffordElement) -> Result<CliffordElement> {
    let x = x.embed_into(alg)?;
    let images: Vec<CliffordElement> = (0..alg.rank())
        .map(|j| {
            let col: Vec<FieldElement> = t.column(j).iter().map(|c| c.embed(alg.field())).collect::<Result<_>>()?;
            CliffordElement::vector(alg, &col)
        })
        .collect::<Result<_>>()?;
    let mut out = CliffordElement::zero(alg);
    for (s, c) in x.support() {
        let mut term = CliffordElement::scalar(alg, c.clone());
        for (i, image) in images.iter().enumerate() {
            if s >> i & 1 == 1 {
                term = term.mul(image);
            }
        }
        out = out.add(&term);
    }
    Ok(out)
}

/// The larger of two nested multiquadratic fields.
pub fn common_field(a: &Arc<MultiQuadField>, b: &Arc<MultiQuadField>) -> Result<Arc<MultiQuadField>> {
    if a.is_subfield_of(b) {
        Ok(b.clone())
    } else if b.is_subfield_of(a) {
        Ok(a.clone())
    } else {
        Err(Error::Mismatch(format!("fields {a} and {b} are not nested")))
    }
}

/// Embeds a rational matrix in `L`.
pub fn lift_matrix(m: &Matrix<Rational>, field: &Arc<MultiQuadField>) -> LMatrix {
    m.map(|x| FieldElement::from_rational(field, x.clone()))
}

/// Embeds every entry of `m` in the larger field.
pub fn embed_matrix(m: &LMatrix, field: &Arc<MultiQuadField>) -> Result<LMatrix> {
    m.try_map(|x| x.embed(field))
}

/// `Some(±1)` when `x` is the scalar ±1.
pub fn is_sign(x: &CliffordElement) -> Option<i8> {
    let c = x.as_scalar()?.as_rational()?;
    if c.abs().is_one() {
        Some(if c.is_negative() { -1 } else { 1 })
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, ratio};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q_alg(a: &[i64]) -> Arc<CliffordAlgebra> {
        CliffordAlgebra::rational(&DiagonalForm::from_ints(a).unwrap()).unwrap()
    }

    fn fe(field: &Arc<MultiQuadField>, n: i64) -> FieldElement {
        FieldElement::from_int(field, n)
    }

    fn qvec(field: &Arc<MultiQuadField>, v: &[i64]) -> Vec<FieldElement> {
        v.iter().map(|&x| fe(field, x)).collect()
    }

    fn qmat(field: &Arc<MultiQuadField>, rows: &[&[i64]]) -> LMatrix {
        Matrix::from_rows(rows.iter().map(|r| qvec(field, r)).collect()).unwrap()
    }

    fn random_element(alg: &Arc<CliffordAlgebra>, rng: &mut ChaCha8Rng) -> CliffordElement {
        let mut x = CliffordElement::zero(alg);
        for s in 0..alg.dim() as u32 {
            if rng.gen_bool(0.5) {
                let c = FieldElement::from_rational(alg.field(), ratio(rng.gen_range(-5..=5), rng.gen_range(1..=3)));
                x = x.add(&CliffordElement::blade(alg, s, c));
            }
        }
        x
    }

    /// Random isometry built as a product of reflections in vectors with
    /// square norms, so that lifts stay over Q.
    fn random_vector_product(alg: &Arc<CliffordAlgebra>, rng: &mut ChaCha8Rng, len: usize) -> CliffordElement {
        let n = alg.rank();
        let mut x = CliffordElement::one(alg);
        for _ in 0..len {
            let v: Vec<FieldElement> = loop {
                let v: Vec<FieldElement> = (0..n).map(|_| fe(alg.field(), rng.gen_range(-3..=3))).collect();
                if !alg.quadratic_value(&v).is_zero() {
                    break v;
                }
            };
            x = x.mul(&CliffordElement::vector(alg, &v).unwrap());
        }
        x
    }

    #[test]
    fn defining_relations() {
        let alg = q_alg(&[2, 3]);
        let f = alg.field().clone();
        let e1 = CliffordElement::basis_vector(&alg, 0);
        let e2 = CliffordElement::basis_vector(&alg, 1);
        assert_eq!(e1.mul(&e2), e2.mul(&e1).neg());
        assert_eq!(e1.mul(&e1), CliffordElement::scalar(&alg, fe(&f, 2)));
        let e12 = e1.mul(&e2);
        assert_eq!(e12.mul(&e12), CliffordElement::scalar(&alg, fe(&f, -6)));
        let other = q_alg(&[1, 1]);
        assert!(e1.try_mul(&CliffordElement::basis_vector(&other, 0)).is_err());
    }

    #[test]
    fn associativity_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for a in [&[1, 1][..], &[2, -3, 5], &[-1, 2, 3, -5]] {
            let alg = q_alg(a);
            for _ in 0..200 {
                let (x, y, z) = (random_element(&alg, &mut rng), random_element(&alg, &mut rng), random_element(&alg, &mut rng));
                assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
            }
        }
    }

    #[test]
    fn associativity_over_a_quadratic_field() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let field = MultiQuadField::new(&[2, -3]).unwrap();
        let alg = CliffordAlgebra::new(&DiagonalForm::from_ints(&[1, -2, 3]).unwrap(), &field).unwrap();
        let r2 = FieldElement::sqrt_radicand(&field, 0);
        for _ in 0..30 {
            let x = random_element(&alg, &mut rng).scale(&r2.add(&fe(&field, 1)));
            let y = random_element(&alg, &mut rng);
            let z = random_element(&alg, &mut rng).scale(&FieldElement::sqrt_radicand(&field, 1));
            assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
        }
    }

    #[test]
    fn norm_examples() {
        let alg = q_alg(&[2, 3]);
        let f = alg.field().clone();
        let e1 = CliffordElement::basis_vector(&alg, 0);
        let e2 = CliffordElement::basis_vector(&alg, 1);
        assert_eq!(norm(&e1).unwrap(), fe(&f, 2));
        assert_eq!(norm(&e1.mul(&e2)).unwrap(), fe(&f, 6));
        // 1 + e1 is not in the Clifford group
        assert!(norm(&CliffordElement::one(&alg).add(&e1)).is_err());

        let l = MultiQuadField::new(&[2]).unwrap();
        let t2 = CliffordAlgebra::new(&DiagonalForm::standard(2), &l).unwrap();
        let v = CliffordElement::vector(&t2, &qvec(&l, &[1, -1])).unwrap();
        let s = v.scale(&FieldElement::sqrt_radicand(&l, 0).inv().unwrap());
        assert!(norm(&s).unwrap().eq_one());
    }

    #[test]
    fn norm_is_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let alg = q_alg(&[1, -2, 3, 5]);
        for _ in 0..50 {
            let (kx, ky) = (rng.gen_range(1..4), rng.gen_range(1..4));
            let x = random_vector_product(&alg, &mut rng, kx);
            let y = random_vector_product(&alg, &mut rng, ky);
            assert_eq!(norm(&x.mul(&y)).unwrap(), norm(&x).unwrap().mul(&norm(&y).unwrap()));
        }
    }

    #[test]
    fn covering_map_examples() {
        // ⟨1,5⟩: e1 has square norm, lift is e1 itself
        let alg = q_alg(&[1, 5]);
        let f = alg.field().clone();
        let x = lift_reflection(&alg, &qvec(&f, &[1, 0])).unwrap();
        assert_eq!(x.field.num_radicands(), 0);
        assert_eq!(x.pin.apply(&qvec(&f, &[1, 0])).unwrap(), qvec(&f, &[-1, 0]));
        assert_eq!(x.pin.apply(&qvec(&f, &[0, 1])).unwrap(), qvec(&f, &[0, 1]));
        assert!(PinElement::one(&alg).orthogonal_matrix().is_identity());

        let t2 = q_alg(&[1, 1]);
        let lift = lift_reflection(&t2, &qvec(&f, &[1, -1])).unwrap();
        assert_eq!(lift.field.radicands(), &[2]);
        let swap = qmat(&lift.field, &[&[0, 1], &[1, 0]]);
        assert_eq!(lift.pin.orthogonal_matrix(), swap);
    }

    #[test]
    fn lift_reflection_examples() {
        let t3 = q_alg(&[1, 1, 1]);
        let q = t3.field().clone();
        let l = lift_reflection(&t3, &qvec(&q, &[1, 0, 0])).unwrap();
        assert_eq!(l.field.num_radicands(), 0);
        assert_eq!(*l.pin.element(), CliffordElement::basis_vector(&t3, 0));

        let a = q_alg(&[3, 1]);
        let l = lift_reflection(&a, &qvec(&q, &[1, 0])).unwrap();
        assert_eq!(l.field.radicands(), &[3]);
        let big = a.over(&l.field);
        let expect = CliffordElement::basis_vector(&big, 0)
            .scale(&FieldElement::sqrt_radicand(&l.field, 0).inv().unwrap());
        assert_eq!(*l.pin.element(), expect);

        let hyp = q_alg(&[1, -1]);
        assert!(lift_reflection(&hyp, &qvec(&q, &[1, 1])).is_err());
    }

    #[test]
    fn lift_isometry_examples() {
        let t2 = q_alg(&[1, 1]);
        let q = t2.field().clone();
        let id = lift_isometry(&t2, &qmat(&q, &[&[1, 0], &[0, 1]])).unwrap();
        assert_eq!(id.pin.as_sign(), Some(1));

        let swap = lift_isometry(&t2, &qmat(&q, &[&[0, 1], &[1, 0]])).unwrap();
        assert_eq!(swap.field.radicands(), &[2]);
        let big = t2.over(&swap.field);
        let v = CliffordElement::vector(&big, &qvec(&swap.field, &[1, -1])).unwrap();
        let expect = v.scale(&FieldElement::sqrt_radicand(&swap.field, 0).inv().unwrap());
        assert!(*swap.pin.element() == expect || *swap.pin.element() == expect.neg());
        assert!(swap.pin.is_odd());

        let minus = lift_isometry(&t2, &qmat(&q, &[&[-1, 0], &[0, -1]])).unwrap();
        let e12 = CliffordElement::basis_vector(&t2, 0).mul(&CliffordElement::basis_vector(&t2, 1));
        assert!(*minus.pin.element() == e12 || *minus.pin.element() == e12.neg());
        assert!(!minus.pin.is_odd());
        assert!(lift_isometry(&t2, &qmat(&q, &[&[2, 0], &[0, 1]])).is_err());
    }

    /// All signed permutation matrices of size n.
    fn signed_permutations(n: usize) -> Vec<Vec<(usize, i64)>> {
        fn perms(n: usize) -> Vec<Vec<usize>> {
            if n == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for p in perms(n - 1) {
                for pos in 0..n {
                    let mut q = p.clone();
                    q.insert(pos, n - 1);
                    out.push(q);
                }
            }
            out
        }
        let mut out = Vec::new();
        for p in perms(n) {
            for signs in 0..1u32 << n {
                out.push(p.iter().enumerate().map(|(i, &j)| (j, if signs >> i & 1 == 1 { -1 } else { 1 })).collect());
            }
        }
        out
    }

    #[test]
    fn lifts_of_signed_permutations() {
        for a in [&[1, 1, 1][..], &[2, 2, -3], &[-1, 5, 5]] {
            let alg = q_alg(a);
            let q = alg.field().clone();
            for sp in signed_permutations(a.len()) {
                // column i of M is sign·e_{p(i)}
                let m = Matrix::from_fn(a.len(), a.len(), |r, c| {
                    let (j, s) = sp[c];
                    fe(&q, if r == j { s } else { 0 })
                });
                if !alg.is_isometry(&m) {
                    assert!(lift_isometry(&alg, &m).is_err());
                    continue;
                }
                let lift = lift_isometry(&alg, &m).unwrap();
                // reflect_columns applies τ on the left, so fold from the last reflection
                let mut forward = lift_matrix(&Matrix::identity(a.len(), &rat(1)), &q);
                for v in lift.reflections.iter().rev() {
                    forward = reflect_columns(&alg, &forward, v).unwrap();
                }
                assert_eq!(forward, m, "reflection product");
                let r = lift.pin.orthogonal_matrix();
                assert_eq!(r, embed_matrix(&m, &lift.field).unwrap());
                let det = m.det();
                assert_eq!(lift.pin.is_odd(), det == fe(&q, -1));
                assert!(lift.pin.element().norm().unwrap().eq_one());
            }
        }
    }

    #[test]
    fn covering_map_is_a_homomorphism_with_kernel_pm1() {
        let alg = q_alg(&[1, 1, 2]);
        let q = alg.field().clone();
        let mats: Vec<LMatrix> = vec![
            qmat(&q, &[&[0, 1, 0], &[1, 0, 0], &[0, 0, 1]]),
            qmat(&q, &[&[1, 0, 0], &[0, -1, 0], &[0, 0, -1]]),
            qmat(&q, &[&[0, -1, 0], &[1, 0, 0], &[0, 0, -1]]),
        ];
        let lifts: Vec<Lift> = mats.iter().map(|m| lift_isometry(&alg, m).unwrap()).collect();
        let field = MultiQuadField::new(&[2]).unwrap();
        for (x, mx) in lifts.iter().zip(&mats) {
            for (y, my) in lifts.iter().zip(&mats) {
                let x = x.pin.embed(&field).unwrap();
                let y = y.pin.embed(&field).unwrap();
                let prod = x.mul(&y);
                let expect = embed_matrix(&mx.mul(my), &field).unwrap();
                assert_eq!(prod.orthogonal_matrix(), expect);
                // x·y and the lift of the product agree up to sign
                let direct = lift_isometry(&alg.over(&field), &expect).unwrap().pin;
                let ratio = prod.mul(&direct.inverse());
                assert!(ratio.as_sign().is_some());
                assert!(ratio.orthogonal_matrix().is_identity());
            }
        }
    }

    #[test]
    fn psi_matches_graded_extension() {
        let alg = q_alg(&[1, 1, 1]);
        let q = alg.field().clone();
        let t_list = [
            qmat(&q, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]),
            qmat(&q, &[&[-1, 0, 0], &[0, 1, 0], &[0, 0, 1]]),
            qmat(&q, &[&[0, 1, 0], &[1, 0, 0], &[0, 0, 1]]),
            qmat(&q, &[&[0, 0, 1], &[1, 0, 0], &[0, 1, 0]]),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let field = MultiQuadField::new(&[2]).unwrap();
        let big = alg.over(&field);
        for t in &t_list {
            let psi = psi_conjugation(&alg, t).unwrap();
            assert_eq!(psi.epsilon(), if t.det() == fe(&q, -1) { -1 } else { 1 });
            let tl = embed_matrix(t, &field).unwrap();
            for _ in 0..10 {
                let x = random_element(&big, &mut rng);
                let lhs = psi.apply(&x).unwrap().embed(&field).unwrap();
                assert_eq!(lhs, graded_extension(&big, &tl, &x).unwrap());
            }
            // restricted to V, ψ̃_t is t
            for i in 0..3 {
                let e = CliffordElement::basis_vector(&big, i);
                let image = psi.apply(&e).unwrap().embed(&field).unwrap();
                assert_eq!(image.as_vector().unwrap(), tl.column(i));
            }
        }
        // ψ̃_{a∘t} = ψ̃_a ∘ ψ̃_t
        for a in &t_list {
            for t in &t_list {
                let at = psi_conjugation(&alg, &a.mul(t)).unwrap();
                let pa = psi_conjugation(&alg, a).unwrap();
                let pt = psi_conjugation(&alg, t).unwrap();
                for _ in 0..5 {
                    let x = random_element(&big, &mut rng);
                    let lhs = at.apply(&x).unwrap().embed(&field).unwrap();
                    let inner = pt.apply(&x).unwrap().embed(&field).unwrap();
                    let rhs = pa.apply(&inner).unwrap().embed(&field).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn pin_constructor_validates() {
        let alg = q_alg(&[1, 1]);
        let e1 = CliffordElement::basis_vector(&alg, 0);
        let e2 = CliffordElement::basis_vector(&alg, 1);
        assert!(PinElement::new(e1.clone()).is_ok());
        assert!(PinElement::new(e1.add(&CliffordElement::one(&alg))).is_err());
        assert!(PinElement::new(e1.add(&e2)).is_err()); // norm 2
        assert_eq!(is_sign(&CliffordElement::one(&alg)), Some(1));
        assert_eq!(is_sign(&CliffordElement::one(&alg).neg()), Some(-1));
        assert_eq!(is_sign(&e1), None);
    }
}
