//! Twisting forms by Galois 1-cocycles with values in `O(q)`, the boundary
//! classes `δ¹`, `δ²`, and trace forms of étale algebras.
//!
//! A cocycle is given over a multiquadratic field `L`; its values are indexed
//! by the flip bitmask of the Galois element.

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use num_traits::{One, Zero};
use serde_json::{json, Map, Value};

use crate::arith::{parse_rational, rat, Rational};
use crate::clifford::{lift_isometry, CliffordAlgebra, LMatrix, PinElement};
use crate::error::{Error, Result};
use crate::galois::{cup, BrauerClass, SquareClass};
use crate::groupcoh::{decompose_cocycle, inflate_radicands, CupCoefficients, F2Cochain, FiniteGroup};
use crate::linalg::{Matrix, QMatrix};
use crate::multiquad::{FieldElement, GaloisElement, MultiQuadField, MAX_RADICANDS};
use crate::quadform::{json_rational, DiagonalForm, QuadraticForm};

fn identity_matrix(field: &Arc<MultiQuadField>, n: usize) -> LMatrix {
    Matrix::identity(n, &FieldElement::from_int(field, 1))
}

fn galois_matrix(m: &LMatrix, g: GaloisElement) -> LMatrix {
    m.map(|x| x.galois_act(g))
}

fn rational_matrix(m: &QMatrix, field: &Arc<MultiQuadField>) -> LMatrix {
    m.map(|x| FieldElement::from_rational(field, x.clone()))
}

/// A normalized 1-cocycle `Gal(L/Q) → O(q)(L)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrthCocycle {
    field: Arc<MultiQuadField>,
    form: DiagonalForm,
    values: Vec<LMatrix>,
}

impl OrthCocycle {
    /// `values[g]` is `c(g)` for the Galois element with flip bitmask `g`.
    pub fn new(field: &Arc<MultiQuadField>, form: &DiagonalForm, values: Vec<LMatrix>) -> Result<OrthCocycle> {
        if values.len() != field.degree() {
            return Err(Error::InvalidInput(format!(
                "{} cocycle values for a Galois group of order {}",
                values.len(),
                field.degree()
            )));
        }
        let values = values
            .iter()
            .map(|m| m.try_map(|x| x.embed(field)))
            .collect::<Result<Vec<_>>>()?;
        let c = OrthCocycle { field: field.clone(), form: form.clone(), values };
        c.validate()?;
        Ok(c)
    }

    /// Extends values on the generators `σᵢ` (flipping `√rᵢ`) by the cocycle law.
    pub fn from_generators(field: &Arc<MultiQuadField>, form: &DiagonalForm, generators: &[LMatrix]) -> Result<OrthCocycle> {
        let k = field.num_radicands();
        if generators.len() != k {
            return Err(Error::InvalidInput(format!("{} generator values for {k} radicands", generators.len())));
        }
        let n = form.rank();
        let gens = generators
            .iter()
            .map(|m| m.try_map(|x| x.embed(field)))
            .collect::<Result<Vec<_>>>()?;
        let mut values = vec![identity_matrix(field, n); field.degree()];
        for mask in 1..field.degree() {
            let i = mask.trailing_zeros() as usize;
            let rest = mask & (mask - 1);
            let g = GaloisElement(1 << i);
            values[mask] = gens[i].mul(&galois_matrix(&values[rest], g));
        }
        OrthCocycle::new(field, form, values)
    }

    pub fn trivial(field: &Arc<MultiQuadField>, form: &DiagonalForm) -> OrthCocycle {
        let id = identity_matrix(field, form.rank());
        OrthCocycle { field: field.clone(), form: form.clone(), values: vec![id; field.degree()] }
    }

    /// `L = Q(√d)` with `c(σ) = m` for a rational isometry `m` of order ≤ 2.
    pub fn quadratic(form: &DiagonalForm, d: i64, m: &QMatrix) -> Result<OrthCocycle> {
        let field = quadratic_field(d)?;
        OrthCocycle::from_generators(&field, form, &[rational_matrix(m, &field)])
    }

    /// `L = Q(√d)` with `c(σ)` the transposition of basis vectors `i` and `j`.
    pub fn quadratic_swap(form: &DiagonalForm, d: i64, i: usize, j: usize) -> Result<OrthCocycle> {
        let n = form.rank();
        if i >= n || j >= n || i == j {
            return Err(Error::InvalidInput(format!("cannot swap coordinates {i} and {j} in rank {n}")));
        }
        let m = QMatrix::from_fn(n, n, |r, c| {
            let target = if c == i {
                j
            } else if c == j {
                i
            } else {
                c
            };
            Rational::from_integer((r == target).into())
        });
        OrthCocycle::quadratic(form, d, &m)
    }

    fn validate(&self) -> Result<()> {
        let n = self.form.rank();
        let gram = Matrix::diagonal(
            &self
                .form
                .entries()
                .iter()
                .map(|a| FieldElement::from_rational(&self.field, a.clone()))
                .collect::<Vec<_>>(),
        );
        for (g, m) in self.values.iter().enumerate() {
            if m.rows() != n || m.cols() != n {
                return Err(Error::InvalidInput(format!("value at {g} is not {n}×{n}")));
            }
            if m.congruence(&gram) != gram {
                return Err(Error::InvalidInput(format!("value at {g} is not an isometry of {}", self.form)));
            }
        }
        if !self.values[0].is_identity() {
            return Err(Error::NotACocycle("c(1) is not the identity".into()));
        }
        for g in 0..self.values.len() {
            for h in 0..self.values.len() {
                let rhs = self.values[g].mul(&galois_matrix(&self.values[h], GaloisElement(g as u32)));
                if self.values[g ^ h] != rhs {
                    return Err(Error::NotACocycle(format!("c(gh) ≠ c(g)·g(c(h)) at g={g}, h={h}")));
                }
            }
        }
        Ok(())
    }

    pub fn field(&self) -> &Arc<MultiQuadField> {
        &self.field
    }

    pub fn form(&self) -> &DiagonalForm {
        &self.form
    }

    pub fn value(&self, g: GaloisElement) -> &LMatrix {
        &self.values[g.flips() as usize]
    }

    pub fn values(&self) -> &[LMatrix] {
        &self.values
    }

    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(Matrix::is_identity)
    }

    /// The inflation along `Gal(L'/Q) → Gal(L/Q)` for a field `L'` whose
    /// radicand list extends that of `L`.
    pub fn inflate(&self, field: &Arc<MultiQuadField>) -> Result<OrthCocycle> {
        if !self.field.is_subfield_of(field) {
            return Err(Error::Mismatch(format!("{} is not a subfield of {field}", self.field)));
        }
        let k = self.field.num_radicands();
        let values = (0..field.degree() as u32)
            .map(|g| self.values[GaloisElement(g).restrict(k).flips() as usize].try_map(|x| x.embed(field)))
            .collect::<Result<Vec<_>>>()?;
        Ok(OrthCocycle { field: field.clone(), form: self.form.clone(), values })
    }

    /// Inflation to `L(√d)`.
    pub fn adjoin(&self, d: i64) -> Result<OrthCocycle> {
        let field = self.field.adjoin(d)?.field;
        self.inflate(&field)
    }

    /// The cohomologous cocycle `g ↦ p·c(g)·p⁻¹` for a rational isometry `p` of q.
    pub fn conjugate(&self, p: &QMatrix) -> Result<OrthCocycle> {
        let inv = p.inverse().ok_or(Error::Singular)?;
        let (p, inv) = (rational_matrix(p, &self.field), rational_matrix(&inv, &self.field));
        let values = self.values.iter().map(|m| p.mul(m).mul(&inv)).collect();
        OrthCocycle::new(&self.field, &self.form, values)
    }

    /// Parses `{"radicands": [..], "form": [..], "values": {"<flip bitmask>": [[entry, ..], ..]}}`.
    ///
    /// Entries are rationals (strings or integers) or maps from subset bitmask
    /// to rational coefficient. Values may be given on the generators only.
    pub fn from_json(s: &str) -> Result<OrthCocycle> {
        let v: Value = serde_json::from_str(s).map_err(|e| Error::Parse(format!("cocycle: {e}")))?;
        let radicands: Vec<i64> = v
            .get("radicands")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("cocycle: missing \"radicands\" array".into()))?
            .iter()
            .map(|r| r.as_i64().ok_or_else(|| Error::Parse(format!("radicand {r} is not an integer"))))
            .collect::<Result<_>>()?;
        let field = MultiQuadField::new(&radicands)?;
        let form_entries = v
            .get("form")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("cocycle: missing \"form\" array".into()))?
            .iter()
            .map(json_rational)
            .collect::<Result<Vec<_>>>()?;
        let form = DiagonalForm::new(form_entries)?;
        let n = form.rank();
        let values = v
            .get("values")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::Parse("cocycle: missing \"values\" object".into()))?;
        let mut given = BTreeMap::new();
        for (key, m) in values {
            let g: usize = key.trim().parse().map_err(|_| Error::Parse(format!("bad Galois element key {key:?}")))?;
            if g >= field.degree() {
                return Err(Error::Parse(format!("Galois element {g} outside a group of order {}", field.degree())));
            }
            given.insert(g, json_matrix(&field, m, n)?);
        }
        let gens = (0..field.num_radicands())
            .map(|i| given.get(&(1 << i)).cloned().unwrap_or_else(|| identity_matrix(&field, n)))
            .collect::<Vec<_>>();
        let c = OrthCocycle::from_generators(&field, &form, &gens)?;
        for (g, m) in &given {
            if c.values[*g] != *m {
                return Err(Error::NotACocycle(format!(
                    "value at {g} disagrees with the extension from the generators"
                )));
            }
        }
        Ok(c)
    }

    pub fn to_json(&self) -> Value {
        let mut values = Map::new();
        for (g, m) in self.values.iter().enumerate().skip(1) {
            let rows: Vec<Value> = m
                .to_rows()
                .iter()
                .map(|row| Value::Array(row.iter().map(field_element_json).collect()))
                .collect();
            values.insert(g.to_string(), Value::Array(rows));
        }
        json!({
            "radicands": self.field.radicands(),
            "form": self.form.entries().iter().map(|a| a.to_string()).collect::<Vec<_>>(),
            "values": values,
        })
    }
}

fn field_element_json(x: &FieldElement) -> Value {
    match x.as_rational() {
        Some(r) => Value::String(r.to_string()),
        None => Value::Object(x.support().map(|(s, c)| (s.to_string(), Value::String(c.to_string()))).collect()),
    }
}

fn json_field_element(field: &Arc<MultiQuadField>, v: &Value) -> Result<FieldElement> {
    match v {
        Value::Object(map) => {
            let mut coeffs = BTreeMap::new();
            for (k, c) in map {
                let s: u32 = k.trim().parse().map_err(|_| Error::Parse(format!("bad subset key {k:?}")))?;
                coeffs.insert(s, json_rational(c)?);
            }
            FieldElement::from_coefficients(field, coeffs)
        }
        other => Ok(FieldElement::from_rational(field, json_rational(other)?)),
    }
}

fn json_matrix(field: &Arc<MultiQuadField>, v: &Value, n: usize) -> Result<LMatrix> {
    let rows = v.as_array().ok_or_else(|| Error::Parse("matrix must be an array of rows".into()))?;
    let rows = rows
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| Error::Parse("matrix row must be an array".into()))?
                .iter()
                .map(|x| json_field_element(field, x))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let m = Matrix::from_rows(rows)?;
    if m.rows() != n || m.cols() != n {
        return Err(Error::Parse(format!("matrix must be {n}×{n}")));
    }
    Ok(m)
}

/// `Q(√d)` for squarefree `d ∉ {0, 1}`.
pub fn quadratic_field(d: i64) -> Result<Arc<MultiQuadField>> {
    if d == 0 || d == 1 {
        return Err(Error::InvalidInput(format!("Q(√{d}) is not a quadratic field")));
    }
    MultiQuadField::new(&[d])
}

/// The twisted form together with the descended basis.
#[derive(Clone, Debug)]
pub struct Descent {
    pub form: QuadraticForm,
    /// Columns are a Q-basis of the fixed space, as vectors in `Lⁿ`.
    pub basis: LMatrix,
}

/// Galois descent: the fixed space `{v ∈ Lⁿ : c(g)·g(v) = v}` and the Gram
/// matrix of q on a Q-basis of it.
pub fn descend(c: &OrthCocycle) -> Result<Descent> {
    let field = &c.field;
    let n = c.form.rank();
    let dim = field.degree();
    let unknowns = n * dim;
    let gens: Vec<GaloisElement> = field.galois_generators().collect();
    // column (l, t) of the stacked system is the image of √r_t·e_l under v ↦ c(g)·g(v) − v
    let mut system = QMatrix::filled(gens.len() * unknowns, unknowns, Rational::zero());
    for (b, g) in gens.iter().enumerate() {
        let cg = c.value(*g);
        for l in 0..n {
            for t in 0..dim as u32 {
                let col = l * dim + t as usize;
                let sign = if g.character(t) == 1 { -Rational::one() } else { Rational::one() };
                for i in 0..n {
                    for (u, coeff) in cg.get(i, l).support() {
                        let s = u ^ t;
                        let value = coeff * field.radicand_product(u & t) * &sign;
                        let row = b * unknowns + i * dim + s as usize;
                        let current = system.get(row, col).clone();
                        system.set(row, col, current + value);
                    }
                }
                let row = b * unknowns + l * dim + t as usize;
                let current = system.get(row, col).clone();
                system.set(row, col, current - Rational::one());
            }
        }
    }
    let kernel = if gens.is_empty() {
        (0..unknowns)
            .map(|u| (0..unknowns).map(|v| Rational::from_integer((u == v).into())).collect())
            .collect()
    } else {
        system.nullspace()
    };
    if kernel.len() != n {
        return Err(Error::Descent(format!("fixed space has dimension {} instead of {n}", kernel.len())));
    }
    let vectors: Vec<Vec<FieldElement>> = kernel
        .iter()
        .map(|x| {
            (0..n)
                .map(|l| {
                    let coeffs = (0..dim as u32)
                        .map(|t| (t, x[l * dim + t as usize].clone()))
                        .filter(|(_, r)| !r.is_zero())
                        .collect();
                    FieldElement::from_coefficients(field, coeffs)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let entries = c.form.entries();
    let mut gram = QMatrix::filled(n, n, Rational::zero());
    for i in 0..n {
        for j in i..n {
            let b = (0..n).fold(FieldElement::zero(field), |acc, l| {
                acc.add(&vectors[i][l].mul(&vectors[j][l]).scale(&entries[l]))
            });
            let b = b
                .as_rational()
                .cloned()
                .ok_or_else(|| Error::Descent("form on the fixed space is not rational".into()))?;
            gram.set(i, j, b.clone());
            gram.set(j, i, b);
        }
    }
    let basis = Matrix::from_fn(n, n, |i, j| vectors[j][i].clone());
    Ok(Descent { form: QuadraticForm::new(gram)?, basis })
}

/// The twist `q_α` of `q` by the cocycle.
pub fn twist_form(c: &OrthCocycle) -> Result<QuadraticForm> {
    Ok(descend(c)?.form)
}

/// `δ¹[α]`: the quadratic field cut out by the character `g ↦ det c(g)`.
pub fn delta1(c: &OrthCocycle) -> Result<SquareClass> {
    let field = &c.field;
    let det_sign = |g: GaloisElement| -> Result<bool> {
        let d = c.value(g).det();
        match d.as_rational() {
            Some(r) if r.is_one() => Ok(false),
            Some(r) if (-r).is_one() => Ok(true),
            _ => Err(Error::InvalidInput(format!("determinant {d} of an isometry is not ±1"))),
        }
    };
    let mut mask = 0u32;
    for (i, g) in field.galois_generators().enumerate() {
        if det_sign(g)? {
            mask |= 1 << i;
        }
    }
    for g in field.galois_group() {
        if det_sign(g)? != (g.character(mask) == 1) {
            return Err(Error::NotAHomomorphism("g ↦ det c(g) is not a character".into()));
        }
    }
    Ok(field.character_radicand(mask))
}

/// Choices entering the Clifford route to `δ²`; the class does not depend on them.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LiftChoices {
    /// Bit `g` negates the Pin lift of `c(g)` (g a flip bitmask of the cocycle field).
    pub flip_signs: u64,
    /// Inflate the cocycle to `L(√d)` before lifting.
    pub extra_radicand: Option<i64>,
}

/// Intermediate data of the Clifford route.
#[derive(Clone, Debug)]
pub struct Delta2Trace {
    pub class: BrauerClass,
    /// The field over which all Pin lifts live.
    pub field: Arc<MultiQuadField>,
    /// `z` in the cup-product basis of `H²(Gal(field/Q), F₂)`.
    pub lambda: CupCoefficients,
    /// The normalized `F₂`-valued 2-cocycle on `Gal(field/Q)`.
    pub cocycle: F2Cochain,
}

fn elementary_abelian(k: usize) -> &'static FiniteGroup {
    static GROUPS: OnceLock<Vec<FiniteGroup>> = OnceLock::new();
    &GROUPS.get_or_init(|| {
        (0..=MAX_RADICANDS)
            .map(|k| FiniteGroup::elementary_abelian(k).expect("order ≤ 64"))
            .collect()
    })[k]
}

/// `δ²[α]`: lift every `c(g)` to `Õ(q)`, form the `±1`-valued 2-cocycle
/// `z(g,h) = l(g)·g(l(h))·l(gh)⁻¹` over the field generated by the lifts,
/// and inflate its class to `H²(Q, Z/2)`.
pub fn delta2(c: &OrthCocycle) -> Result<BrauerClass> {
    Ok(delta2_with(c, &LiftChoices::default())?.class)
}

pub fn delta2_with(c: &OrthCocycle, choices: &LiftChoices) -> Result<Delta2Trace> {
    let c = match choices.extra_radicand {
        Some(d) => c.adjoin(d)?,
        None => c.clone(),
    };
    let alg = CliffordAlgebra::new(&c.form, &c.field)?;
    let mut field = c.field.clone();
    let mut lifts = Vec::with_capacity(c.values.len());
    for (g, m) in c.values.iter().enumerate() {
        let lift = lift_isometry(&alg.over(&field), m)?;
        field = lift.field;
        let pin = if choices.flip_signs >> g & 1 == 1 { lift.pin.neg() } else { lift.pin };
        lifts.push(pin);
    }
    let lifts: Vec<PinElement> = lifts.iter().map(|l| l.embed(&field)).collect::<Result<_>>()?;

    // lifts of the inflated cocycle depend on g' only through its restriction
    let k = c.field.num_radicands();
    let big = field.degree();
    let small = c.values.len();
    let mut signs = vec![false; big * small];
    for g in 0..big as u32 {
        let gbar = GaloisElement(g).restrict(k).flips() as usize;
        for h in 0..small {
            let x = lifts[gbar].element().mul(&lifts[h].galois_act(GaloisElement(g)).element().clone());
            let target = lifts[gbar ^ h].element();
            signs[g as usize * small + h] = if x == *target {
                false
            } else if x == target.neg() {
                true
            } else {
                return Err(Error::NotACocycle("Pin lifts do not agree up to sign".into()));
            };
        }
    }
    let group = elementary_abelian(field.num_radicands());
    let z = F2Cochain::normalized_cocycle(group, |g, h| signs[g * small + (h & (small - 1))])?;
    let generators: Vec<usize> = (0..field.num_radicands()).map(|i| 1 << i).collect();
    let lambda = decompose_cocycle(group, &generators, &z)?.lambda;
    let class = inflate_radicands(&lambda, field.radicands())?;
    Ok(Delta2Trace { class, field, lambda, cocycle: z })
}

/// Both sides of `w₁(q_α) = w₁(q) + δ¹[α]` and
/// `w₂(q_α) = w₂(q) + w₁(q)∪δ¹[α] + δ²[α]`, and the rearrangement
/// `δ²[α] = w₂(q_α) + w₂(q) + w₁(q)∪w₁(q) + w₁(q)∪w₁(q_α)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistReport {
    pub form: DiagonalForm,
    pub twisted: QuadraticForm,
    pub w1: SquareClass,
    pub w2: BrauerClass,
    pub w1_twisted: SquareClass,
    pub w2_twisted: BrauerClass,
    pub delta1: SquareClass,
    pub delta2: BrauerClass,
    /// `w₁(q) + δ¹[α]`.
    pub w1_predicted: SquareClass,
    /// `w₂(q) + w₁(q)∪δ¹[α] + δ²[α]`.
    pub w2_predicted: BrauerClass,
    /// `w₂(q_α) + w₂(q) + w₁(q)∪w₁(q) + w₁(q)∪w₁(q_α)`.
    pub delta2_from_invariants: BrauerClass,
}

impl TwistReport {
    pub fn w1_identity(&self) -> bool {
        self.w1_twisted == self.w1_predicted
    }

    pub fn w2_identity(&self) -> bool {
        self.w2_twisted == self.w2_predicted
    }

    pub fn delta2_routes_agree(&self) -> bool {
        self.delta2 == self.delta2_from_invariants
    }

    pub fn all_hold(&self) -> bool {
        self.w1_identity() && self.w2_identity() && self.delta2_routes_agree()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "form": self.form.to_string(),
            "twisted_gram": self.twisted.gram().to_rows().iter()
                .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "twisted": self.twisted.diagonalize().0.to_string(),
            "w1": self.w1.to_string(),
            "w2": self.w2.to_string(),
            "w1_twisted": self.w1_twisted.to_string(),
            "w2_twisted": self.w2_twisted.to_string(),
            "delta1": self.delta1.to_string(),
            "delta2": self.delta2.to_string(),
            "w1_predicted": self.w1_predicted.to_string(),
            "w2_predicted": self.w2_predicted.to_string(),
            "delta2_from_invariants": self.delta2_from_invariants.to_string(),
            "w1_identity": self.w1_identity(),
            "w2_identity": self.w2_identity(),
            "delta2_routes_agree": self.delta2_routes_agree(),
        })
    }
}

/// Computes `q_α`, `δ¹`, `δ²` and evaluates both identities.
pub fn verify_twist(c: &OrthCocycle) -> Result<TwistReport> {
    verify_twist_with(c, &LiftChoices::default())
}

pub fn verify_twist_with(c: &OrthCocycle, choices: &LiftChoices) -> Result<TwistReport> {
    let q = c.form.clone();
    let twisted = twist_form(c)?;
    let (w1, w2) = (q.w1(), q.w2());
    let (w1_twisted, w2_twisted) = (twisted.w1(), twisted.w2());
    let d1 = delta1(c)?;
    let d2 = delta2_with(c, choices)?.class;
    let w1_predicted = &w1 * &d1;
    let w2_predicted = &(&w2 + &cup(&w1, &d1)) + &d2;
    let delta2_from_invariants = &(&(&w2_twisted + &w2) + &cup(&w1, &w1)) + &cup(&w1, &w1_twisted);
    Ok(TwistReport {
        form: q,
        twisted,
        w1,
        w2,
        w1_twisted,
        w2_twisted,
        delta1: d1,
        delta2: d2,
        w1_predicted,
        w2_predicted,
        delta2_from_invariants,
    })
}

/// Polynomials over Q, coefficients from the constant term up.
fn poly_trim(mut p: Vec<Rational>) -> Vec<Rational> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn poly_rem(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut r = a.to_vec();
    let lead = b.last().expect("nonzero divisor").clone();
    while r.len() >= b.len() {
        let f = r.last().expect("nonempty") / &lead;
        let shift = r.len() - b.len();
        for (i, c) in b.iter().enumerate() {
            r[shift + i] -= &f * c;
        }
        r.pop();
        r = poly_trim(r);
    }
    r
}

fn poly_gcd_degree(a: &[Rational], b: &[Rational]) -> usize {
    let (mut a, mut b) = (poly_trim(a.to_vec()), poly_trim(b.to_vec()));
    while !b.is_empty() {
        let r = poly_rem(&a, &b);
        a = b;
        b = r;
    }
    a.len().saturating_sub(1)
}

pub const MAX_TRACE_DEGREE: usize = 8;

/// The trace form `(x, y) ↦ Tr(xy)` of `Q[x]/(f)` in the basis `1, x, …, x^{n−1}`,
/// with `f` given by its coefficients from the leading one down.
pub fn trace_form(coeffs: &[Rational]) -> Result<QuadraticForm> {
    let start = coeffs.iter().position(|c| !c.is_zero()).ok_or_else(|| Error::InvalidInput("zero polynomial".into()))?;
    let f = &coeffs[start..];
    let n = f.len() - 1;
    if n == 0 || n > MAX_TRACE_DEGREE {
        return Err(Error::OutOfRange(format!("trace forms need degree 1..={MAX_TRACE_DEGREE}, got {n}")));
    }
    // monic: x^n + c₁x^{n−1} + … + c_n
    let c: Vec<Rational> = f.iter().map(|x| x / &f[0]).collect();
    let low_first: Vec<Rational> = c.iter().rev().cloned().collect();
    let derivative: Vec<Rational> = (1..=n).map(|i| &low_first[i] * rat(i as i64)).collect();
    if poly_gcd_degree(&low_first, &derivative) > 0 {
        return Err(Error::InvalidInput("polynomial is not separable".into()));
    }
    // Newton: p_k = −(c₁p_{k−1} + … + c_{k−1}p₁ + k·c_k) for k ≤ n, and the
    // linear recurrence without the last term beyond n
    let mut p = vec![rat(n as i64)];
    for k in 1..=2 * (n - 1) {
        let mut s = Rational::zero();
        for i in 1..=k.min(n) {
            if i < k {
                s += &c[i] * &p[k - i];
            } else {
                s += &c[i] * rat(k as i64);
            }
        }
        p.push(-s);
    }
    QuadraticForm::new(QMatrix::from_fn(n, n, |i, j| p[i + j].clone()))
}

/// `Q(√d)` with the regular representation of `Z/2` inside `O(⟨1,1⟩)`.
pub fn regular_rep_cocycle(d: i64) -> Result<OrthCocycle> {
    OrthCocycle::quadratic_swap(&DiagonalForm::standard(2), d, 0, 1)
}

/// A homomorphism `ρ: G → O(q)(Q)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrthogonalRep {
    group: FiniteGroup,
    form: DiagonalForm,
    images: Vec<QMatrix>,
}

impl OrthogonalRep {
    pub fn new(group: FiniteGroup, form: DiagonalForm, images: Vec<QMatrix>) -> Result<OrthogonalRep> {
        let n = form.rank();
        if images.len() != group.order() {
            return Err(Error::InvalidInput(format!("{} images for a group of order {}", images.len(), group.order())));
        }
        let gram = QMatrix::diagonal(form.entries());
        for (g, m) in images.iter().enumerate() {
            if m.rows() != n || m.cols() != n || m.congruence(&gram) != gram {
                return Err(Error::InvalidInput(format!("image of {} is not an isometry", group.name(g))));
            }
        }
        for g in 0..group.order() {
            for h in 0..group.order() {
                if images[group.mul(g, h)] != images[g].mul(&images[h]) {
                    return Err(Error::NotAHomomorphism(format!(
                        "ρ({}·{}) ≠ ρ({})ρ({})",
                        group.name(g),
                        group.name(h),
                        group.name(g),
                        group.name(h)
                    )));
                }
            }
        }
        Ok(OrthogonalRep { group, form, images })
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn form(&self) -> &DiagonalForm {
        &self.form
    }

    pub fn image(&self, g: usize) -> &QMatrix {
        &self.images[g]
    }
}

/// The cocycle `g ↦ ρ(χ(g))` for a surjective homomorphism
/// `χ: Gal(L/Q) → G`, given by the images of the generators `σᵢ`.
pub fn rep_to_cocycle(rho: &OrthogonalRep, field: &Arc<MultiQuadField>, chi: &[usize]) -> Result<OrthCocycle> {
    let group = &rho.group;
    if chi.len() != field.num_radicands() {
        return Err(Error::InvalidInput(format!("{} generator images for {} radicands", chi.len(), field.num_radicands())));
    }
    if chi.iter().any(|&x| x >= group.order()) {
        return Err(Error::InvalidInput("generator image outside the group".into()));
    }
    let chi_of = |mask: u32| {
        (0..chi.len())
            .filter(|i| mask >> i & 1 == 1)
            .fold(group.identity(), |acc, i| group.mul(acc, chi[i]))
    };
    let mut hit = vec![false; group.order()];
    for g in 0..field.degree() as u32 {
        hit[chi_of(g)] = true;
        for h in 0..field.degree() as u32 {
            if chi_of(g ^ h) != group.mul(chi_of(g), chi_of(h)) {
                return Err(Error::NotAHomomorphism("χ does not respect the Galois group law".into()));
            }
        }
    }
    if hit.contains(&false) {
        return Err(Error::InvalidInput("χ is not surjective".into()));
    }
    let values = (0..field.degree() as u32)
        .map(|g| rational_matrix(&rho.images[chi_of(g)], field))
        .collect();
    OrthCocycle::new(field, &rho.form, values)
}

/// Parses a polynomial given as comma-separated coefficients, leading first.
pub fn parse_polynomial(s: &str) -> Result<Vec<Rational>> {
    s.split(',').map(parse_rational).collect()
}
