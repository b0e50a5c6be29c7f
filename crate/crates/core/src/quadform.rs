//! Nondegenerate symmetric bilinear forms over Q and their classical invariants.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::arith::{self, parse_rational, Place, Rational};
use crate::error::{Error, Result};
use crate::galois::{cup, BrauerClass, SquareClass};
use crate::linalg::QMatrix;

/// A nondegenerate symmetric Gram matrix over Q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticForm {
    gram: QMatrix,
}

/// `⟨a₁, …, aₙ⟩` with every `aᵢ ≠ 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DiagonalForm {
    entries: Vec<Rational>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PivotStrategy {
    /// Largest-magnitude diagonal entry, ties broken by position.
    #[default]
    LargestMagnitude,
    /// First nonzero diagonal entry.
    FirstNonzero,
}

impl DiagonalForm {
    pub fn new(entries: Vec<Rational>) -> Result<DiagonalForm> {
        if entries.is_empty() {
            return Err(Error::InvalidInput("a form needs rank at least 1".into()));
        }
        if entries.iter().any(Zero::is_zero) {
            return Err(Error::Singular);
        }
        // every invariant factors the entries one at a time
        for a in &entries {
            arith::check_factorable(a)?;
        }
        Ok(DiagonalForm { entries })
    }

    pub fn from_ints(entries: &[i64]) -> Result<DiagonalForm> {
        DiagonalForm::new(entries.iter().map(|&a| arith::rat(a)).collect())
    }

    /// The standard form `t_n = ⟨1, …, 1⟩`.
    pub fn standard(n: usize) -> DiagonalForm {
        DiagonalForm { entries: vec![Rational::one(); n] }
    }

    /// Parses a comma-separated list such as `"2,6"` or `"1/2,-3"`.
    pub fn parse(s: &str) -> Result<DiagonalForm> {
        DiagonalForm::new(s.split(',').map(parse_rational).collect::<Result<_>>()?)
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn to_form(&self) -> QuadraticForm {
        QuadraticForm { gram: QMatrix::diagonal(&self.entries) }
    }

    /// `q(v) = Σ aᵢ vᵢ²` for a rational vector.
    pub fn evaluate(&self, v: &[Rational]) -> Rational {
        self.entries.iter().zip(v).map(|(a, x)| a * x * x).sum()
    }

    fn classes(&self) -> Vec<SquareClass> {
        self.entries
            .iter()
            .map(|a| SquareClass::from_rational(a).expect("entries checked by new"))
            .collect()
    }

    pub fn w1(&self) -> SquareClass {
        self.classes().iter().fold(SquareClass::one(), |acc, c| &acc * c)
    }

    /// `Σ_{i<j} (aᵢ) ∪ (aⱼ)`.
    pub fn w2(&self) -> BrauerClass {
        let classes = self.classes();
        let mut total = BrauerClass::zero();
        for i in 0..classes.len() {
            for j in i + 1..classes.len() {
                total = &total + &cup(&classes[i], &classes[j]);
            }
        }
        total
    }

    pub fn signature(&self) -> (usize, usize) {
        let neg = self.entries.iter().filter(|a| a.is_negative()).count();
        (self.rank() - neg, neg)
    }

    pub fn local_data(&self) -> LocalData {
        let mut support: BTreeSet<Place> = [Place::Prime(2), Place::Infinity].into();
        for a in &self.entries {
            for n in [a.numer(), a.denom()] {
                for (p, _) in arith::factorize(n).expect("entries checked by new") {
                    support.insert(Place::Prime(p));
                }
            }
        }
        let ramified = self.w2();
        LocalData {
            rank: self.rank(),
            w1: self.w1(),
            signature: self.signature(),
            hasse: support
                .into_iter()
                .map(|v| (v, if ramified.ramified().contains(&v) { -1 } else { 1 }))
                .collect(),
        }
    }

    pub fn direct_sum(&self, other: &DiagonalForm) -> DiagonalForm {
        DiagonalForm { entries: self.entries.iter().chain(&other.entries).cloned().collect() }
    }

    pub fn scale(&self, c: &Rational) -> Result<DiagonalForm> {
        if c.is_zero() {
            return Err(Error::InvalidInput("scaling by zero".into()));
        }
        DiagonalForm::new(self.entries.iter().map(|a| a * c).collect())
    }
}

impl fmt::Display for DiagonalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("⟨")?;
        for (i, a) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str("⟩")
    }
}

/// Rank, discriminant, real signature and local Hasse signs.
///
/// `hasse` lists the places examined; every place not listed has sign +1.
#[derive(Clone, Debug)]
pub struct LocalData {
    pub rank: usize,
    pub w1: SquareClass,
    pub signature: (usize, usize),
    pub hasse: BTreeMap<Place, i8>,
}

impl LocalData {
    pub fn hasse_sign(&self, v: Place) -> i8 {
        self.hasse.get(&v).copied().unwrap_or(1)
    }

    /// Places with Hasse sign −1.
    pub fn negative_places(&self) -> BTreeSet<Place> {
        self.hasse.iter().filter(|(_, &s)| s == -1).map(|(&v, _)| v).collect()
    }
}

impl PartialEq for LocalData {
    fn eq(&self, other: &LocalData) -> bool {
        self.rank == other.rank
            && self.w1 == other.w1
            && self.signature == other.signature
            && self.negative_places() == other.negative_places()
    }
}

impl Eq for LocalData {}

impl QuadraticForm {
    pub fn new(gram: QMatrix) -> Result<QuadraticForm> {
        if !gram.is_square() || gram.rows() == 0 {
            return Err(Error::InvalidInput("Gram matrix must be square and nonempty".into()));
        }
        if !gram.is_symmetric() {
            return Err(Error::InvalidInput("Gram matrix is not symmetric".into()));
        }
        if gram.det().is_zero() {
            return Err(Error::Singular);
        }
        let q = QuadraticForm { gram };
        for strategy in [PivotStrategy::LargestMagnitude, PivotStrategy::FirstNonzero] {
            for a in q.diagonalize_with(strategy).0.entries() {
                arith::check_factorable(a)?;
            }
        }
        Ok(q)
    }

    /// Parses a JSON array of arrays of integers or rational strings.
    pub fn parse_gram(s: &str) -> Result<QuadraticForm> {
        let rows: Vec<Vec<serde_json::Value>> =
            serde_json::from_str(s).map_err(|e| Error::Parse(format!("Gram matrix: {e}")))?;
        let rows = rows
            .into_iter()
            .map(|row| row.into_iter().map(|v| json_rational(&v)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        QuadraticForm::new(QMatrix::from_rows(rows)?)
    }

    pub fn gram(&self) -> &QMatrix {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn det(&self) -> Rational {
        self.gram.det()
    }

    pub fn diagonalize(&self) -> (DiagonalForm, QMatrix) {
        self.diagonalize_with(PivotStrategy::default())
    }

    /// Symmetric Gaussian elimination. Returns `(⟨a₁..aₙ⟩, P)` with
    /// `Pᵀ·gram·P = diag(a)`.
    pub fn diagonalize_with(&self, strategy: PivotStrategy) -> (DiagonalForm, QMatrix) {
        let n = self.rank();
        let mut g = self.gram.clone();
        let mut p = QMatrix::q_identity(n);
        for k in 0..n {
            let candidates = (k..n).filter(|&i| !g.get(i, i).is_zero());
            let pivot = match strategy {
                PivotStrategy::FirstNonzero => candidates.min(),
                // max_by_key keeps the last maximum; reverse the scan to keep the first
                PivotStrategy::LargestMagnitude => {
                    candidates.rev().max_by_key(|&i| g.get(i, i).abs())
                }
            };
            let pivot = match pivot {
                Some(i) => i,
                None => {
                    // all remaining diagonal entries vanish: e_i ↦ e_i + e_j
                    let (i, j) = (k..n)
                        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                        .find(|&(i, j)| !g.get(i, j).is_zero())
                        .expect("nondegenerate form has a nonzero off-diagonal entry");
                    add_basis_vector(&mut g, &mut p, i, j, &Rational::one());
                    i
                }
            };
            if pivot != k {
                swap_basis_vectors(&mut g, &mut p, pivot, k);
            }
            let inv = g.get(k, k).recip();
            for j in k + 1..n {
                let f = g.get(k, j) * &inv;
                if !f.is_zero() {
                    add_basis_vector(&mut g, &mut p, j, k, &-f);
                }
            }
        }
        let entries = (0..n).map(|i| g.get(i, i).clone()).collect();
        (DiagonalForm { entries }, p)
    }

    pub fn w1(&self) -> SquareClass {
        self.diagonalize().0.w1()
    }

    pub fn w2(&self) -> BrauerClass {
        self.diagonalize().0.w2()
    }

    pub fn signature(&self) -> (usize, usize) {
        self.diagonalize().0.signature()
    }

    pub fn local_data(&self) -> LocalData {
        self.diagonalize().0.local_data()
    }

    /// Hasse–Minkowski: equivalence over Q is decided by rank, discriminant,
    /// signature and the Hasse sign at every place.
    pub fn is_equivalent(&self, other: &QuadraticForm) -> bool {
        self.local_data() == other.local_data()
    }

    pub fn direct_sum(&self, other: &QuadraticForm) -> QuadraticForm {
        let (n, m) = (self.rank(), other.rank());
        let gram = QMatrix::from_fn(n + m, n + m, |i, j| match (i < n, j < n) {
            (true, true) => self.gram.get(i, j).clone(),
            (false, false) => other.gram.get(i - n, j - n).clone(),
            _ => Rational::zero(),
        });
        // blocks diagonalize independently, so the range check of `new` still holds
        QuadraticForm { gram }
    }

    pub fn scale(&self, c: &Rational) -> Result<QuadraticForm> {
        if c.is_zero() {
            return Err(Error::InvalidInput("scaling by zero".into()));
        }
        QuadraticForm::new(self.gram.scale(c))
    }

    /// The form in the basis given by the columns of `p`: `pᵀ·gram·p`.
    pub fn transform(&self, p: &QMatrix) -> Result<QuadraticForm> {
        QuadraticForm::new(p.congruence(&self.gram))
    }

    pub fn evaluate(&self, v: &[Rational]) -> Rational {
        let gv = self.gram.mul_vec(v);
        v.iter().zip(&gv).map(|(a, b)| a * b).sum()
    }
}

impl From<&DiagonalForm> for QuadraticForm {
    fn from(d: &DiagonalForm) -> QuadraticForm {
        d.to_form()
    }
}

impl fmt::Display for QuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.rank() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str("[")?;
            for j in 0..self.rank() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", self.gram.get(i, j))?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

pub(crate) fn json_rational(v: &serde_json::Value) -> Result<Rational> {
    match v {
        serde_json::Value::String(s) => parse_rational(s),
        serde_json::Value::Number(n) => n
            .as_i64()
            .map(arith::rat)
            .ok_or_else(|| Error::Parse(format!("expected an integer or rational string, got {n}"))),
        other => Err(Error::Parse(format!("expected a rational, got {other}"))),
    }
}

/// Basis move `e_i ↦ e_i + c·e_j` applied to the Gram matrix and to `p`.
fn add_basis_vector(g: &mut QMatrix, p: &mut QMatrix, i: usize, j: usize, c: &Rational) {
    let n = g.rows();
    for r in 0..n {
        let v = g.get(r, i) + c * g.get(r, j);
        g.set(r, i, v);
    }
    for col in 0..n {
        let v = g.get(i, col) + c * g.get(j, col);
        g.set(i, col, v);
    }
    for r in 0..n {
        let v = p.get(r, i) + c * p.get(r, j);
        p.set(r, i, v);
    }
}

fn swap_basis_vectors(g: &mut QMatrix, p: &mut QMatrix, a: usize, b: usize) {
    let n = g.rows();
    g.swap_rows(a, b);
    for r in 0..n {
        let (x, y) = (g.get(r, a).clone(), g.get(r, b).clone());
        g.set(r, a, y);
        g.set(r, b, x);
        let (x, y) = (p.get(r, a).clone(), p.get(r, b).clone());
        p.set(r, a, y);
        p.set(r, b, x);
    }
}

/// A random invertible rational matrix with small entries.
pub fn random_invertible(n: usize, rng: &mut impl rand::Rng) -> QMatrix {
    loop {
        let m = QMatrix::from_fn(n, n, |_, _| {
            arith::ratio(rng.gen_range(-4..=4), rng.gen_range(1..=3))
        });
        if !m.det().is_zero() {
            return m;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, ratio};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const INF: Place = Place::Infinity;
    const P2: Place = Place::Prime(2);
    const P3: Place = Place::Prime(3);

    fn diag(a: &[i64]) -> DiagonalForm {
        DiagonalForm::from_ints(a).unwrap()
    }

    fn sq(n: i64) -> SquareClass {
        SquareClass::from_int(n).unwrap()
    }

    fn check_diagonalization(q: &QuadraticForm, strategy: PivotStrategy) -> DiagonalForm {
        let (d, p) = q.diagonalize_with(strategy);
        assert_eq!(p.congruence(q.gram()), QMatrix::diagonal(d.entries()));
        assert!(!p.det().is_zero());
        d
    }

    #[test]
    fn diagonalize_examples() {
        let (d, p) = DiagonalForm::standard(2).to_form().diagonalize();
        assert_eq!(d, DiagonalForm::standard(2));
        assert!(p.is_identity());

        let hyp = QuadraticForm::new(QMatrix::from_ints(&[&[0, 1], &[1, 0]])).unwrap();
        let d = check_diagonalization(&hyp, PivotStrategy::LargestMagnitude);
        assert_eq!(d.w1(), sq(-1));
        assert!(d.to_form().is_equivalent(&diag(&[1, -1]).to_form()));

        let d = check_diagonalization(&diag(&[2, 6]).to_form(), PivotStrategy::FirstNonzero);
        assert_eq!(d, diag(&[2, 6]));
    }

    #[test]
    fn singular_and_asymmetric_gram_rejected() {
        assert_eq!(QuadraticForm::new(QMatrix::from_ints(&[&[1, 2], &[2, 4]])), Err(Error::Singular));
        assert!(QuadraticForm::new(QMatrix::from_ints(&[&[1, 2], &[3, 4]])).is_err());
        assert_eq!(DiagonalForm::from_ints(&[1, 0]), Err(Error::Singular));
        assert!(QuadraticForm::parse_gram("[[0,1],[1,0]]").is_ok());
        assert!(matches!(QuadraticForm::parse_gram("[[0,1],[1"), Err(Error::Parse(_))));
    }

    #[test]
    fn entries_beyond_factorization_bound_rejected() {
        assert!(matches!(DiagonalForm::parse("1,20000000000000000000"), Err(Error::OutOfRange(_))));
        // fine entry by entry, but the pivot 1e10·1e10 is too large to factor
        let big = QuadraticForm::parse_gram(r#"[["10000000019","1"],["1","0"]]"#);
        assert!(big.is_ok(), "{big:?}");
        let scaled = big.unwrap().scale(&Rational::from_integer(10_000_000_000i64.into()));
        assert!(matches!(scaled, Err(Error::OutOfRange(_))));
    }

    #[test]
    fn w1_w2_examples() {
        assert!(DiagonalForm::standard(4).w1().is_trivial());
        assert!(DiagonalForm::standard(4).w2().is_zero());
        assert_eq!(diag(&[2, 6]).w1(), sq(3));
        assert_eq!(diag(&[-1, -1]).w1(), SquareClass::one());
        assert_eq!(diag(&[-1, -1]).w2(), BrauerClass::new([P2, INF]).unwrap());
        assert_eq!(diag(&[2, 6]).w2(), BrauerClass::new([P2, P3]).unwrap());
    }

    #[test]
    fn local_data_examples() {
        let ld = diag(&[1, -1]).local_data();
        assert_eq!((ld.rank, ld.w1.clone(), ld.signature), (2, sq(-1), (1, 1)));
        assert!(ld.negative_places().is_empty());

        let ld = diag(&[-1, -1]).local_data();
        assert_eq!((ld.rank, ld.w1.clone(), ld.signature), (2, sq(1), (0, 2)));
        assert_eq!(ld.negative_places(), [P2, INF].into());
        assert_eq!(ld.hasse_sign(Place::Prime(5)), 1);

        let ld = DiagonalForm::standard(3).local_data();
        assert_eq!((ld.rank, ld.signature), (3, (3, 0)));
        assert!(ld.w1.is_trivial() && ld.negative_places().is_empty());
    }

    #[test]
    fn equivalence_examples() {
        let q = diag(&[2, 6]).to_form();
        assert!(q.is_equivalent(&q));
        let t2 = DiagonalForm::standard(2).to_form();
        assert!(t2.is_equivalent(&diag(&[2, 2]).to_form()));
        // explicit congruence for ⟨1,1⟩ ≅ ⟨2,2⟩
        let p = QMatrix::from_ints(&[&[1, 1], &[1, -1]]);
        assert_eq!(t2.transform(&p).unwrap(), diag(&[2, 2]).to_form());
        assert!(!t2.is_equivalent(&diag(&[1, -1]).to_form()));
        assert!(!t2.is_equivalent(&diag(&[1, 3]).to_form()));
        assert!(!diag(&[1, 1, 1]).to_form().is_equivalent(&t2));
        // same rank, discriminant, signature; different Hasse invariant
        assert!(!diag(&[1, 1]).to_form().is_equivalent(&diag(&[3, 3]).to_form()));
    }

    #[test]
    fn sums_and_scaling() {
        assert_eq!(diag(&[1]).direct_sum(&diag(&[1])), DiagonalForm::standard(2));
        assert_eq!(DiagonalForm::standard(2).scale(&rat(2)).unwrap(), diag(&[2, 2]));
        assert!(DiagonalForm::standard(2).scale(&rat(0)).is_err());
        let q = diag(&[2, -3]).to_form().direct_sum(&diag(&[5]).to_form());
        assert_eq!(q, diag(&[2, -3, 5]).to_form());
        assert_eq!(q.scale(&ratio(1, 2)).unwrap().det(), ratio(-30, 8));
    }

    #[test]
    fn whitney_sum_formula() {
        let vals = [-5, -3, -2, -1, 1, 2, 3, 5];
        let mut forms = Vec::new();
        for &a in &vals {
            forms.push(diag(&[a]));
            for &b in &vals {
                forms.push(diag(&[a, b]));
            }
        }
        for &(a, b, c) in &[(1, 2, 3), (-1, -2, -3), (5, -5, 2), (-1, 3, -5)] {
            forms.push(diag(&[a, b, c]));
        }
        for q in &forms {
            for r in &forms {
                let s = q.direct_sum(r);
                assert_eq!(s.w1(), &q.w1() * &r.w1());
                assert_eq!(s.w2(), q.w2() + r.w2() + cup(&q.w1(), &r.w1()));
            }
        }
    }

    #[test]
    fn invariants_survive_random_congruence() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let n = rng.gen_range(1..=4);
            let entries: Vec<i64> = (0..n).map(|_| [-5, -3, -2, -1, 1, 2, 3, 5, 6, 7][rng.gen_range(0..10)]).collect();
            let q = diag(&entries).to_form();
            let reference = q.local_data();
            for _ in 0..5 {
                let p = random_invertible(n, &mut rng);
                let moved = q.transform(&p).unwrap();
                for strategy in [PivotStrategy::LargestMagnitude, PivotStrategy::FirstNonzero] {
                    let d = check_diagonalization(&moved, strategy);
                    assert_eq!(d.local_data(), reference);
                    assert_eq!(d.w2(), q.w2());
                }
                assert!(moved.is_equivalent(&q));
            }
        }
    }
}
