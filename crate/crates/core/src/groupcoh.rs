//! Cohomology `Hⁿ(G, F₂)`, `n ≤ 2`, of small finite groups with trivial action,
//! computed from normalized bar cochains by F₂ linear algebra.

use std::collections::BTreeSet;
use std::fmt;

use serde::Deserialize;

use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::galois::{cup, BrauerClass, SquareClass};

pub const MAX_GROUP_ORDER: usize = 64;

/// A finite group given by its multiplication table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    names: Vec<String>,
    table: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
}

#[derive(Deserialize)]
struct GroupJson {
    #[serde(default)]
    elements: Option<Vec<String>>,
    table: Vec<Vec<usize>>,
}

impl FiniteGroup {
    /// Checks closure, associativity, identity and inverses.
    pub fn from_table(names: Vec<String>, table: Vec<Vec<usize>>) -> Result<FiniteGroup> {
        let n = table.len();
        if n == 0 || n > MAX_GROUP_ORDER {
            return Err(Error::OutOfRange(format!("group order {n} outside 1..={MAX_GROUP_ORDER}")));
        }
        if names.len() != n {
            return Err(Error::InvalidInput(format!("{} names for {n} elements", names.len())));
        }
        if table.iter().any(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
            return Err(Error::InvalidInput("multiplication table is not closed".into()));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or_else(|| Error::InvalidInput("no identity element".into()))?;
        let inverses = (0..n)
            .map(|g| {
                (0..n)
                    .find(|&h| table[g][h] == identity && table[h][g] == identity)
                    .ok_or_else(|| Error::InvalidInput(format!("element {g} has no inverse")))
            })
            .collect::<Result<Vec<_>>>()?;
        for a in 0..n {
            for b in 0..n {
                let ab = table[a][b];
                for c in 0..n {
                    if table[ab][c] != table[a][table[b][c]] {
                        return Err(Error::InvalidInput(format!("associativity fails at ({a},{b},{c})")));
                    }
                }
            }
        }
        Ok(FiniteGroup { names, table, identity, inverses })
    }

    /// `{"elements": [...], "table": [[...], ...]}`; element names are optional.
    pub fn from_json(s: &str) -> Result<FiniteGroup> {
        let parsed: GroupJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let names = parsed
            .elements
            .unwrap_or_else(|| (0..parsed.table.len()).map(|i| i.to_string()).collect());
        FiniteGroup::from_table(names, parsed.table)
    }

    pub fn cyclic(n: usize) -> Result<FiniteGroup> {
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        FiniteGroup::from_table((0..n).map(|i| format!("g^{i}")).collect(), table)
    }

    /// `(Z/2)^k`; element `i` is the vector with bits `i`, so the product is XOR.
    pub fn elementary_abelian(k: usize) -> Result<FiniteGroup> {
        if k > 6 {
            return Err(Error::OutOfRange(format!("(Z/2)^{k} exceeds order {MAX_GROUP_ORDER}")));
        }
        let n = 1usize << k;
        let table = (0..n).map(|a| (0..n).map(|b| a ^ b).collect()).collect();
        FiniteGroup::from_table((0..n).map(|i| format!("{i:0k$b}", k = k.max(1))).collect(), table)
    }

    /// The dihedral group of order `2n`: elements `rⁱ` (index i) and `s·rⁱ` (index n+i).
    pub fn dihedral(n: usize) -> Result<FiniteGroup> {
        if n == 0 {
            return Err(Error::OutOfRange("dihedral group of a 0-gon".into()));
        }
        let decode = |x: usize| (x / n, x % n);
        let encode = |f: usize, r: usize| f * n + r;
        let table = (0..2 * n)
            .map(|a| {
                (0..2 * n)
                    .map(|b| {
                        let (fa, ra) = decode(a);
                        let (fb, rb) = decode(b);
                        // s^fa r^ra s^fb r^rb = s^(fa+fb) r^(±ra + rb)
                        let r = if fb == 1 { (n - ra + rb) % n } else { (ra + rb) % n };
                        encode((fa + fb) % 2, r)
                    })
                    .collect()
            })
            .collect();
        let names = (0..2 * n)
            .map(|x| {
                let (f, r) = decode(x);
                if f == 0 {
                    format!("r^{r}")
                } else {
                    format!("s·r^{r}")
                }
            })
            .collect();
        FiniteGroup::from_table(names, table)
    }

    /// `G × H` with element `(g, h)` at index `g·|H| + h`.
    pub fn direct_product(&self, other: &FiniteGroup) -> Result<FiniteGroup> {
        let m = other.order();
        let n = self.order() * m;
        if n > MAX_GROUP_ORDER {
            return Err(Error::OutOfRange(format!("product of order {n} exceeds {MAX_GROUP_ORDER}")));
        }
        let table = (0..n)
            .map(|a| (0..n).map(|b| self.mul(a / m, b / m) * m + other.mul(a % m, b % m)).collect())
            .collect();
        let names = (0..n).map(|x| format!("({},{})", self.names[x / m], other.names[x % m])).collect();
        FiniteGroup::from_table(names, table)
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// For `(Z/2)^k` with the given generators, the coordinate bitmask of every
    /// element; errors if the generators are not an F₂-basis of an elementary
    /// abelian 2-group.
    pub fn coordinates(&self, generators: &[usize]) -> Result<Vec<u32>> {
        let n = self.order();
        if n != 1 << generators.len() || !self.is_abelian() || (0..n).any(|g| self.mul(g, g) != self.identity) {
            return Err(Error::InvalidInput("not an elementary abelian 2-group with this many generators".into()));
        }
        let mut coords = vec![None; n];
        for mask in 0..n as u32 {
            let g = (0..generators.len())
                .filter(|i| mask >> i & 1 == 1)
                .fold(self.identity, |acc, i| self.mul(acc, generators[i]));
            if coords[g].replace(mask).is_some() {
                return Err(Error::InvalidInput("generators are dependent".into()));
            }
        }
        Ok(coords.into_iter().map(|c| c.expect("bijective")).collect())
    }
}

/// A normalized cochain `Gⁿ → F₂`, `n ≤ 2`, stored densely (`g·|G| + h` in degree 2).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct F2Cochain {
    degree: usize,
    order: usize,
    values: Vec<bool>,
}

impl F2Cochain {
    pub fn zero(group: &FiniteGroup, degree: usize) -> Result<F2Cochain> {
        if degree > 2 {
            return Err(Error::OutOfRange(format!("cochains of degree {degree}")));
        }
        let n = group.order();
        Ok(F2Cochain { degree, order: n, values: vec![false; n.pow(degree as u32)] })
    }

    /// A 0-cochain: a constant in F₂.
    pub fn constant(group: &FiniteGroup, c: bool) -> F2Cochain {
        F2Cochain { degree: 0, order: group.order(), values: vec![c] }
    }

    pub fn degree1(group: &FiniteGroup, f: impl Fn(usize) -> bool) -> Result<F2Cochain> {
        let values: Vec<bool> = (0..group.order()).map(f).collect();
        if values[group.identity()] {
            return Err(Error::InvalidInput("cochain is not normalized".into()));
        }
        Ok(F2Cochain { degree: 1, order: group.order(), values })
    }

    pub fn degree2(group: &FiniteGroup, f: impl Fn(usize, usize) -> bool) -> Result<F2Cochain> {
        let n = group.order();
        let e = group.identity();
        let values: Vec<bool> = (0..n * n).map(|i| f(i / n, i % n)).collect();
        if (0..n).any(|g| values[e * n + g] || values[g * n + e]) {
            return Err(Error::InvalidInput("cochain is not normalized".into()));
        }
        Ok(F2Cochain { degree: 2, order: n, values })
    }

    /// A 2-cocycle with arbitrary values, normalized by adding the coboundary of
    /// the constant 1-cochain `z(1,1)`. Errors if `z` is not a cocycle.
    pub fn normalized_cocycle(group: &FiniteGroup, z: impl Fn(usize, usize) -> bool) -> Result<F2Cochain> {
        let e = group.identity();
        let shift = z(e, e);
        let n = group.order();
        let values: Vec<bool> = (0..n * n).map(|i| z(i / n, i % n) ^ shift).collect();
        let c = F2Cochain { degree: 2, order: n, values };
        if (0..n).any(|g| c.at2(e, g) || c.at2(g, e)) || !is_cocycle(group, &c)? {
            return Err(Error::NotACocycle("2-cochain fails the cocycle law".into()));
        }
        Ok(c)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn at1(&self, g: usize) -> bool {
        debug_assert_eq!(self.degree, 1);
        self.values[g]
    }

    pub fn at2(&self, g: usize, h: usize) -> bool {
        debug_assert_eq!(self.degree, 2);
        self.values[g * self.order + h]
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| !v)
    }

    pub fn add(&self, rhs: &F2Cochain) -> F2Cochain {
        assert_eq!((self.degree, self.order), (rhs.degree, rhs.order), "cochains of different shape");
        F2Cochain {
            degree: self.degree,
            order: self.order,
            values: self.values.iter().zip(&rhs.values).map(|(a, b)| a ^ b).collect(),
        }
    }

    fn check_group(&self, group: &FiniteGroup) -> Result<()> {
        if self.order != group.order() {
            return Err(Error::Mismatch(format!("cochain on a group of order {}", self.order)));
        }
        Ok(())
    }
}

/// The bar differential with trivial coefficients, for cochains of degree ≤ 1.
pub fn coboundary(group: &FiniteGroup, f: &F2Cochain) -> Result<F2Cochain> {
    f.check_group(group)?;
    match f.degree {
        0 => F2Cochain::zero(group, 1),
        1 => F2Cochain::degree2(group, |g, h| f.at1(g) ^ f.at1(h) ^ f.at1(group.mul(g, h))),
        d => Err(Error::OutOfRange(format!("coboundary of a degree-{d} cochain is not supported"))),
    }
}

/// `(dz)(g,h,k) = z(h,k) + z(gh,k) + z(g,hk) + z(g,h)`.
fn d2_value(group: &FiniteGroup, z: &F2Cochain, g: usize, h: usize, k: usize) -> bool {
    z.at2(h, k) ^ z.at2(group.mul(g, h), k) ^ z.at2(g, group.mul(h, k)) ^ z.at2(g, h)
}

pub fn is_cocycle(group: &FiniteGroup, f: &F2Cochain) -> Result<bool> {
    f.check_group(group)?;
    let n = group.order();
    Ok(match f.degree {
        0 => true,
        1 => (0..n).all(|g| (0..n).all(|h| !(f.at1(g) ^ f.at1(h) ^ f.at1(group.mul(g, h))))),
        _ => (0..n).all(|g| (0..n).all(|h| (0..n).all(|k| !d2_value(group, f, g, h, k)))),
    })
}

/// Dense F₂ row vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
struct BitRow(Vec<u64>);

impl BitRow {
    fn zeros(len: usize) -> BitRow {
        BitRow(vec![0; len.div_ceil(64)])
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn flip(&mut self, i: usize) {
        self.0[i / 64] ^= 1 << (i % 64);
    }

    fn xor(&mut self, other: &BitRow) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a ^= b;
        }
    }

    fn first_one(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }
}

/// An echelon basis over F₂, built row by row.
struct Echelon {
    /// Rows keyed by pivot column, each reduced against earlier pivots.
    rows: Vec<(usize, BitRow)>,
}

impl Echelon {
    fn new() -> Echelon {
        Echelon { rows: Vec::new() }
    }

    fn reduce(&self, row: &mut BitRow) {
        for (p, r) in &self.rows {
            if row.get(*p) {
                row.xor(r);
            }
        }
    }

    /// Inserts a row; returns false if it was dependent.
    fn insert(&mut self, mut row: BitRow) -> bool {
        self.reduce(&mut row);
        match row.first_one() {
            Some(p) => {
                self.rows.push((p, row));
                true
            }
            None => false,
        }
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }
}

/// Solves `A·x = b` over F₂ where each equation is (coefficient row, rhs).
/// Returns a particular solution (free variables zero) and the free variables.
fn solve_f2(nvars: usize, equations: impl IntoIterator<Item = (BitRow, bool)>) -> Option<(Vec<bool>, Vec<usize>)> {
    // the right-hand side is carried as an extra column at index nvars
    let mut ech = Echelon::new();
    for (mut row, rhs) in equations {
        if row.0.len() * 64 <= nvars {
            row.0.push(0);
        }
        if rhs {
            row.flip(nvars);
        }
        ech.reduce(&mut row);
        match row.first_one() {
            None => {}
            Some(p) if p == nvars => return None,
            Some(p) => {
                // keep rows fully reduced so back substitution is direct
                for (_, r) in ech.rows.iter_mut() {
                    if r.get(p) {
                        r.xor(&row);
                    }
                }
                ech.rows.push((p, row));
            }
        }
    }
    let mut x = vec![false; nvars];
    let pivots: BTreeSet<usize> = ech.rows.iter().map(|(p, _)| *p).collect();
    for (p, r) in &ech.rows {
        x[*p] = r.get(nvars);
    }
    let free = (0..nvars).filter(|i| !pivots.contains(i)).collect();
    Some((x, free))
}

fn d1_rows(group: &FiniteGroup) -> Vec<BitRow> {
    // one equation per (g,h): f(g)+f(h)+f(gh) = 0, in the n variables f(x)
    let n = group.order();
    let mut rows = Vec::with_capacity(n * n);
    for g in 0..n {
        for h in 0..n {
            let mut r = BitRow::zeros(n);
            r.flip(g);
            r.flip(h);
            r.flip(group.mul(g, h));
            rows.push(r);
        }
    }
    rows
}

/// `dim Hⁿ(G, F₂)` for `n ≤ 2` (trivial action).
pub fn cohomology_dim(group: &FiniteGroup, degree: usize) -> Result<usize> {
    let n = group.order();
    let e = group.identity();
    match degree {
        0 => Ok(1),
        1 => {
            // normalized 1-cochains: the n−1 values off the identity
            let mut ech = Echelon::new();
            for mut r in d1_rows(group) {
                if r.get(e) {
                    r.flip(e);
                }
                ech.insert(r);
            }
            Ok(n - 1 - ech.rank())
        }
        2 => {
            let z1 = cohomology_dim(group, 1)?;
            let b2 = (n - 1) - z1;
            let z2 = (n - 1) * (n - 1) - d2_rank(group);
            Ok(z2 - b2)
        }
        d => Err(Error::OutOfRange(format!("cohomology in degree {d} is not supported"))),
    }
}

/// Rank of `d: C²_norm → C³` on the `(n−1)²` normalized variables.
fn d2_rank(group: &FiniteGroup) -> usize {
    let n = group.order();
    let e = group.identity();
    let var = |g: usize, h: usize| -> Option<usize> { (g != e && h != e).then(|| g * n + h) };
    let mut ech = Echelon::new();
    for g in (0..n).filter(|&g| g != e) {
        for h in (0..n).filter(|&h| h != e) {
            for k in (0..n).filter(|&k| k != e) {
                let mut r = BitRow::zeros(n * n);
                for (a, b) in [(h, k), (group.mul(g, h), k), (g, group.mul(h, k)), (g, h)] {
                    if let Some(v) = var(a, b) {
                        r.flip(v);
                    }
                }
                ech.insert(r);
            }
        }
    }
    ech.rank()
}

/// Representatives of a basis of `H²(G, F₂)` and of `B²`, as normalized cocycles.
#[derive(Clone, Debug)]
pub struct SecondCohomology {
    pub classes: Vec<F2Cochain>,
    pub cocycle_basis: Vec<F2Cochain>,
}

/// A basis of normalized 2-cocycles and a choice of class representatives.
pub fn second_cohomology(group: &FiniteGroup) -> Result<SecondCohomology> {
    let n = group.order();
    let e = group.identity();
    let vars: Vec<(usize, usize)> = (0..n)
        .filter(|&g| g != e)
        .flat_map(|g| (0..n).filter(move |&h| h != e).map(move |h| (g, h)))
        .collect();
    let index = |g: usize, h: usize| vars.iter().position(|&p| p == (g, h));
    // nullspace of d² via a fully reduced echelon form
    let mut eqs = Vec::new();
    for g in (0..n).filter(|&g| g != e) {
        for h in (0..n).filter(|&h| h != e) {
            for k in (0..n).filter(|&k| k != e) {
                let mut r = BitRow::zeros(vars.len());
                for (a, b) in [(h, k), (group.mul(g, h), k), (g, group.mul(h, k)), (g, h)] {
                    if let Some(v) = index(a, b) {
                        r.flip(v);
                    }
                }
                eqs.push((r, false));
            }
        }
    }
    let (_, free) = solve_f2(vars.len(), eqs.clone()).expect("homogeneous systems are solvable");
    let to_cochain = |bits: &[bool]| {
        F2Cochain::degree2(group, |g, h| index(g, h).is_some_and(|v| bits[v]))
    };
    let mut cocycle_basis = Vec::new();
    for &fv in &free {
        // set one free variable and solve for the pivots
        let mut pinned = eqs.clone();
        for &other in &free {
            let mut r = BitRow::zeros(vars.len());
            r.flip(other);
            pinned.push((r, other == fv));
        }
        let (x, _) = solve_f2(vars.len(), pinned).expect("nullspace vector");
        cocycle_basis.push(to_cochain(&x)?);
    }
    // coboundaries first, then greedily extend to the cocycle space
    let mut ech = Echelon::new();
    let as_row = |c: &F2Cochain| {
        let mut r = BitRow::zeros(vars.len());
        for (v, &(g, h)) in vars.iter().enumerate() {
            if c.at2(g, h) {
                r.flip(v);
            }
        }
        r
    };
    for x in (0..n).filter(|&x| x != e) {
        let f = F2Cochain::degree1(group, |g| g == x)?;
        ech.insert(as_row(&coboundary(group, &f)?));
    }
    let mut classes = Vec::new();
    for z in &cocycle_basis {
        if ech.insert(as_row(z)) {
            classes.push(z.clone());
        }
    }
    Ok(SecondCohomology { classes, cocycle_basis })
}

/// `z = Σ cᵢ·hᵢ + df` for class representatives `hᵢ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassDecomposition {
    pub coordinates: Vec<bool>,
    pub correction: F2Cochain,
}

/// Writes a normalized 2-cocycle in terms of the given class representatives
/// plus a coboundary; errors if `z` is not a cocycle or not in their span.
pub fn decompose_in_basis(group: &FiniteGroup, classes: &[F2Cochain], z: &F2Cochain) -> Result<ClassDecomposition> {
    z.check_group(group)?;
    if z.degree != 2 || !is_cocycle(group, z)? {
        return Err(Error::NotACocycle("expected a normalized 2-cocycle".into()));
    }
    let n = group.order();
    let e = group.identity();
    let m = classes.len();
    // unknowns: c_0..c_{m−1}, then f(x) for x ≠ e (slot m + x; f(e) pinned to 0)
    let nvars = m + n;
    let mut eqs = Vec::with_capacity(n * n + 1);
    for g in 0..n {
        for h in 0..n {
            let mut r = BitRow::zeros(nvars);
            for (i, c) in classes.iter().enumerate() {
                if c.at2(g, h) {
                    r.flip(i);
                }
            }
            for x in [g, h, group.mul(g, h)] {
                r.flip(m + x);
            }
            eqs.push((r, z.at2(g, h)));
        }
    }
    let mut pin = BitRow::zeros(nvars);
    pin.flip(m + e);
    eqs.push((pin, false));
    let (x, free) = solve_f2(nvars, eqs).ok_or_else(|| Error::InvalidInput("cocycle outside the span of the classes".into()))?;
    if free.iter().any(|&v| v < m) {
        return Err(Error::InvalidInput("class representatives are dependent in cohomology".into()));
    }
    Ok(ClassDecomposition {
        coordinates: x[..m].to_vec(),
        correction: F2Cochain::degree1(group, |g| x[m + g])?,
    })
}

/// Coefficients `λᵢⱼ`, `i ≤ j`, of a class in the basis `xᵢ ∪ xⱼ` of
/// `H²((Z/2)^k, F₂)`, where `βᵢⱼ(g,h) = xᵢ(g)·xⱼ(h)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct CupCoefficients {
    k: usize,
    pairs: BTreeSet<(usize, usize)>,
}

impl CupCoefficients {
    pub fn zero(k: usize) -> CupCoefficients {
        CupCoefficients { k, pairs: BTreeSet::new() }
    }

    pub fn from_pairs(k: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<CupCoefficients> {
        let mut out = CupCoefficients::zero(k);
        for (i, j) in pairs {
            out.toggle(i, j)?;
        }
        Ok(out)
    }

    pub fn toggle(&mut self, i: usize, j: usize) -> Result<()> {
        let (i, j) = (i.min(j), i.max(j));
        if j >= self.k {
            return Err(Error::OutOfRange(format!("index {j} with {} generators", self.k)));
        }
        if !self.pairs.remove(&(i, j)) {
            self.pairs.insert((i, j));
        }
        Ok(())
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.pairs.contains(&(i.min(j), i.max(j)))
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn num_generators(&self) -> usize {
        self.k
    }

    pub fn is_zero(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn add(&self, rhs: &CupCoefficients) -> CupCoefficients {
        CupCoefficients { k: self.k.max(rhs.k), pairs: self.pairs.symmetric_difference(&rhs.pairs).copied().collect() }
    }

    /// `Σ λᵢⱼ βᵢⱼ` on the group with the given coordinates.
    pub fn synthesize(&self, group: &FiniteGroup, coords: &[u32]) -> Result<F2Cochain> {
        F2Cochain::degree2(group, |g, h| {
            self.pairs
                .iter()
                .filter(|&&(i, j)| coords[g] >> i & 1 == 1 && coords[h] >> j & 1 == 1)
                .count()
                % 2
                == 1
        })
    }
}

impl fmt::Display for CupCoefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pairs.is_empty() {
            return f.write_str("0");
        }
        let terms: Vec<String> = self.pairs.iter().map(|(i, j)| format!("x{}x{}", i + 1, j + 1)).collect();
        f.write_str(&terms.join(" + "))
    }
}

/// Result of [`decompose_cocycle`]: `z = Σ λᵢⱼ βᵢⱼ + df`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CupDecomposition {
    pub lambda: CupCoefficients,
    pub correction: F2Cochain,
}

/// Decomposes a normalized 2-cocycle on `(Z/2)^k` (with the given generators)
/// in the cup-product basis.
pub fn decompose_cocycle(group: &FiniteGroup, generators: &[usize], z: &F2Cochain) -> Result<CupDecomposition> {
    let coords = group.coordinates(generators)?;
    let k = generators.len();
    let basis_pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i..k).map(move |j| (i, j))).collect();
    let classes = basis_pairs
        .iter()
        .map(|&(i, j)| CupCoefficients::from_pairs(k, [(i, j)])?.synthesize(group, &coords))
        .collect::<Result<Vec<_>>>()?;
    let d = decompose_in_basis(group, &classes, z)?;
    let lambda = CupCoefficients::from_pairs(
        k,
        basis_pairs.iter().zip(&d.coordinates).filter(|(_, &c)| c).map(|(&p, _)| p),
    )?;
    Ok(CupDecomposition { lambda, correction: d.correction })
}

/// `Σ_{λᵢⱼ = 1} (rᵢ) ∪ (rⱼ)`: inflation from `Gal(L/Q)` to `H²(Q, Z/2)` when
/// `xᵢ` is the character of `√rᵢ`.
pub fn inflate_to_brauer(lambda: &CupCoefficients, radicands: &[SquareClass]) -> Result<BrauerClass> {
    if radicands.len() < lambda.num_generators() {
        return Err(Error::Mismatch(format!(
            "{} radicands for {} generators",
            radicands.len(),
            lambda.num_generators()
        )));
    }
    Ok(lambda.pairs().map(|(i, j)| cup(&radicands[i], &radicands[j])).sum())
}

/// [`inflate_to_brauer`] with integer radicands.
pub fn inflate_radicands(lambda: &CupCoefficients, radicands: &[i64]) -> Result<BrauerClass> {
    let classes = radicands
        .iter()
        .map(|&r| SquareClass::from_rational(&Rational::from_integer(r.into())))
        .collect::<Result<Vec<_>>>()?;
    inflate_to_brauer(lambda, &classes)
}
