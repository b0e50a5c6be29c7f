//! The verification grid: diagonal forms with small entries, quadratic twists,
//! and every involutive signed-permutation cocycle, each checked by the
//! Clifford route and the invariant route.

use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value};

use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::exec::{map_ordered, Strategy};
use crate::linalg::QMatrix;
use crate::quadform::DiagonalForm;
use crate::twists::{verify_twist_with, LiftChoices, OrthCocycle, TwistReport};
use crate::universal::{cq_class, det_class, specialize};

pub const ENTRIES: [i64; 8] = [1, -1, 2, -2, 3, -3, 5, -5];
pub const TWISTS: [i64; 7] = [-1, -2, -3, 2, 3, 5, 6];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridSpec {
    /// Every form of rank ≤ 4 up to reordering, all seven twists.
    Default,
    /// Rank ≤ 2 and three twists; for smoke tests.
    Small,
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<GridSpec> {
        match s {
            "default" => Ok(GridSpec::Default),
            "small" => Ok(GridSpec::Small),
            other => Err(Error::Parse(format!("unknown grid {other:?} (expected default or small)"))),
        }
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GridSpec::Default => "default",
            GridSpec::Small => "small",
        })
    }
}

/// Non-decreasing index sequences into `ENTRIES`, i.e. forms up to reordering.
fn multisets(rank: usize) -> Vec<Vec<i64>> {
    fn go(rank: usize, start: usize, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if prefix.len() == rank {
            out.push(prefix.clone());
            return;
        }
        for (i, &a) in ENTRIES.iter().enumerate().skip(start) {
            prefix.push(a);
            go(rank, i, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(rank, 0, &mut Vec::new(), &mut out);
    out
}

/// The forms of the grid, in a fixed order.
pub fn grid_forms(spec: GridSpec) -> Vec<DiagonalForm> {
    let ranks: Vec<Vec<i64>> = match spec {
        GridSpec::Small => (1..=2).flat_map(multisets).collect(),
        GridSpec::Default => (1..=4).flat_map(multisets).collect(),
    };
    ranks
        .iter()
        .map(|a| DiagonalForm::from_ints(a).expect("nonzero entries"))
        .collect()
}

pub fn grid_twists(spec: GridSpec) -> Vec<i64> {
    match spec {
        GridSpec::Default => TWISTS.to_vec(),
        GridSpec::Small => vec![-1, 3, 5],
    }
}

/// All `M ≠ 1` with `M² = 1` that permute the basis up to sign and preserve q.
pub fn signed_involutions(form: &DiagonalForm) -> Vec<QMatrix> {
    let n = form.rank();
    let a = form.entries();
    let mut out = Vec::new();
    // involutions as partner maps, built left to right
    fn partners(n: usize, current: &mut Vec<Option<usize>>, i: usize, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(current.iter().map(|p| p.expect("assigned")).collect());
            return;
        }
        if current[i].is_some() {
            return partners(n, current, i + 1, out);
        }
        current[i] = Some(i);
        partners(n, current, i + 1, out);
        for j in i + 1..n {
            if current[j].is_none() {
                current[i] = Some(j);
                current[j] = Some(i);
                partners(n, current, i + 1, out);
                current[j] = None;
            }
        }
        current[i] = None;
    }
    let mut perms = Vec::new();
    partners(n, &mut vec![None; n], 0, &mut perms);
    for p in perms {
        if (0..n).any(|i| a[p[i]] != a[i]) {
            continue;
        }
        // one sign per fixed point and per 2-cycle (both entries of a cycle share it)
        let blocks: Vec<usize> = (0..n).filter(|&i| p[i] >= i).collect();
        for signs in 0u32..1 << blocks.len() {
            let mut s = vec![1i64; n];
            for (b, &i) in blocks.iter().enumerate() {
                if signs >> b & 1 == 1 {
                    s[i] = -1;
                    s[p[i]] = -1;
                }
            }
            if signs == 0 && (0..n).all(|i| p[i] == i) {
                continue;
            }
            // column i is s_i·e_{p(i)}
            out.push(QMatrix::from_fn(n, n, |r, c| {
                Rational::from_integer(if r == p[c] { s[c] } else { 0 }.into())
            }));
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct GridCell {
    pub form: DiagonalForm,
    pub d: i64,
    pub matrix: QMatrix,
}

impl GridCell {
    pub fn cocycle(&self) -> Result<OrthCocycle> {
        OrthCocycle::quadratic(&self.form, self.d, &self.matrix)
    }

    pub fn label(&self) -> String {
        let rows: Vec<String> = self
            .matrix
            .to_rows()
            .iter()
            .map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>().join(","))
            .collect();
        format!("q={} d={} c(σ)=[{}]", self.form, self.d, rows.join(";"))
    }
}

pub fn grid_cells(spec: GridSpec) -> Vec<GridCell> {
    let twists = grid_twists(spec);
    let mut cells = Vec::new();
    for form in grid_forms(spec) {
        let mats = signed_involutions(&form);
        for &d in &twists {
            for m in &mats {
                cells.push(GridCell { form: form.clone(), d, matrix: m.clone() });
            }
        }
    }
    cells
}

/// Per-cell verdicts.
#[derive(Clone, Debug)]
pub struct CellOutcome {
    pub label: String,
    pub report: std::result::Result<TwistReport, Error>,
    /// `specialize(det[q])` at the twist equals `δ¹`.
    pub bridge_delta1: bool,
    /// `specialize([C_q])` at the twist equals `δ²`.
    pub bridge_delta2: bool,
}

impl CellOutcome {
    pub fn delta2_routes_agree(&self) -> bool {
        self.report.as_ref().is_ok_and(TwistReport::delta2_routes_agree)
    }

    pub fn w1_identity(&self) -> bool {
        self.report.as_ref().is_ok_and(TwistReport::w1_identity)
    }

    pub fn w2_identity(&self) -> bool {
        self.report.as_ref().is_ok_and(TwistReport::w2_identity)
    }

    pub fn passed(&self) -> bool {
        self.delta2_routes_agree() && self.w1_identity() && self.w2_identity() && self.bridge_delta1 && self.bridge_delta2
    }

    pub fn to_json(&self) -> Value {
        json!({
            "cell": self.label,
            "report": match &self.report {
                Ok(r) => r.to_json(),
                Err(e) => json!({ "error": e.to_string() }),
            },
            "bridge_delta1": self.bridge_delta1,
            "bridge_delta2": self.bridge_delta2,
        })
    }
}

pub fn evaluate_cell(cell: &GridCell, choices: &LiftChoices) -> CellOutcome {
    let report = cell.cocycle().and_then(|c| verify_twist_with(&c, choices));
    let (bridge_delta1, bridge_delta2) = match &report {
        Ok(r) => {
            let det = specialize(&det_class(&r.w1), &r.w1_twisted, &r.w2_twisted);
            let cq = specialize(&cq_class(&r.w1, &r.w2), &r.w1_twisted, &r.w2_twisted);
            (det.deg1 == r.delta1, cq.deg2 == r.delta2)
        }
        Err(_) => (false, false),
    };
    CellOutcome { label: cell.label(), report, bridge_delta1, bridge_delta2 }
}

#[derive(Clone, Debug)]
pub struct GridSummary {
    pub spec: Option<GridSpec>,
    pub forms: usize,
    pub outcomes: Vec<CellOutcome>,
}

impl GridSummary {
    pub fn cells(&self) -> usize {
        self.outcomes.len()
    }

    fn count(&self, f: impl Fn(&CellOutcome) -> bool) -> usize {
        self.outcomes.iter().filter(|o| !f(o)).count()
    }

    pub fn delta2_mismatches(&self) -> usize {
        self.count(CellOutcome::delta2_routes_agree)
    }

    pub fn w1_mismatches(&self) -> usize {
        self.count(CellOutcome::w1_identity)
    }

    pub fn w2_mismatches(&self) -> usize {
        self.count(CellOutcome::w2_identity)
    }

    pub fn bridge_mismatches(&self) -> usize {
        self.count(|o| o.bridge_delta1 && o.bridge_delta2)
    }

    pub fn errors(&self) -> usize {
        self.outcomes.iter().filter(|o| o.report.is_err()).count()
    }

    pub fn failures(&self) -> impl Iterator<Item = &CellOutcome> {
        self.outcomes.iter().filter(|o| !o.passed())
    }

    pub fn all_pass(&self) -> bool {
        self.outcomes.iter().all(CellOutcome::passed)
    }
}

pub fn run_cells(cells: &[GridCell], choices: &LiftChoices, strategy: Strategy) -> Vec<CellOutcome> {
    map_ordered(cells, strategy, |cell| evaluate_cell(cell, choices))
}

pub fn run_grid(spec: GridSpec, strategy: Strategy) -> GridSummary {
    let cells = grid_cells(spec);
    GridSummary {
        spec: Some(spec),
        forms: grid_forms(spec).len(),
        outcomes: run_cells(&cells, &LiftChoices::default(), strategy),
    }
}
