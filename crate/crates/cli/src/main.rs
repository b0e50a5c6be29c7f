//! `hasse-witt`: invariants of rational quadratic forms, their Galois twists,
//! and the checks relating them.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hasse_witt::arith::{parse_rational, Place};
use hasse_witt::error::Error;
use hasse_witt::exec::Strategy;
use hasse_witt::galois::{cup, BrauerClass, SquareClass};
use hasse_witt::grid::{grid_cells, grid_twists, run_cells, GridSpec};
use hasse_witt::groupcoh::{cohomology_dim, FiniteGroup};
use hasse_witt::linalg::QMatrix;
use hasse_witt::quadform::{DiagonalForm, LocalData, QuadraticForm};
use hasse_witt::twists::{parse_polynomial, trace_form, verify_twist, LiftChoices, OrthCocycle};
use hasse_witt::universal::{check_sq_identity, cq_class, det_class, sq_unit};

#[derive(Parser)]
#[command(name = "hasse-witt", version, about = "Hasse-Witt invariants and Galois twists of rational quadratic forms")]
struct Cli {
    /// Emit canonical JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rank, w1, w2, signature and local Hasse signs of a form.
    Invariants(FormArgs),
    /// Twist a diagonal form by a Galois cocycle and check the twist identities.
    Twist(TwistArgs),
    /// Run the verification grid and print a pass/fail matrix.
    Verify(VerifyArgs),
    /// Trace form of Q[x]/(f), coefficients leading first, e.g. "1,0,-3".
    Traceform {
        #[arg(allow_hyphen_values = true)]
        coefficients: String,
    },
    /// The universal classes det[q] and [C_q] for given w1, w2.
    Universal(UniversalArgs),
    /// Dimensions of H^1 and H^2 of a finite group with F2 coefficients.
    Groupcoh(GroupArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct FormArgs {
    /// Diagonal entries, e.g. "2,6" or "1/2,-3".
    #[arg(long, allow_hyphen_values = true)]
    diag: Option<String>,
    /// Gram matrix as JSON, e.g. "[[0,1],[1,0]]".
    #[arg(long)]
    gram: Option<String>,
}

#[derive(Args)]
struct TwistArgs {
    /// Diagonal entries of the form; taken from the cocycle file when omitted.
    #[arg(long, allow_hyphen_values = true)]
    diag: Option<String>,
    /// Twist by the swap of two coordinates over Q(√d).
    #[arg(long, allow_hyphen_values = true, conflicts_with = "cocycle", required_unless_present = "cocycle")]
    quadratic_swap: Option<i64>,
    /// Coordinates exchanged by --quadratic-swap (1-based).
    #[arg(long, default_value = "1,2")]
    swap: String,
    /// Cocycle in JSON: {"radicands": [..], "form": [..], "values": {"mask": matrix}}.
    #[arg(long)]
    cocycle: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value = "default")]
    grid: GridSpec,
    #[arg(long, value_enum, default_value = "auto")]
    strategy: StrategyArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Auto,
    Sequential,
    Parallel,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Strategy {
        match s {
            StrategyArg::Auto => Strategy::Auto,
            StrategyArg::Sequential => Strategy::Sequential,
            StrategyArg::Parallel => Strategy::Parallel,
        }
    }
}

#[derive(Args)]
struct UniversalArgs {
    /// w1 as a rational square-class representative.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    w1: String,
    /// w2 as its ramified places, e.g. "2,3" or "2,inf"; empty for the zero class.
    #[arg(long, default_value = "")]
    w2: String,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct GroupArgs {
    #[arg(long)]
    cyclic: Option<usize>,
    /// (Z/2)^k.
    #[arg(long)]
    elementary: Option<usize>,
    /// Symmetries of the n-gon, of order 2n.
    #[arg(long)]
    dihedral: Option<usize>,
    /// Multiplication table in JSON: {"elements": [..], "table": [[..], ..]}.
    #[arg(long)]
    table: Option<PathBuf>,
}

/// What a command produced: text and JSON renderings, and whether every
/// identity it checked holds.
struct Report {
    text: String,
    json: Value,
    holds: bool,
    dump: Option<Value>,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Math(#[from] Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Math(Error::Singular) => 3,
            CliError::Math(Error::UnsupportedSplittingField(_)) => 4,
            CliError::Math(Error::Descent(_)) => 1,
            _ => 2,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

fn aligned(rows: &[(&str, String)]) -> String {
    let width = rows.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    rows.iter()
        .map(|(k, v)| format!("{k:<width$}  {v}\n"))
        .collect()
}

fn mark(b: bool) -> &'static str {
    if b {
        "✓"
    } else {
        "✗"
    }
}

fn gram_json(m: &QMatrix) -> Value {
    json!(m.to_rows().iter().map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn local_json(l: &LocalData) -> Value {
    let hasse: serde_json::Map<String, Value> = l.hasse.iter().map(|(v, s)| (v.to_string(), json!(s))).collect();
    json!(hasse)
}

fn local_text(l: &LocalData) -> String {
    l.hasse.iter().map(|(v, s)| format!("{v}:{s:+}")).collect::<Vec<_>>().join(" ")
}

fn form_report(command: &str, input: Value, q: &QuadraticForm) -> Report {
    let (diag, _) = q.diagonalize();
    let local = q.local_data();
    let (pos, neg) = local.signature;
    let text = aligned(&[
        ("rank", local.rank.to_string()),
        ("gram", q.to_string()),
        ("diagonal", diag.to_string()),
        ("det", q.det().to_string()),
        ("w1", q.w1().to_string()),
        ("w2", q.w2().to_string()),
        ("signature", format!("({pos}, {neg})")),
        ("hasse", local_text(&local)),
    ]);
    let json = json!({
        "command": command,
        "input": input,
        "rank": local.rank,
        "gram": gram_json(q.gram()),
        "diagonal": diag.entries().iter().map(ToString::to_string).collect::<Vec<_>>(),
        "det": q.det().to_string(),
        "w1": q.w1().to_string(),
        "w2": q.w2().to_string(),
        "signature": [pos, neg],
        "hasse": local_json(&local),
    });
    Report { text, json, holds: true, dump: None }
}

fn cmd_invariants(args: &FormArgs) -> Result<Report, CliError> {
    let (q, input) = match (&args.diag, &args.gram) {
        (Some(d), _) => (DiagonalForm::parse(d)?.to_form(), json!({ "diag": d })),
        (_, Some(g)) => (QuadraticForm::parse_gram(g)?, json!({ "gram": g })),
        _ => unreachable!("clap requires one of --diag, --gram"),
    };
    Ok(form_report("invariants", input, &q))
}

fn parse_swap(s: &str) -> Result<(usize, usize), Error> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|x| x.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad coordinate {x:?}"))))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [i, j] if i >= 1 && j >= 1 => Ok((i - 1, j - 1)),
        _ => Err(Error::Parse(format!("--swap expects two 1-based coordinates, got {s:?}"))),
    }
}

fn cmd_twist(args: &TwistArgs) -> Result<Report, CliError> {
    let (c, input) = match (&args.quadratic_swap, &args.cocycle) {
        (Some(d), _) => {
            let diag = args
                .diag
                .as_deref()
                .ok_or_else(|| Error::InvalidInput("--quadratic-swap needs --diag".into()))?;
            let form = DiagonalForm::parse(diag)?;
            let (i, j) = parse_swap(&args.swap)?;
            let c = OrthCocycle::quadratic_swap(&form, *d, i, j)?;
            (c, json!({ "diag": diag, "quadratic_swap": d, "swap": args.swap }))
        }
        (_, Some(path)) => {
            let c = OrthCocycle::from_json(&read(path)?)?;
            if let Some(diag) = &args.diag {
                if DiagonalForm::parse(diag)? != *c.form() {
                    return Err(Error::Mismatch(format!("--diag {diag} differs from the cocycle's form {}", c.form())).into());
                }
            }
            let input = json!({ "cocycle": c.to_json() });
            (c, input)
        }
        _ => unreachable!("clap requires --quadratic-swap or --cocycle"),
    };
    let r = verify_twist(&c)?;
    let radicands = c.field().radicands().iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
    let text = aligned(&[
        ("q", r.form.to_string()),
        ("field", format!("Q(√{{{radicands}}})")),
        ("q_α", r.twisted.diagonalize().0.to_string()),
        ("gram(q_α)", r.twisted.to_string()),
        ("w1(q)", r.w1.to_string()),
        ("w2(q)", r.w2.to_string()),
        ("w1(q_α)", r.w1_twisted.to_string()),
        ("w2(q_α)", r.w2_twisted.to_string()),
        ("δ1", r.delta1.to_string()),
        ("δ2", r.delta2.to_string()),
        ("w1 identity", format!("{} {} = {}", mark(r.w1_identity()), r.w1_twisted, r.w1_predicted)),
        ("w2 identity", format!("{} {} = {}", mark(r.w2_identity()), r.w2_twisted, r.w2_predicted)),
        ("δ2 two routes", format!("{} {} = {}", mark(r.delta2_routes_agree()), r.delta2, r.delta2_from_invariants)),
    ]);
    let holds = r.all_hold();
    Ok(Report {
        text,
        json: json!({ "command": "twist", "input": input, "report": r.to_json() }),
        holds,
        dump: (!holds).then(|| json!({ "cocycle": c.to_json(), "report": r.to_json() })),
    })
}

fn cmd_verify(args: &VerifyArgs) -> Result<Report, CliError> {
    let cells = grid_cells(args.grid);
    let start = Instant::now();
    let outcomes = run_cells(&cells, &LiftChoices::default(), args.strategy.into());
    eprintln!("{} cells in {:.1?}", cells.len(), start.elapsed());

    let twists = grid_twists(args.grid);
    // (rank, d) → (passed, total)
    let mut matrix: BTreeMap<(usize, i64), (usize, usize)> = BTreeMap::new();
    for (cell, o) in cells.iter().zip(&outcomes) {
        let e = matrix.entry((cell.form.rank(), cell.d)).or_default();
        e.0 += usize::from(o.passed());
        e.1 += 1;
    }
    let ranks: Vec<usize> = {
        let mut r: Vec<usize> = matrix.keys().map(|k| k.0).collect();
        r.dedup();
        r
    };
    let failures: Vec<Value> = outcomes.iter().filter(|o| !o.passed()).map(|o| o.to_json()).collect();
    let count = |f: &dyn Fn(&hasse_witt::grid::CellOutcome) -> bool| outcomes.iter().filter(|o| !f(o)).count();
    let mismatches = json!({
        "delta2_two_routes": count(&|o| o.delta2_routes_agree()),
        "w1_identity": count(&|o| o.w1_identity()),
        "w2_identity": count(&|o| o.w2_identity()),
        "bridge": count(&|o| o.bridge_delta1 && o.bridge_delta2),
        "errors": outcomes.iter().filter(|o| o.report.is_err()).count(),
    });

    let mut text = format!("grid {}: {} cells\n", args.grid, cells.len());
    text.push_str(&format!("{:<8}", "rank\\d"));
    for d in &twists {
        text.push_str(&format!("{d:>12}"));
    }
    text.push('\n');
    for &rank in &ranks {
        text.push_str(&format!("{rank:<8}"));
        for d in &twists {
            let (p, t) = matrix.get(&(rank, *d)).copied().unwrap_or_default();
            text.push_str(&format!("{:>12}", format!("{p}/{t}")));
        }
        text.push('\n');
    }
    text.push_str(&format!("mismatches {mismatches}\n"));
    for f in failures.iter().take(20) {
        text.push_str(&format!("FAIL {f}\n"));
    }

    let json = json!({
        "command": "verify",
        "input": { "grid": args.grid.to_string() },
        "cells": cells.len(),
        "matrix": matrix.iter().map(|(&(rank, d), &(p, t))| json!({ "rank": rank, "d": d, "passed": p, "total": t })).collect::<Vec<_>>(),
        "mismatches": mismatches,
        "failures": failures,
    });
    Ok(Report { text, json, holds: failures.is_empty(), dump: None })
}

fn cmd_traceform(coefficients: &str) -> Result<Report, CliError> {
    let f = parse_polynomial(coefficients)?;
    let q = trace_form(&f)?;
    Ok(form_report("traceform", json!({ "coefficients": coefficients }), &q))
}

fn parse_places(s: &str) -> Result<BrauerClass, Error> {
    let places = s
        .split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| match x {
            "inf" | "∞" | "infinity" => Ok(Place::Infinity),
            p => p.parse::<u64>().map_err(|_| Error::Parse(format!("bad place {p:?}"))).and_then(Place::prime),
        })
        .collect::<Result<Vec<_>, _>>()?;
    BrauerClass::new(places)
}

fn cmd_universal(args: &UniversalArgs) -> Result<Report, CliError> {
    let w1 = SquareClass::from_rational(&parse_rational(&args.w1)?)?;
    let w2 = parse_places(&args.w2)?;
    let det = det_class(&w1);
    let cq = cq_class(&w1, &w2);
    let holds = check_sq_identity(&w1, &w2);
    let text = aligned(&[
        ("w1", w1.to_string()),
        ("w2", w2.to_string()),
        ("w1∪w1", cup(&w1, &w1).to_string()),
        ("det[q]", det.to_string()),
        ("[C_q]", cq.to_string()),
        ("s_q", sq_unit(&w1, &w2).to_string()),
        ("s_q identity", mark(holds).to_string()),
    ]);
    let json = json!({
        "command": "universal",
        "input": { "w1": args.w1, "w2": args.w2 },
        "w1": w1.to_string(),
        "w2": w2.to_string(),
        "w1_cup_w1": cup(&w1, &w1).to_string(),
        "det": det.to_string(),
        "cq": cq.to_string(),
        "sq": sq_unit(&w1, &w2).to_string(),
        "sq_identity": holds,
    });
    Ok(Report { text, json, holds, dump: None })
}

fn cmd_groupcoh(args: &GroupArgs) -> Result<Report, CliError> {
    let (group, input) = match args {
        GroupArgs { cyclic: Some(n), .. } => (FiniteGroup::cyclic(*n)?, json!({ "cyclic": n })),
        GroupArgs { elementary: Some(k), .. } => (FiniteGroup::elementary_abelian(*k)?, json!({ "elementary": k })),
        GroupArgs { dihedral: Some(n), .. } => (FiniteGroup::dihedral(*n)?, json!({ "dihedral": n })),
        GroupArgs { table: Some(path), .. } => {
            (FiniteGroup::from_json(&read(path)?)?, json!({ "table": path.display().to_string() }))
        }
        _ => unreachable!("clap requires one group"),
    };
    let h1 = cohomology_dim(&group, 1)?;
    let h2 = cohomology_dim(&group, 2)?;
    let text = aligned(&[
        ("order", group.order().to_string()),
        ("abelian", group.is_abelian().to_string()),
        ("dim H1", h1.to_string()),
        ("dim H2", h2.to_string()),
    ]);
    let json = json!({
        "command": "groupcoh",
        "input": input,
        "order": group.order(),
        "abelian": group.is_abelian(),
        "dim_h1": h1,
        "dim_h2": h2,
    });
    Ok(Report { text, json, holds: true, dump: None })
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    match &cli.command {
        Command::Invariants(a) => cmd_invariants(a),
        Command::Twist(a) => cmd_twist(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Traceform { coefficients } => cmd_traceform(coefficients),
        Command::Universal(a) => cmd_universal(a),
        Command::Groupcoh(a) => cmd_groupcoh(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&report.json).expect("serializable"));
            } else {
                print!("{}", report.text);
            }
            if report.holds {
                ExitCode::SUCCESS
            } else {
                if let Some(dump) = report.dump {
                    eprintln!("identity failure: {dump}");
                }
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
