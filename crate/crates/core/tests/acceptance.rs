//! End-to-end acceptance checks. Runs as a plain binary so every verdict line
//! is printed, and exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use hasse_witt::arith::{hilbert_oracle, hilbert_symbol, is_prime, rat, ratio, squarefree_part, Place};
use hasse_witt::exec::Strategy;
use hasse_witt::galois::{cup, BrauerClass, SquareClass};
use hasse_witt::grid::{grid_cells, run_grid, CellOutcome, GridSpec, GridSummary};
use hasse_witt::groupcoh::{
    coboundary, cohomology_dim, decompose_cocycle, decompose_in_basis, second_cohomology, F2Cochain, FiniteGroup,
};
use hasse_witt::linalg::QMatrix;
use hasse_witt::quadform::{random_invertible, DiagonalForm, PivotStrategy, QuadraticForm};
use hasse_witt::twists::{delta2_with, regular_rep_cocycle, trace_form, twist_form, LiftChoices};
use hasse_witt::universal::{check_sq_identity, cq_class, det_class, specialize, UniversalElement};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Verdict = Result<String, String>;

fn primes_up_to(n: u64) -> Vec<u64> {
    (2..=n).filter(|&p| is_prime(p)).collect()
}

fn hilbert_matches_oracle() -> Verdict {
    let start = Instant::now();
    let mut places = vec![Place::Infinity];
    places.extend(primes_up_to(50).into_iter().map(Place::Prime));
    let mut checked = 0usize;
    let mut mismatches = Vec::new();
    for a in (-50i64..=50).filter(|&a| a != 0) {
        for b in (-50i64..=50).filter(|&b| b != 0) {
            for &v in &places {
                let fast = hilbert_symbol(&rat(a), &rat(b), v).map_err(|e| e.to_string())?;
                let slow = hilbert_oracle(a, b, v).map_err(|e| e.to_string())?;
                checked += 1;
                if fast != slow {
                    mismatches.push(format!("({a},{b})_{v}: formula {fast}, oracle {slow}"));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    if !mismatches.is_empty() {
        return Err(format!("{} mismatches, first {}", mismatches.len(), mismatches[0]));
    }
    if elapsed >= Duration::from_secs(60) {
        return Err(format!("took {elapsed:.1?}"));
    }
    Ok(format!("{checked} symbols, 0 mismatches, {elapsed:.1?}"))
}

fn reciprocity() -> Verdict {
    let mut failures = Vec::new();
    let mut pairs = 0usize;
    for a in (-100i64..=100).filter(|&a| a != 0) {
        for b in (-100i64..=100).filter(|&b| b != 0) {
            pairs += 1;
            let mut places = vec![Place::Infinity];
            places.extend(
                primes_up_to(100)
                    .into_iter()
                    .filter(|&p| p == 2 || a % p as i64 == 0 || b % p as i64 == 0)
                    .map(Place::Prime),
            );
            let mut product = 1i8;
            let mut negative = std::collections::BTreeSet::new();
            for v in places {
                let s = hilbert_symbol(&rat(a), &rat(b), v).map_err(|e| e.to_string())?;
                product *= s;
                if s == -1 {
                    negative.insert(v);
                }
            }
            let class = cup(&SquareClass::from_int(a).unwrap(), &SquareClass::from_int(b).unwrap());
            if product != 1 || !class.ramified().len().is_multiple_of(2) || *class.ramified() != negative {
                failures.push(format!("({a},{b}): product {product}, ramified {class}"));
            }
        }
    }
    match failures.first() {
        None => Ok(format!("{pairs} pairs, 0 failures")),
        Some(f) => Err(format!("{} failures, first {f}", failures.len())),
    }
}

fn random_symmetric(n: usize, rng: &mut ChaCha8Rng) -> QuadraticForm {
    loop {
        let mut m = QMatrix::filled(n, n, rat(0));
        for i in 0..n {
            for j in i..n {
                // zero diagonals now and then, to exercise the off-diagonal pivot
                let x = if i == j && rng.gen_bool(0.3) { rat(0) } else { ratio(rng.gen_range(-5..=5), rng.gen_range(1..=3)) };
                m.set(i, j, x.clone());
                m.set(j, i, x);
            }
        }
        if let Ok(q) = QuadraticForm::new(m) {
            return q;
        }
    }
}

fn diagonalization_invariance() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut failures = Vec::new();
    for _ in 0..50 {
        let n = rng.gen_range(1..=5);
        let q = random_symmetric(n, &mut rng);
        let (d1, _) = q.diagonalize_with(PivotStrategy::LargestMagnitude);
        let (d2, _) = q.diagonalize_with(PivotStrategy::FirstNonzero);
        let reference = (d1.w1(), d1.w2(), d1.local_data());
        if (d2.w1(), d2.w2(), d2.local_data()) != reference {
            failures.push(format!("pivot strategies disagree on {d1} vs {d2}"));
        }
        for _ in 0..20 {
            let p = random_invertible(n, &mut rng);
            let moved = q.transform(&p).map_err(|e| e.to_string())?;
            if (moved.w1(), moved.w2(), moved.local_data()) != reference {
                failures.push(format!("congruence changed the invariants of {d1}"));
            }
        }
    }
    match failures.first() {
        None => Ok("50 forms × (2 pivots + 20 congruences), 0 failures".into()),
        Some(f) => Err(format!("{} failures, first {f}", failures.len())),
    }
}

fn first_dump(summary: &GridSummary, f: impl Fn(&CellOutcome) -> bool) -> String {
    summary
        .outcomes
        .iter()
        .find(|o| !f(o))
        .map(|o| o.to_json().to_string())
        .unwrap_or_default()
}

fn delta2_two_routes(summary: &GridSummary, elapsed: Duration) -> Verdict {
    let bad = summary.delta2_mismatches() + summary.w2_mismatches();
    if summary.forms < 200 {
        return Err(format!("only {} forms", summary.forms));
    }
    if bad > 0 {
        return Err(format!(
            "{} δ² mismatches, {} w₂ identity failures, {} errors; first {}",
            summary.delta2_mismatches(),
            summary.w2_mismatches(),
            summary.errors(),
            first_dump(summary, |o| o.delta2_routes_agree() && o.w2_identity())
        ));
    }
    if elapsed >= Duration::from_secs(600) {
        return Err(format!("took {elapsed:.1?}"));
    }
    Ok(format!("{} forms, {} cells, 0 mismatches, {elapsed:.1?}", summary.forms, summary.cells()))
}

fn w1_identity(summary: &GridSummary) -> Verdict {
    match summary.w1_mismatches() {
        0 => Ok(format!("{} cells, 0 mismatches", summary.cells())),
        n => Err(format!("{n} mismatches; first {}", first_dump(summary, CellOutcome::w1_identity))),
    }
}

fn trace_form_bridge() -> Verdict {
    let mut checked = 0;
    for d in (-30i64..=30).filter(|&d| d != 0 && d != 1) {
        if squarefree_part(&rat(d)).map_err(|e| e.to_string())? != d.into() {
            continue;
        }
        let trace = trace_form(&[rat(1), rat(0), rat(-d)]).map_err(|e| e.to_string())?;
        let twisted = twist_form(&regular_rep_cocycle(d).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        if !trace.is_equivalent(&twisted) {
            return Err(format!("d = {d}: trace form {:?} vs twist {:?}", trace.gram(), twisted.gram()));
        }
        checked += 1;
    }
    Ok(format!("{checked} squarefree d, 0 failures"))
}

fn random_even_brauer(rng: &mut ChaCha8Rng) -> BrauerClass {
    let pool = [Place::Prime(2), Place::Prime(3), Place::Prime(5), Place::Prime(7), Place::Prime(11), Place::Infinity];
    let mut places: Vec<Place> = pool.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
    if places.len() % 2 == 1 {
        places.push(Place::Prime(13));
    }
    BrauerClass::new(places).expect("even ramification")
}

fn universal_identity() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let radicands = [-30, -15, -7, -6, -5, -3, -2, -1, 1, 2, 3, 5, 6, 7, 10, 11, 13, 15, 21, 30];
    for _ in 0..100 {
        let w1 = SquareClass::from_int(*radicands.choose(&mut rng).unwrap()).unwrap();
        let w2 = random_even_brauer(&mut rng);
        if !check_sq_identity(&w1, &w2) {
            return Err(format!("identity fails at ({w1}, {w2})"));
        }
    }
    let worked = [
        (DiagonalForm::standard(2), SquareClass::one(), BrauerClass::zero()),
        (
            DiagonalForm::from_ints(&[2, 6]).unwrap(),
            SquareClass::from_int(3).unwrap(),
            BrauerClass::new([Place::Prime(2), Place::Prime(3)]).unwrap(),
        ),
        (
            DiagonalForm::from_ints(&[-1, -1]).unwrap(),
            SquareClass::one(),
            BrauerClass::new([Place::Prime(2), Place::Infinity]).unwrap(),
        ),
    ];
    for (q, w1, w2) in &worked {
        if (&q.w1(), &q.w2()) != (w1, w2) {
            return Err(format!("{q}: invariants ({}, {}) differ from ({w1}, {w2})", q.w1(), q.w2()));
        }
        if !check_sq_identity(w1, w2) {
            return Err(format!("identity fails for {q}"));
        }
    }
    for n in 1..=8 {
        let t = DiagonalForm::standard(n);
        if det_class(&t.w1()) != UniversalElement::hw1() || cq_class(&t.w1(), &t.w2()) != UniversalElement::hw2() {
            return Err(format!("t_{n} does not specialize to HW1, HW2"));
        }
    }
    let (three, flagship) = (SquareClass::from_int(3).unwrap(), worked[1].2.clone());
    let t2 = &worked[0];
    if specialize(&det_class(&t2.1), &three, &flagship).deg1 != three
        || specialize(&cq_class(&t2.1, &t2.2), &three, &flagship).deg2 != flagship
    {
        return Err("t_2 classes do not specialize to the flagship twist".into());
    }
    Ok("100 random pairs + 3 worked cases, t_1..t_8 give HW1 and HW2".into())
}

fn corollary_bridge(summary: &GridSummary) -> Verdict {
    match summary.bridge_mismatches() {
        0 => Ok(format!("{} cells, det and C_q specialize to δ¹, δ²", summary.cells())),
        n => Err(format!("{n} mismatches; first {}", first_dump(summary, |o| o.bridge_delta1 && o.bridge_delta2))),
    }
}

fn random_cocycle(group: &FiniteGroup, classes: &[F2Cochain], rng: &mut ChaCha8Rng) -> (Vec<bool>, F2Cochain) {
    let e = group.identity();
    let bits: Vec<bool> = (0..group.order()).map(|g| g != e && rng.gen_bool(0.5)).collect();
    let f = F2Cochain::degree1(group, |g| bits[g]).unwrap();
    let coeffs: Vec<bool> = classes.iter().map(|_| rng.gen_bool(0.5)).collect();
    let mut z = coboundary(group, &f).unwrap();
    for (c, h) in coeffs.iter().zip(classes) {
        if *c {
            z = z.add(h);
        }
    }
    (coeffs, z)
}

fn group_cohomology() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let err = |e: hasse_witt::error::Error| e.to_string();
    let z3 = FiniteGroup::cyclic(3).map_err(err)?;
    let mut odd: Vec<FiniteGroup> = [1, 3, 5, 7, 9, 11, 13, 15].iter().map(|&n| FiniteGroup::cyclic(n).unwrap()).collect();
    odd.push(z3.direct_product(&z3).map_err(err)?);
    for g in &odd {
        let (h1, h2) = (cohomology_dim(g, 1).map_err(err)?, cohomology_dim(g, 2).map_err(err)?);
        if (h1, h2) != (0, 0) {
            return Err(format!("order {}: dim H¹ = {h1}, dim H² = {h2}", g.order()));
        }
    }
    for k in 1..=3 {
        let g = FiniteGroup::elementary_abelian(k).map_err(err)?;
        let h2 = cohomology_dim(&g, 2).map_err(err)?;
        if h2 != k * (k + 1) / 2 {
            return Err(format!("(Z/2)^{k}: dim H² = {h2}"));
        }
    }

    let mut groups = odd.clone();
    groups.extend([
        FiniteGroup::cyclic(2).unwrap(),
        FiniteGroup::cyclic(4).unwrap(),
        FiniteGroup::dihedral(4).unwrap(),
        FiniteGroup::cyclic(2).unwrap().direct_product(&FiniteGroup::cyclic(4).unwrap()).unwrap(),
    ]);
    for g in &groups {
        let h2 = second_cohomology(g).map_err(err)?;
        for _ in 0..50 {
            let (coeffs, z) = random_cocycle(g, &h2.classes, &mut rng);
            let d = decompose_in_basis(g, &h2.classes, &z).map_err(err)?;
            let mut back = coboundary(g, &d.correction).map_err(err)?;
            for (c, h) in d.coordinates.iter().zip(&h2.classes) {
                if *c {
                    back = back.add(h);
                }
            }
            if back != z || d.coordinates != coeffs {
                return Err(format!("resynthesis fails on a group of order {}", g.order()));
            }
        }
    }
    for k in 1..=3 {
        let g = FiniteGroup::elementary_abelian(k).map_err(err)?;
        let generators: Vec<usize> = (0..k).map(|i| 1 << i).collect();
        let coords = g.coordinates(&generators).map_err(err)?;
        let classes = second_cohomology(&g).map_err(err)?.classes;
        for _ in 0..50 {
            let (_, z) = random_cocycle(&g, &classes, &mut rng);
            let d = decompose_cocycle(&g, &generators, &z).map_err(err)?;
            let back = d.lambda.synthesize(&g, &coords).map_err(err)?.add(&coboundary(&g, &d.correction).map_err(err)?);
            if back != z {
                return Err(format!("cup-basis resynthesis fails on (Z/2)^{k}"));
            }
        }
    }
    Ok(format!(
        "{} odd-order groups trivial, (Z/2)^k dims 1,3,6, {} groups × 50 resyntheses exact",
        odd.len(),
        groups.len() + 3
    ))
}

fn lift_independence() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let cells = grid_cells(GridSpec::Default);
    let sample: Vec<_> = cells.choose_multiple(&mut rng, 30).cloned().collect();
    for cell in &sample {
        let c = cell.cocycle().map_err(|e| e.to_string())?;
        let base = delta2_with(&c, &LiftChoices::default()).map_err(|e| e.to_string())?.class;
        let variants = [
            LiftChoices { flip_signs: rng.gen(), extra_radicand: None },
            LiftChoices { flip_signs: 0, extra_radicand: Some(*[7, -7, 11, 13].choose(&mut rng).unwrap()) },
            LiftChoices { flip_signs: rng.gen(), extra_radicand: Some(13) },
        ];
        for choices in &variants {
            let class = delta2_with(&c, choices).map_err(|e| e.to_string())?.class;
            if class != base {
                return Err(format!("{}: {base} becomes {class} under {choices:?}", cell.label()));
            }
        }
    }
    Ok("30 cells × 3 lift variants, δ² unchanged".into())
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |n: usize, name: &str, verdict: Verdict| {
        match verdict {
            Ok(detail) => println!("criterion {n:>2} PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n:>2} FAIL  {name}: {detail}");
            }
        }
    };
    report(1, "Hilbert symbol vs brute-force oracle", hilbert_matches_oracle());
    report(2, "Hilbert reciprocity", reciprocity());
    report(3, "diagonalization invariance", diagonalization_invariance());

    let start = Instant::now();
    let summary = run_grid(GridSpec::Default, Strategy::Auto);
    let elapsed = start.elapsed();
    report(4, "δ² Clifford route vs invariant route", delta2_two_routes(&summary, elapsed));
    report(5, "w₁ of the twist", w1_identity(&summary));
    report(6, "trace form vs regular-representation twist", trace_form_bridge());
    report(7, "universal-ring identity", universal_identity());
    report(8, "universal classes specialize to δ¹, δ²", corollary_bridge(&summary));
    report(9, "group cohomology", group_cohomology());
    report(10, "δ² independent of lift choices", lift_independence());

    if failed == 0 {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria fail");
        ExitCode::FAILURE
    }
}
