//! Acceptance run. Every criterion is evaluated, one line is printed per
//! criterion, and the process exits nonzero if any of them fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use sextic_core::circulant::{basis_matrices, circulant_matrix, generator, CoefficientVector, GramForm};
use sextic_core::codes::{
    check_conditions, conditions_verdict, distance_bound, is_self_dual, min_weight_exhaustive,
    min_weight_isd, DistanceOptions, LinearCode,
};
use sextic_core::cyclotomy::{cross_check, table_for, verify_symmetries, Branch, ParityCase};
use sextic_core::field::{is_prime, Field, Gf4, PrimeModulus};
use sextic_core::matrix::Matrix;
use sextic_core::search::{
    all_vectors, enumerate_self_dual, reproduce_table, RowStatus, SearchSpec, TableOutcome, Variant,
};
use sextic_core::Result;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

/// Self-dual codes seen by any criterion, for the bound check.
#[derive(Default)]
struct Seen {
    codes: Vec<(String, usize, u32, usize)>,
}

impl Seen {
    fn push(&mut self, label: String, n: usize, q: u32, d: usize) {
        self.codes.push((label, n, q, d));
    }

    fn add_outcomes(&mut self, outcomes: &[TableOutcome]) {
        for o in outcomes {
            if let (true, Some(r)) = (o.self_dual, &o.report) {
                if r.d_certified {
                    self.push(format!("table {} line {}", o.row.table, o.row.line), r.n, r.q, r.d);
                }
            }
        }
    }
}

fn primes(modulus: u64, residue: u64, below: u64) -> Vec<u64> {
    (residue..below).step_by(modulus as usize).filter(|&p| is_prime(p)).collect()
}

/// Cyclotomic numbers by direct counting, independent of the library tables.
fn recount(p: u64, gamma: u64) -> [[u32; 6]; 6] {
    let mut class = vec![usize::MAX; p as usize];
    let mut x = 1;
    for i in 0..p - 1 {
        class[x as usize] = (i % 6) as usize;
        x = x * gamma % p;
    }
    let mut out = [[0u32; 6]; 6];
    for a in 1..p - 1 {
        out[class[a as usize]][class[(a + 1) as usize]] += 1;
    }
    out
}

fn criterion_1() -> Result<Outcome> {
    let ps = primes(12, 7, 1000);
    let mut bad = Vec::new();
    for &p in &ps {
        let table = table_for(p)?;
        let report = verify_symmetries(&table);
        let row_sums = report.checks.iter().any(|c| c.name.starts_with("row sums"));
        let counted = recount(p, table.params().gamma) == *table.numbers();
        if !report.all_passed() || !row_sums || !counted {
            bad.push(p);
        }
    }
    Ok(Outcome::new(
        bad.is_empty(),
        format!("{} primes, {} checks each, failing {bad:?}", ps.len(), verify_symmetries(&*table_for(7)?).checks.len()),
    ))
}

fn criterion_2() -> Result<Outcome> {
    let ps = primes(12, 7, 1000);
    let mut bad = Vec::new();
    let mut branches = BTreeSet::new();
    for &p in &ps {
        let report = cross_check(&*table_for(p)?)?;
        branches.insert(report.branch.tag());
        if !report.matches {
            bad.push(p);
        }
    }
    let all_branches = [Branch::A, Branch::B, Branch::C].iter().all(|b| branches.contains(&b.tag()));
    Ok(Outcome::new(
        bad.is_empty() && all_branches,
        format!("{} primes, branches {branches:?}, mismatches {bad:?}", ps.len()),
    ))
}

fn criterion_3() -> Result<Outcome> {
    let ps = primes(24, 19, 5000);
    let mut counts = [0usize; 3];
    let mut bad = Vec::new();
    for &p in &ps {
        match sextic_core::cyclotomy::parity_class(&PrimeModulus::new(p)?) {
            Ok(c) => counts[c as usize] += 1,
            Err(_) => bad.push(p),
        }
    }
    let at = |p| sextic_core::cyclotomy::parity_class(&PrimeModulus::new(p)?);
    let spots = at(19)? == ParityCase::B && at(43)? == ParityCase::A;
    Ok(Outcome::new(
        bad.is_empty() && spots,
        format!(
            "{} primes, (a)/(b)/(c) = {}/{}/{}, unclassified {bad:?}, p=19 -> {}, p=43 -> {}",
            ps.len(),
            counts[0],
            counts[1],
            counts[2],
            at(19)?,
            at(43)?
        ),
    ))
}

fn combination(basis: &[Matrix], d: &[Gf4; 7]) -> Matrix {
    let mut acc = Matrix::zeros(basis[0].field(), basis[0].rows(), basis[0].cols());
    for (a, &c) in basis.iter().zip(d) {
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                acc.set(i, j, acc.get(i, j) + c * a.get(i, j));
            }
        }
    }
    acc
}

fn criterion_4() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut bad = 0;
    let mut total = 0;
    for p in [7, 19, 31, 43] {
        let table = table_for(p)?;
        let form = GramForm::new(&table)?;
        for q in [2u32, 4] {
            let field = Field::from_q(q)?;
            let basis = basis_matrices(&table, field);
            for _ in 0..100 {
                let m: [Gf4; 7] = std::array::from_fn(|_| Gf4::from_bits(rng.gen_range(0..q as u8)));
                let v = CoefficientVector::pure(field, m)?;
                let r = circulant_matrix(&table, &v);
                let d = form.evaluate(&m);
                total += 1;
                if r.mul(&r.transpose())? != combination(&basis, &d.d) || !d.pairings_hold() {
                    bad += 1;
                }
            }
        }
    }
    Ok(Outcome::new(bad == 0, format!("{total} vectors, {bad} disagreements")))
}

fn criterion_5() -> Result<Outcome> {
    let mut cases: Vec<(u64, Field, Variant, Vec<Gf4>)> = Vec::new();
    for p in [19, 43] {
        cases.push((p, Field::Gf2, Variant::Pure, vec![]));
        cases.push((p, Field::Gf2, Variant::Bordered, Field::Gf2.elements().to_vec()));
    }
    cases.push((19, Field::Gf4, Variant::Pure, vec![]));
    cases.push((19, Field::Gf4, Variant::Bordered, Field::Gf4.elements().to_vec()));

    let mut total = 0;
    let mut disagreements = 0;
    let mut self_dual = 0;
    for (p, field, variant, alphas) in cases {
        let table = table_for(p)?;
        let form = GramForm::new(&table)?;
        let vectors = all_vectors(field, variant, &alphas);
        let verdicts: Vec<(bool, bool)> = vectors
            .par_iter()
            .map(|v| {
                let algebraic = conditions_verdict(&table, v, &form.evaluate(&v.m).d).0;
                let gram = is_self_dual(&LinearCode::new(generator(&table, v)?));
                let report = check_conditions(&table, v)?;
                Ok((algebraic == gram && report.consistent(), gram))
            })
            .collect::<Result<_>>()?;
        total += verdicts.len();
        disagreements += verdicts.iter().filter(|v| !v.0).count();
        self_dual += verdicts.iter().filter(|v| v.1).count();
    }
    Ok(Outcome::new(
        disagreements == 0,
        format!("{total} vectors, {self_dual} self-dual, {disagreements} disagreements"),
    ))
}

fn table_summary(outcomes: &[TableOutcome]) -> String {
    outcomes
        .iter()
        .filter(|o| o.enabled())
        .map(|o| match &o.report {
            Some(r) => format!("{}:{}d={}", o.row.line, if o.self_dual { "sd," } else { "" }, r.d),
            None => format!("{}:{}", o.row.line, o.note),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn exact_table(id: u8, want_d: usize, seen: &mut Seen) -> Result<Outcome> {
    let outcomes = reproduce_table(id, None, &DistanceOptions::default())?;
    seen.add_outcomes(&outcomes);
    let enabled: Vec<&TableOutcome> = outcomes.iter().filter(|o| o.enabled()).collect();
    let ok = enabled.iter().all(|o| {
        o.self_dual && o.report.as_ref().is_some_and(|r| r.d_certified && r.d == want_d)
    });
    let sd = enabled.iter().filter(|o| o.self_dual).count();
    Ok(Outcome::new(
        ok && enabled.len() == 5,
        format!("{sd}/{} rows self-dual; {}", enabled.len(), table_summary(&outcomes)),
    ))
}

fn criterion_8(seen: &mut Seen) -> Result<Outcome> {
    let mut pass = true;
    let mut parts = Vec::new();
    for id in [1u8, 2] {
        let outcomes = reproduce_table(id, Some(43), &DistanceOptions::default())?;
        seen.add_outcomes(&outcomes);
        let rows: Vec<&TableOutcome> =
            outcomes.iter().filter(|o| o.status != RowStatus::Duplicate && o.status != RowStatus::Disabled).collect();
        let sd = rows.iter().filter(|o| o.self_dual).count();
        let mismatched = rows.iter().filter(|o| !o.d_matches).count();
        pass &= sd == rows.len() && rows.iter().all(|o| o.status != RowStatus::Failed);
        parts.push(format!(
            "table {id}: {sd}/{} self-dual, d differs from claimed 8 on {mismatched} rows [{}]",
            rows.len(),
            table_summary(&outcomes)
        ));
    }
    Ok(Outcome::new(pass, parts.join("; ")))
}

fn random_full_rank(rng: &mut ChaCha8Rng) -> LinearCode {
    loop {
        let q: u32 = [2, 4][rng.gen_range(0..2)];
        let max_k = if q == 2 { 20 } else { 10 };
        let k = rng.gen_range(1..=max_k);
        let n = rng.gen_range(k..=40);
        let field = Field::from_q(q).unwrap();
        let rows = (0..k)
            .map(|_| (0..n).map(|_| Gf4::from_bits(rng.gen_range(0..q as u8))).collect())
            .collect();
        let code = LinearCode::new(Matrix::from_rows(field, rows).unwrap());
        if code.rank() == k {
            return code;
        }
    }
}

fn criterion_9(seen: &mut Seen) -> Result<Outcome> {
    let opts = DistanceOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut codes: Vec<(String, LinearCode)> =
        (0..50).map(|i| (format!("random {i}"), random_full_rank(&mut rng))).collect();
    let table = table_for(7)?;
    for q in [2u32, 4] {
        let spec = SearchSpec::new(7, q, Variant::Pure)?;
        for v in sextic_core::search::self_dual_vectors(&spec)? {
            codes.push((format!("p=7 {v}"), LinearCode::new(generator(&table, &v)?)));
        }
    }
    let mut bad = Vec::new();
    for (label, code) in &codes {
        let ex = min_weight_exhaustive(code, &opts)?;
        let isd = min_weight_isd(code, &opts)?;
        if ex.d != isd.d || !isd.certified {
            bad.push(format!("{label}: {} vs {}", ex.d, isd.d));
        }
        if label.starts_with("p=7") {
            seen.push(label.clone(), code.n(), code.field().q(), ex.d);
        }
    }
    Ok(Outcome::new(bad.is_empty(), format!("{} codes, mismatches {bad:?}", codes.len())))
}

fn criterion_10(seen: &Seen) -> Result<Outcome> {
    let mut bad = Vec::new();
    for (label, n, q, d) in &seen.codes {
        if *d > distance_bound(*n, *q)? {
            bad.push(label.clone());
        }
    }
    let spots = [(82, 2, 16), (22, 2, 6), (38, 4, 15)];
    let mut spot_bad = Vec::new();
    for (n, q, want) in spots {
        let got = distance_bound(n, q)?;
        if got != want {
            spot_bad.push(format!("({n},{q}) -> {got}"));
        }
    }
    Ok(Outcome::new(
        bad.is_empty() && spot_bad.is_empty(),
        format!("{} self-dual codes, over bound {bad:?}, spot failures {spot_bad:?}", seen.codes.len()),
    ))
}

fn criterion_11(seen: &mut Seen) -> Result<Outcome> {
    let table = table_for(19)?;
    let oracle: BTreeSet<CoefficientVector> = all_vectors(Field::Gf4, Variant::Pure, &[])
        .into_par_iter()
        .filter(|v| is_self_dual(&LinearCode::new(generator(&table, v).unwrap())))
        .collect();
    let hits = enumerate_self_dual(&SearchSpec::new(19, 4, Variant::Pure)?)?;
    for h in &hits {
        if h.report.d_certified {
            seen.push(format!("search {}", h.coeffs), h.report.n, 4, h.report.d);
        }
    }
    let emitted: BTreeSet<CoefficientVector> = hits.iter().map(|h| h.coeffs).collect();
    let witness = CoefficientVector::parse(Field::Gf4, "w,W,1,W,0,0,w", None)?;
    let complete = emitted == oracle && emitted.len() == hits.len();
    let has_witness = emitted.contains(&witness);
    let best = hits.first().map_or(0, |h| h.report.d);
    Ok(Outcome::new(
        complete && has_witness,
        format!(
            "{} emitted, {} in oracle, sets equal: {}, witness {witness} present: {has_witness}, best d = {best}",
            emitted.len(),
            oracle.len(),
            emitted == oracle
        ),
    ))
}

fn main() -> ExitCode {
    let mut seen = Seen::default();
    let mut results = Vec::new();
    let mut report = |id: u32, name: &str, f: &mut dyn FnMut() -> Result<Outcome>| {
        let start = Instant::now();
        let outcome = f().unwrap_or_else(|e| Outcome::new(false, format!("error: {e}")));
        println!(
            "criterion {id:>2} {} {name} ({:.1}s): {}",
            if outcome.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            outcome.detail
        );
        results.push(outcome.pass);
    };
    report(1, "cyclotomic identities", &mut criterion_1);
    report(2, "closed forms", &mut criterion_2);
    report(3, "parity classes", &mut criterion_3);
    report(4, "Gram decomposition", &mut criterion_4);
    report(5, "algebraic vs Gram verdict", &mut criterion_5);
    report(6, "GF(4) pure table at p=19", &mut || exact_table(3, 11, &mut seen));
    report(7, "GF(4) bordered table at p=19", &mut || exact_table(4, 12, &mut seen));
    report(8, "binary tables at p=43", &mut || criterion_8(&mut seen));
    report(9, "distance engines agree", &mut || criterion_9(&mut seen));
    report(11, "search completeness", &mut || criterion_11(&mut seen));
    report(10, "distance bound", &mut || criterion_10(&seen));
    let failed = results.iter().filter(|p| !**p).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
