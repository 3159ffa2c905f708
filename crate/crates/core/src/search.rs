//! Coefficient-space search, fixture table reproduction and classification
//! against the self-dual distance bound or a user-supplied table.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::circulant::{generator, CoefficientVector, GramForm};
use crate::codes::{
    check_conditions, code_report, conditions_verdict, distance_bound, with_workers, CodeReport,
    DistanceOptions, DualityReport, LinearCode,
};
use crate::cyclotomy::{table_for, CyclotomicTable};
use crate::error::{Error, Result};
use crate::field::{Field, Gf4, PrimeModulus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Pure,
    Bordered,
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pure" => Ok(Variant::Pure),
            "bordered" => Ok(Variant::Bordered),
            _ => Err(Error::InvalidInput(format!("unknown variant {s:?}"))),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Pure => "pure",
            Variant::Bordered => "bordered",
        })
    }
}

#[derive(Debug, Clone)]
pub struct SearchSpec {
    pub p: u64,
    pub field: Field,
    pub variant: Variant,
    /// Keep only codes with `d >= min_d`; also lets the distance engine stop
    /// early on codes that fall short.
    pub min_d: Option<usize>,
    pub limit: Option<usize>,
    pub distance: DistanceOptions,
}

impl SearchSpec {
    pub fn new(p: u64, q: u32, variant: Variant) -> Result<Self> {
        PrimeModulus::new(p)?;
        Ok(Self {
            p,
            field: Field::from_q(q)?,
            variant,
            min_d: None,
            limit: None,
            distance: DistanceOptions::default(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchHit {
    pub coeffs: CoefficientVector,
    pub report: CodeReport,
}

fn vector_at(field: Field, mut idx: usize) -> [Gf4; 7] {
    let q = field.q() as usize;
    let mut m = [Gf4::ZERO; 7];
    for slot in m.iter_mut() {
        *slot = Gf4::from_bits((idx % q) as u8);
        idx /= q;
    }
    m
}

/// Border scalars allowed by the corner equation `α² + p + 1 = 0`.
fn border_scalars(table: &CyclotomicTable, field: Field) -> Vec<Gf4> {
    let p = table.p() as i64;
    field
        .elements()
        .iter()
        .copied()
        .filter(|a| (a.square() + Gf4::ONE.times(p) + Gf4::ONE).is_zero())
        .collect()
}

/// Every coefficient vector of the given shape, in index order.
pub fn all_vectors(field: Field, variant: Variant, alphas: &[Gf4]) -> Vec<CoefficientVector> {
    let total = (field.q() as usize).pow(7);
    let alpha_list: Vec<Option<Gf4>> = match variant {
        Variant::Pure => vec![None],
        Variant::Bordered => alphas.iter().copied().map(Some).collect(),
    };
    alpha_list
        .iter()
        .flat_map(|&alpha| {
            (0..total).map(move |i| CoefficientVector {
                field,
                m: vector_at(field, i),
                alpha,
            })
        })
        .collect()
}

/// Self-dual coefficient vectors, sorted. Candidates pass the cyclotomic
/// conditions first; each survivor is then re-certified by its Gram matrix.
pub fn self_dual_vectors(spec: &SearchSpec) -> Result<Vec<CoefficientVector>> {
    let table = table_for(spec.p)?;
    let form = GramForm::new(&table)?;
    let candidates = all_vectors(spec.field, spec.variant, &border_scalars(&table, spec.field));
    with_workers(spec.distance.workers, || {
        let mut out: Vec<CoefficientVector> = candidates
            .par_iter()
            .filter(|v| conditions_verdict(&table, v, &form.evaluate(&v.m).d).0)
            .map(|v| {
                let report = check_conditions(&table, v)?;
                if !report.is_self_dual {
                    return Err(Error::Internal(format!(
                        "{v} satisfies the conditions but its Gram matrix is nonzero"
                    )));
                }
                Ok(*v)
            })
            .collect::<Result<_>>()?;
        out.sort();
        Ok(out)
    })
}

/// Self-dual codes of the given shape with their distances, sorted by
/// descending `d` then coefficients.
pub fn enumerate_self_dual(spec: &SearchSpec) -> Result<Vec<SearchHit>> {
    let table = table_for(spec.p)?;
    let vectors = self_dual_vectors(spec)?;
    let opts = DistanceOptions {
        workers: 0,
        stop_below: spec.min_d,
        ..spec.distance.clone()
    };
    let mut hits = with_workers(spec.distance.workers, || {
        vectors
            .par_iter()
            .map(|v| {
                let code = LinearCode::new(generator(&table, v)?);
                Ok(SearchHit {
                    coeffs: *v,
                    report: code_report(&code, &opts)?,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    if let Some(min_d) = spec.min_d {
        hits.retain(|h| h.report.d >= min_d);
    }
    hits.sort_by(|a, b| b.report.d.cmp(&a.report.d).then(a.coeffs.cmp(&b.coeffs)));
    if let Some(limit) = spec.limit {
        hits.truncate(limit);
    }
    Ok(hits)
}

const FIXTURES: &str = include_str!("../data/tables.txt");

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub table: u8,
    pub line: usize,
    pub variant: Variant,
    /// Entries as printed in the fixture file.
    pub raw: String,
    pub coeffs: Option<CoefficientVector>,
    pub claimed_d: usize,
    pub disabled: bool,
    /// Line of the first identical row in the same table.
    pub duplicate_of: Option<usize>,
}

pub fn table_field(id: u8) -> Result<Field> {
    match id {
        1 | 2 => Ok(Field::Gf2),
        3 | 4 => Ok(Field::Gf4),
        _ => Err(Error::InvalidInput(format!("table id must be 1..4, got {id}"))),
    }
}

pub fn default_table_prime(id: u8) -> Result<u64> {
    match id {
        1 | 2 => Ok(43),
        3 | 4 => Ok(19),
        _ => Err(Error::InvalidInput(format!("table id must be 1..4, got {id}"))),
    }
}

fn parse_fixture_line(line_no: usize, line: &str) -> Result<TableRow> {
    let bad = |message: String| Error::Parse {
        line: line_no,
        message,
    };
    let fields: Vec<&str> = line.split_whitespace().collect();
    if !(4..=5).contains(&fields.len()) {
        return Err(bad(format!("expected 4 or 5 columns, got {}", fields.len())));
    }
    let table: u8 = fields[0].parse().map_err(|_| bad("bad table id".into()))?;
    let field = table_field(table).map_err(|e| bad(e.to_string()))?;
    let variant: Variant = fields[1].parse().map_err(|e: Error| bad(e.to_string()))?;
    let raw = fields[2].to_string();
    let claimed_d: usize = fields[3].parse().map_err(|_| bad("bad distance".into()))?;
    let disabled = match fields.get(4) {
        None => false,
        Some(&"disabled") => true,
        Some(other) => return Err(bad(format!("unknown flag {other:?}"))),
    };
    let coeffs = if disabled {
        None
    } else {
        let v = match variant {
            Variant::Pure => CoefficientVector::parse(field, &raw, None),
            Variant::Bordered => match raw.split_once(',') {
                Some((alpha, rest)) => CoefficientVector::parse(field, rest, Some(alpha)),
                None => Err(Error::InvalidInput("missing entries".into())),
            },
        };
        Some(v.map_err(|e| bad(e.to_string()))?)
    };
    Ok(TableRow {
        table,
        line: line_no,
        variant,
        raw,
        coeffs,
        claimed_d,
        disabled,
        duplicate_of: None,
    })
}

fn parse_fixtures(text: &str) -> Result<Vec<TableRow>> {
    let mut rows: Vec<TableRow> = Vec::new();
    let mut first_seen: HashMap<(u8, String), usize> = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut row = parse_fixture_line(i + 1, line)?;
        let key = (row.table, row.raw.clone());
        match first_seen.get(&key) {
            Some(&first) => row.duplicate_of = Some(first),
            None => {
                first_seen.insert(key, row.line);
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Built-in fixture rows of one table, duplicates and disabled rows included.
pub fn table_rows(id: u8) -> Result<Vec<TableRow>> {
    table_field(id)?;
    let rows = parse_fixtures(FIXTURES)?;
    Ok(rows.into_iter().filter(|r| r.table == id).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowStatus {
    Evaluated,
    Duplicate,
    Disabled,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableOutcome {
    pub row: TableRow,
    pub p: u64,
    pub status: RowStatus,
    pub duality: Option<DualityReport>,
    pub report: Option<CodeReport>,
    pub self_dual: bool,
    /// Certified `d` equals the claimed distance.
    pub d_matches: bool,
    pub note: String,
}

impl TableOutcome {
    /// Rows that count toward a table verdict.
    pub fn enabled(&self) -> bool {
        matches!(self.status, RowStatus::Evaluated | RowStatus::Failed)
    }
}

/// Evaluates every fixture row of table `id` at `p_override` or the
/// table's default prime. Mismatches are reported in the outcomes.
pub fn reproduce_table(
    id: u8,
    p_override: Option<u64>,
    opts: &DistanceOptions,
) -> Result<Vec<TableOutcome>> {
    let p = match p_override {
        Some(p) => p,
        None => default_table_prime(id)?,
    };
    let table = table_for(p)?;
    let rows = table_rows(id)?;
    let inner = DistanceOptions {
        workers: 0,
        ..opts.clone()
    };
    with_workers(opts.workers, || {
        rows.into_par_iter()
            .map(|row| evaluate_row(&table, row, &inner))
            .collect()
    })
}

fn evaluate_row(table: &CyclotomicTable, row: TableRow, opts: &DistanceOptions) -> Result<TableOutcome> {
    let p = table.p();
    let mut out = TableOutcome {
        row,
        p,
        status: RowStatus::Evaluated,
        duality: None,
        report: None,
        self_dual: false,
        d_matches: false,
        note: String::new(),
    };
    if out.row.disabled {
        out.status = RowStatus::Disabled;
        out.note = "row is malformed and disabled".into();
        return Ok(out);
    }
    if let Some(first) = out.row.duplicate_of {
        out.status = RowStatus::Duplicate;
        out.note = format!("duplicate of fixture line {first}");
        return Ok(out);
    }
    let v = out.row.coeffs.expect("enabled rows are parsed");
    let result = check_conditions(table, &v).and_then(|duality| {
        let code = LinearCode::new(generator(table, &v)?);
        Ok((duality, code_report(&code, opts)?))
    });
    match result {
        Ok((duality, report)) => {
            out.self_dual = duality.is_self_dual;
            out.d_matches = report.d_certified && report.d == out.row.claimed_d;
            let mut notes = Vec::new();
            if !duality.is_self_dual {
                notes.push("not self-dual".to_string());
            }
            if !out.d_matches {
                notes.push(format!("d = {} (claimed {})", report.d, out.row.claimed_d));
            }
            out.note = notes.join("; ");
            out.duality = Some(duality);
            out.report = Some(report);
        }
        Err(e) => {
            out.status = RowStatus::Failed;
            out.note = e.to_string();
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    #[serde(rename = "meets-lemma1-bound")]
    MeetsBound,
    AboveKnown,
    EqualKnown,
    BelowKnown,
    Unclassified,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::MeetsBound => "meets-lemma1-bound",
            Classification::AboveKnown => "above-known",
            Classification::EqualKnown => "equal-known",
            Classification::BelowKnown => "below-known",
            Classification::Unclassified => "unclassified",
        })
    }
}

/// Best known distances keyed by `(q, n, k)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BestKnownTable {
    entries: HashMap<(u32, usize, usize), usize>,
}

impl BestKnownTable {
    /// Lines `q n k d_best`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let bad = |message: String| Error::Parse {
                line: i + 1,
                message,
            };
            let nums = content
                .split_whitespace()
                .map(|s| s.parse::<usize>().map_err(|_| bad(format!("not a number: {s:?}"))))
                .collect::<Result<Vec<_>>>()?;
            let [q, n, k, d] = nums[..] else {
                return Err(bad(format!("expected 4 fields `q n k d_best`, got {}", nums.len())));
            };
            if q != 2 && q != 4 {
                return Err(bad(format!("unsupported q = {q}")));
            }
            if k > n || d > n {
                return Err(bad("k and d must not exceed n".into()));
            }
            entries.insert((q as u32, n, k), d);
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn best(&self, q: u32, n: usize, k: usize) -> Option<usize> {
        self.entries.get(&(q, n, k)).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// A table entry for `(q, n, k)` takes precedence over the distance bound.
/// An uncertified `d` is only an upper bound, so it can prove `below-known`
/// and nothing else.
pub fn classify(report: &CodeReport, known: Option<&BestKnownTable>) -> Classification {
    if let Some(best) = known.and_then(|t| t.best(report.q, report.n, report.k)) {
        return match (report.d.cmp(&best), report.d_certified) {
            (std::cmp::Ordering::Less, _) => Classification::BelowKnown,
            (_, false) => Classification::Unclassified,
            (std::cmp::Ordering::Equal, true) => Classification::EqualKnown,
            (std::cmp::Ordering::Greater, true) => Classification::AboveKnown,
        };
    }
    let bound = distance_bound(report.n, report.q).ok();
    if report.d_certified && report.self_dual && bound == Some(report.d) {
        Classification::MeetsBound
    } else {
        Classification::Unclassified
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{gram_matrix, DistanceMethod};

    fn report(n: usize, k: usize, q: u32, d: usize) -> CodeReport {
        CodeReport {
            n,
            k,
            q,
            d,
            self_dual: true,
            bound: distance_bound(n, q).ok(),
            meets_bound: distance_bound(n, q).ok() == Some(d),
            d_method: DistanceMethod::InformationSet,
            d_certified: true,
            witness: String::new(),
        }
    }

    #[test]
    fn fixtures_load() {
        let t1 = table_rows(1).unwrap();
        assert_eq!(t1.len(), 17);
        // "0 0 1 0 1 0 1" three times and "0 1 1 1 0 0 0" twice
        assert_eq!(t1.iter().filter(|r| r.duplicate_of.is_some()).count(), 3);
        assert_eq!(table_rows(2).unwrap().len(), 14);
        let t3 = table_rows(3).unwrap();
        assert_eq!(t3.len(), 5);
        assert!(t3.iter().all(|r| r.claimed_d == 11 && r.coeffs.unwrap().field == Field::Gf4));
        let t4 = table_rows(4).unwrap();
        assert_eq!(t4.len(), 6);
        assert_eq!(t4.iter().filter(|r| r.disabled).count(), 1);
        assert!(t4[1].disabled);
        assert_eq!(t4[0].coeffs.unwrap().alpha, Some(Gf4::ZERO));
        assert!(table_rows(5).is_err());
    }

    #[test]
    fn fixture_parse_errors_carry_line() {
        let err = parse_fixtures("# c\n3 pure 0,1 11\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = parse_fixtures("\n\n4 bordered 0,0,1,1,w,W,W,w 12 bogus\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
    }

    #[test]
    fn binary_border_forces_zero_alpha() {
        let t = table_for(19).unwrap();
        assert_eq!(border_scalars(&t, Field::Gf2), vec![Gf4::ZERO]);
        assert_eq!(border_scalars(&t, Field::Gf4), vec![Gf4::ZERO]);
    }

    #[test]
    fn binary_search_matches_gram_oracle() {
        let spec = SearchSpec::new(19, 2, Variant::Pure).unwrap();
        let found = self_dual_vectors(&spec).unwrap();
        let t = table_for(19).unwrap();
        let mut oracle: Vec<CoefficientVector> = all_vectors(Field::Gf2, Variant::Pure, &[])
            .into_iter()
            .filter(|v| gram_matrix(&generator(&t, v).unwrap()).is_zero())
            .collect();
        oracle.sort();
        assert_eq!(found, oracle);
        assert_eq!(found.len(), 9);
        let hits = enumerate_self_dual(&spec).unwrap();
        assert_eq!(hits.len(), found.len());
        for w in hits.windows(2) {
            assert!(w[0].report.d >= w[1].report.d);
        }
        for h in &hits {
            let g = generator(&t, &h.coeffs).unwrap();
            assert!(gram_matrix(&g).is_zero());
            assert!(h.report.self_dual && h.report.d_certified);
        }
    }

    #[test]
    fn min_d_and_limit_filter() {
        let mut spec = SearchSpec::new(19, 2, Variant::Pure).unwrap();
        let all = enumerate_self_dual(&spec).unwrap();
        let top = all[0].report.d;
        spec.min_d = Some(top);
        let filtered = enumerate_self_dual(&spec).unwrap();
        assert_eq!(filtered, all.iter().filter(|h| h.report.d >= top).cloned().collect::<Vec<_>>());
        spec.min_d = None;
        spec.limit = Some(2);
        assert_eq!(enumerate_self_dual(&spec).unwrap(), all[..2].to_vec());
    }

    #[test]
    fn spec_validation() {
        assert!(SearchSpec::new(41, 2, Variant::Pure).is_err());
        assert!(SearchSpec::new(19, 3, Variant::Pure).is_err());
        assert!("diagonal".parse::<Variant>().is_err());
    }

    #[test]
    fn classification() {
        let r = report(38, 19, 4, 11);
        assert_eq!(classify(&r, None), Classification::Unclassified);
        let known = BestKnownTable::parse("# q n k d\n4 38 19 11\n4 40 20 12 # trailing\n").unwrap();
        assert_eq!(known.len(), 2);
        assert_eq!(classify(&r, Some(&known)), Classification::EqualKnown);
        assert_eq!(classify(&report(40, 20, 4, 12), Some(&known)), Classification::EqualKnown);
        assert_eq!(classify(&report(40, 20, 4, 13), Some(&known)), Classification::AboveKnown);
        assert_eq!(classify(&report(40, 20, 4, 10), Some(&known)), Classification::BelowKnown);
        assert_eq!(classify(&report(38, 19, 4, 15), None), Classification::MeetsBound);
        let mut upper = report(40, 20, 4, 13);
        upper.d_certified = false;
        assert_eq!(classify(&upper, Some(&known)), Classification::Unclassified);
        assert_eq!(
            serde_json::to_string(&Classification::MeetsBound).unwrap(),
            "\"meets-lemma1-bound\""
        );
    }

    #[test]
    fn best_known_parse_errors() {
        let e = BestKnownTable::parse("4 38 19 11\n4 38 x 11\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        let e = BestKnownTable::parse("3 38 19 11\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
        let e = BestKnownTable::parse("4 38 19\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
    }
}
