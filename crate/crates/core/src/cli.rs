//! Command-line front end.
//!
//! `parse_command` turns argv into a validated [`CommandPlan`];
//! `execute_command` runs it, writing results to `out` and diagnostics to
//! `err`, and returns the process exit code:
//! 0 success, 1 verification or table failure, 2 invalid input or I/O.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::circulant::{generator, CoefficientVector};
use crate::codes::{
    check_conditions, code_report, CodeReport, DistanceOptions, DualityReport, LinearCode,
    MethodChoice, DEFAULT_EXHAUSTIVE_LIMIT_BITS,
};
use crate::cyclotomy::{
    cached_table, cross_check, parity_class_of, verify_symmetries, ClosedFormReport,
    CyclotomicConstants, CyclotomicTable, DiophantineRep, SymmetryReport,
};
use crate::error::{Error, Result};
use crate::field::{Field, Gf4, PrimeModulus};
use crate::matrix::Matrix;
use crate::search::{
    classify, enumerate_self_dual, reproduce_table, BestKnownTable, Classification, SearchHit,
    SearchSpec, TableOutcome, Variant,
};

pub const WORKERS_ENV: &str = "SEXTIC_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "sextic", version, about = "Sextic-residue double circulant self-dual codes")]
struct Cli {
    #[command(subcommand)]
    command: RawCommand,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Pure,
    Bordered,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Pure => Variant::Pure,
            VariantArg::Bordered => Variant::Bordered,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Auto,
    Exhaustive,
    Isd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct CodeArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    q: u32,
    /// m0,…,m6 in the symbols 0 1 w W
    #[arg(long)]
    coeffs: String,
    /// Border scalar (bordered variant only)
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long, value_enum)]
    variant: VariantArg,
}

#[derive(Debug, Args)]
struct EngineArgs {
    /// Worker threads, 0 for all cores
    #[arg(long, env = WORKERS_ENV, default_value_t = 0)]
    workers: usize,
    /// Use exhaustive enumeration while q^k <= 2^BITS
    #[arg(long, value_name = "BITS", default_value_t = DEFAULT_EXHAUSTIVE_LIMIT_BITS)]
    exhaustive_limit: u32,
}

#[derive(Debug, Subcommand)]
enum RawCommand {
    /// Classes, cyclotomic numbers and closed-form cross-check for p
    Cyclotomy {
        #[arg(long)]
        p: u64,
        /// Primitive root to index by (default: the smallest)
        #[arg(long)]
        root: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Write a generator matrix file
    Build {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check self-duality by the cyclotomic conditions and the Gram matrix
    Verify {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        json: bool,
    },
    /// Minimum distance of a generator matrix file
    Distance {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
        #[command(flatten)]
        engine: EngineArgs,
        /// Best-known distance table, lines `q n k d_best`
        #[arg(long)]
        known: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Enumerate self-dual codes over the coefficient space
    Search {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u32,
        #[arg(long, value_enum)]
        variant: VariantArg,
        #[arg(long)]
        min_d: Option<usize>,
        #[arg(long)]
        limit: Option<usize>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
        #[command(flatten)]
        engine: EngineArgs,
        #[arg(long)]
        known: Option<PathBuf>,
    },
    /// Re-evaluate a built-in fixture table
    Tables {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        which: u8,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
        #[command(flatten)]
        engine: EngineArgs,
        #[arg(long)]
        known: Option<PathBuf>,
    },
}

#[derive(Debug, Clone)]
pub enum Command {
    Cyclotomy {
        params: PrimeModulus,
    },
    Build {
        p: u64,
        coeffs: CoefficientVector,
        out: PathBuf,
    },
    Verify {
        p: u64,
        coeffs: CoefficientVector,
    },
    Distance {
        input: PathBuf,
        opts: DistanceOptions,
        known: Option<PathBuf>,
    },
    Search {
        spec: SearchSpec,
        known: Option<PathBuf>,
    },
    Tables {
        which: u8,
        p: Option<u64>,
        opts: DistanceOptions,
        known: Option<PathBuf>,
    },
}

#[derive(Debug, Clone)]
pub struct CommandPlan {
    pub command: Command,
    pub format: OutputFormat,
}

impl CommandPlan {
    pub fn subcommand(&self) -> &'static str {
        match self.command {
            Command::Cyclotomy { .. } => "cyclotomy",
            Command::Build { .. } => "build",
            Command::Verify { .. } => "verify",
            Command::Distance { .. } => "distance",
            Command::Search { .. } => "search",
            Command::Tables { .. } => "tables",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Usage(#[from] clap::Error),
    #[error("{flag}: {source}")]
    Invalid {
        flag: &'static str,
        #[source]
        source: Error,
    },
}

impl CliError {
    /// Help and version requests exit 0; everything else is a usage error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(e) if !e.use_stderr() => 0,
            _ => 2,
        }
    }
}

fn invalid(flag: &'static str) -> impl FnOnce(Error) -> CliError {
    move |source| CliError::Invalid { flag, source }
}

fn validate_code(args: CodeArgs) -> std::result::Result<(u64, CoefficientVector), CliError> {
    PrimeModulus::new(args.p).map_err(invalid("--p"))?;
    let field = Field::from_q(args.q).map_err(invalid("--q"))?;
    let variant = Variant::from(args.variant);
    match (variant, &args.alpha) {
        (Variant::Pure, Some(_)) => {
            return Err(invalid("--alpha")(Error::InvalidInput(
                "pure construction takes 7 coefficients and no border scalar".into(),
            )))
        }
        (Variant::Bordered, None) => {
            return Err(invalid("--alpha")(Error::InvalidInput(
                "bordered construction needs --alpha in addition to 7 coefficients".into(),
            )))
        }
        _ => {}
    }
    let coeffs = CoefficientVector::parse(field, &args.coeffs, args.alpha.as_deref())
        .map_err(invalid("--coeffs"))?;
    Ok((args.p, coeffs))
}

fn engine_options(method: MethodArg, engine: &EngineArgs) -> DistanceOptions {
    DistanceOptions {
        method: match method {
            MethodArg::Auto => MethodChoice::Auto,
            MethodArg::Exhaustive => MethodChoice::Exhaustive,
            MethodArg::Isd => MethodChoice::Isd,
        },
        workers: engine.workers,
        exhaustive_limit_bits: engine.exhaustive_limit,
        stop_below: None,
    }
}

fn check_readable(flag: &'static str, path: &Path) -> std::result::Result<(), CliError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(invalid(flag)(Error::Io(std::io::Error::new(
            std::io::ErrorKind::NotFound,
            format!("{}: no such file", path.display()),
        ))))
    }
}

fn json_format(json: bool) -> OutputFormat {
    if json {
        OutputFormat::Json
    } else {
        OutputFormat::Text
    }
}

/// Parses and validates argv (including the program name).
pub fn parse_command<I, T>(argv: I) -> std::result::Result<CommandPlan, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    let plan = match cli.command {
        RawCommand::Cyclotomy { p, root, json } => {
            let params = match root {
                Some(g) => PrimeModulus::with_root(p, g).map_err(invalid("--root"))?,
                None => PrimeModulus::new(p).map_err(invalid("--p"))?,
            };
            CommandPlan {
                command: Command::Cyclotomy { params },
                format: json_format(json),
            }
        }
        RawCommand::Build { code, out } => {
            let (p, coeffs) = validate_code(code)?;
            CommandPlan {
                command: Command::Build { p, coeffs, out },
                format: OutputFormat::Text,
            }
        }
        RawCommand::Verify { code, json } => {
            let (p, coeffs) = validate_code(code)?;
            CommandPlan {
                command: Command::Verify { p, coeffs },
                format: json_format(json),
            }
        }
        RawCommand::Distance {
            input,
            method,
            engine,
            known,
            json,
        } => {
            check_readable("--in", &input)?;
            if let Some(k) = &known {
                check_readable("--known", k)?;
            }
            CommandPlan {
                command: Command::Distance {
                    input,
                    opts: engine_options(method, &engine),
                    known,
                },
                format: json_format(json),
            }
        }
        RawCommand::Search {
            p,
            q,
            variant,
            min_d,
            limit,
            format,
            engine,
            known,
        } => {
            PrimeModulus::new(p).map_err(invalid("--p"))?;
            let mut spec = SearchSpec::new(p, q, variant.into()).map_err(invalid("--q"))?;
            spec.min_d = min_d;
            spec.limit = limit;
            spec.distance = engine_options(MethodArg::Auto, &engine);
            if let Some(k) = &known {
                check_readable("--known", k)?;
            }
            CommandPlan {
                command: Command::Search { spec, known },
                format,
            }
        }
        RawCommand::Tables {
            which,
            p,
            format,
            engine,
            known,
        } => {
            if let Some(p) = p {
                PrimeModulus::new(p).map_err(invalid("--p"))?;
            }
            if let Some(k) = &known {
                check_readable("--known", k)?;
            }
            CommandPlan {
                command: Command::Tables {
                    which,
                    p,
                    opts: engine_options(MethodArg::Auto, &engine),
                    known,
                },
                format,
            }
        }
    };
    Ok(plan)
}

/// Reads the text matrix format: optional `#` comment lines, a header
/// `n k q`, then `k` rows of `n` symbols.
pub fn parse_matrix(text: &str) -> Result<Matrix> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (hline, header) = lines
        .by_ref()
        .find(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .ok_or(Error::Parse {
            line: 1,
            message: "missing header `n k q`".into(),
        })?;
    let bad = |line: usize, message: String| Error::Parse { line, message };
    let nums: Vec<usize> = header
        .split_whitespace()
        .map(|s| s.parse().map_err(|_| bad(hline, format!("not a number: {s:?}"))))
        .collect::<Result<_>>()?;
    let [n, k, q] = nums[..] else {
        return Err(bad(hline, "header must be `n k q`".into()));
    };
    let field = Field::from_q(q as u32).map_err(|e| bad(hline, e.to_string()))?;
    if n == 0 || k == 0 {
        return Err(bad(hline, "n and k must be positive".into()));
    }
    let mut rows = Vec::with_capacity(k);
    let mut last = hline;
    for (i, line) in lines {
        last = i;
        if line.is_empty() {
            continue;
        }
        if rows.len() == k {
            return Err(bad(i, format!("more than {k} rows")));
        }
        let row: Vec<Gf4> = line
            .chars()
            .map(|c| {
                field
                    .parse_symbol(c)
                    .ok_or_else(|| bad(i, format!("symbol {c:?} is not in {field}")))
            })
            .collect::<Result<_>>()?;
        if row.len() != n {
            return Err(bad(i, format!("row has {} symbols, expected {n}", row.len())));
        }
        rows.push(row);
    }
    if rows.len() != k {
        return Err(bad(last, format!("expected {k} rows, found {}", rows.len())));
    }
    Matrix::from_rows(field, rows)
}

pub fn format_matrix(m: &Matrix, comment: Option<&str>) -> String {
    let mut s = String::new();
    if let Some(c) = comment {
        for line in c.lines() {
            s.push_str("# ");
            s.push_str(line);
            s.push('\n');
        }
    }
    s.push_str(&format!("{} {} {}\n", m.cols(), m.rows(), m.field().q()));
    s.push_str(&m.to_string());
    s
}

pub fn read_matrix_file(path: &Path) -> Result<Matrix> {
    parse_matrix(&std::fs::read_to_string(path)?)
}

// JSON document shared by every subcommand.

#[derive(Debug, Clone, Default, Serialize)]
pub struct Params {
    pub p: Option<u64>,
    pub q: Option<u32>,
    pub gamma: Option<u64>,
    pub x: Option<i64>,
    pub y: Option<i64>,
    pub t: Option<u64>,
}

impl Params {
    fn for_table(table: &CyclotomicTable, q: Option<u32>) -> Self {
        let rep = cross_check(table).ok().map(|r| r.rep);
        Self {
            p: Some(table.p()),
            q,
            gamma: Some(table.params().gamma),
            x: rep.map(|r| r.x),
            y: rep.map(|r| r.y),
            t: rep.map(|r| r.t),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CoeffsJson {
    pub variant: Variant,
    pub alpha: Option<Gf4>,
    pub m: [Gf4; 7],
}

impl From<&CoefficientVector> for CoeffsJson {
    fn from(v: &CoefficientVector) -> Self {
        Self {
            variant: if v.is_bordered() {
                Variant::Bordered
            } else {
                Variant::Pure
            },
            alpha: v.alpha,
            m: v.m,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundsJson {
    pub lemma1: Option<usize>,
    pub meets_bound: bool,
    pub classification: Classification,
}

impl BoundsJson {
    fn new(report: &CodeReport, known: Option<&BestKnownTable>) -> Self {
        Self {
            lemma1: report.bound,
            meets_bound: report.meets_bound,
            classification: classify(report, known),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CyclotomyJson {
    pub f: u64,
    pub classes: Vec<Vec<u32>>,
    pub numbers: [[u32; 6]; 6],
    pub constants: CyclotomicConstants,
    pub minus_one_class: usize,
    pub parity_case: Option<char>,
    pub closed_form: Option<ClosedFormReport>,
    pub symmetries: SymmetryReport,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ReportJson {
    pub params: Params,
    pub coeffs: Option<CoeffsJson>,
    pub duality: Option<DualityReport>,
    pub code: Option<CodeReport>,
    pub bounds: Option<BoundsJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cyclotomy: Option<CyclotomyJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub results: Option<Vec<ReportJson>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

fn write_json(out: &mut dyn Write, doc: &ReportJson) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, doc).map_err(|e| Error::Internal(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

/// One CSV line per code in `search` and `tables` listings.
#[derive(Debug, Serialize)]
struct CsvRow {
    table: Option<u8>,
    line: Option<usize>,
    p: u64,
    q: u32,
    variant: Variant,
    alpha: Option<char>,
    coeffs: String,
    status: String,
    self_dual: Option<bool>,
    n: Option<usize>,
    k: Option<usize>,
    d: Option<usize>,
    d_certified: Option<bool>,
    claimed_d: Option<usize>,
    d_matches: Option<bool>,
    lemma1: Option<usize>,
    classification: Option<Classification>,
    note: String,
}

fn write_csv(out: &mut dyn Write, rows: &[CsvRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Internal(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

fn load_known(path: &Option<PathBuf>) -> Result<Option<BestKnownTable>> {
    path.as_deref().map(BestKnownTable::load).transpose()
}

/// Runs a validated plan.
pub fn execute_command(plan: &CommandPlan, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match run(plan, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

/// Parses, validates and executes; the whole binary in one call.
pub fn run_cli<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match parse_command(argv) {
        Ok(plan) => execute_command(&plan, out, err),
        Err(e) => {
            let code = e.exit_code();
            match &e {
                CliError::Usage(c) if code == 0 => {
                    let _ = write!(out, "{}", c.render());
                }
                CliError::Usage(c) => {
                    let _ = write!(err, "{}", c.render());
                }
                CliError::Invalid { .. } => {
                    let _ = writeln!(err, "error: {e}");
                }
            }
            code
        }
    }
}

fn run(plan: &CommandPlan, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match &plan.command {
        Command::Cyclotomy { params } => run_cyclotomy(params, plan.format, out, err),
        Command::Build { p, coeffs, out: path } => {
            let table = cached_table(&PrimeModulus::new(*p)?)?;
            let g = generator(&table, coeffs)?;
            let comment = format!("p = {p}, gamma = {}, coefficients {coeffs}", table.params().gamma);
            std::fs::write(path, format_matrix(&g, Some(&comment)))?;
            writeln!(
                err,
                "wrote {}x{} generator over {} to {}",
                g.rows(),
                g.cols(),
                coeffs.field,
                path.display()
            )?;
            Ok(0)
        }
        Command::Verify { p, coeffs } => {
            let table = cached_table(&PrimeModulus::new(*p)?)?;
            let duality = check_conditions(&table, coeffs)?;
            if !duality.consistent() {
                writeln!(err, "warning: cyclotomic conditions and Gram matrix disagree")?;
            }
            let code = if duality.is_self_dual { 0 } else { 1 };
            match plan.format {
                OutputFormat::Json => write_json(
                    out,
                    &ReportJson {
                        params: Params::for_table(&table, Some(coeffs.field.q())),
                        coeffs: Some(coeffs.into()),
                        duality: Some(duality),
                        ..Default::default()
                    },
                )?,
                _ => write_duality_text(out, &table, coeffs, &duality)?,
            }
            Ok(code)
        }
        Command::Distance { input, opts, known } => {
            let known = load_known(known)?;
            let g = read_matrix_file(input)?;
            let code = LinearCode::new(g);
            let report = code_report(&code, opts)?;
            let bounds = BoundsJson::new(&report, known.as_ref());
            match plan.format {
                OutputFormat::Json => write_json(
                    out,
                    &ReportJson {
                        params: Params {
                            q: Some(report.q),
                            ..Default::default()
                        },
                        code: Some(report),
                        bounds: Some(bounds),
                        ..Default::default()
                    },
                )?,
                _ => write_code_text(out, &report, &bounds)?,
            }
            Ok(0)
        }
        Command::Search { spec, known } => {
            let known = load_known(known)?;
            let hits = enumerate_self_dual(spec)?;
            writeln!(err, "{} self-dual codes reported", hits.len())?;
            let table = cached_table(&PrimeModulus::new(spec.p)?)?;
            write_search(out, plan.format, &table, spec, &hits, known.as_ref())?;
            Ok(0)
        }
        Command::Tables { which, p, opts, known } => {
            let known = load_known(known)?;
            let outcomes = reproduce_table(*which, *p, opts)?;
            let enabled: Vec<&TableOutcome> = outcomes.iter().filter(|o| o.enabled()).collect();
            let all_self_dual = enabled.iter().all(|o| o.self_dual);
            let mismatches = enabled.iter().filter(|o| !o.d_matches).count();
            write_tables(out, plan.format, *which, &outcomes, known.as_ref())?;
            writeln!(
                err,
                "table {which}: {}/{} enabled rows self-dual, {mismatches} distance mismatches",
                enabled.iter().filter(|o| o.self_dual).count(),
                enabled.len()
            )?;
            Ok(if all_self_dual { 0 } else { 1 })
        }
    }
}

fn run_cyclotomy(
    params: &PrimeModulus,
    format: OutputFormat,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let table = cached_table(params)?;
    let symmetries = verify_symmetries(&table);
    let closed = cross_check(&table);
    let parity = if params.p % 24 == 19 {
        Some(parity_class_of(&table))
    } else {
        None
    };
    let mut ok = symmetries.all_passed();
    if let Err(e) = &closed {
        writeln!(err, "closed forms: {e}")?;
        ok = false;
    }
    if let Ok(c) = &closed {
        ok &= c.matches;
    }
    if let Some(Err(e)) = &parity {
        writeln!(err, "parity: {e}")?;
        ok = false;
    }
    let parity_case = parity.and_then(|r| r.ok()).map(|c| c.tag());
    let rep = closed.as_ref().ok().map(|c| c.rep);

    match format {
        OutputFormat::Json => {
            let doc = ReportJson {
                params: Params {
                    p: Some(params.p),
                    q: None,
                    gamma: Some(params.gamma),
                    x: rep.map(|r| r.x),
                    y: rep.map(|r| r.y),
                    t: rep.map(|r| r.t),
                },
                cyclotomy: Some(CyclotomyJson {
                    f: params.f,
                    classes: table.classes().to_vec(),
                    numbers: *table.numbers(),
                    constants: table.constants(),
                    minus_one_class: table.minus_one_class(),
                    parity_case,
                    closed_form: closed.ok(),
                    symmetries,
                }),
                ..Default::default()
            };
            write_json(out, &doc)?;
        }
        _ => write_cyclotomy_text(out, &table, rep, parity_case, closed.ok(), &symmetries)?,
    }
    Ok(if ok { 0 } else { 1 })
}

fn write_cyclotomy_text(
    out: &mut dyn Write,
    table: &CyclotomicTable,
    rep: Option<DiophantineRep>,
    parity_case: Option<char>,
    closed: Option<ClosedFormReport>,
    symmetries: &SymmetryReport,
) -> Result<()> {
    let params = table.params();
    writeln!(out, "p = {}   f = {}   gamma = {}", params.p, params.f, params.gamma)?;
    writeln!(out, "-1 lies in C{}", table.minus_one_class())?;
    writeln!(out)?;
    for (i, class) in table.classes().iter().enumerate() {
        let list: Vec<String> = class.iter().map(u32::to_string).collect();
        writeln!(out, "C{i}: {}", list.join(" "))?;
    }
    writeln!(out)?;
    let width = table
        .numbers()
        .iter()
        .flatten()
        .map(|v| v.to_string().len())
        .max()
        .unwrap_or(1)
        .max(2);
    write!(out, "(m,n) ")?;
    for n in 0..6 {
        write!(out, " {n:>width$}")?;
    }
    writeln!(out)?;
    for (m, row) in table.numbers().iter().enumerate() {
        write!(out, "{m:>5} ")?;
        for v in row {
            write!(out, " {v:>width$}")?;
        }
        writeln!(out)?;
    }
    writeln!(out)?;
    let k = table.constants();
    let names: Vec<String> = CyclotomicConstants::NAMES.iter().map(|c| format!("{c:>width$}")).collect();
    let vals: Vec<String> = k.to_array().iter().map(|v| format!("{v:>width$}")).collect();
    writeln!(out, "constants  {}", names.join(" "))?;
    writeln!(out, "counted    {}", vals.join(" "))?;
    if let Some(c) = &closed {
        if let Some(cf) = c.closed_form {
            let vals: Vec<String> = cf.to_array().iter().map(|v| format!("{v:>width$}")).collect();
            writeln!(out, "closed     {}", vals.join(" "))?;
        }
    }
    writeln!(out)?;
    if let Some(r) = rep {
        let sign = if r.y_sign_free { " (sign of y fixed by counting)" } else { "" };
        writeln!(out, "x = {}   y = {}   t = {}{sign}", r.x, r.y, r.t)?;
    }
    if let Some(c) = &closed {
        writeln!(
            out,
            "closed forms, branch ({}): {}",
            c.branch.tag(),
            if c.matches { "match" } else { "MISMATCH" }
        )?;
        for corr in &c.corrections {
            writeln!(
                out,
                "  corrected {} in branch ({}): (p {:+} {:+}x {:+}y)/36",
                corr.constant, corr.branch, corr.corrected.c0, corr.corrected.cx, corr.corrected.cy
            )?;
        }
    }
    if let Some(case) = parity_case {
        writeln!(out, "parity case: ({case})")?;
    }
    let failed: Vec<&str> = symmetries.failures().map(|c| c.name.as_str()).collect();
    if failed.is_empty() {
        writeln!(out, "symmetry checks: {} passed", symmetries.checks.len())?;
    } else {
        writeln!(out, "symmetry checks FAILED: {}", failed.join(", "))?;
    }
    Ok(())
}

fn write_duality_text(
    out: &mut dyn Write,
    table: &CyclotomicTable,
    coeffs: &CoefficientVector,
    r: &DualityReport,
) -> Result<()> {
    let kind = if coeffs.is_bordered() { "B" } else { "P" };
    writeln!(out, "code        {kind}_{}{coeffs} over {}", table.p(), coeffs.field)?;
    writeln!(out, "[n, k]      [{}, {}]", r.n, r.k)?;
    let d: Vec<String> = r.d_residuals.iter().map(|a| a.symbol().to_string()).collect();
    writeln!(out, "D0..D6      {}", d.join(" "))?;
    if let Some(b) = r.border_residuals {
        writeln!(out, "corner      {}", b.corner)?;
        writeln!(out, "S           {}", b.s)?;
    }
    writeln!(out, "conditions  {}", if r.conditions_hold { "hold" } else { "fail" })?;
    writeln!(out, "Gram zero   {}", r.gram_zero)?;
    writeln!(out, "self-dual   {}", r.is_self_dual)?;
    Ok(())
}

fn write_code_text(out: &mut dyn Write, r: &CodeReport, b: &BoundsJson) -> Result<()> {
    writeln!(out, "n           {}", r.n)?;
    writeln!(out, "k           {}", r.k)?;
    writeln!(out, "q           {}", r.q)?;
    let cert = if r.d_certified { "" } else { " (upper bound)" };
    writeln!(out, "d           {}{cert}", r.d)?;
    writeln!(out, "method      {}", r.d_method)?;
    writeln!(out, "self-dual   {}", r.self_dual)?;
    match b.lemma1 {
        Some(v) => writeln!(out, "bound       {v}")?,
        None => writeln!(out, "bound       n/a")?,
    }
    writeln!(out, "class       {}", b.classification)?;
    writeln!(out, "witness     {}", r.witness)?;
    Ok(())
}

fn write_search(
    out: &mut dyn Write,
    format: OutputFormat,
    table: &CyclotomicTable,
    spec: &SearchSpec,
    hits: &[SearchHit],
    known: Option<&BestKnownTable>,
) -> Result<()> {
    match format {
        OutputFormat::Json => {
            let results = hits
                .iter()
                .map(|h| ReportJson {
                    params: Params::for_table(table, Some(spec.field.q())),
                    coeffs: Some((&h.coeffs).into()),
                    code: Some(h.report.clone()),
                    bounds: Some(BoundsJson::new(&h.report, known)),
                    ..Default::default()
                })
                .collect();
            write_json(
                out,
                &ReportJson {
                    params: Params::for_table(table, Some(spec.field.q())),
                    results: Some(results),
                    ..Default::default()
                },
            )
        }
        OutputFormat::Csv => {
            let rows: Vec<CsvRow> = hits
                .iter()
                .map(|h| CsvRow {
                    table: None,
                    line: None,
                    p: spec.p,
                    q: spec.field.q(),
                    variant: spec.variant,
                    alpha: h.coeffs.alpha.map(Gf4::symbol),
                    coeffs: h.coeffs.coeff_string(),
                    status: "self-dual".into(),
                    self_dual: Some(h.report.self_dual),
                    n: Some(h.report.n),
                    k: Some(h.report.k),
                    d: Some(h.report.d),
                    d_certified: Some(h.report.d_certified),
                    claimed_d: None,
                    d_matches: None,
                    lemma1: h.report.bound,
                    classification: Some(classify(&h.report, known)),
                    note: String::new(),
                })
                .collect();
            write_csv(out, &rows)
        }
        OutputFormat::Text => {
            writeln!(out, "{:<24} {:>4} {:>4} {:>3} {:>6}  class", "coefficients", "n", "k", "d", "bound")?;
            for h in hits {
                let r = &h.report;
                let d = if r.d_certified { r.d.to_string() } else { format!("<={}", r.d) };
                writeln!(
                    out,
                    "{:<24} {:>4} {:>4} {:>3} {:>6}  {}",
                    h.coeffs.to_string(),
                    r.n,
                    r.k,
                    d,
                    r.bound.map_or("-".into(), |b| b.to_string()),
                    classify(r, known)
                )?;
            }
            Ok(())
        }
    }
}

fn write_tables(
    out: &mut dyn Write,
    format: OutputFormat,
    which: u8,
    outcomes: &[TableOutcome],
    known: Option<&BestKnownTable>,
) -> Result<()> {
    match format {
        OutputFormat::Json => {
            let results = outcomes
                .iter()
                .map(|o| ReportJson {
                    params: table_for_outcome(o),
                    coeffs: o.row.coeffs.as_ref().map(Into::into),
                    duality: o.duality.clone(),
                    code: o.report.clone(),
                    bounds: o.report.as_ref().map(|r| BoundsJson::new(r, known)),
                    note: Some(outcome_note(o)),
                    ..Default::default()
                })
                .collect();
            let params = outcomes.first().map(table_for_outcome).unwrap_or_default();
            write_json(
                out,
                &ReportJson {
                    params,
                    results: Some(results),
                    note: Some(format!("table {which}")),
                    ..Default::default()
                },
            )
        }
        OutputFormat::Csv => {
            let rows: Vec<CsvRow> = outcomes
                .iter()
                .map(|o| CsvRow {
                    table: Some(o.row.table),
                    line: Some(o.row.line),
                    p: o.p,
                    q: o.row.coeffs.map_or(0, |c| c.field.q()),
                    variant: o.row.variant,
                    alpha: o.row.coeffs.and_then(|c| c.alpha).map(Gf4::symbol),
                    coeffs: o.row.coeffs.map_or(o.row.raw.clone(), |c| c.coeff_string()),
                    status: status_label(o).into(),
                    self_dual: o.enabled().then_some(o.self_dual),
                    n: o.report.as_ref().map(|r| r.n),
                    k: o.report.as_ref().map(|r| r.k),
                    d: o.report.as_ref().map(|r| r.d),
                    d_certified: o.report.as_ref().map(|r| r.d_certified),
                    claimed_d: Some(o.row.claimed_d),
                    d_matches: o.enabled().then_some(o.d_matches),
                    lemma1: o.report.as_ref().and_then(|r| r.bound),
                    classification: o.report.as_ref().map(|r| classify(r, known)),
                    note: o.note.clone(),
                })
                .collect();
            write_csv(out, &rows)
        }
        OutputFormat::Text => {
            writeln!(
                out,
                "{:>4} {:<28} {:<10} {:>9} {:>3} {:>7}  note",
                "line", "entries", "status", "self-dual", "d", "claimed"
            )?;
            for o in outcomes {
                let d = o.report.as_ref().map_or("-".to_string(), |r| {
                    if r.d_certified {
                        r.d.to_string()
                    } else {
                        format!("<={}", r.d)
                    }
                });
                let sd = if o.enabled() { o.self_dual.to_string() } else { "-".into() };
                writeln!(
                    out,
                    "{:>4} {:<28} {:<10} {:>9} {:>3} {:>7}  {}",
                    o.row.line,
                    o.row.raw,
                    status_label(o),
                    sd,
                    d,
                    o.row.claimed_d,
                    o.note
                )?;
            }
            Ok(())
        }
    }
}

fn status_label(o: &TableOutcome) -> &'static str {
    match o.status {
        crate::search::RowStatus::Evaluated if o.self_dual && o.d_matches => "match",
        crate::search::RowStatus::Evaluated => "mismatch",
        crate::search::RowStatus::Duplicate => "duplicate",
        crate::search::RowStatus::Disabled => "disabled",
        crate::search::RowStatus::Failed => "failed",
    }
}

fn outcome_note(o: &TableOutcome) -> String {
    format!("line {}: {}", o.row.line, if o.note.is_empty() { status_label(o) } else { &o.note })
}

fn table_for_outcome(o: &TableOutcome) -> Params {
    let q = o.row.coeffs.map(|c| c.field.q());
    match PrimeModulus::new(o.p).and_then(|m| cached_table(&m)) {
        Ok(t) => Params::for_table(&t, q),
        Err(_) => Params {
            p: Some(o.p),
            q,
            ..Default::default()
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan(args: &str) -> std::result::Result<CommandPlan, CliError> {
        parse_command(std::iter::once("sextic").chain(args.split_whitespace()))
    }

    fn run_args(args: &str) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_cli(
            std::iter::once("sextic").chain(args.split_whitespace()),
            &mut out,
            &mut err,
        );
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn verify_plan_parses_published_vector() {
        let p = plan("verify --p 19 --q 4 --coeffs w,W,1,W,0,0,w --variant pure").unwrap();
        assert_eq!(p.subcommand(), "verify");
        match p.command {
            Command::Verify { p, coeffs } => {
                assert_eq!(p, 19);
                assert_eq!(coeffs.m, [Gf4::W, Gf4::W2, Gf4::ONE, Gf4::W2, Gf4::ZERO, Gf4::ZERO, Gf4::W]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let e = plan("build --p 41 --q 2 --coeffs 0,0,0,0,1,1,1 --variant pure --out x").unwrap_err();
        assert!(matches!(e, CliError::Invalid { flag: "--p", source: Error::Incongruent { .. } }));
        assert!(matches!(
            plan("verify --p 21 --q 2 --coeffs 0,0,0,0,1,1,1 --variant pure").unwrap_err(),
            CliError::Invalid { flag: "--p", source: Error::NotPrime(21) }
        ));
        for bad in [
            "verify --p 19 --q 2 --coeffs 0,0,0,0,1,1 --variant pure",
            "verify --p 19 --q 2 --coeffs 0,0,0,0,1,1,w --variant pure",
            "verify --p 19 --q 4 --coeffs 0,0,0,0,1,1,x --variant pure",
            "verify --p 19 --q 2 --coeffs 0,0,0,0,1,1,1 --alpha 0 --variant pure",
            "verify --p 19 --q 2 --coeffs 0,0,0,0,1,1,1 --variant bordered",
            "verify --p 19 --q 3 --coeffs 0,0,0,0,1,1,1 --variant pure",
        ] {
            assert_eq!(plan(bad).unwrap_err().exit_code(), 2, "{bad}");
        }
        assert_eq!(plan("verify --bogus").unwrap_err().exit_code(), 2);
        assert_eq!(plan("tables --which 5").unwrap_err().exit_code(), 2);
        assert_eq!(plan("--help").unwrap_err().exit_code(), 0);
    }

    #[test]
    fn missing_input_file() {
        let (code, _, err) = run_args("distance --in /nonexistent/missing.gm");
        assert_eq!(code, 2);
        assert!(err.contains("no such file"));
    }

    #[test]
    fn matrix_format_round_trip() {
        let text = "# comment\n# another\n4 2 4\n10wW\n01W1\n";
        let m = parse_matrix(text).unwrap();
        assert_eq!((m.rows(), m.cols(), m.field()), (2, 4, Field::Gf4));
        assert_eq!(parse_matrix(&format_matrix(&m, Some("x"))).unwrap(), m);
        for (bad, line) in [
            ("", 1),
            ("4 2\n1010\n0101\n", 1),
            ("4 2 2\n1010\n", 2),
            ("4 2 2\n1010\n01w1\n", 3),
            ("4 2 2\n1010\n010\n", 3),
            ("4 1 2\n1010\n0101\n", 3),
        ] {
            match parse_matrix(bad) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{bad:?}"),
                other => panic!("{bad:?} gave {other:?}"),
            }
        }
    }

    #[test]
    fn verify_exit_codes() {
        // 1 + 0 A_1 + ... is the identity-plus-identity code: self-dual
        assert_eq!(run_args("verify --p 19 --q 2 --coeffs 1,0,0,0,0,0,0 --variant pure").0, 0);
        assert_eq!(run_args("verify --p 19 --q 2 --coeffs 0,0,0,0,1,1,1 --variant pure").0, 1);
    }

    #[test]
    fn cyclotomy_text_and_json() {
        let (code, out, _) = run_args("cyclotomy --p 19");
        assert_eq!(code, 0);
        assert!(out.contains("C0: 1 7 11"));
        assert!(out.contains("parity case: (b)"));
        let (code, out, _) = run_args("cyclotomy --p 43 --json");
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        for key in ["params", "coeffs", "duality", "code", "bounds"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["params"]["x"], 4);
        assert_eq!(v["cyclotomy"]["parity_case"], "a");
    }
}
