//! Sextic cyclotomic classes and cyclotomic numbers modulo a prime
//! `p = 12l + 7`.
//!
//! The counted table is ground truth. Closed forms in terms of
//! `p = x² + 3y²` are evaluated and cross-checked against it; one printed
//! closed form is known to carry a sign error and is corrected here (see
//! [`CORRECTIONS`]).

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{IndexTable, PrimeModulus};

#[derive(Debug, Clone)]
pub struct CyclotomicTable {
    params: PrimeModulus,
    index: IndexTable,
    classes: [Vec<u32>; 6],
    numbers: [[u32; 6]; 6],
    minus_one_class: usize,
}

impl CyclotomicTable {
    pub fn params(&self) -> &PrimeModulus {
        &self.params
    }

    pub fn p(&self) -> u64 {
        self.params.p
    }

    pub fn f(&self) -> u64 {
        self.params.f
    }

    pub fn index_table(&self) -> &IndexTable {
        &self.index
    }

    /// Sorted members of `C_i`.
    pub fn class(&self, i: usize) -> &[u32] {
        &self.classes[i % 6]
    }

    pub fn classes(&self) -> &[Vec<u32>; 6] {
        &self.classes
    }

    /// Class index of a residue, `None` for multiples of `p`.
    pub fn class_of(&self, a: u64) -> Option<usize> {
        self.index.index(a).ok().map(|i| (i % 6) as usize)
    }

    /// `(m, n)` with both arguments taken mod 6.
    pub fn number(&self, m: i64, n: i64) -> u32 {
        self.numbers[m.rem_euclid(6) as usize][n.rem_euclid(6) as usize]
    }

    pub fn numbers(&self) -> &[[u32; 6]; 6] {
        &self.numbers
    }

    /// Index of the class containing `-1`.
    pub fn minus_one_class(&self) -> usize {
        self.minus_one_class
    }

    pub fn constants(&self) -> CyclotomicConstants {
        constants(self)
    }
}

pub fn build_table(params: &PrimeModulus) -> Result<CyclotomicTable> {
    let p = params.p;
    if p % 12 != 7 {
        return Err(Error::Incongruent {
            p,
            modulus: 12,
            residue: 7,
        });
    }
    let index = IndexTable::new(p, params.gamma)?;
    let mut classes: [Vec<u32>; 6] = Default::default();
    // C_i = { gamma^(6j+i) }
    for i in 0..6u64 {
        let mut members: Vec<u32> = (0..params.f)
            .map(|j| index.power(6 * j + i) as u32)
            .collect();
        members.sort_unstable();
        classes[i as usize] = members;
    }
    let class_of = |a: u64| (index.index(a).expect("nonzero residue") % 6) as usize;
    let mut numbers = [[0u32; 6]; 6];
    for (m, members) in classes.iter().enumerate() {
        for &z in members {
            let shifted = (z as u64 + 1) % p;
            if shifted != 0 {
                numbers[m][class_of(shifted)] += 1;
            }
        }
    }
    let minus_one_class = class_of(p - 1);
    Ok(CyclotomicTable {
        params: *params,
        index,
        classes,
        numbers,
        minus_one_class,
    })
}

fn cache() -> &'static RwLock<HashMap<(u64, u64), Arc<CyclotomicTable>>> {
    static CACHE: OnceLock<RwLock<HashMap<(u64, u64), Arc<CyclotomicTable>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Process-wide cached [`build_table`]. Concurrent misses may compute the
/// same table twice; the first insert wins.
pub fn cached_table(params: &PrimeModulus) -> Result<Arc<CyclotomicTable>> {
    let key = (params.p, params.gamma);
    if let Some(t) = cache().read().expect("cache poisoned").get(&key) {
        return Ok(Arc::clone(t));
    }
    let table = Arc::new(build_table(params)?);
    let mut guard = cache().write().expect("cache poisoned");
    Ok(Arc::clone(guard.entry(key).or_insert(table)))
}

/// Cached table for `p` with its smallest primitive root.
pub fn table_for(p: u64) -> Result<Arc<CyclotomicTable>> {
    cached_table(&PrimeModulus::new(p)?)
}

/// The ten representative cyclotomic numbers A…J.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CyclotomicConstants {
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub d: u32,
    pub e: u32,
    pub f: u32,
    pub g: u32,
    pub h: u32,
    pub i: u32,
    pub j: u32,
}

impl CyclotomicConstants {
    pub const NAMES: [char; 10] = ['A', 'B', 'C', 'D', 'E', 'F', 'G', 'H', 'I', 'J'];

    /// Grid coordinates of each representative.
    pub const COORDS: [(usize, usize); 10] = [
        (0, 0),
        (0, 1),
        (0, 2),
        (0, 3),
        (0, 4),
        (0, 5),
        (1, 0),
        (1, 1),
        (1, 2),
        (2, 1),
    ];

    pub fn from_array(v: [u32; 10]) -> Self {
        let [a, b, c, d, e, f, g, h, i, j] = v;
        Self {
            a,
            b,
            c,
            d,
            e,
            f,
            g,
            h,
            i,
            j,
        }
    }

    pub fn to_array(self) -> [u32; 10] {
        [
            self.a, self.b, self.c, self.d, self.e, self.f, self.g, self.h, self.i, self.j,
        ]
    }
}

impl fmt::Display for CyclotomicConstants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = Self::NAMES
            .iter()
            .zip(self.to_array())
            .map(|(n, v)| format!("{n}={v}"))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

pub fn constants(table: &CyclotomicTable) -> CyclotomicConstants {
    let v = CyclotomicConstants::COORDS.map(|(m, n)| table.numbers[m][n]);
    CyclotomicConstants::from_array(v)
}

/// Equality chains among the 36 numbers for `p = 12l + 7`; together with
/// `(0,3)` they cover the whole grid.
pub const EQUALITY_CHAINS: [&[(usize, usize)]; 9] = [
    &[(0, 0), (3, 0), (3, 3)],
    &[(0, 1), (2, 5), (4, 3)],
    &[(0, 2), (1, 4), (5, 3)],
    &[(0, 4), (1, 3), (5, 2)],
    &[(0, 5), (2, 3), (4, 1)],
    &[(1, 0), (2, 2), (3, 4), (4, 0), (3, 1), (5, 5)],
    &[(2, 1), (4, 5)],
    &[(1, 1), (2, 0), (3, 2), (3, 5), (4, 4), (5, 0)],
    &[(1, 2), (1, 5), (2, 4), (4, 2), (5, 1), (5, 4)],
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub lhs: (i64, i64),
    pub rhs: (i64, i64),
    pub lhs_value: i64,
    pub rhs_value: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub passed: bool,
    pub counterexample: Option<Counterexample>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SymmetryReport {
    pub checks: Vec<IdentityCheck>,
}

impl SymmetryReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn pairwise_check(
    name: &str,
    table: &CyclotomicTable,
    map: impl Fn(i64, i64) -> (i64, i64),
) -> IdentityCheck {
    for i in 0..6i64 {
        for j in 0..6i64 {
            let (i2, j2) = map(i, j);
            let (l, r) = (table.number(i, j), table.number(i2, j2));
            if l != r {
                return IdentityCheck {
                    name: name.to_string(),
                    passed: false,
                    counterexample: Some(Counterexample {
                        lhs: (i, j),
                        rhs: (i2, j2),
                        lhs_value: l as i64,
                        rhs_value: r as i64,
                    }),
                };
            }
        }
    }
    IdentityCheck {
        name: name.to_string(),
        passed: true,
        counterexample: None,
    }
}

/// Runs every symmetry identity against the counted grid. Failures are
/// reported with a counterexample, never raised.
pub fn verify_symmetries(table: &CyclotomicTable) -> SymmetryReport {
    let mut checks = vec![
        pairwise_check("periodicity (i,j) = (i+6, j-6)", table, |i, j| (i + 6, j - 6)),
        pairwise_check("(i,j) = (6-i, j-i)", table, |i, j| (6 - i, j - i)),
    ];
    if table.f() % 2 == 1 {
        checks.push(pairwise_check("f odd: (i,j) = (j+3, i+3)", table, |i, j| {
            (j + 3, i + 3)
        }));
    } else {
        checks.push(pairwise_check("f even: (i,j) = (j, i)", table, |i, j| (j, i)));
    }

    for chain in EQUALITY_CHAINS {
        let (m0, n0) = chain[0];
        let first = table.numbers[m0][n0];
        let broken = chain
            .iter()
            .find(|&&(m, n)| table.numbers[m][n] != first)
            .map(|&(m, n)| Counterexample {
                lhs: (m0 as i64, n0 as i64),
                rhs: (m as i64, n as i64),
                lhs_value: first as i64,
                rhs_value: table.numbers[m][n] as i64,
            });
        let names: Vec<String> = chain.iter().map(|(m, n)| format!("({m},{n})")).collect();
        checks.push(IdentityCheck {
            name: names.join(" = "),
            passed: broken.is_none(),
            counterexample: broken,
        });
    }

    let f = table.f() as i64;
    let bad_row = (0..6).find_map(|m| {
        let sum: i64 = table.numbers[m].iter().map(|&v| v as i64).sum();
        let expected = f - i64::from(m == table.minus_one_class);
        (sum != expected).then_some(Counterexample {
            lhs: (m as i64, -1),
            rhs: (m as i64, -1),
            lhs_value: sum,
            rhs_value: expected,
        })
    });
    checks.push(IdentityCheck {
        name: "row sums: sum_n (m,n) = f - [-1 in C_m]".to_string(),
        passed: bad_row.is_none(),
        counterexample: bad_row,
    });

    if table.f() % 2 == 1 {
        let ok = table.minus_one_class == 3;
        checks.push(IdentityCheck {
            name: "-1 lies in C_3".to_string(),
            passed: ok,
            counterexample: (!ok).then_some(Counterexample {
                lhs: (table.minus_one_class as i64, 0),
                rhs: (3, 0),
                lhs_value: table.minus_one_class as i64,
                rhs_value: 3,
            }),
        });
    }
    SymmetryReport { checks }
}

/// `p = x² + 3y²` with `x ≡ 1 (mod 3)`, `y ≡ -t (mod 3)` and `γ^t ≡ 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DiophantineRep {
    pub x: i64,
    pub y: i64,
    pub t: u64,
    /// Set when `3 | y`, so the congruence leaves the sign of `y` open.
    pub y_sign_free: bool,
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

pub fn diophantine_rep(params: &PrimeModulus) -> Result<DiophantineRep> {
    let p = params.p;
    let (mut x, mut y) = (None, 0i64);
    for cand in 0..=isqrt(p) {
        let rest = p - cand * cand;
        if !rest.is_multiple_of(3) {
            continue;
        }
        let r = isqrt(rest / 3);
        if 3 * r * r == rest {
            x = Some(cand as i64);
            y = r as i64;
            break;
        }
    }
    let x = x.ok_or_else(|| Error::Internal(format!("{p} has no representation x^2 + 3y^2")))?;
    let x = if x.rem_euclid(3) == 1 { x } else { -x };
    if x.rem_euclid(3) != 1 {
        return Err(Error::Internal(format!("x = {x} is divisible by 3 for p = {p}")));
    }

    // discrete index of 2
    let mut t = 0u64;
    let mut acc = 1u64;
    while acc != 2 {
        acc = acc * params.gamma % p;
        t += 1;
        if t >= p {
            return Err(Error::Internal(format!("2 not reached by powers of {}", params.gamma)));
        }
    }

    let want = (-(t as i64)).rem_euclid(3);
    let (y, y_sign_free) = if y % 3 == 0 {
        if want != 0 {
            return Err(Error::IdentityViolation(format!(
                "p = {p}: 3 | y but t = {t} is not divisible by 3"
            )));
        }
        (y, true)
    } else if y.rem_euclid(3) == want {
        (y, false)
    } else {
        (-y, false)
    };
    Ok(DiophantineRep {
        x,
        y,
        t,
        y_sign_free,
    })
}

/// Closed-form branch selected by `t mod 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    /// t ≡ 0 (mod 3)
    A,
    /// t ≡ 1 (mod 3)
    B,
    /// t ≡ 2 (mod 3)
    C,
}

impl Branch {
    pub fn from_t(t: u64) -> Branch {
        match t % 3 {
            0 => Branch::A,
            1 => Branch::B,
            _ => Branch::C,
        }
    }

    pub fn tag(self) -> char {
        match self {
            Branch::A => 'a',
            Branch::B => 'b',
            Branch::C => 'c',
        }
    }

    fn idx(self) -> usize {
        self as usize
    }
}

/// Numerator `p + c0 + cx·x + cy·y` of a closed form over 36.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LinearForm {
    pub c0: i64,
    pub cx: i64,
    pub cy: i64,
}

const fn lf(c0: i64, cx: i64, cy: i64) -> LinearForm {
    LinearForm { c0, cx, cy }
}

impl LinearForm {
    pub fn numerator(self, p: u64, x: i64, y: i64) -> i64 {
        p as i64 + self.c0 + self.cx * x + self.cy * y
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(p{:+}{:+}x{:+}y)/36", self.c0, self.cx, self.cy)
    }
}

/// Closed forms exactly as published, per branch, in A…J order.
pub const PRINTED_FORMS: [[LinearForm; 10]; 3] = [
    [
        lf(-11, -8, 0),
        lf(1, -2, 12),
        lf(1, -2, 12),
        lf(1, 16, 0),
        lf(1, -2, -12),
        lf(1, -2, -12),
        lf(-5, 4, 6),
        lf(-5, 4, -6),
        lf(1, -2, 0),
        lf(1, -2, 0),
    ],
    [
        lf(-11, -2, 0),
        lf(1, 4, 0),
        lf(1, -2, 12),
        lf(1, 10, -12),
        lf(1, -8, -12),
        lf(1, -2, 12),
        lf(-5, -2, 6),
        lf(-5, 4, -6),
        lf(1, 4, 0),
        lf(1, -8, 12),
    ],
    [
        lf(-11, -2, 0),
        lf(1, -2, -12),
        lf(1, -8, 12),
        lf(1, 10, 12),
        lf(1, -2, -12),
        lf(1, 4, 0),
        lf(-5, 4, 6),
        lf(-5, -2, -6),
        lf(1, 4, 0),
        lf(1, -8, 12),
    ],
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Correction {
    pub branch: char,
    pub constant: char,
    pub printed: LinearForm,
    pub corrected: LinearForm,
}

/// Printed forms that disagree with counting, with their replacements.
/// Branch (b) J: the sign of the `12y` term is flipped in print.
pub const CORRECTIONS: [Correction; 1] = [Correction {
    branch: 'b',
    constant: 'J',
    printed: lf(1, -8, 12),
    corrected: lf(1, -8, -12),
}];

fn corrected_forms(branch: Branch) -> ([LinearForm; 10], Vec<Correction>) {
    let mut forms = PRINTED_FORMS[branch.idx()];
    let mut applied = Vec::new();
    for c in CORRECTIONS.iter().filter(|c| c.branch == branch.tag()) {
        let k = CyclotomicConstants::NAMES
            .iter()
            .position(|&n| n == c.constant)
            .expect("known constant");
        forms[k] = c.corrected;
        applied.push(*c);
    }
    (forms, applied)
}

/// Numerators of the printed (uncorrected) forms.
pub fn printed_numerators(rep: &DiophantineRep, params: &PrimeModulus) -> [i64; 10] {
    PRINTED_FORMS[Branch::from_t(rep.t).idx()].map(|form| form.numerator(params.p, rep.x, rep.y))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClosedForm {
    pub branch: Branch,
    pub constants: CyclotomicConstants,
    pub corrections: Vec<Correction>,
}

/// Evaluates the corrected closed forms for the branch selected by `t`.
pub fn closed_form_constants(rep: &DiophantineRep, params: &PrimeModulus) -> Result<ClosedForm> {
    let branch = Branch::from_t(rep.t);
    let (forms, corrections) = corrected_forms(branch);
    let mut values = [0u32; 10];
    for (k, form) in forms.iter().enumerate() {
        let num = form.numerator(params.p, rep.x, rep.y);
        if num < 0 || num % 36 != 0 {
            return Err(Error::ClosedFormMismatch {
                constant: CyclotomicConstants::NAMES[k],
                branch: branch.tag(),
                numerator: num,
            });
        }
        values[k] = (num / 36) as u32;
    }
    Ok(ClosedForm {
        branch,
        constants: CyclotomicConstants::from_array(values),
        corrections,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrintedMismatch {
    pub constant: char,
    pub numerator: i64,
    pub counted: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClosedFormReport {
    /// Representation with the sign of `y` resolved.
    pub rep: DiophantineRep,
    pub branch: Branch,
    pub counted: CyclotomicConstants,
    pub closed_form: Option<CyclotomicConstants>,
    pub corrections: Vec<Correction>,
    /// Printed forms that do not reproduce the counted value.
    pub printed_mismatches: Vec<PrintedMismatch>,
    pub matches: bool,
}

/// Compares the corrected closed forms with the counted constants. When
/// the sign of `y` is free, `+|y|` is tried first.
pub fn cross_check(table: &CyclotomicTable) -> Result<ClosedFormReport> {
    let params = table.params();
    let counted = constants(table);
    let rep = diophantine_rep(params)?;
    let candidates = if rep.y_sign_free {
        vec![rep.y.abs(), -rep.y.abs()]
    } else {
        vec![rep.y]
    };
    let mut chosen = None;
    for y in &candidates {
        let r = DiophantineRep { y: *y, ..rep };
        if let Ok(cf) = closed_form_constants(&r, params) {
            if cf.constants == counted {
                chosen = Some((r, cf));
                break;
            }
        }
    }
    let (rep, closed) = match chosen {
        Some((r, cf)) => (r, Some(cf)),
        None => {
            let r = DiophantineRep {
                y: candidates[0],
                ..rep
            };
            (r, closed_form_constants(&r, params).ok())
        }
    };
    let printed_mismatches = printed_numerators(&rep, params)
        .iter()
        .zip(counted.to_array())
        .zip(CyclotomicConstants::NAMES)
        .filter(|((&num, c), _)| num != 36 * *c as i64)
        .map(|((&num, c), name)| PrintedMismatch {
            constant: name,
            numerator: num,
            counted: c,
        })
        .collect();
    let branch = Branch::from_t(rep.t);
    Ok(ClosedFormReport {
        rep,
        branch,
        counted,
        matches: closed.as_ref().is_some_and(|c| c.constants == counted),
        corrections: closed.as_ref().map(|c| c.corrections.clone()).unwrap_or_default(),
        closed_form: closed.map(|c| c.constants),
        printed_mismatches,
    })
}

/// The three mod-2 patterns of A…J for `p ≡ 19 (mod 24)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ParityCase {
    A,
    B,
    C,
}

impl ParityCase {
    pub fn tag(self) -> char {
        match self {
            ParityCase::A => 'a',
            ParityCase::B => 'b',
            ParityCase::C => 'c',
        }
    }

    /// Every pattern that holds; for a correct table this has exactly one
    /// element.
    pub fn matching(k: &CyclotomicConstants) -> Vec<ParityCase> {
        let odd = |v: u32| v % 2 == 1;
        let even = |v: u32| v.is_multiple_of(2);
        let gh = odd(k.g + k.h);
        let mut out = Vec::new();
        if [k.a, k.b, k.c, k.e, k.f].into_iter().all(even) && odd(k.d) && odd(k.i) && odd(k.j) && gh
        {
            out.push(ParityCase::A);
        }
        if [k.a, k.c, k.d, k.e, k.f, k.j].into_iter().all(even) && odd(k.b) && odd(k.i) && gh {
            out.push(ParityCase::B);
        }
        if [k.a, k.b, k.c, k.d, k.e, k.j].into_iter().all(even) && odd(k.f) && odd(k.i) && gh {
            out.push(ParityCase::C);
        }
        out
    }
}

impl fmt::Display for ParityCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.tag())
    }
}

pub fn parity_class_of(table: &CyclotomicTable) -> Result<ParityCase> {
    let p = table.p();
    if p % 24 != 19 {
        return Err(Error::Incongruent {
            p,
            modulus: 24,
            residue: 19,
        });
    }
    let k = constants(table);
    match ParityCase::matching(&k).as_slice() {
        [one] => Ok(*one),
        [] => Err(Error::IdentityViolation(format!(
            "p = {p}: constants {k} match no parity case"
        ))),
        many => Err(Error::IdentityViolation(format!(
            "p = {p}: constants {k} match {} parity cases",
            many.len()
        ))),
    }
}

pub fn parity_class(params: &PrimeModulus) -> Result<ParityCase> {
    if params.p % 24 != 19 {
        return Err(Error::Incongruent {
            p: params.p,
            modulus: 24,
            residue: 19,
        });
    }
    parity_class_of(&*cached_table(params)?)
}
