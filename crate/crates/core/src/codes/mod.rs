//! Linear codes: self-duality certification, distance bounds and reports.

mod distance;

pub(crate) use distance::with_workers;

pub use distance::{
    min_weight, min_weight_exhaustive, min_weight_isd, DistanceMethod, DistanceOptions,
    DistanceResult, MethodChoice, DEFAULT_EXHAUSTIVE_LIMIT_BITS,
};

use serde::Serialize;

use crate::circulant::{bordered_generator, d_coefficients, pure_generator, CoefficientVector};
use crate::cyclotomy::CyclotomicTable;
use crate::error::{Error, Result};
use crate::field::{Field, Gf4};
use crate::matrix::{Matrix, PackedVec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearCode {
    generator: Matrix,
}

impl LinearCode {
    pub fn new(generator: Matrix) -> Self {
        Self { generator }
    }

    pub fn generator(&self) -> &Matrix {
        &self.generator
    }

    pub fn field(&self) -> Field {
        self.generator.field()
    }

    pub fn n(&self) -> usize {
        self.generator.cols()
    }

    pub fn k(&self) -> usize {
        self.generator.rows()
    }

    pub fn rank(&self) -> usize {
        distance::Systematic::reduce(&self.generator, &[]).pivots.len()
    }

    /// Membership test by reduction against a systematic basis.
    pub fn contains(&self, word: &[Gf4]) -> bool {
        if word.len() != self.n() {
            return false;
        }
        let sys = distance::Systematic::reduce(&self.generator, &[]);
        let mut w = PackedVec::from_slice(self.field(), word);
        for (row, &col) in sys.rows.iter().zip(&sys.pivots) {
            let c = w.get(col);
            if !c.is_zero() {
                w.add_scaled(row, c);
            }
        }
        w.weight() == 0
    }
}

/// `G Gᵀ` over GF(q) with the Euclidean inner product.
pub fn gram_matrix(g: &Matrix) -> Matrix {
    let rows = g.packed_rows();
    let k = rows.len();
    let mut out = Matrix::zeros(g.field(), k, k);
    for i in 0..k {
        for j in i..k {
            let v = rows[i].dot(&rows[j]);
            out.set(i, j, v);
            out.set(j, i, v);
        }
    }
    out
}

/// `n = 2k`, full rank and `G Gᵀ = 0`.
pub fn is_self_dual(code: &LinearCode) -> bool {
    code.n() == 2 * code.k() && gram_matrix(code.generator()).is_zero() && code.rank() == code.k()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BorderResiduals {
    /// `α² + p + 1`, zero when the corner condition holds.
    pub corner: Gf4,
    /// `S = -α + m_0 + f (m_1 + … + m_6)`.
    pub s: Gf4,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DualityReport {
    pub is_self_dual: bool,
    /// Verdict of the cyclotomic-number conditions alone.
    pub conditions_hold: bool,
    pub d_residuals: [Gf4; 7],
    pub border_residuals: Option<BorderResiduals>,
    pub gram_zero: bool,
    pub n: usize,
    pub k: usize,
}

impl DualityReport {
    /// The algebraic and Gram verdicts coincide.
    pub fn consistent(&self) -> bool {
        self.conditions_hold == self.is_self_dual
    }
}

// Over characteristic 2 the targets -1 and -2 reduce to 1 and 0.
fn minus(n: i64) -> Gf4 {
    Gf4::ONE.times(-n)
}

/// Verdict of the cyclotomic conditions given the Gram coefficients `d`.
///
/// Pure form: `D_0 = -1` and `D_1 = D_2 = D_3 = 0`. Bordered form:
/// `α² + p = -1`, `S = 0`, `D_0 = -2` and `D_1 = D_2 = D_3 = -1`.
pub fn conditions_verdict(
    table: &CyclotomicTable,
    v: &CoefficientVector,
    d: &[Gf4; 7],
) -> (bool, Option<BorderResiduals>) {
    match v.alpha {
        None => (d[0] == minus(1) && d[1..4].iter().all(|x| x.is_zero()), None),
        Some(alpha) => {
            let p = table.p() as i64;
            let f = table.f() as i64;
            let corner = alpha.square() + Gf4::ONE.times(p) + Gf4::ONE;
            let s = -alpha + v.m[0] + v.m[1..].iter().copied().sum::<Gf4>().times(f);
            let hold = corner.is_zero()
                && s.is_zero()
                && d[0] == minus(2)
                && d[1..4].iter().all(|&x| x == minus(1));
            (hold, Some(BorderResiduals { corner, s }))
        }
    }
}

fn duality_report(table: &CyclotomicTable, v: &CoefficientVector, g: Matrix) -> Result<DualityReport> {
    let d = d_coefficients(table, v)?.d;
    let (conditions_hold, border_residuals) = conditions_verdict(table, v, &d);
    let gram_zero = gram_matrix(&g).is_zero();
    Ok(DualityReport {
        is_self_dual: gram_zero && g.cols() == 2 * g.rows(),
        conditions_hold,
        d_residuals: d,
        border_residuals,
        gram_zero,
        n: g.cols(),
        k: g.rows(),
    })
}

/// Pure form conditions plus the direct Gram check on `(I_p | R)`.
pub fn check_pure_conditions(
    table: &CyclotomicTable,
    v: &CoefficientVector,
) -> Result<DualityReport> {
    let g = pure_generator(table, v)?;
    duality_report(table, v, g)
}

/// Bordered form conditions plus the direct Gram check.
pub fn check_bordered_conditions(
    table: &CyclotomicTable,
    v: &CoefficientVector,
) -> Result<DualityReport> {
    let g = bordered_generator(table, v)?;
    duality_report(table, v, g)
}

pub fn check_conditions(table: &CyclotomicTable, v: &CoefficientVector) -> Result<DualityReport> {
    if v.is_bordered() {
        check_bordered_conditions(table, v)
    } else {
        check_pure_conditions(table, v)
    }
}

/// Upper bound on the minimum distance of a self-dual `[n, n/2]` code.
pub fn distance_bound(n: usize, q: u32) -> Result<usize> {
    match q {
        2 => {
            if !n.is_multiple_of(2) {
                return Err(Error::InvalidInput(format!(
                    "binary self-dual length must be even, got {n}"
                )));
            }
            Ok(if n % 24 == 22 {
                4 * (n / 24) + 6
            } else {
                4 * (n / 24) + 4
            })
        }
        4 => Ok(4 * (n / 12) + 3),
        _ => Err(Error::UnsupportedField(q)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CodeReport {
    pub n: usize,
    pub k: usize,
    pub q: u32,
    pub d: usize,
    pub self_dual: bool,
    /// Self-dual distance bound; `None` when undefined for `(n, q)`.
    pub bound: Option<usize>,
    pub meets_bound: bool,
    pub d_method: DistanceMethod,
    pub d_certified: bool,
    pub witness: String,
}

pub fn code_report(code: &LinearCode, opts: &DistanceOptions) -> Result<CodeReport> {
    let self_dual = is_self_dual(code);
    let dist = min_weight(code, opts)?;
    let bound = distance_bound(code.n(), code.field().q()).ok();
    Ok(CodeReport {
        n: code.n(),
        k: code.k(),
        q: code.field().q(),
        d: dist.d,
        self_dual,
        bound,
        meets_bound: bound == Some(dist.d),
        d_method: dist.method,
        d_certified: dist.certified,
        witness: dist.witness_string(),
    })
}
