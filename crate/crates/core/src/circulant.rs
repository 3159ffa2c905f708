//! Class circulants `C_p(m)`, their basis `A_0 … A_6`, the Gram
//! coefficients `D_0 … D_6`, and the pure / bordered generator matrices.
//!
//! Entry `(i, j)` of `C_p(m)` is `m_0` on the diagonal and `m_{s+1}` when
//! `j - i ∈ C_s`. Because `-1 ∈ C_3`, the transpose swaps `C_s` with
//! `C_{s+3}`, i.e. `A_1ᵀ = A_4`, `A_2ᵀ = A_5`, `A_3ᵀ = A_6`.

use std::fmt;

use serde::Serialize;

use crate::cyclotomy::{constants, CyclotomicConstants, CyclotomicTable};
use crate::error::{Error, Result};
use crate::field::{Field, Gf4};
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CoefficientVector {
    pub field: Field,
    pub m: [Gf4; 7],
    pub alpha: Option<Gf4>,
}

impl CoefficientVector {
    pub fn new(field: Field, m: [Gf4; 7], alpha: Option<Gf4>) -> Result<Self> {
        for a in m.iter().chain(alpha.iter()) {
            if !field.contains(*a) {
                return Err(Error::InvalidInput(format!("coefficient {a} is not in {field}")));
            }
        }
        Ok(Self { field, m, alpha })
    }

    pub fn pure(field: Field, m: [Gf4; 7]) -> Result<Self> {
        Self::new(field, m, None)
    }

    pub fn bordered(field: Field, alpha: Gf4, m: [Gf4; 7]) -> Result<Self> {
        Self::new(field, m, Some(alpha))
    }

    /// Parses `m0,m1,…,m6` written in the symbols `0 1 w W`.
    pub fn parse(field: Field, coeffs: &str, alpha: Option<&str>) -> Result<Self> {
        let parts: Vec<&str> = coeffs.split(',').map(str::trim).collect();
        if parts.len() != 7 {
            return Err(Error::InvalidInput(format!(
                "expected 7 coefficients, got {}",
                parts.len()
            )));
        }
        let mut m = [Gf4::ZERO; 7];
        for (slot, s) in m.iter_mut().zip(&parts) {
            *slot = parse_element(field, s)?;
        }
        let alpha = alpha.map(|a| parse_element(field, a.trim())).transpose()?;
        Self::new(field, m, alpha)
    }

    pub fn is_bordered(&self) -> bool {
        self.alpha.is_some()
    }

    /// Coefficients of `C_p(m)ᵀ`.
    pub fn transposed(&self) -> Self {
        let m = self.m;
        Self {
            m: [m[0], m[4], m[5], m[6], m[1], m[2], m[3]],
            ..*self
        }
    }

    pub fn coeff_string(&self) -> String {
        self.m.iter().map(|a| a.symbol().to_string()).collect::<Vec<_>>().join(",")
    }
}

fn parse_element(field: Field, s: &str) -> Result<Gf4> {
    let mut chars = s.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => field.parse_symbol(c).ok_or_else(|| {
            Error::InvalidInput(format!("symbol {c:?} is not an element of {field}"))
        }),
        _ => Err(Error::InvalidInput(format!("malformed coefficient {s:?}"))),
    }
}

impl fmt::Display for CoefficientVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.alpha {
            Some(a) => write!(f, "({a} | {})", self.coeff_string()),
            None => write!(f, "({})", self.coeff_string()),
        }
    }
}

/// Row 0 of `C_p(m)`; row `i` is this row rotated right by `i`.
pub fn first_row(table: &CyclotomicTable, m: &[Gf4; 7]) -> Vec<Gf4> {
    let p = table.p() as usize;
    let mut row = vec![m[0]; p];
    for (s, class) in table.classes().iter().enumerate() {
        for &k in class {
            row[k as usize] = m[s + 1];
        }
    }
    row
}

pub fn circulant_matrix(table: &CyclotomicTable, v: &CoefficientVector) -> Matrix {
    let p = table.p() as usize;
    let row = first_row(table, &v.m);
    let mut r = Matrix::zeros(v.field, p, p);
    for i in 0..p {
        for j in 0..p {
            r.set(i, j, row[(j + p - i) % p]);
        }
    }
    r
}

/// `A_0 = I_p` and `A_i` (i ≥ 1) the 0/1 circulant supported on `C_{i-1}`.
pub fn basis_matrices(table: &CyclotomicTable, field: Field) -> Vec<Matrix> {
    (0..7)
        .map(|i| {
            let mut m = [Gf4::ZERO; 7];
            m[i] = Gf4::ONE;
            circulant_matrix(table, &CoefficientVector { field, m, alpha: None })
        })
        .collect()
}

/// Integer coefficients `c_0 … c_6` with `A_i A_j = Σ c_k A_k` (indices
/// `0..=6`, `A_0` allowed).
pub fn product_decomposition(table: &CyclotomicTable, i: usize, j: usize) -> Result<[i64; 7]> {
    if i > 6 || j > 6 {
        return Err(Error::InvalidInput(format!("basis index out of range: ({i}, {j})")));
    }
    let p = table.p() as usize;
    let support = |k: usize| -> Vec<usize> {
        if k == 0 {
            vec![0]
        } else {
            table.class(k - 1).iter().map(|&x| x as usize).collect()
        }
    };
    // first row of a product of circulants is the cyclic convolution of
    // the first rows
    let mut row = vec![0i64; p];
    for a in support(i) {
        for b in support(j) {
            row[(a + b) % p] += 1;
        }
    }
    let mut out = [0i64; 7];
    out[0] = row[0];
    for s in 0..6 {
        let class = table.class(s);
        let v = row[class[0] as usize];
        if class.iter().any(|&k| row[k as usize] != v) {
            return Err(Error::Internal(format!(
                "A_{i} A_{j} is not constant on C_{s} (p = {})",
                table.p()
            )));
        }
        out[s + 1] = v;
    }
    Ok(out)
}

/// Gram coefficients `D_0 … D_6` of `M = Σ m_i A_i`: `M Mᵀ = Σ D_i A_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DCoefficients {
    pub d: [Gf4; 7],
}

impl DCoefficients {
    pub fn pairings_hold(&self) -> bool {
        self.d[1] == self.d[4] && self.d[2] == self.d[5] && self.d[3] == self.d[6]
    }
}

/// Reads `D_0 … D_6` off the first row of `M Mᵀ` computed over GF(q).
pub fn d_coefficients(table: &CyclotomicTable, v: &CoefficientVector) -> Result<DCoefficients> {
    let p = table.p() as usize;
    let c = first_row(table, &v.m);
    // (M Mᵀ)[0][k] = Σ_j c[j] c[j - k]
    let gram_row: Vec<Gf4> = (0..p)
        .map(|k| (0..p).map(|j| c[j] * c[(j + p - k) % p]).sum())
        .collect();
    read_off(table, &gram_row)
}

fn read_off(table: &CyclotomicTable, row: &[Gf4]) -> Result<DCoefficients> {
    let mut d = [Gf4::ZERO; 7];
    d[0] = row[0];
    for s in 0..6 {
        let class = table.class(s);
        let v = row[class[0] as usize];
        if class.iter().any(|&k| row[k as usize] != v) {
            return Err(Error::Internal(format!(
                "Gram matrix is not constant on C_{s} (p = {})",
                table.p()
            )));
        }
        d[s + 1] = v;
    }
    Ok(DCoefficients { d })
}

/// Precomputed `A_i A_jᵀ` decompositions reduced mod 2, giving `D` as a
/// quadratic form in `m` without forming `M Mᵀ`. Used by the search loop.
#[derive(Debug, Clone)]
pub struct GramForm {
    // parity[i][j][k]: coefficient of A_k in A_i A_jᵀ, mod 2
    parity: [[[bool; 7]; 7]; 7],
}

const TRANSPOSE_INDEX: [usize; 7] = [0, 4, 5, 6, 1, 2, 3];

impl GramForm {
    pub fn new(table: &CyclotomicTable) -> Result<Self> {
        let mut parity = [[[false; 7]; 7]; 7];
        for i in 0..7 {
            for j in 0..7 {
                let c = product_decomposition(table, i, TRANSPOSE_INDEX[j])?;
                for k in 0..7 {
                    parity[i][j][k] = c[k].rem_euclid(2) == 1;
                }
            }
        }
        Ok(Self { parity })
    }

    pub fn evaluate(&self, m: &[Gf4; 7]) -> DCoefficients {
        let mut d = [Gf4::ZERO; 7];
        for i in 0..7 {
            if m[i].is_zero() {
                continue;
            }
            for j in 0..7 {
                let prod = m[i] * m[j];
                if prod.is_zero() {
                    continue;
                }
                for (k, dk) in d.iter_mut().enumerate() {
                    if self.parity[i][j][k] {
                        *dk += prod;
                    }
                }
            }
        }
        DCoefficients { d }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Scale {
    One,
    K(usize),
}

type Term = (&'static [(usize, usize)], Scale);

use Scale::{One, K};
const CA: Scale = K(0);
const CB: Scale = K(1);
const CC: Scale = K(2);
const CD: Scale = K(3);
const CE: Scale = K(4);
const CF: Scale = K(5);
const CG: Scale = K(6);
const CH: Scale = K(7);
const CI: Scale = K(8);
const CJ: Scale = K(9);

// Published expansions of D_1, D_2, D_3, repeated monomials kept as printed.
const PRINTED_D1: [Term; 11] = [
    (&[(0, 4), (0, 1)], One),
    (&[(1, 1), (1, 4), (4, 4)], CA),
    (&[(1, 2), (4, 5), (3, 6)], CB),
    (&[(1, 3), (4, 6), (2, 5)], CC),
    (&[(1, 4)], CD),
    (&[(3, 6), (2, 4), (1, 5)], CE),
    (&[(2, 5), (3, 4), (1, 6)], CF),
    (&[(1, 2), (1, 5), (2, 4), (3, 3), (4, 5), (6, 6)], CG),
    (&[(1, 3), (1, 6), (2, 2), (3, 4), (5, 5), (4, 6)], CH),
    (&[(2, 6), (2, 3), (3, 5), (3, 5), (5, 6), (2, 6)], CI),
    (&[(2, 3), (5, 6)], CJ),
];

const PRINTED_D2: [Term; 11] = [
    (&[(0, 5), (0, 2)], One),
    (&[(2, 2), (5, 5), (2, 5)], CA),
    (&[(1, 4), (2, 3), (5, 6)], CB),
    (&[(2, 4), (1, 5), (3, 6)], CC),
    (&[(2, 5)], CD),
    (&[(1, 4), (3, 5), (2, 6)], CE),
    (&[(1, 2), (3, 6), (4, 5)], CF),
    (&[(1, 1), (2, 3), (2, 6), (4, 4), (3, 5), (5, 6)], CG),
    (&[(1, 5), (1, 2), (3, 3), (2, 4), (6, 6), (4, 5)], CH),
    (&[(1, 3), (1, 3), (3, 4), (4, 6), (1, 6), (4, 6)], CI),
    (&[(1, 6), (3, 4)], CJ),
];

const PRINTED_D3: [Term; 11] = [
    (&[(0, 6), (0, 3)], One),
    (&[(3, 3), (3, 6), (6, 6)], CA),
    (&[(2, 5), (3, 4), (1, 6)], CB),
    (&[(1, 4), (3, 5), (2, 6)], CC),
    (&[(3, 6)], CD),
    (&[(1, 3), (2, 5), (4, 6)], CE),
    (&[(2, 3), (1, 4), (5, 6)], CF),
    (&[(1, 6), (2, 2), (1, 3), (3, 4), (4, 6), (5, 5)], CG),
    (&[(1, 1), (2, 6), (2, 3), (3, 5), (4, 4), (5, 6)], CH),
    (&[(1, 2), (1, 5), (2, 4), (2, 4), (1, 5), (4, 5)], CI),
    (&[(1, 2), (4, 5)], CJ),
];

fn eval_printed(terms: &[Term], k: &CyclotomicConstants, m: &[Gf4; 7]) -> Gf4 {
    let kv = k.to_array();
    terms
        .iter()
        .map(|(monos, scale)| {
            let s: Gf4 = monos.iter().map(|&(a, b)| m[a] * m[b]).sum();
            match scale {
                One => s,
                K(idx) => s.times(kv[*idx] as i64),
            }
        })
        .sum()
}

/// The published `D_0 … D_3` polynomials evaluated over GF(q). Only a
/// cross-check; [`d_coefficients`] is authoritative.
pub fn printed_d_coefficients(table: &CyclotomicTable, m: &[Gf4; 7]) -> [Gf4; 4] {
    let k = constants(table);
    let f = table.f() as i64;
    let d0 = m[0].square() + m[1..].iter().map(|a| a.square()).sum::<Gf4>().times(f);
    [
        d0,
        eval_printed(&PRINTED_D1, &k, m),
        eval_printed(&PRINTED_D2, &k, m),
        eval_printed(&PRINTED_D3, &k, m),
    ]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrintedFormCheck {
    pub printed: [Gf4; 4],
    pub computed: [Gf4; 4],
    /// Indices `i` in `0..4` where printed `D_i` disagrees.
    pub disagreements: Vec<usize>,
}

pub fn printed_form_check(table: &CyclotomicTable, v: &CoefficientVector) -> Result<PrintedFormCheck> {
    let computed = d_coefficients(table, v)?;
    let printed = printed_d_coefficients(table, &v.m);
    let computed = [computed.d[0], computed.d[1], computed.d[2], computed.d[3]];
    let disagreements = (0..4).filter(|&i| printed[i] != computed[i]).collect();
    Ok(PrintedFormCheck {
        printed,
        computed,
        disagreements,
    })
}

/// `(I_p | R)` with `R = C_p(m)`.
pub fn pure_generator(table: &CyclotomicTable, v: &CoefficientVector) -> Result<Matrix> {
    if v.alpha.is_some() {
        return Err(Error::InvalidInput(
            "pure construction takes no border scalar".into(),
        ));
    }
    let p = table.p() as usize;
    Matrix::identity(v.field, p).hstack(&circulant_matrix(table, v))
}

/// `(I_{p+1} | K)` with `K = [[α, 1…1], [-1…, R]]`.
pub fn bordered_generator(table: &CyclotomicTable, v: &CoefficientVector) -> Result<Matrix> {
    let alpha = v
        .alpha
        .ok_or_else(|| Error::InvalidInput("bordered construction needs alpha".into()))?;
    let p = table.p() as usize;
    let r = circulant_matrix(table, v);
    let minus_one = -Gf4::ONE;
    let mut k = Matrix::zeros(v.field, p + 1, p + 1);
    k.set(0, 0, alpha);
    for j in 1..=p {
        k.set(0, j, Gf4::ONE);
        k.set(j, 0, minus_one);
    }
    for i in 0..p {
        for j in 0..p {
            k.set(i + 1, j + 1, r.get(i, j));
        }
    }
    Matrix::identity(v.field, p + 1).hstack(&k)
}

/// Pure or bordered generator depending on whether `alpha` is set.
pub fn generator(table: &CyclotomicTable, v: &CoefficientVector) -> Result<Matrix> {
    if v.is_bordered() {
        bordered_generator(table, v)
    } else {
        pure_generator(table, v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomy::build_table;
    use crate::field::PrimeModulus;

    fn table(p: u64) -> CyclotomicTable {
        build_table(&PrimeModulus::new(p).unwrap()).unwrap()
    }

    fn vec4(s: &str) -> CoefficientVector {
        CoefficientVector::parse(Field::Gf4, s, None).unwrap()
    }

    #[test]
    fn identity_and_all_ones() {
        let t = table(19);
        let i = circulant_matrix(&t, &vec4("1,0,0,0,0,0,0"));
        assert_eq!(i, Matrix::identity(Field::Gf4, 19));
        let j = circulant_matrix(&t, &vec4("1,1,1,1,1,1,1"));
        assert!((0..19).all(|r| j.row(r).iter().all(|&a| a == Gf4::ONE)));
    }

    #[test]
    fn class_row_for_19() {
        let t = table(19);
        let a1 = circulant_matrix(&t, &vec4("0,1,0,0,0,0,0"));
        let ones: Vec<usize> = (0..19).filter(|&j| a1.get(0, j) == Gf4::ONE).collect();
        assert_eq!(ones, vec![1, 7, 11]);
    }

    #[test]
    fn basis_properties() {
        let t = table(19);
        let a = basis_matrices(&t, Field::Gf2);
        // entrywise sum over the integers is J_p, so every entry has exactly one hit
        for r in 0..19 {
            for c in 0..19 {
                let hits = a.iter().filter(|m| m.get(r, c) == Gf4::ONE).count();
                assert_eq!(hits, 1);
            }
        }
        assert_eq!(a[1].transpose(), a[4]);
        assert_eq!(a[2].transpose(), a[5]);
        assert_eq!(a[3].transpose(), a[6]);
        for m in &a[1..] {
            for r in 0..19 {
                assert_eq!(m.row(r).iter().filter(|x| !x.is_zero()).count(), 3);
            }
        }
    }

    // Oracle: full integer matrix product of the 0/1 basis matrices.
    fn int_product(t: &CyclotomicTable, i: usize, j: usize) -> Vec<Vec<i64>> {
        let a = basis_matrices(t, Field::Gf2);
        let p = t.p() as usize;
        let int = |m: &Matrix, r: usize, c: usize| i64::from(m.get(r, c) == Gf4::ONE);
        (0..p)
            .map(|r| {
                (0..p)
                    .map(|c| (0..p).map(|k| int(&a[i], r, k) * int(&a[j], k, c)).sum())
                    .collect()
            })
            .collect()
    }

    #[test]
    fn decomposition_matches_full_product() {
        let t = table(19);
        let a = basis_matrices(&t, Field::Gf2);
        for i in 1..7 {
            for j in 1..7 {
                let c = product_decomposition(&t, i, j).unwrap();
                let full = int_product(&t, i, j);
                for r in 0..19 {
                    for col in 0..19 {
                        let k = (0..7).find(|&k| a[k].get(r, col) == Gf4::ONE).unwrap();
                        assert_eq!(full[r][col], c[k]);
                    }
                }
                assert_eq!(c, product_decomposition(&t, j, i).unwrap());
            }
        }
        assert_eq!(product_decomposition(&t, 1, 4).unwrap()[0], 3);
        let c12 = product_decomposition(&t, 1, 2).unwrap();
        assert!(c12.iter().all(|v| (0..=2).contains(v)));
        assert_eq!(c12[0], 0);
    }

    #[test]
    fn diagonal_coefficient_only_for_transpose_pairs() {
        for p in [19u64, 31, 43] {
            let t = table(p);
            for i in 1..7 {
                for j in 1..7 {
                    let c0 = product_decomposition(&t, i, j).unwrap()[0];
                    if TRANSPOSE_INDEX[i] == j {
                        assert_eq!(c0, t.f() as i64);
                    } else {
                        assert_eq!(c0, 0);
                    }
                }
            }
        }
    }

    #[test]
    fn d_coefficient_examples() {
        let t = table(19);
        let v = CoefficientVector::parse(Field::Gf2, "0,0,0,0,1,1,1", None).unwrap();
        assert_eq!(d_coefficients(&t, &v).unwrap().d[0], Gf4::ONE);
        let v = vec4("w,W,1,W,0,0,w");
        assert_eq!(d_coefficients(&t, &v).unwrap().d[0], Gf4::ONE);
        let v = vec4("1,0,0,0,0,0,0");
        let d = d_coefficients(&t, &v).unwrap().d;
        assert_eq!(d[0], Gf4::ONE);
        assert!(d[1..].iter().all(|x| x.is_zero()));
    }

    #[test]
    fn gram_form_matches_read_off() {
        let t = table(19);
        let form = GramForm::new(&t).unwrap();
        for code in 0..(1u32 << 14) {
            let mut m = [Gf4::ZERO; 7];
            for (i, slot) in m.iter_mut().enumerate() {
                *slot = Gf4::from_bits(((code >> (2 * i)) & 3) as u8);
            }
            let v = CoefficientVector::pure(Field::Gf4, m).unwrap();
            if code % 97 == 0 {
                assert_eq!(form.evaluate(&m), d_coefficients(&t, &v).unwrap());
            }
        }
    }

    #[test]
    fn generator_shapes() {
        let t = table(19);
        let g = pure_generator(&t, &vec4("w,W,1,W,0,0,w")).unwrap();
        assert_eq!((g.rows(), g.cols()), (19, 38));
        for i in 0..19 {
            for j in 0..19 {
                assert_eq!(g.get(i, j), if i == j { Gf4::ONE } else { Gf4::ZERO });
            }
        }
        let b = CoefficientVector::parse(Field::Gf4, "0,1,1,w,W,W,w", Some("0")).unwrap();
        let g = bordered_generator(&t, &b).unwrap();
        assert_eq!((g.rows(), g.cols()), (20, 40));
        // border column equals the all-one column in char 2
        assert!((1..20).all(|i| g.get(i, 20) == Gf4::ONE));
        assert!(pure_generator(&t, &b).is_err());
        assert!(bordered_generator(&t, &vec4("w,W,1,W,0,0,w")).is_err());
    }

    #[test]
    fn bordered_cross_for_zero_vector() {
        let t = table(7);
        let v = CoefficientVector::parse(Field::Gf2, "0,0,0,0,0,0,0", Some("0")).unwrap();
        let g = bordered_generator(&t, &v).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                let want = if (i == 0) != (j == 0) { Gf4::ONE } else { Gf4::ZERO };
                assert_eq!(g.get(i, 8 + j), want);
            }
        }
    }

    #[test]
    fn p7_single_class_row() {
        let t = table(7);
        let g = pure_generator(&t, &CoefficientVector::parse(Field::Gf2, "0,1,0,0,0,0,0", None).unwrap()).unwrap();
        for i in 0..7 {
            assert_eq!(g.row(i)[7..].iter().filter(|a| !a.is_zero()).count(), 1);
        }
    }

    #[test]
    fn parse_errors() {
        assert!(CoefficientVector::parse(Field::Gf2, "0,1,w,0,0,0,0", None).is_err());
        assert!(CoefficientVector::parse(Field::Gf4, "0,1,0,0,0,0", None).is_err());
        assert!(CoefficientVector::parse(Field::Gf4, "0,1,0,0,0,0,11", None).is_err());
    }
}
