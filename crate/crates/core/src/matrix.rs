//! Dense matrices over GF(2)/GF(4) and bit-sliced packed vectors.
//!
//! A packed vector stores coordinate `i` as bit `i` of two planes,
//! `lo` (coefficient of 1) and `hi` (coefficient of ε). GF(2) vectors keep
//! an empty `hi` plane.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Field, Gf4};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Gf4>,
}

impl Matrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        Self {
            field,
            rows,
            cols,
            data: vec![Gf4::ZERO; rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, Gf4::ONE);
        }
        m
    }

    pub fn from_rows(field: Field, rows: Vec<Vec<Gf4>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 {
            return Err(Error::InvalidInput("matrix dimensions must be positive".into()));
        }
        let mut data = Vec::with_capacity(r * c);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != c {
                return Err(Error::InvalidInput(format!(
                    "row {i} has {} entries, expected {c}",
                    row.len()
                )));
            }
            if let Some(bad) = row.iter().find(|a| !field.contains(**a)) {
                return Err(Error::InvalidInput(format!("entry {bad} is not in {field}")));
            }
            data.extend(row);
        }
        Ok(Self {
            field,
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Gf4 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Gf4) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Gf4] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|a| a.is_zero())
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::InvalidInput(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Matrix::zeros(self.field, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = out.get(i, j) + a * rhs.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &Matrix) -> Result<Matrix> {
        if (self.rows, self.cols) != (rhs.rows, rhs.cols) {
            return Err(Error::InvalidInput("dimension mismatch in addition".into()));
        }
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| *a + *b).collect();
        Ok(Matrix { data, ..self.clone() })
    }

    /// `(self | rhs)`.
    pub fn hstack(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.rows != rhs.rows {
            return Err(Error::InvalidInput("row counts differ".into()));
        }
        let mut out = Matrix::zeros(self.field, self.rows, self.cols + rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j));
            }
            for j in 0..rhs.cols {
                out.set(i, self.cols + j, rhs.get(i, j));
            }
        }
        Ok(out)
    }

    pub fn packed_rows(&self) -> Vec<PackedVec> {
        (0..self.rows)
            .map(|i| PackedVec::from_slice(self.field, self.row(i)))
            .collect()
    }

    pub fn row_string(&self, i: usize) -> String {
        self.row(i).iter().map(|a| a.symbol()).collect()
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            writeln!(f, "{}", self.row_string(i))?;
        }
        Ok(())
    }
}

pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PackedVec {
    len: usize,
    lo: Vec<u64>,
    hi: Vec<u64>,
}

impl PackedVec {
    pub fn zeros(field: Field, len: usize) -> Self {
        let w = words_for(len);
        Self {
            len,
            lo: vec![0; w],
            hi: if field == Field::Gf4 { vec![0; w] } else { Vec::new() },
        }
    }

    pub fn from_slice(field: Field, v: &[Gf4]) -> Self {
        let mut out = Self::zeros(field, v.len());
        for (i, a) in v.iter().enumerate() {
            out.set(i, *a);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn field(&self) -> Field {
        if self.hi.is_empty() {
            Field::Gf2
        } else {
            Field::Gf4
        }
    }

    pub fn get(&self, i: usize) -> Gf4 {
        let (w, b) = (i / 64, i % 64);
        let lo = (self.lo[w] >> b) & 1;
        let hi = self.hi.get(w).map_or(0, |h| (h >> b) & 1);
        Gf4::from_bits(((hi << 1) | lo) as u8)
    }

    pub fn set(&mut self, i: usize, a: Gf4) {
        let (w, b) = (i / 64, i % 64);
        let mask = 1u64 << b;
        let bits = a.bits();
        self.lo[w] = (self.lo[w] & !mask) | (((bits & 1) as u64) << b);
        if let Some(h) = self.hi.get_mut(w) {
            *h = (*h & !mask) | ((((bits >> 1) & 1) as u64) << b);
        } else {
            debug_assert!(bits < 2, "GF(4) value in a GF(2) vector");
        }
    }

    pub fn to_vec(&self) -> Vec<Gf4> {
        (0..self.len).map(|i| self.get(i)).collect()
    }

    pub fn weight(&self) -> usize {
        if self.hi.is_empty() {
            self.lo.iter().map(|w| w.count_ones() as usize).sum()
        } else {
            self.lo
                .iter()
                .zip(&self.hi)
                .map(|(l, h)| (l | h).count_ones() as usize)
                .sum()
        }
    }

    /// `self += c · other`.
    pub fn add_scaled(&mut self, other: &PackedVec, c: Gf4) {
        add_scaled_planes(&mut self.lo, &mut self.hi, &other.lo, &other.hi, c);
    }

    pub fn add_assign(&mut self, other: &PackedVec) {
        self.add_scaled(other, Gf4::ONE);
    }

    /// Euclidean inner product `Σ xᵢ yᵢ`.
    pub fn dot(&self, other: &PackedVec) -> Gf4 {
        let mut one = 0u32;
        let mut eps = 0u32;
        for w in 0..self.lo.len() {
            let (xl, yl) = (self.lo[w], other.lo[w]);
            let xh = self.hi.get(w).copied().unwrap_or(0);
            let yh = other.hi.get(w).copied().unwrap_or(0);
            // (xh ε + xl)(yh ε + yl) = xh yh (ε + 1) + (xh yl + xl yh) ε + xl yl
            let hh = xh & yh;
            one ^= (hh ^ (xl & yl)).count_ones() & 1;
            eps ^= (hh ^ (xh & yl) ^ (xl & yh)).count_ones() & 1;
        }
        Gf4::from_bits(((eps << 1) | one) as u8)
    }

    pub fn to_symbol_string(&self) -> String {
        self.to_vec().iter().map(|a| a.symbol()).collect()
    }
}

/// Plane-wise `dst += c · src`; `dst_hi`/`src_hi` are empty over GF(2).
#[inline]
pub(crate) fn add_scaled_planes(
    dst_lo: &mut [u64],
    dst_hi: &mut [u64],
    src_lo: &[u64],
    src_hi: &[u64],
    c: Gf4,
) {
    if dst_hi.is_empty() || src_hi.is_empty() {
        // GF(2) data: c is 0 or 1.
        if c == Gf4::ONE {
            for (d, s) in dst_lo.iter_mut().zip(src_lo) {
                *d ^= s;
            }
        }
        return;
    }
    match c.bits() {
        0 => {}
        1 => {
            for (d, s) in dst_lo.iter_mut().zip(src_lo) {
                *d ^= s;
            }
            for (d, s) in dst_hi.iter_mut().zip(src_hi) {
                *d ^= s;
            }
        }
        // ε (hε + l) = (h + l) ε + h
        2 => {
            for w in 0..dst_lo.len() {
                let (l, h) = (src_lo[w], src_hi[w]);
                dst_hi[w] ^= h ^ l;
                dst_lo[w] ^= h;
            }
        }
        // ε² (hε + l) = l ε + (h + l)
        _ => {
            for w in 0..dst_lo.len() {
                let (l, h) = (src_lo[w], src_hi[w]);
                dst_hi[w] ^= l;
                dst_lo[w] ^= h ^ l;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gf4_vec(len: usize) -> impl Strategy<Value = Vec<Gf4>> {
        proptest::collection::vec((0u8..4).prop_map(Gf4::from_bits), len)
    }

    proptest! {
        #[test]
        fn packed_ops_match_dense(a in gf4_vec(130), b in gf4_vec(130), c in 0u8..4) {
            let c = Gf4::from_bits(c);
            let mut pa = PackedVec::from_slice(Field::Gf4, &a);
            let pb = PackedVec::from_slice(Field::Gf4, &b);
            let dense_dot: Gf4 = a.iter().zip(&b).map(|(x, y)| *x * *y).sum();
            prop_assert_eq!(pa.dot(&pb), dense_dot);
            pa.add_scaled(&pb, c);
            let want: Vec<Gf4> = a.iter().zip(&b).map(|(x, y)| *x + c * *y).collect();
            prop_assert_eq!(pa.to_vec(), want.clone());
            prop_assert_eq!(pa.weight(), want.iter().filter(|x| !x.is_zero()).count());
        }
    }

    #[test]
    fn gf2_packing() {
        let v: Vec<Gf4> = [1, 0, 1, 1].iter().map(|&b| Gf4::from_bits(b)).collect();
        let p = PackedVec::from_slice(Field::Gf2, &v);
        assert_eq!(p.weight(), 3);
        assert_eq!(p.dot(&p), Gf4::ONE);
        assert_eq!(p.to_symbol_string(), "1011");
    }

    #[test]
    fn dense_ops() {
        let i = Matrix::identity(Field::Gf4, 3);
        assert_eq!(i.mul(&i).unwrap(), i);
        assert!(i.add(&i).unwrap().is_zero());
        let h = i.hstack(&i).unwrap();
        assert_eq!((h.rows(), h.cols()), (3, 6));
        assert_eq!(h.transpose().transpose(), h);
        assert!(Matrix::from_rows(Field::Gf2, vec![vec![Gf4::W]]).is_err());
        assert!(Matrix::from_rows(Field::Gf2, vec![vec![Gf4::ONE], vec![]]).is_err());
    }
}
