//! Dense matrices over GF(2) with bit-packed rows.
//!
//! Column `k` of a row lives in bit `k % 64` of word `k / 64`. Vectors of at
//! most 64 entries are passed around as plain `u64` using the same layout, so
//! a Pauli label's bits can be fed straight into [`Gf2Matrix::mul_vec`].

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gf2Matrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

#[inline]
fn words_for(cols: usize) -> usize {
    cols.div_ceil(64).max(1)
}

#[inline]
pub(crate) fn parity(x: u64) -> bool {
    x.count_ones() & 1 == 1
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = words_for(cols);
        Gf2Matrix { rows, cols, words, data: vec![0; rows * words] }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size, size);
        for i in 0..size {
            m.set(i, i, true);
        }
        m
    }

    /// The `2n x 2n` symplectic form `J_n = [[0, I], [I, 0]]`, which swaps the
    /// x and z halves of a label.
    pub fn symplectic_form(n: usize) -> Self {
        let mut m = Self::zeros(2 * n, 2 * n);
        for i in 0..n {
            m.set(i, i + n, true);
            m.set(i + n, i, true);
        }
        m
    }

    /// Builds a matrix with at most 64 columns from one `u64` per row.
    pub fn from_row_bits(rows: &[u64], cols: usize) -> Result<Self> {
        if cols > 64 {
            return Err(Error::Shape(format!("from_row_bits supports at most 64 columns, got {cols}")));
        }
        let mask = low_mask(cols);
        if let Some(bad) = rows.iter().find(|&&r| r & !mask != 0) {
            return Err(Error::Shape(format!("row {bad:#x} does not fit in {cols} columns")));
        }
        let mut m = Self::zeros(rows.len(), cols);
        for (i, &r) in rows.iter().enumerate() {
            m.data[i * m.words] = r;
        }
        Ok(m)
    }

    /// Builds a matrix with at most 64 rows from one `u64` per column.
    pub fn from_col_bits(cols: &[u64], rows: usize) -> Result<Self> {
        Ok(Self::from_row_bits(cols, rows)?.transpose())
    }

    /// Parses rows written as strings of `0`/`1`, leftmost character = column 0.
    pub fn from_bit_strings<S: AsRef<str>>(rows: &[S]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::Shape(format!("ragged bit rows: {} vs {}", r.len(), cols)));
            }
            for (k, ch) in r.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => m.set(i, k, true),
                    _ => return Err(Error::Malformed(format!("bit string contains {ch:?}"))),
                }
            }
        }
        Ok(m)
    }

    pub fn to_bit_strings(&self) -> Vec<String> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|k| if self.get(i, k) { '1' } else { '0' }).collect())
            .collect()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        (self.data[r * self.words + c / 64] >> (c % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        debug_assert!(r < self.rows && c < self.cols);
        let w = &mut self.data[r * self.words + c / 64];
        if value {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.words..(r + 1) * self.words]
    }

    /// Row `r` as a `u64`; only valid for matrices with at most 64 columns.
    pub fn row_bits(&self, r: usize) -> u64 {
        assert!(self.cols <= 64, "row_bits on a {}-column matrix", self.cols);
        self.data[r * self.words]
    }

    /// Column `c` as a `u64`; only valid for matrices with at most 64 rows.
    pub fn col_bits(&self, c: usize) -> u64 {
        assert!(self.rows <= 64, "col_bits on a {}-row matrix", self.rows);
        (0..self.rows).filter(|&r| self.get(r, c)).fold(0, |acc, r| acc | (1 << r))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    t.set(c, r, true);
                }
            }
        }
        t
    }

    pub fn mul(&self, rhs: &Gf2Matrix) -> Result<Gf2Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                if self.get(r, k) {
                    let src = rhs.row_words(k);
                    let dst = &mut out.data[r * out.words..(r + 1) * out.words];
                    for (d, s) in dst.iter_mut().zip(src) {
                        *d ^= s;
                    }
                }
            }
        }
        Ok(out)
    }

    /// `A x` for a column vector packed into a `u64` (needs `cols, rows <= 64`).
    pub fn mul_vec(&self, x: u64) -> Result<u64> {
        if self.cols > 64 || self.rows > 64 {
            return Err(Error::Shape(format!("mul_vec on a {}x{} matrix", self.rows, self.cols)));
        }
        Ok((0..self.rows).fold(0, |acc, r| acc | (u64::from(parity(self.data[r * self.words] & x)) << r)))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    /// Row-reduces a copy and returns the pivot columns, in order.
    fn echelon(&self) -> (Gf2Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| m.get(r, col)) else {
                continue;
            };
            if p != row {
                for w in 0..m.words {
                    m.data.swap(p * m.words + w, row * m.words + w);
                }
            }
            for r in 0..m.rows {
                if r != row && m.get(r, col) {
                    for w in 0..m.words {
                        let v = m.data[row * m.words + w];
                        m.data[r * m.words + w] ^= v;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.echelon().1.len()
    }

    /// A basis of `{x : A x = 0}`, one vector per row of the returned matrix
    /// (which has `cols` columns).
    pub fn nullspace(&self) -> Gf2Matrix {
        let (rref, pivots) = self.echelon();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Gf2Matrix::zeros(free.len(), self.cols);
        for (i, &f) in free.iter().enumerate() {
            basis.set(i, f, true);
            for (r, &p) in pivots.iter().enumerate() {
                if rref.get(r, f) {
                    basis.set(i, p, true);
                }
            }
        }
        basis
    }
}

#[inline]
pub(crate) fn low_mask(bits: usize) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

impl fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Gf2Matrix {}x{}", self.rows, self.cols)?;
        for row in self.to_bit_strings() {
            writeln!(f, "  {row}")?;
        }
        Ok(())
    }
}
