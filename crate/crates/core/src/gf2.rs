//! Dense bit-packed matrices over GF(2).
//!
//! Rows are stored row-major, `words_per_row` little-endian `u64` words per
//! row; column `j` of a row lives in word `j / 64`, bit `j % 64`. Bits past
//! `cols` in the last word of a row are always zero.
//!
//! The graph layer never builds matrices wider than 64 columns, so the hot
//! path is [`rank_of_words`], which eliminates single-word rows in place.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("row index {index} out of range for {rows} rows")]
    RowOutOfRange { index: usize, rows: usize },
    #[error("column index {index} out of range for {cols} columns")]
    ColOutOfRange { index: usize, cols: usize },
    #[error("ragged input: row {row} has {len} entries, expected {expected}")]
    Ragged { row: usize, len: usize, expected: usize },
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GF2Matrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

#[inline]
fn words_for(cols: usize) -> usize {
    cols.div_ceil(64)
}

impl GF2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words_per_row = words_for(cols);
        Self {
            rows,
            cols,
            words_per_row,
            bits: vec![0; rows * words_per_row],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from 0/1 rows. Any nonzero entry counts as 1.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self, MatrixError> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(MatrixError::Ragged {
                    row: i,
                    len: row.len(),
                    expected: cols,
                });
            }
            for (j, &e) in row.iter().enumerate() {
                if e != 0 {
                    m.set(i, j, true);
                }
            }
        }
        Ok(m)
    }

    /// Builds a matrix with at most 64 columns from packed rows; bits at or
    /// above `cols` are discarded.
    pub fn from_words(words: &[u64], cols: usize) -> Self {
        assert!(cols <= 64, "from_words supports at most 64 columns");
        let mask = low_mask(cols);
        let mut m = Self::zeros(words.len(), cols);
        if cols > 0 {
            for (dst, &w) in m.bits.iter_mut().zip(words) {
                *dst = w & mask;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    fn row_words(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words_per_row..(i + 1) * self.words_per_row]
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.rows && j < self.cols, "entry ({i}, {j}) out of range");
        (self.row_words(i)[j / 64] >> (j % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        assert!(i < self.rows && j < self.cols, "entry ({i}, {j}) out of range");
        let w = &mut self.bits[i * self.words_per_row + j / 64];
        let b = 1u64 << (j % 64);
        if value {
            *w |= b;
        } else {
            *w &= !b;
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) {
                    t.set(j, i, true);
                }
            }
        }
        t
    }

    /// `result[i][j] = self[row_idx[i]][col_idx[j]]`.
    pub fn submatrix(&self, row_idx: &[usize], col_idx: &[usize]) -> Result<Self, MatrixError> {
        if let Some(&index) = row_idx.iter().find(|&&i| i >= self.rows) {
            return Err(MatrixError::RowOutOfRange {
                index,
                rows: self.rows,
            });
        }
        if let Some(&index) = col_idx.iter().find(|&&j| j >= self.cols) {
            return Err(MatrixError::ColOutOfRange {
                index,
                cols: self.cols,
            });
        }
        let mut out = Self::zeros(row_idx.len(), col_idx.len());
        for (i, &src_i) in row_idx.iter().enumerate() {
            for (j, &src_j) in col_idx.iter().enumerate() {
                if self.get(src_i, src_j) {
                    out.set(i, j, true);
                }
            }
        }
        Ok(out)
    }

    /// Row rank over GF(2), by Gaussian elimination on a working copy.
    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        if self.words_per_row == 1 {
            let mut rows = self.bits.clone();
            return rank_of_words(&mut rows);
        }
        let mut work = self.bits.clone();
        let wpr = self.words_per_row;
        let mut rank = 0;
        for col in 0..self.cols {
            let (word, bit) = (col / 64, 1u64 << (col % 64));
            let Some(pivot) = (rank..self.rows).find(|&r| work[r * wpr + word] & bit != 0) else {
                continue;
            };
            if pivot != rank {
                for w in 0..wpr {
                    work.swap(pivot * wpr + w, rank * wpr + w);
                }
            }
            for r in rank + 1..self.rows {
                if work[r * wpr + word] & bit != 0 {
                    for w in word..wpr {
                        let v = work[rank * wpr + w];
                        work[r * wpr + w] ^= v;
                    }
                }
            }
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        rank
    }
}

impl fmt::Debug for GF2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "GF2Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{}", u8::from(self.get(i, j)))?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[inline]
fn low_mask(bits: usize) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// Rank over GF(2) of single-word rows. The slice is used as scratch space:
/// on return it holds a reduced basis in its first `rank` entries.
#[inline]
pub fn rank_of_words(rows: &mut [u64]) -> usize {
    let mut rank = 0;
    for i in 0..rows.len() {
        let mut x = rows[i];
        // Basis rows have pairwise distinct leading bits, so `min` clears
        // the leading bit of `b` from `x` whenever it is set.
        for &b in &rows[..rank] {
            x = x.min(x ^ b);
        }
        if x != 0 {
            rows[rank] = x;
            rank += 1;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_matrix_has_rank_zero() {
        assert_eq!(GF2Matrix::zeros(0, 0).rank(), 0);
        assert_eq!(GF2Matrix::zeros(0, 5).rank(), 0);
        assert_eq!(GF2Matrix::zeros(4, 0).rank(), 0);
    }

    #[test]
    fn all_ones_has_rank_one() {
        let m = GF2Matrix::from_rows(&[[1u8, 1, 1], [1, 1, 1], [1, 1, 1]]).unwrap();
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn c5_block_has_rank_two() {
        // A_{C5}[{v0,v1}, {v2,v3,v4}]
        let m = GF2Matrix::from_rows(&[[0u8, 0, 1], [1, 0, 0]]).unwrap();
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn submatrix_reads_entries() {
        let id = GF2Matrix::identity(3);
        let s = id.submatrix(&[0, 1], &[1, 2]).unwrap();
        assert_eq!(s, GF2Matrix::from_rows(&[[0u8, 0], [1, 0]]).unwrap());

        let m = GF2Matrix::from_rows(&[[0u8, 0, 1], [1, 0, 0]]).unwrap();
        let s = m.submatrix(&[1], &[0, 2]).unwrap();
        assert_eq!(s, GF2Matrix::from_rows(&[[1u8, 0]]).unwrap());

        let e = m.submatrix(&[], &[0, 1]).unwrap();
        assert_eq!((e.rows(), e.cols()), (0, 2));
    }

    #[test]
    fn submatrix_rejects_bad_indices() {
        let m = GF2Matrix::identity(3);
        assert_eq!(
            m.submatrix(&[3], &[0]),
            Err(MatrixError::RowOutOfRange { index: 3, rows: 3 })
        );
        assert_eq!(
            m.submatrix(&[0], &[0, 7]),
            Err(MatrixError::ColOutOfRange { index: 7, cols: 3 })
        );
    }

    #[test]
    fn wide_matrices_use_multiword_rows() {
        let mut m = GF2Matrix::zeros(3, 130);
        m.set(0, 129, true);
        m.set(1, 129, true);
        m.set(1, 3, true);
        m.set(2, 3, true);
        assert_eq!(m.rank(), 2);
        m.set(2, 70, true);
        assert_eq!(m.rank(), 3);
        assert_eq!(m.transpose().rank(), 3);
    }

    #[test]
    fn from_words_drops_high_bits() {
        let m = GF2Matrix::from_words(&[0b1111, 0b0110], 2);
        assert_eq!(m, GF2Matrix::from_rows(&[[1u8, 1], [0, 1]]).unwrap());
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn rank_does_not_mutate() {
        let m = GF2Matrix::from_rows(&[[1u8, 1, 0], [1, 1, 0], [0, 1, 1]]).unwrap();
        let before = m.clone();
        assert_eq!(m.rank(), 2);
        assert_eq!(m, before);
    }
}
