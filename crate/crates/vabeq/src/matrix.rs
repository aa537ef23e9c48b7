//! Exact integer matrices and the row-monotone decomposition.
//!
//! Everything here is over arbitrary-precision integers; there are no
//! overflow semantics. The central operation is [`row_monotone_decompose`],
//! which factors any square integer matrix `A` as `B * U` with `U`
//! unimodular and `B` upper triangular with sign-consistent rows. It is
//! driven entirely by the three column operations that preserve
//! unimodularity: permuting columns, negating a column, and adding an
//! integer multiple of one column to another.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatrixError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("entry count {got} does not match {rows}x{cols}")]
    BadShape { rows: usize, cols: usize, got: usize },
    #[error("dimension mismatch: {left_rows}x{left_cols} incompatible with {right_rows}x{right_cols}")]
    DimensionMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    #[error("matrix is not unimodular (det = {det})")]
    NotUnimodular { det: BigInt },
}

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self, MatrixError> {
        if entries.len() != rows * cols {
            return Err(MatrixError::BadShape { rows, cols, got: entries.len() });
        }
        Ok(IntMatrix { rows, cols, entries })
    }

    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Result<Self, MatrixError> {
        Self::new(rows, cols, entries.iter().map(|&e| BigInt::from(e)).collect())
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, entries: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Self::identity(self.rows)
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix, MatrixError> {
        if self.cols != other.rows {
            return Err(MatrixError::DimensionMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: other.rows,
                right_cols: other.cols,
            });
        }
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = &self[(i, l)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let t = a * &other[(l, j)];
                    out[(i, j)] += t;
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix, in the row-vector convention used throughout.
    pub fn apply_row(&self, v: &[BigInt]) -> Result<Vec<BigInt>, MatrixError> {
        if v.len() != self.rows {
            return Err(MatrixError::DimensionMismatch {
                left_rows: 1,
                left_cols: v.len(),
                right_rows: self.rows,
                right_cols: self.cols,
            });
        }
        let mut out = vec![BigInt::zero(); self.cols];
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for j in 0..self.cols {
                out[j] += vi * &self[(i, j)];
            }
        }
        Ok(out)
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Result<BigInt, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut m = self.entries.clone();
        let at = |m: &Vec<BigInt>, i: usize, j: usize| m[i * n + j].clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m[k * n + k].is_zero() {
                match (k + 1..n).find(|&r| !m[r * n + k].is_zero()) {
                    Some(r) => {
                        for j in 0..n {
                            m.swap(k * n + j, r * n + j);
                        }
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &at(&m, i, j) * &at(&m, k, k) - &at(&m, i, k) * &at(&m, k, j);
                    m[i * n + j] = v / &prev;
                }
                m[i * n + k] = BigInt::zero();
            }
            prev = at(&m, k, k);
        }
        Ok(sign * at(&m, n - 1, n - 1))
    }

    fn minor(&self, skip_row: usize, skip_col: usize) -> IntMatrix {
        let mut entries = Vec::with_capacity((self.rows - 1) * (self.cols - 1));
        for i in 0..self.rows {
            if i == skip_row {
                continue;
            }
            for j in 0..self.cols {
                if j == skip_col {
                    continue;
                }
                entries.push(self[(i, j)].clone());
            }
        }
        IntMatrix { rows: self.rows - 1, cols: self.cols - 1, entries }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;

    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.entries[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{} ", self[(i, j)])?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// `original = monotone * unimodular`, with `monotone` upper triangular and
/// row sign-consistent, and `det(unimodular) = +-1`.
#[derive(Clone, Debug)]
pub struct UnimodularDecomposition {
    pub original: IntMatrix,
    pub monotone: IntMatrix,
    pub unimodular: IntMatrix,
}

/// True iff `m` is upper triangular and every row contains only non-negative
/// entries or only non-positive entries. All-zero rows count as non-negative.
pub fn is_row_monotone(m: &IntMatrix) -> Result<bool, MatrixError> {
    if !m.is_square() {
        return Err(MatrixError::NotSquare { rows: m.rows, cols: m.cols });
    }
    for i in 0..m.rows() {
        for j in 0..i {
            if !m[(i, j)].is_zero() {
                return Ok(false);
            }
        }
        let mut pos = false;
        let mut neg = false;
        for j in 0..m.cols() {
            if m[(i, j)].is_positive() {
                pos = true;
            } else if m[(i, j)].is_negative() {
                neg = true;
            }
        }
        if pos && neg {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Working pair (M, V) kept under the invariant `original = M * V`, where
/// every mutation applies one unimodular column operation to M and the
/// inverse elementary matrix to V on the left.
struct ColumnReducer {
    m: IntMatrix,
    v: IntMatrix,
}

impl ColumnReducer {
    fn new(a: &IntMatrix) -> Self {
        ColumnReducer { m: a.clone(), v: IntMatrix::identity(a.rows()) }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let n = self.m.rows();
        for i in 0..n {
            let x = self.m[(i, a)].clone();
            self.m[(i, a)] = self.m[(i, b)].clone();
            self.m[(i, b)] = x;
        }
        for j in 0..n {
            let x = self.v[(a, j)].clone();
            self.v[(a, j)] = self.v[(b, j)].clone();
            self.v[(b, j)] = x;
        }
    }

    #[cfg(test)]
    fn negate_col(&mut self, c: usize) {
        let n = self.m.rows();
        for i in 0..n {
            let x = -self.m[(i, c)].clone();
            self.m[(i, c)] = x;
        }
        for j in 0..n {
            let x = -self.v[(c, j)].clone();
            self.v[(c, j)] = x;
        }
    }

    /// col[dst] += k * col[src]; correspondingly row[src] -= k * row[dst] in V.
    fn add_col_multiple(&mut self, src: usize, dst: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        let n = self.m.rows();
        for i in 0..n {
            let t = k * &self.m[(i, src)];
            self.m[(i, dst)] += t;
        }
        for j in 0..n {
            let t = k * &self.v[(dst, j)];
            self.v[(src, j)] -= t;
        }
    }
}

/// Factor a square integer matrix as `B * U` with `U` unimodular and `B` row
/// monotone. Deterministic: the same input always yields the same pair.
pub fn row_monotone_decompose(a: &IntMatrix) -> Result<UnimodularDecomposition, MatrixError> {
    if !a.is_square() {
        return Err(MatrixError::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    let n = a.rows();
    let mut red = ColumnReducer::new(a);

    // Upper triangularization: working up from the bottom row, gather each
    // row's leftmost entries into the diagonal column by Euclidean steps.
    for i in (0..n).rev() {
        loop {
            let nonzero_left: Vec<usize> =
                (0..i).filter(|&j| !red.m[(i, j)].is_zero()).collect();
            if nonzero_left.is_empty() {
                break;
            }
            if red.m[(i, i)].is_zero() {
                // Bring the smallest-magnitude entry into the pivot column.
                let best = *nonzero_left
                    .iter()
                    .min_by_key(|&&j| red.m[(i, j)].abs())
                    .expect("nonempty");
                red.swap_cols(best, i);
                continue;
            }
            let pivot = red.m[(i, i)].clone();
            for j in nonzero_left {
                let q = &red.m[(i, j)] / &pivot;
                red.add_col_multiple(i, j, &(-q));
            }
            // Truncated division may leave remainders; smallest remainder
            // becomes the next pivot.
            let rem: Vec<usize> = (0..i).filter(|&j| !red.m[(i, j)].is_zero()).collect();
            if let Some(&best) = rem.iter().min_by_key(|&&j| red.m[(i, j)].abs()) {
                if red.m[(i, best)].abs() < red.m[(i, i)].abs() {
                    red.swap_cols(best, i);
                }
            }
        }
    }

    // Sign pass: grow the row-monotone principal block one column at a time,
    // repairing each row's new entry against an already sign-consistent one.
    for c in 1..n {
        for i in (0..c).rev() {
            let mut pos = false;
            let mut neg = false;
            let mut pick = None;
            for j in 0..c {
                let e = &red.m[(i, j)];
                if e.is_positive() {
                    pos = true;
                } else if e.is_negative() {
                    neg = true;
                }
                if pick.is_none() && !e.is_zero() {
                    pick = Some(j);
                }
            }
            debug_assert!(!(pos && neg), "principal block must stay sign-consistent");
            let v = red.m[(i, c)].clone();
            if v.is_zero() || pick.is_none() {
                continue;
            }
            if (pos && v.is_negative()) || (neg && v.is_positive()) {
                red.add_col_multiple(pick.unwrap(), c, &v.abs());
            }
        }
    }

    let monotone = red.m;
    let unimodular = red.v;
    debug_assert_eq!(is_row_monotone(&monotone), Ok(true));
    debug_assert_eq!(monotone.mul(&unimodular).unwrap(), *a);
    Ok(UnimodularDecomposition { original: a.clone(), monotone, unimodular })
}

/// Exact integer inverse of a unimodular matrix (adjugate divided by the
/// determinant, which is +-1 here). Rejects non-unimodular input.
pub fn unimodular_inverse(u: &IntMatrix) -> Result<IntMatrix, MatrixError> {
    if !u.is_square() {
        return Err(MatrixError::NotSquare { rows: u.rows(), cols: u.cols() });
    }
    let n = u.rows();
    let d = u.det()?;
    if !(d.clone().abs().is_one()) {
        return Err(MatrixError::NotUnimodular { det: d });
    }
    let mut inv = IntMatrix::zero(n, n);
    for i in 0..n {
        for j in 0..n {
            let cof = u.minor(j, i).det()?;
            let signed = if (i + j) % 2 == 0 { cof } else { -cof };
            inv[(i, j)] = signed * &d; // dividing by det == multiplying, det = +-1
        }
    }
    debug_assert!(u.mul(&inv).unwrap().is_identity());
    Ok(inv)
}
