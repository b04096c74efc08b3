//! Dense exact matrices over the integers and the rationals.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::numerics::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShapeError {
    #[error("shape mismatch: {0}x{1} against {2}x{3}")]
    Mismatch(usize, usize, usize, usize),
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
}

/// Row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Panics on ragged input.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        IntMatrix {
            rows: r,
            cols: c,
            data: rows.iter().flatten().map(|&x| BigInt::from(x)).collect(),
        }
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

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn checked_mul(&self, rhs: &IntMatrix) -> Result<IntMatrix, ShapeError> {
        if self.cols != rhs.rows {
            return Err(ShapeError::Mismatch(self.rows, self.cols, rhs.rows, rhs.cols));
        }
        let mut out = IntMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * &rhs[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn checked_sub(&self, rhs: &IntMatrix) -> Result<IntMatrix, ShapeError> {
        if (self.rows, self.cols) != (rhs.rows, rhs.cols) {
            return Err(ShapeError::Mismatch(self.rows, self.cols, rhs.rows, rhs.cols));
        }
        Ok(IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn checked_add(&self, rhs: &IntMatrix) -> Result<IntMatrix, ShapeError> {
        if (self.rows, self.cols) != (rhs.rows, rhs.cols) {
            return Err(ShapeError::Mismatch(self.rows, self.cols, rhs.rows, rhs.cols));
        }
        Ok(IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn pow(&self, n: usize) -> Result<IntMatrix, ShapeError> {
        if !self.is_square() {
            return Err(ShapeError::NotSquare(self.rows, self.cols));
        }
        let mut out = IntMatrix::identity(self.rows);
        for _ in 0..n {
            out = out.checked_mul(self)?;
        }
        Ok(out)
    }

    /// Entries as `i64` when they all fit.
    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].to_i64()).collect())
            .collect()
    }

    pub fn to_rational(&self) -> QMatrix {
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| Rational::from_bigint(x.clone())).collect(),
        }
    }

    /// `P·self·Pᵀ` for the permutation `i ↦ perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> IntMatrix {
        let mut out = IntMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(perm[i], perm[j])] = self[(i, j)].clone();
            }
        }
        out
    }

    /// Nonzero diagonal entries of the Smith normal form, each dividing the next.
    pub fn smith_invariants(&self) -> Vec<BigInt> {
        let mut a: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec())
            .collect();
        let (rows, cols) = (self.rows, self.cols);
        let mut diag = Vec::new();
        let mut t = 0;
        while t < rows.min(cols) {
            // pivot: smallest nonzero absolute value in the remaining block
            let mut best: Option<(usize, usize)> = None;
            for (i, row) in a.iter().enumerate().skip(t) {
                for (j, x) in row.iter().enumerate().skip(t) {
                    if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            a.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            loop {
                let p = a[t][t].clone();
                let mut dirty = false;
                for i in t + 1..rows {
                    let qt = a[i][t].div_floor(&p);
                    if !qt.is_zero() {
                        for j in t..cols {
                            let v = &qt * &a[t][j];
                            a[i][j] -= v;
                        }
                    }
                    dirty |= !a[i][t].is_zero();
                }
                for j in t + 1..cols {
                    let qt = a[t][j].div_floor(&p);
                    if !qt.is_zero() {
                        for row in a.iter_mut().skip(t) {
                            let v = &qt * &row[t];
                            row[j] -= v;
                        }
                    }
                    dirty |= !a[t][j].is_zero();
                }
                if !dirty {
                    // pivot must divide the rest of the block
                    let bad = (t + 1..rows)
                        .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                        .find(|&(i, j)| !a[i][j].is_multiple_of(&p));
                    match bad {
                        None => break,
                        Some((i, _)) => {
                            for j in t..cols {
                                let v = a[i][j].clone();
                                a[t][j] += v;
                            }
                            continue;
                        }
                    }
                }
                // move the smallest remaining entry of row/column t to the pivot
                let mut best = (t, t);
                for i in t..rows {
                    if !a[i][t].is_zero() && a[i][t].abs() < a[best.0][best.1].abs() {
                        best = (i, t);
                    }
                }
                for j in t..cols {
                    if !a[t][j].is_zero() && a[t][j].abs() < a[best.0][best.1].abs() {
                        best = (t, j);
                    }
                }
                a.swap(t, best.0);
                for row in a.iter_mut() {
                    row.swap(t, best.1);
                }
            }
            diag.push(a[t][t].abs());
            t += 1;
        }
        diag
    }

    pub fn rank(&self) -> usize {
        self.to_rational().rank()
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;
    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        self.checked_mul(rhs).expect("matrix shapes agree")
    }
}

impl Sub for &IntMatrix {
    type Output = IntMatrix;
    fn sub(self, rhs: &IntMatrix) -> IntMatrix {
        self.checked_sub(rhs).expect("matrix shapes agree")
    }
}

impl Add for &IntMatrix {
    type Output = IntMatrix;
    fn add(self, rhs: &IntMatrix) -> IntMatrix {
        self.checked_add(rhs).expect("matrix shapes agree")
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

pub(crate) struct BigIntCell<'a>(pub(crate) &'a BigInt);

impl Serialize for BigIntCell<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => serializer.serialize_i64(v),
            None => serializer.collect_str(self.0),
        }
    }
}

/// Integers as JSON numbers, falling back to strings past the `i64` range.
pub(crate) fn serialize_bigints<S: Serializer>(xs: &[BigInt], serializer: S) -> Result<S::Ok, S::Error> {
    serializer.collect_seq(xs.iter().map(BigIntCell))
}

/// Nested arrays of integers, one array per row.
impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.rows))?;
        for i in 0..self.rows {
            let row: Vec<BigIntCell> = (0..self.cols).map(|j| BigIntCell(&self[(i, j)])).collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

/// Row-major rational matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_columns(rows: usize, columns: &[Vec<Rational>]) -> Self {
        let mut m = QMatrix::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
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

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn checked_mul(&self, rhs: &QMatrix) -> Result<QMatrix, ShapeError> {
        if self.cols != rhs.rows {
            return Err(ShapeError::Mismatch(self.rows, self.cols, rhs.rows, rhs.cols));
        }
        let mut out = QMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = a * &rhs[(k, j)];
                    out.data[i * rhs.cols + j] = &out.data[i * rhs.cols + j] + &v;
                }
            }
        }
        Ok(out)
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols)).fold(Rational::zero(), |acc, i| acc + &self[(i, i)])
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (QMatrix, Vec<usize>) {
        let mut a = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..a.cols {
            if r == a.rows {
                break;
            }
            let Some(p) = (r..a.rows).find(|&i| !a[(i, c)].is_zero()) else { continue };
            a.swap_rows(r, p);
            let inv = a[(r, c)].recip().expect("pivot is nonzero");
            for j in 0..a.cols {
                a[(r, j)] = &a[(r, j)] * &inv;
            }
            for i in 0..a.rows {
                if i != r && !a[(i, c)].is_zero() {
                    let f = a[(i, c)].clone();
                    for j in 0..a.cols {
                        let v = &f * &a[(r, j)];
                        a[(i, j)] = &a[(i, j)] - &v;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (a, pivots)
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Linearly independent columns spanning the column space.
    pub fn column_basis(&self) -> QMatrix {
        let (_, pivots) = self.rref();
        let cols: Vec<Vec<Rational>> = pivots.iter().map(|&j| self.column(j)).collect();
        QMatrix::from_columns(self.rows, &cols)
    }

    /// Solves `self · X = rhs` for `self` of full column rank; `None` when inconsistent.
    pub fn solve(&self, rhs: &QMatrix) -> Option<QMatrix> {
        let n = self.cols;
        let mut aug = QMatrix::zeros(self.rows, n + rhs.cols);
        for i in 0..self.rows {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..rhs.cols {
                aug[(i, n + j)] = rhs[(i, j)].clone();
            }
        }
        let (r, pivots) = aug.rref();
        if pivots.len() != n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
            return None;
        }
        // rows past the pivots must be zero on the right-hand side
        for i in n..self.rows {
            if (0..rhs.cols).any(|j| !r[(i, n + j)].is_zero()) {
                return None;
            }
        }
        let mut x = QMatrix::zeros(n, rhs.cols);
        for i in 0..n {
            for j in 0..rhs.cols {
                x[(i, j)] = r[(i, n + j)].clone();
            }
        }
        Some(x)
    }

    /// Characteristic polynomial `det(xI - A)`, highest degree first.
    pub fn charpoly(&self) -> Result<Vec<Rational>, ShapeError> {
        if self.rows != self.cols {
            return Err(ShapeError::NotSquare(self.rows, self.cols));
        }
        let n = self.rows;
        let mut coeffs = vec![Rational::one()];
        let mut mk = QMatrix::zeros(n, n);
        for k in 1..=n {
            // M_k = A·M_{k-1} + c_{n-k+1}·I, c_{n-k} = -tr(A·M_k)/k
            let mut next = self.checked_mul(&mk)?;
            let c_prev = coeffs.last().expect("leading coefficient").clone();
            for i in 0..n {
                next[(i, i)] = &next[(i, i)] + &c_prev;
            }
            mk = next;
            let t = self.checked_mul(&mk)?.trace();
            coeffs.push(-(t / Rational::integer(k as i64)));
        }
        Ok(coeffs)
    }

    fn kron_diff(a: &QMatrix, b: &QMatrix) -> QMatrix {
        // I ⊗ A - Bᵀ ⊗ I, for square A (n×n) and B (n×n)
        let n = a.rows;
        let mut out = QMatrix::zeros(n * n, n * n);
        for bi in 0..n {
            for bj in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let mut v = if bi == bj { a[(i, j)].clone() } else { Rational::zero() };
                        if i == j {
                            v = &v - &b[(bj, bi)];
                        }
                        out[(bi * n + i, bj * n + j)] = v;
                    }
                }
            }
        }
        out
    }

    /// Similarity over the rationals, by the rank criterion
    /// `rank(I⊗A − Aᵀ⊗I) = rank(I⊗A − Bᵀ⊗I) = rank(I⊗B − Bᵀ⊗I)`.
    pub fn similar_to(&self, other: &QMatrix) -> bool {
        if self.rows != self.cols || other.rows != other.cols || self.rows != other.rows {
            return false;
        }
        if self.rows == 0 {
            return true;
        }
        let r1 = QMatrix::kron_diff(self, self).rank();
        let r2 = QMatrix::kron_diff(self, other).rank();
        let r3 = QMatrix::kron_diff(other, other).rank();
        r1 == r2 && r2 == r3
    }
}

impl std::ops::Index<(usize, usize)> for QMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

/// Nested arrays of `"p/q"` strings.
impl Serialize for QMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.rows))?;
        for i in 0..self.rows {
            let row: Vec<&Rational> = (0..self.cols).map(|j| &self[(i, j)]).collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}
