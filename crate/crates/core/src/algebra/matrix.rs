//! Sparse exact matrices and vectors.
//!
//! Only nonzero entries are stored, so two values are equal exactly when they
//! denote the same matrix.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::boolean::BoolMatrix;
use super::rational::Rational;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatVector {
    dim: usize,
    entries: BTreeMap<usize, Rational>,
}

impl RatVector {
    pub fn zeros(dim: usize) -> Self {
        RatVector {
            dim,
            entries: BTreeMap::new(),
        }
    }

    pub fn from_dense(values: Vec<Rational>) -> Self {
        let mut v = RatVector::zeros(values.len());
        for (i, x) in values.into_iter().enumerate() {
            v.set(i, x);
        }
        v
    }

    pub fn unit(dim: usize, index: usize) -> Self {
        let mut v = RatVector::zeros(dim);
        v.set(index, Rational::one());
        v
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, index: usize) -> Rational {
        self.entries.get(&index).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn get_ref(&self, index: usize) -> Option<&Rational> {
        self.entries.get(&index)
    }

    /// Sets an entry; zero removes it. Panics when `index >= dim`.
    pub fn set(&mut self, index: usize, value: Rational) {
        assert!(index < self.dim, "index {index} out of range {}", self.dim);
        if value.is_zero() {
            self.entries.remove(&index);
        } else {
            self.entries.insert(index, value);
        }
    }

    /// Nonzero entries in increasing index order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.entries.iter().map(|(&i, x)| (i, x))
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_dense(&self) -> Vec<Rational> {
        (0..self.dim).map(|i| self.get(i)).collect()
    }

    pub fn dot(&self, other: &RatVector) -> Result<Rational> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!(
                "dot product of vectors of size {} and {}",
                self.dim, other.dim
            )));
        }
        let (small, large) = if self.nnz() <= other.nnz() {
            (self, other)
        } else {
            (other, self)
        };
        let mut acc = Rational::zero();
        for (i, x) in small.iter() {
            if let Some(y) = large.entries.get(&i) {
                acc += x * y;
            }
        }
        Ok(acc)
    }

    /// Row vector times matrix.
    pub fn mul_matrix(&self, m: &RatMatrix) -> Result<RatVector> {
        if self.dim != m.rows {
            return Err(Error::DimensionMismatch(format!(
                "vector of size {} times {}x{} matrix",
                self.dim, m.rows, m.cols
            )));
        }
        let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
        for (i, x) in self.iter() {
            for (&j, y) in &m.data[i] {
                *acc.entry(j).or_insert_with(Rational::zero) += x * y;
            }
        }
        acc.retain(|_, v| !v.is_zero());
        Ok(RatVector {
            dim: m.cols,
            entries: acc,
        })
    }

    pub fn scale(&self, factor: &Rational) -> RatVector {
        if factor.is_zero() {
            return RatVector::zeros(self.dim);
        }
        RatVector {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .map(|(&i, x)| (i, x * factor))
                .collect(),
        }
    }

    pub fn map<F: Fn(&Rational) -> Rational>(&self, f: F) -> RatVector {
        let mut out = RatVector::zeros(self.dim);
        for (i, x) in self.iter() {
            out.set(i, f(x));
        }
        out
    }

    /// Indicator vector of the support.
    pub fn support_indicator(&self) -> Vec<bool> {
        let mut out = vec![false; self.dim];
        for (i, _) in self.iter() {
            out[i] = true;
        }
        out
    }
}

impl fmt::Debug for RatVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.to_dense().iter().map(|x| x.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BTreeMap<usize, Rational>>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![BTreeMap::new(); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RatMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    /// Builds a matrix from dense rows. Panics on ragged input.
    pub fn from_dense(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = RatMatrix::zeros(r, c);
        for (i, row) in rows.into_iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, x) in row.into_iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    pub fn diagonal_matrix(values: Vec<Rational>) -> Self {
        let mut m = RatMatrix::zeros(values.len(), values.len());
        for (i, x) in values.into_iter().enumerate() {
            m.set(i, i, x);
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        self.data[i].get(&j).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn get_ref(&self, i: usize, j: usize) -> Option<&Rational> {
        self.data[i].get(&j)
    }

    /// Sets an entry; zero removes it. Panics on out-of-range indices.
    pub fn set(&mut self, i: usize, j: usize, value: Rational) {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of range");
        if value.is_zero() {
            self.data[i].remove(&j);
        } else {
            self.data[i].insert(j, value);
        }
    }

    pub fn row(&self, i: usize) -> &BTreeMap<usize, Rational> {
        &self.data[i]
    }

    /// Nonzero entries in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |(&j, x)| (i, j, x)))
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(BTreeMap::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(BTreeMap::is_empty)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.iter().all(|(_, _, x)| !x.is_negative())
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut t = RatMatrix::zeros(self.cols, self.rows);
        for (i, j, x) in self.iter() {
            t.set(j, i, x.clone());
        }
        t
    }

    pub fn scale(&self, factor: &Rational) -> RatMatrix {
        let mut out = RatMatrix::zeros(self.rows, self.cols);
        if factor.is_zero() {
            return out;
        }
        for (i, j, x) in self.iter() {
            out.set(i, j, x * factor);
        }
        out
    }

    pub fn map<F: Fn(&Rational) -> Rational>(&self, f: F) -> RatMatrix {
        let mut out = RatMatrix::zeros(self.rows, self.cols);
        for (i, j, x) in self.iter() {
            out.set(i, j, f(x));
        }
        out
    }

    pub fn diagonal(&self) -> Vec<Rational> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).collect()
    }

    /// Zero-one pattern of the nonzero entries. Panics if not square.
    pub fn structure(&self) -> BoolMatrix {
        assert!(self.is_square(), "structure of a non-square matrix");
        let mut b = BoolMatrix::zeros(self.rows);
        for (i, j, _) in self.iter() {
            b.set(i, j, true);
        }
        b
    }

    pub fn mul(&self, other: &RatMatrix) -> Result<RatMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = RatMatrix::zeros(self.rows, other.cols);
        for (i, row) in self.data.iter().enumerate() {
            let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
            for (&k, x) in row {
                for (&j, y) in &other.data[k] {
                    *acc.entry(j).or_insert_with(Rational::zero) += x * y;
                }
            }
            acc.retain(|_, v| !v.is_zero());
            out.data[i] = acc;
        }
        Ok(out)
    }

    /// Matrix times column vector.
    pub fn mul_vector(&self, v: &RatVector) -> Result<RatVector> {
        if self.cols != v.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix times vector of size {}",
                self.rows,
                self.cols,
                v.dim()
            )));
        }
        let mut out = RatVector::zeros(self.rows);
        for (i, row) in self.data.iter().enumerate() {
            let mut acc = Rational::zero();
            for (&j, x) in row {
                if let Some(y) = v.get_ref(j) {
                    acc += x * y;
                }
            }
            out.set(i, acc);
        }
        Ok(out)
    }

    /// `A^n` by repeated squaring; `A^0` is the identity.
    pub fn pow(&self, mut n: u64) -> Result<RatMatrix> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut result = RatMatrix::identity(self.rows);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base)?;
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(result)
    }

    /// Simultaneous row/column permutation: entry `(k, l)` of the result is
    /// entry `(order[k], order[l])` of `self`.
    pub fn permute(&self, order: &[usize]) -> RatMatrix {
        assert!(self.is_square() && order.len() == self.rows);
        let mut pos = vec![0; order.len()];
        for (k, &i) in order.iter().enumerate() {
            pos[i] = k;
        }
        let mut out = RatMatrix::zeros(self.rows, self.cols);
        for (i, j, x) in self.iter() {
            out.set(pos[i], pos[j], x.clone());
        }
        out
    }

    pub fn is_upper_triangular(&self) -> bool {
        self.iter().all(|(i, j, _)| i <= j)
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .to_dense()
            .iter()
            .map(|r| {
                let cells: Vec<String> = r.iter().map(|x| x.to_string()).collect();
                format!("[{}]", cells.join(", "))
            })
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

pub fn mat_mul(a: &RatMatrix, b: &RatMatrix) -> Result<RatMatrix> {
    a.mul(b)
}

pub fn mat_pow(a: &RatMatrix, n: u64) -> Result<RatMatrix> {
    a.pow(n)
}
