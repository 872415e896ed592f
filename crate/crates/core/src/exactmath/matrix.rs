//! Dense matrices over a [`Field`], stored row-major.

use std::fmt;

use crate::error::{check_dim, Error, Result};
use crate::exactmath::field::Field;
use crate::exactmath::subspace::Subspace;

#[derive(Clone, PartialEq)]
pub struct Matrix<F: Field> {
    field: F,
    rows: usize,
    cols: usize,
    data: Vec<F::Elem>,
}

impl<F: Field> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over {}", self.rows, self.cols, self.field.spec())?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| self.field.format(x)).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl<F: Field> Matrix<F> {
    pub fn zeros(field: &F, rows: usize, cols: usize) -> Self {
        Matrix {
            data: vec![field.zero(); rows * cols],
            field: field.clone(),
            rows,
            cols,
        }
    }

    pub fn identity(field: &F, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = field.one();
        }
        m
    }

    pub fn from_fn(field: &F, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F::Elem) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix {
            field: field.clone(),
            rows,
            cols,
            data,
        }
    }

    /// Builds a matrix from a flat row-major vector.
    pub fn from_vec(field: &F, rows: usize, cols: usize, data: Vec<F::Elem>) -> Result<Self> {
        check_dim(rows * cols, data.len())?;
        Ok(Matrix {
            field: field.clone(),
            rows,
            cols,
            data,
        })
    }

    /// Builds a matrix from rows; every row must have `cols` entries.
    pub fn from_rows(field: &F, cols: usize, rows: Vec<Vec<F::Elem>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for row in rows {
            check_dim(cols, row.len())?;
            data.extend(row);
        }
        Ok(Matrix {
            field: field.clone(),
            rows: n,
            cols,
            data,
        })
    }

    /// Integer-entry constructor, mostly for tests and fixtures.
    pub fn from_i64(field: &F, rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_fn(field, rows.len(), cols, |i, j| field.from_i64(rows[i][j]))
    }

    pub fn field(&self) -> &F {
        &self.field
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

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &F::Elem {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: F::Elem) {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[F::Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> impl Iterator<Item = &[F::Elem]> {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn column(&self, j: usize) -> Vec<F::Elem> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn as_slice(&self) -> &[F::Elem] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<F::Elem> {
        self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| self.field.is_zero(x))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(&self.field, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        check_dim(self.cols, other.rows)?;
        let f = &self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if f.is_zero(a) {
                    continue;
                }
                let na = f.neg(a);
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(orow) {
                    *d = f.sub_mul(d, &na, b);
                }
            }
        }
        Ok(out)
    }

    /// `self * v` for a column vector `v`.
    pub fn apply(&self, v: &[F::Elem]) -> Result<Vec<F::Elem>> {
        check_dim(self.cols, v.len())?;
        let f = &self.field;
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(f.zero(), |acc, (a, b)| f.add(&acc, &f.mul(a, b)))
            })
            .collect())
    }

    fn zip_with(&self, other: &Self, op: impl Fn(&F, &F::Elem, &F::Elem) -> F::Elem) -> Result<Self> {
        check_dim(self.rows, other.rows)?;
        check_dim(self.cols, other.cols)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| op(&self.field, a, b))
            .collect();
        Ok(Matrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |f, a, b| f.add(a, b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |f, a, b| f.sub(a, b))
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        let f = &self.field;
        Matrix {
            data: self.data.iter().map(|x| f.mul(x, c)).collect(),
            field: f.clone(),
            rows: self.rows,
            cols: self.cols,
        }
    }

    pub fn vstack(&self, other: &Self) -> Result<Self> {
        check_dim(self.cols, other.cols)?;
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(Matrix {
            field: self.field.clone(),
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn hstack(&self, other: &Self) -> Result<Self> {
        check_dim(self.rows, other.rows)?;
        let cols = self.cols + other.cols;
        Ok(Self::from_fn(&self.field, self.rows, cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        }))
    }

    /// Rows `range` as a new matrix.
    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Matrix {
            field: self.field.clone(),
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        Self::from_fn(&self.field, self.rows, idx.len(), |i, j| self.get(i, idx[j]).clone())
    }

    /// In-place elimination. With `full`, produces the reduced row echelon
    /// form; otherwise stops at a row echelon form. Returns the pivot columns.
    fn eliminate(&mut self, full: bool) -> Vec<usize> {
        let f = self.field.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(p) = (r..rows).find(|&i| !f.is_zero(&self.data[i * cols + c])) else {
                continue;
            };
            if p != r {
                for j in c..cols {
                    self.data.swap(p * cols + j, r * cols + j);
                }
            }
            let inv = f.inv(&self.data[r * cols + c]).expect("pivot is nonzero");
            if full {
                for j in c..cols {
                    let v = f.mul(&self.data[r * cols + j], &inv);
                    self.data[r * cols + j] = v;
                }
            }
            let (head, tail) = self.data.split_at_mut(r * cols);
            let (prow, rest) = tail.split_at_mut(cols);
            let pivot_scale = if full { f.one() } else { inv };
            let clear = |row: &mut [F::Elem]| {
                if f.is_zero(&row[c]) {
                    return;
                }
                let factor = f.mul(&row[c], &pivot_scale);
                for j in c..cols {
                    row[j] = f.sub_mul(&row[j], &factor, &prow[j]);
                }
            };
            for row in rest.chunks_mut(cols) {
                clear(row);
            }
            if full {
                for row in head.chunks_mut(cols) {
                    clear(row);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// Reduced row echelon form, rank and pivot columns.
    pub fn rref(&self) -> (Self, usize, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.eliminate(true);
        (m, pivots.len(), pivots)
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.eliminate(false).len()
    }

    /// The null space `{v : self * v = 0}`.
    pub fn kernel_basis(&self) -> Subspace<F> {
        let f = &self.field;
        let (red, _, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let free: Vec<usize> = (0..self.cols).filter(|&j| !is_pivot[j]).collect();
        let vectors: Vec<Vec<F::Elem>> = free
            .iter()
            .map(|&fj| {
                let mut v = vec![f.zero(); self.cols];
                v[fj] = f.one();
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = f.neg(red.get(r, fj));
                }
                v
            })
            .collect();
        let basis = Matrix::from_rows(f, self.cols, vectors).expect("kernel vectors have ambient length");
        Subspace::from_spanning(basis)
    }

    /// The left null space `{y : y * self = 0}`, as row vectors.
    pub fn left_kernel(&self) -> Subspace<F> {
        self.transpose().kernel_basis()
    }

    pub fn row_space(&self) -> Subspace<F> {
        Subspace::from_spanning(self.clone())
    }

    pub fn column_space(&self) -> Subspace<F> {
        Subspace::from_spanning(self.transpose())
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: self.cols,
            });
        }
        let n = self.rows;
        let aug = self.hstack(&Self::identity(&self.field, n))?;
        let (red, rank, pivots) = aug.rref();
        if rank < n || pivots[n - 1] >= n {
            return Err(Error::Singular);
        }
        let idx: Vec<usize> = (n..2 * n).collect();
        Ok(red.select_cols(&idx))
    }

    /// A solution of `self · x = b`, or `None` if the system is inconsistent.
    pub fn solve(&self, b: &[F::Elem]) -> Result<Option<Vec<F::Elem>>> {
        check_dim(self.rows, b.len())?;
        let f = &self.field;
        let column = Matrix::from_fn(f, self.rows, 1, |i, _| b[i].clone());
        let (red, rank, pivots) = self.hstack(&column)?.rref();
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![f.zero(); self.cols];
        for (i, &p) in pivots.iter().enumerate().take(rank) {
            x[p] = red.get(i, self.cols).clone();
        }
        Ok(Some(x))
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    /// Determinant via elimination.
    pub fn determinant(&self) -> Result<F::Elem> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: self.cols,
            });
        }
        let f = &self.field;
        let n = self.rows;
        let mut m = self.data.clone();
        let mut det = f.one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !f.is_zero(&m[i * n + c])) else {
                return Ok(f.zero());
            };
            if p != c {
                for j in 0..n {
                    m.swap(p * n + j, c * n + j);
                }
                det = f.neg(&det);
            }
            let pv = m[c * n + c].clone();
            det = f.mul(&det, &pv);
            let inv = f.inv(&pv).expect("nonzero pivot");
            for i in c + 1..n {
                if f.is_zero(&m[i * n + c]) {
                    continue;
                }
                let factor = f.mul(&m[i * n + c], &inv);
                for j in c..n {
                    let v = f.sub_mul(&m[i * n + j], &factor, &m[c * n + j]);
                    m[i * n + j] = v;
                }
            }
        }
        Ok(det)
    }

    pub fn random<R: rand::Rng + ?Sized>(field: &F, rows: usize, cols: usize, rng: &mut R) -> Self {
        Self::from_fn(field, rows, cols, |_, _| field.random(rng))
    }

    /// A uniformly random invertible matrix (rejection sampling).
    pub fn random_invertible<R: rand::Rng + ?Sized>(field: &F, n: usize, rng: &mut R) -> Self {
        loop {
            let m = Self::random(field, n, n, rng);
            if m.is_invertible() {
                return m;
            }
        }
    }

    /// Decimal rendering of every entry, row by row.
    pub fn to_strings(&self) -> Vec<Vec<String>> {
        self.row_vecs()
            .map(|r| r.iter().map(|x| self.field.format(x)).collect())
            .collect()
    }
}
