//! Linear subspaces of `k^n` in canonical form.
//!
//! A subspace is stored as the reduced row echelon form of any spanning set,
//! with zero rows dropped. RREF is unique, so structural equality of two
//! `Subspace` values is equality of subspaces.

use crate::error::{check_dim, Error, Result};
use crate::exactmath::field::Field;
use crate::exactmath::matrix::Matrix;

#[derive(Debug, Clone, PartialEq)]
pub struct Subspace<F: Field> {
    ambient: usize,
    basis: Matrix<F>,
    pivots: Vec<usize>,
}

impl<F: Field> Subspace<F> {
    /// The span of the rows of `m`.
    pub fn from_spanning(m: Matrix<F>) -> Self {
        let ambient = m.cols();
        let (red, rank, pivots) = m.rref();
        let idx: Vec<usize> = (0..rank).collect();
        Subspace {
            ambient,
            basis: red.select_rows(&idx),
            pivots,
        }
    }

    pub fn span(field: &F, ambient: usize, vectors: Vec<Vec<F::Elem>>) -> Result<Self> {
        Ok(Self::from_spanning(Matrix::from_rows(field, ambient, vectors)?))
    }

    pub fn zero(field: &F, ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Matrix::zeros(field, 0, ambient),
            pivots: Vec::new(),
        }
    }

    pub fn full(field: &F, ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Matrix::identity(field, ambient),
            pivots: (0..ambient).collect(),
        }
    }

    /// Span of the standard basis vectors `e_i`, `i` in `coords`.
    pub fn coordinate(field: &F, ambient: usize, coords: &[usize]) -> Self {
        let vectors = coords
            .iter()
            .map(|&i| {
                let mut v = vec![field.zero(); ambient];
                v[i] = field.one();
                v
            })
            .collect();
        Self::span(field, ambient, vectors).expect("coordinate vectors have ambient length")
    }

    pub fn field(&self) -> &F {
        self.basis.field()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn codim(&self) -> usize {
        self.ambient - self.dim()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    /// Canonical basis, one vector per row.
    pub fn basis(&self) -> &Matrix<F> {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    fn check_ambient(&self, other: &Self) -> Result<()> {
        check_dim(self.ambient, other.ambient)
    }

    /// Coordinates of `v` in the canonical basis, or `None` if `v` is not in the subspace.
    pub fn coordinates_of(&self, v: &[F::Elem]) -> Result<Option<Vec<F::Elem>>> {
        check_dim(self.ambient, v.len())?;
        let f = self.field();
        // With an RREF basis, the coordinates are the entries at the pivot columns.
        let coords: Vec<F::Elem> = self.pivots.iter().map(|&p| v[p].clone()).collect();
        let mut residual = v.to_vec();
        for (c, row) in coords.iter().zip(self.basis.row_vecs()) {
            if f.is_zero(c) {
                continue;
            }
            for (x, b) in residual.iter_mut().zip(row) {
                *x = f.sub_mul(x, c, b);
            }
        }
        Ok(residual.iter().all(|x| f.is_zero(x)).then_some(coords))
    }

    pub fn contains_vector(&self, v: &[F::Elem]) -> Result<bool> {
        Ok(self.coordinates_of(v)?.is_some())
    }

    /// `self ⊆ other`.
    pub fn is_subspace_of(&self, other: &Self) -> Result<bool> {
        self.check_ambient(other)?;
        if self.dim() > other.dim() {
            return Ok(false);
        }
        for v in self.basis.row_vecs() {
            if !other.contains_vector(v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.check_ambient(other)?;
        Ok(Self::from_spanning(self.basis.vstack(&other.basis)?))
    }

    pub fn intersect(&self, other: &Self) -> Result<Self> {
        self.check_ambient(other)?;
        let f = self.field().clone();
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(&f, self.ambient));
        }
        if self.is_full() {
            return Ok(other.clone());
        }
        if other.is_full() {
            return Ok(self.clone());
        }
        // Relations x*A + y*B = 0 among the stacked bases give the
        // intersection vectors x*A.
        let stacked = self.basis.vstack(&other.basis)?;
        let relations = stacked.left_kernel();
        let a = self.dim();
        let vectors: Vec<Vec<F::Elem>> = relations
            .basis()
            .row_vecs()
            .map(|rel| {
                let mut v = vec![f.zero(); self.ambient];
                for (c, row) in rel[..a].iter().zip(self.basis.row_vecs()) {
                    if f.is_zero(c) {
                        continue;
                    }
                    for (x, b) in v.iter_mut().zip(row) {
                        *x = f.add(x, &f.mul(c, b));
                    }
                }
                v
            })
            .collect();
        Self::span(&f, self.ambient, vectors)
    }

    /// `dim(a ∩ b) = max(0, dim a + dim b - n)`.
    pub fn meets_properly(&self, other: &Self) -> Result<bool> {
        let expected = (self.dim() + other.dim()).saturating_sub(self.ambient);
        Ok(self.intersect(other)?.dim() == expected)
    }

    /// Image under the linear map `g` acting on column vectors.
    pub fn image(&self, g: &Matrix<F>) -> Result<Self> {
        check_dim(self.ambient, g.cols())?;
        Ok(Self::from_spanning(self.basis.mul(&g.transpose())?))
    }

    /// Linear functionals vanishing on the subspace, as the rows of a matrix `A`
    /// with `A v = 0` exactly for `v` in the subspace.
    pub fn annihilator(&self) -> Matrix<F> {
        self.basis.kernel_basis().basis().clone()
    }

    /// `{x : g x ∈ self}`.
    pub fn preimage(&self, g: &Matrix<F>) -> Result<Self> {
        check_dim(self.ambient, g.rows())?;
        let ann = self.annihilator();
        if ann.rows() == 0 {
            return Ok(Self::full(self.field(), g.cols()));
        }
        Ok(ann.mul(g)?.kernel_basis())
    }

    /// Re-expresses `self` in the coordinates of the canonical basis of `ambient`.
    pub fn relative_to(&self, ambient: &Self) -> Result<Self> {
        self.check_ambient(ambient)?;
        let f = self.field().clone();
        let mut vectors = Vec::with_capacity(self.dim());
        for v in self.basis.row_vecs() {
            let c = ambient
                .coordinates_of(v)?
                .ok_or_else(|| Error::PreconditionFailed("subspace not contained in ambient".into()))?;
            vectors.push(c);
        }
        Self::span(&f, ambient.dim(), vectors)
    }

    /// Inverse of [`relative_to`](Self::relative_to): vectors in coordinates of
    /// `ambient`'s canonical basis, mapped back into `k^n`.
    pub fn embed_into(&self, ambient: &Self) -> Result<Self> {
        check_dim(ambient.dim(), self.ambient)?;
        Ok(Self::from_spanning(self.basis.mul(ambient.basis())?))
    }

    /// Vectors extending the canonical basis to a basis of the whole space,
    /// chosen among standard basis vectors.
    pub fn complement_basis(&self) -> Vec<Vec<F::Elem>> {
        let f = self.field();
        let mut is_pivot = vec![false; self.ambient];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.ambient)
            .filter(|&j| !is_pivot[j])
            .map(|j| {
                let mut v = vec![f.zero(); self.ambient];
                v[j] = f.one();
                v
            })
            .collect()
    }

    pub fn random<R: rand::Rng + ?Sized>(field: &F, ambient: usize, dim: usize, rng: &mut R) -> Self {
        assert!(dim <= ambient);
        loop {
            let s = Self::from_spanning(Matrix::random(field, dim, ambient, rng));
            if s.dim() == dim {
                return s;
            }
        }
    }
}
