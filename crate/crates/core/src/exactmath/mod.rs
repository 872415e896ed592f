//! Exact scalars, matrices, subspaces, polynomials and dual-number modules.

pub mod dual;
pub mod field;
pub mod matrix;
pub mod poly;
pub mod subspace;

pub use dual::{dual_intersect_flat, DualModule};
pub use field::{Field, FieldSpec, PrimeField, RationalField, MERSENNE_61};
pub use matrix::Matrix;
pub use poly::Poly;
pub use subspace::Subspace;

/// Reduced row echelon form of `m`, its rank and pivot columns.
pub fn rref<F: Field>(m: &Matrix<F>) -> (Matrix<F>, usize, Vec<usize>) {
    m.rref()
}

/// `{v : m v = 0}`.
pub fn kernel_basis<F: Field>(m: &Matrix<F>) -> Subspace<F> {
    m.kernel_basis()
}

/// `num / den`, failing unless the division is exact.
pub fn exact_divide<F: Field>(num: &Poly<F>, den: &Poly<F>) -> crate::Result<Poly<F>> {
    num.exact_divide(den)
}
