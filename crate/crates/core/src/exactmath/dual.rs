//! Modules over the dual numbers `k[ε]/(ε²)`.
//!
//! An element `a + εb` of `V[ε] = V ⊗ k[ε]` is stored as the vector `(a, b)`
//! in `k^{2r}`; a submodule is a `k`-subspace closed under `(a, b) ↦ (0, a)`.

use crate::error::{check_dim, Error, Result};
use crate::exactmath::field::Field;
use crate::exactmath::matrix::Matrix;
use crate::exactmath::subspace::Subspace;

#[derive(Debug, Clone, PartialEq)]
pub struct DualModule<F: Field> {
    rank: usize,
    space: Subspace<F>,
}

impl<F: Field> DualModule<F> {
    /// Wraps a subspace of `k^{2r}`, checking `ε·N ⊆ N`.
    pub fn new(rank: usize, space: Subspace<F>) -> Result<Self> {
        check_dim(2 * rank, space.ambient_dim())?;
        let m = DualModule { rank, space };
        if !m.epsilon_image().is_subspace_of(&m.space)? {
            return Err(Error::NotEpsilonClosed);
        }
        Ok(m)
    }

    /// `A[ε] = A ⊕ εA`.
    pub fn extend_scalars(a: &Subspace<F>) -> Self {
        let f = a.field();
        let r = a.ambient_dim();
        let mut vectors = Vec::with_capacity(2 * a.dim());
        for v in a.basis().row_vecs() {
            let mut lo = v.to_vec();
            lo.extend(std::iter::repeat_n(f.zero(), r));
            let mut hi = vec![f.zero(); r];
            hi.extend_from_slice(v);
            vectors.push(lo);
            vectors.push(hi);
        }
        DualModule {
            rank: r,
            space: Subspace::span(f, 2 * r, vectors).expect("lengths are 2r"),
        }
    }

    /// `(I + εM)(B[ε])`.
    pub fn twisted_extension(b: &Subspace<F>, m: &Matrix<F>) -> Result<Self> {
        let f = b.field();
        let r = b.ambient_dim();
        check_dim(r, m.rows())?;
        check_dim(r, m.cols())?;
        let mut vectors = Vec::with_capacity(2 * b.dim());
        for v in b.basis().row_vecs() {
            // (I + εM)(v) = v + ε Mv and (I + εM)(εv) = εv
            let mut lo = v.to_vec();
            lo.extend(m.apply(v)?);
            let mut hi = vec![f.zero(); r];
            hi.extend_from_slice(v);
            vectors.push(lo);
            vectors.push(hi);
        }
        Ok(DualModule {
            rank: r,
            space: Subspace::span(f, 2 * r, vectors)?,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn space(&self) -> &Subspace<F> {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// `ε·N`.
    pub fn epsilon_image(&self) -> Subspace<F> {
        let f = self.space.field();
        let r = self.rank;
        let vectors = self
            .space
            .basis()
            .row_vecs()
            .map(|v| {
                let mut w = vec![f.zero(); r];
                w.extend_from_slice(&v[..r]);
                w
            })
            .collect();
        Subspace::span(f, 2 * r, vectors).expect("lengths are 2r")
    }

    /// Elements killed by ε: `N ∩ (0 ⊕ εV)`.
    pub fn epsilon_kernel(&self) -> Subspace<F> {
        let f = self.space.field();
        let eps_part: Vec<usize> = (self.rank..2 * self.rank).collect();
        let target = Subspace::coordinate(f, 2 * self.rank, &eps_part);
        self.space.intersect(&target).expect("same ambient")
    }

    /// `(a, b)` with `N ≅ k[ε]^a ⊕ k^b`.
    pub fn structure(&self) -> (usize, usize) {
        let free = self.epsilon_image().dim();
        (free, self.dim() - 2 * free)
    }

    /// Flat (equivalently free) iff the torsion part `k^b` vanishes.
    pub fn is_flat(&self) -> bool {
        self.epsilon_kernel().dim() == self.epsilon_image().dim()
    }

    pub fn intersect(&self, other: &Self) -> Result<Self> {
        check_dim(self.rank, other.rank)?;
        Ok(DualModule {
            rank: self.rank,
            space: self.space.intersect(&other.space)?,
        })
    }
}

/// `A[ε] ∩ (I + εM)(B[ε])` and whether it is flat over `k[ε]/(ε²)`.
pub fn dual_intersect_flat<F: Field>(
    a: &Subspace<F>,
    b: &Subspace<F>,
    m: &Matrix<F>,
) -> Result<(DualModule<F>, bool)> {
    check_dim(a.ambient_dim(), b.ambient_dim())?;
    let lhs = DualModule::extend_scalars(a);
    let rhs = DualModule::twisted_extension(b, m)?;
    let n = lhs.intersect(&rhs)?;
    let flat = n.is_flat();
    Ok((n, flat))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::field::{PrimeField, RationalField};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_gluing_gives_extended_intersection() {
        let f = PrimeField::mersenne61();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let a = Subspace::random(&f, 5, 3, &mut rng);
            let b = Subspace::random(&f, 5, 4, &mut rng);
            let zero = Matrix::zeros(&f, 5, 5);
            let (n, flat) = dual_intersect_flat(&a, &b, &zero).unwrap();
            assert!(flat);
            assert_eq!(n, DualModule::extend_scalars(&a.intersect(&b).unwrap()));
        }
    }

    #[test]
    fn separating_example_is_torsion() {
        // A = <v1, v2>, B = <v1>, M: v1 -> v3.
        let q = RationalField;
        let a = Subspace::coordinate(&q, 3, &[0, 1]);
        let b = Subspace::coordinate(&q, 3, &[0]);
        let mut m = Matrix::zeros(&q, 3, 3);
        m.set(2, 0, q.one());
        let (n, flat) = dual_intersect_flat(&a, &b, &m).unwrap();
        assert!(!flat);
        let eps_v1 = Subspace::coordinate(&q, 6, &[3]);
        assert_eq!(n.space(), &eps_v1);
        assert_eq!(n.structure(), (0, 1));
    }

    #[test]
    fn proper_pairs_stay_flat_under_random_twists() {
        let f = PrimeField::mersenne61();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for r in 2..6 {
            for da in 0..=r {
                for db in 0..=r {
                    let a = Subspace::random(&f, r, da, &mut rng);
                    let b = Subspace::random(&f, r, db, &mut rng);
                    assert!(a.meets_properly(&b).unwrap());
                    let m = Matrix::random(&f, r, r, &mut rng);
                    let (_, flat) = dual_intersect_flat(&a, &b, &m).unwrap();
                    assert!(flat, "r={r} da={da} db={db}");
                }
            }
        }
    }

    #[test]
    fn closure_is_enforced() {
        let q = RationalField;
        let not_closed = Subspace::coordinate(&q, 4, &[0]);
        assert_eq!(DualModule::new(2, not_closed), Err(Error::NotEpsilonClosed));
        let closed = Subspace::coordinate(&q, 4, &[0, 2]);
        assert!(DualModule::new(2, closed).unwrap().is_flat());
    }
}
