use crate::error::{check_dim, Error, Result};
use crate::exactmath::{Field, Matrix, Poly};

use super::ParamPiece;

/// A rational normal curve together with the parameters of the points it
/// was fitted through.
#[derive(Debug, Clone, PartialEq)]
pub struct RncFit<F: Field> {
    pub piece: ParamPiece<F>,
    pub params: Vec<F::Elem>,
}

/// The rational normal curve through `r + 3` points of `P^r` in linearly
/// general position.
///
/// With `A` the frame sending `e_i` to the first `r + 1` points and the
/// all-ones vector to the next one, and `q = A⁻¹ p_{r+2}`, the curve is
/// `t ↦ A (1/(t − a_i))_i` with `a_i = −1/q_i`: it hits `p_i` at `a_i`,
/// `p_{r+1}` at ∞ and `p_{r+2}` at 0. The substitution `t = s/(1 − s)`
/// moves ∞ to `s = 1`, so every point has an affine parameter.
pub fn rnc_through<F: Field>(field: &F, points: &[Vec<F::Elem>]) -> Result<RncFit<F>> {
    let f = field;
    let n = points.first().map_or(0, Vec::len);
    if n < 3 {
        return Err(Error::DegeneratePosition("need points in P^r with r >= 2".into()));
    }
    let r = n - 1;
    check_dim(r + 3, points.len())?;
    for p in points {
        check_dim(n, p.len())?;
    }
    let degenerate = |why: &str| Error::DegeneratePosition(why.to_string());

    let a0 = Matrix::from_fn(f, n, n, |i, j| points[j][i].clone());
    let a0_inv = a0.inverse().map_err(|_| degenerate("first r+1 points are dependent"))?;
    let lambda = a0_inv.apply(&points[r + 1])?;
    if lambda.iter().any(|x| f.is_zero(x)) {
        return Err(degenerate("point r+2 lies on a coordinate hyperplane of the frame"));
    }
    let frame = Matrix::from_fn(f, n, n, |i, j| f.mul(a0.get(i, j), &lambda[j]));
    let q: Vec<F::Elem> = a0_inv
        .apply(&points[r + 2])?
        .iter()
        .zip(&lambda)
        .map(|(x, l)| f.div(x, l).expect("lambda is nonzero"))
        .collect();
    if q.iter().any(|x| f.is_zero(x)) {
        return Err(degenerate("last point lies on a coordinate hyperplane of the frame"));
    }
    if q.iter().any(|x| f.is_one(x)) {
        return Err(degenerate("last point is collinear with a frame point and the unit point"));
    }
    let a: Vec<F::Elem> = q.iter().map(|x| f.neg(&f.inv(x).expect("nonzero"))).collect();
    for i in 0..n {
        if a[i + 1..].contains(&a[i]) {
            return Err(degenerate("two frame parameters coincide"));
        }
    }

    // ((1 + a_j) s − a_j) is (t − a_j)(1 − s) after t = s/(1 − s).
    let factors: Vec<Poly<F>> = a
        .iter()
        .map(|aj| Poly::new(f, vec![f.neg(aj), f.add(&f.one(), aj)]))
        .collect();
    let mut y = Matrix::zeros(f, n, r + 1);
    for i in 0..n {
        let yi = factors
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .fold(Poly::constant(f, f.one()), |acc, (_, p)| acc.mul(p));
        for (k, c) in yi.padded(r + 1).into_iter().enumerate() {
            y.set(i, k, c);
        }
    }
    let piece = ParamPiece::new(frame.mul(&y)?)?;

    let mut params: Vec<F::Elem> = a
        .iter()
        .map(|ai| f.div(ai, &f.add(&f.one(), ai)).expect("a_i != -1"))
        .collect();
    params.push(f.one());
    params.push(f.zero());
    Ok(RncFit { piece, params })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::{PrimeField, RationalField, Subspace};
    use crate::projchain::{proportional, quadrics_containing};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pts<F: Field>(f: &F, rows: &[&[i64]]) -> Vec<Vec<F::Elem>> {
        rows.iter().map(|r| r.iter().map(|&x| f.from_i64(x)).collect()).collect()
    }

    #[test]
    fn conic_through_five_points() {
        let q = RationalField;
        let points = pts(&q, &[&[1, 0, 0], &[0, 0, 1], &[1, 1, 1], &[1, 2, 4], &[1, 3, 9]]);
        let fit = rnc_through(&q, &points).unwrap();
        assert_eq!(fit.piece.degree(), 2);
        for (p, t) in points.iter().zip(&fit.params) {
            assert!(proportional(&q, &fit.piece.eval(t), p));
        }
        // All five points lie on x0 x2 = x1^2.
        let conic = quadrics_containing(&q, 2, &[fit.piece.clone()]);
        let expected = Subspace::span(&q, 6, vec![pts(&q, &[&[0, 0, 1, -1, 0, 0]]).remove(0)]).unwrap();
        assert_eq!(conic, expected);
    }

    #[test]
    fn refit_recovers_a_known_curve() {
        let f = PrimeField::mersenne61();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for r in 3..7 {
            let original = ParamPiece::new(Matrix::random_invertible(&f, r + 1, &mut rng)).unwrap();
            let points: Vec<_> = (0..r + 3).map(|_| original.eval(&f.random(&mut rng))).collect();
            let fit = rnc_through(&f, &points).unwrap();
            for (p, t) in points.iter().zip(&fit.params) {
                assert!(proportional(&f, &fit.piece.eval(t), p));
            }
            assert_eq!(
                quadrics_containing(&f, r, &[fit.piece]),
                quadrics_containing(&f, r, &[original])
            );
        }
    }

    #[test]
    fn degenerate_inputs() {
        let q = RationalField;
        let collinear = pts(&q, &[&[1, 0, 0], &[0, 1, 0], &[1, 1, 0], &[1, 2, 4], &[1, 3, 9]]);
        assert!(matches!(rnc_through(&q, &collinear), Err(Error::DegeneratePosition(_))));
        let on_hyperplane = pts(&q, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, 1], &[0, 1, 2]]);
        assert!(matches!(rnc_through(&q, &on_hyperplane), Err(Error::DegeneratePosition(_))));
    }
}
