use crate::error::{Error, Result};
use crate::exactmath::{Field, Matrix, Poly, Subspace};

use super::{check_range, Chain, ParamPiece};

/// Monomials `x_a x_b` with `a ≤ b`, in lexicographic order; quadric
/// coefficient vectors are indexed by this list.
pub fn quadric_monomials(r: usize) -> Vec<(usize, usize)> {
    (0..=r).flat_map(|a| (a..=r).map(move |b| (a, b))).collect()
}

/// Rows: monomials; columns: coefficients of `x_a(t) x_b(t)`.
pub(crate) fn pullback_matrix<F: Field>(piece: &ParamPiece<F>) -> Matrix<F> {
    let f = piece.field();
    let r = piece.ambient();
    let coords: Vec<Poly<F>> = (0..=r).map(|i| piece.coordinate(i)).collect();
    let width = 2 * piece.degree() + 1;
    let rows = quadric_monomials(r)
        .into_iter()
        .map(|(a, b)| coords[a].mul(&coords[b]).padded(width))
        .collect();
    Matrix::from_rows(f, width, rows).expect("rows have width 2e+1")
}

/// The quadric `q` restricted to a piece, as a polynomial of degree `2e`.
pub fn restriction_to_link<F: Field>(q: &[F::Elem], piece: &ParamPiece<F>) -> Poly<F> {
    let f = piece.field();
    let m = pullback_matrix(piece);
    let coeffs = (0..m.cols())
        .map(|j| {
            q.iter()
                .zip(m.column(j))
                .fold(f.zero(), |acc, (a, b)| f.add(&acc, &f.mul(a, &b)))
        })
        .collect();
    Poly::new(f, coeffs)
}

fn restriction_of_pieces<'a, F: Field>(field: &F, r: usize, pieces: impl IntoIterator<Item = &'a ParamPiece<F>>) -> Matrix<F> {
    let n = (r + 1) * (r + 2) / 2;
    pieces
        .into_iter()
        .fold(Matrix::zeros(field, n, 0), |acc, p| acc.hstack(&pullback_matrix(p)).expect("same row count"))
}

/// The restriction map from quadrics on `P^r` to the pieces of links `i..=j`.
pub fn quadric_restriction_matrix<F: Field>(c: &Chain<F>, i: usize, j: usize) -> Result<Matrix<F>> {
    check_range(i, j, c.len())?;
    Ok(restriction_of_pieces(
        c.field(),
        c.r(),
        c.links()[i..=j].iter().flat_map(|l| l.pieces()),
    ))
}

/// Quadrics vanishing on every piece, in monomial coordinates.
pub fn quadrics_containing<F: Field>(field: &F, r: usize, pieces: &[ParamPiece<F>]) -> Subspace<F> {
    restriction_of_pieces(field, r, pieces).left_kernel()
}

pub(crate) fn quadrics_containing_range<F: Field>(c: &Chain<F>, i: usize, j: usize) -> Result<Subspace<F>> {
    Ok(quadric_restriction_matrix(c, i, j)?.left_kernel())
}

pub fn h0_ideal_quadrics<F: Field>(c: &Chain<F>, i: usize, j: usize) -> Result<usize> {
    let m = quadric_restriction_matrix(c, i, j)?;
    Ok(m.rows() - m.rank())
}

/// `max(0, (r − 1)(r + 2 − 2n)/2)`.
pub fn expected_h0_ideal_quadrics(r: usize, n: usize) -> usize {
    let v = (r as i64 - 1) * (r as i64 + 2 - 2 * n as i64) / 2;
    v.max(0) as usize
}

/// `min(h⁰(O_{P^r}(2)), h⁰(O_Y(2)))` for a subchain `Y` of `len` links.
pub fn expected_restriction_rank(r: usize, len: usize) -> usize {
    let quadrics = (r + 1) * (r + 2) / 2;
    let on_chain = 2 * len * r + 1 - (len - 1) * (r + 1);
    quadrics.min(on_chain)
}

/// Maximal rank of the restriction to every contiguous subchain.
pub fn is_quadric_generic<F: Field>(c: &Chain<F>) -> bool {
    first_non_generic_range(c).is_none()
}

pub(crate) fn first_non_generic_range<F: Field>(c: &Chain<F>) -> Option<(usize, usize)> {
    for i in 0..c.len() {
        for j in i..c.len() {
            let rank = quadric_restriction_matrix(c, i, j).expect("valid range").rank();
            if rank != expected_restriction_rank(c.r(), j - i + 1) {
                return Some((i, j));
            }
        }
    }
    None
}

/// Which neighbour of a link a quadric is assumed to contain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// `Q ∩ R_link − (anchors shared with the neighbour on `side`)`, as the
/// polynomial of degree `r − 2` cutting out the residual points.
pub fn residual_divisor<F: Field>(q: &[F::Elem], c: &Chain<F>, link: usize, side: Side) -> Result<Poly<F>> {
    let len = c.len();
    if link >= len {
        return Err(Error::IndexOutOfRange { index: link, len });
    }
    let (adjacent, anchor_set) = match side {
        Side::Left if link > 0 => (link - 1, link - 1),
        Side::Right if link + 1 < len => (link + 1, link),
        _ => return Err(Error::IndexOutOfRange { index: link, len }),
    };
    let this = &c.links()[link];
    if !this.is_smooth() {
        return Err(Error::ReducibleLink(link));
    }
    if c.links()[adjacent].pieces().iter().any(|p| !restriction_to_link(q, p).is_zero()) {
        return Err(Error::QuadricMissesAdjacentLink(link));
    }
    let pulled = restriction_to_link(q, &this.pieces()[0]);
    if pulled.is_zero() {
        return Err(Error::QuadricContainsLink(link));
    }
    let roots: Vec<F::Elem> = c.anchors()[anchor_set]
        .iter()
        .map(|a| match side {
            Side::Left => a.right.param.clone(),
            Side::Right => a.left.param.clone(),
        })
        .collect();
    pulled.exact_divide(&Poly::from_roots(c.field(), &roots))
}

/// The residue test on the window of `r + 2` links starting at `start`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueWindow {
    pub start: usize,
    pub middle: usize,
    /// Quadrics through the left and right halves.
    pub dim_left: usize,
    pub dim_right: usize,
    /// Dimensions of the residual subspaces `P_L`, `P_R`.
    pub residual_left: usize,
    pub residual_right: usize,
    pub intersection: usize,
}

impl ResidueWindow {
    pub fn is_transverse(&self, r: usize) -> bool {
        let half = (r - 1) / 2;
        self.dim_left == half
            && self.dim_right == half
            && self.residual_left == half
            && self.residual_right == half
            && self.intersection == 0
    }
}

fn residual_space<F: Field>(c: &Chain<F>, quadrics: &Subspace<F>, middle: usize, side: Side) -> Result<Subspace<F>> {
    let f = c.field();
    let width = c.r() - 1;
    let mut vectors = Vec::with_capacity(quadrics.dim());
    for q in quadrics.basis().row_vecs() {
        match residual_divisor(q, c, middle, side) {
            Ok(p) => vectors.push(p.padded(width)),
            Err(Error::QuadricContainsLink(_)) => vectors.push(vec![f.zero(); width]),
            Err(e) => return Err(e),
        }
    }
    Subspace::span(f, width, vectors)
}

/// Requires odd `r` and `start + r + 2 <= c.len()`.
pub fn residue_window<F: Field>(c: &Chain<F>, start: usize) -> Result<ResidueWindow> {
    let r = c.r();
    if r % 2 == 0 {
        return Err(Error::PreconditionFailed("residue windows are defined for odd r".into()));
    }
    check_range(start, start + r + 1, c.len())?;
    let h = r.div_ceil(2);
    let middle = start + h;
    let left = quadrics_containing_range(c, start, middle - 1)?;
    let right = quadrics_containing_range(c, middle + 1, middle + h)?;
    let pl = residual_space(c, &left, middle, Side::Left)?;
    let pr = residual_space(c, &right, middle, Side::Right)?;
    Ok(ResidueWindow {
        start,
        middle,
        dim_left: left.dim(),
        dim_right: right.dim(),
        residual_left: pl.dim(),
        residual_right: pr.dim(),
        intersection: pl.intersect(&pr)?.dim(),
    })
}

/// True for even `r`; for odd `r`, no window of `r + 2` links has quadrics
/// through its two halves with the same residual divisor on the middle link.
pub fn has_transverse_residues<F: Field>(c: &Chain<F>) -> Result<bool> {
    let r = c.r();
    if r % 2 == 0 || c.len() < r + 2 {
        return Ok(true);
    }
    for start in 0..=c.len() - (r + 2) {
        if !residue_window(c, start)?.is_transverse(r) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::{PrimeField, RationalField};
    use crate::projchain::{mirror_chain, repeat_link, sample_chain};
    use crate::rng::stream_rng;

    #[test]
    fn monomial_count() {
        assert_eq!(quadric_monomials(3).len(), 10);
        assert_eq!(quadric_monomials(2), vec![(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]);
    }

    #[test]
    fn line_piece_has_three_columns() {
        let q = RationalField;
        let a = vec![q.one(), q.zero(), q.zero(), q.zero()];
        let b = vec![q.zero(), q.one(), q.zero(), q.zero()];
        let m = pullback_matrix(&ParamPiece::line(&q, &a, &b).unwrap());
        assert_eq!((m.rows(), m.cols()), (10, 3));
    }

    #[test]
    fn single_twisted_cubic() {
        let f = PrimeField::mersenne61();
        let c = sample_chain(&f, 3, 1, 2).unwrap();
        assert_eq!(quadric_restriction_matrix(&c, 0, 0).unwrap().rank(), 7);
        assert_eq!(h0_ideal_quadrics(&c, 0, 0).unwrap(), 3);
        assert!(is_quadric_generic(&c));
    }

    #[test]
    fn balanced_case_has_full_rank() {
        let f = PrimeField::mersenne61();
        let c = sample_chain(&f, 4, 3, 8).unwrap();
        assert_eq!(quadric_restriction_matrix(&c, 0, 2).unwrap().rank(), 15);
    }

    #[test]
    fn formula_values() {
        assert_eq!(expected_h0_ideal_quadrics(5, 3), 2);
        assert_eq!(expected_h0_ideal_quadrics(3, 2), 1);
        assert_eq!(expected_h0_ideal_quadrics(9, 6), 0);
        assert_eq!(expected_restriction_rank(4, 3), 15);
        assert_eq!(expected_restriction_rank(3, 1), 7);
    }

    #[test]
    fn residuals_have_degree_r_minus_2() {
        let f = PrimeField::mersenne61();
        for r in [3, 5] {
            let len = if r == 3 { 2 } else { 3 };
            let c = sample_chain(&f, r, len + 1, 4).unwrap();
            let quadrics = quadrics_containing_range(&c, 0, len - 1).unwrap();
            assert!(quadrics.dim() > 0);
            for q in quadrics.basis().row_vecs() {
                let p = residual_divisor(q, &c, len, Side::Left).unwrap();
                assert_eq!(p.degree(), Some(r - 2));
            }
        }
    }

    #[test]
    fn residual_errors() {
        let f = PrimeField::mersenne61();
        let c = sample_chain(&f, 3, 3, 6).unwrap();
        let through_first = quadrics_containing_range(&c, 0, 0).unwrap();
        let q = through_first.basis().row(0).to_vec();
        assert_eq!(residual_divisor(&q, &c, 2, Side::Left), Err(Error::QuadricMissesAdjacentLink(2)));
        let through_both = quadrics_containing_range(&c, 0, 1).unwrap();
        let q = through_both.basis().row(0).to_vec();
        assert_eq!(residual_divisor(&q, &c, 1, Side::Left), Err(Error::QuadricContainsLink(1)));
    }

    #[test]
    fn transverse_residues() {
        let f = PrimeField::mersenne61();
        assert!(has_transverse_residues(&sample_chain(&f, 4, 6, 1).unwrap()).unwrap());
        let c = sample_chain(&f, 5, 7, 1).unwrap();
        let w = residue_window(&c, 0).unwrap();
        assert_eq!((w.dim_left, w.dim_right, w.residual_left, w.residual_right), (2, 2, 2, 2));
        assert!(has_transverse_residues(&c).unwrap());
        assert!(!has_transverse_residues(&mirror_chain(&f, 5, 1).unwrap()).unwrap());
    }

    #[test]
    fn repeated_link_is_not_quadric_generic() {
        let f = PrimeField::mersenne61();
        let c = sample_chain(&f, 4, 3, 9).unwrap();
        assert!(is_quadric_generic(&c));
        let bad = repeat_link(&c, 1, &mut stream_rng(9, 1)).unwrap();
        assert_eq!(bad.len(), 4);
        assert!(!is_quadric_generic(&bad));
    }
}
