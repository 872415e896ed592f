//! Maximally connected chains of rational normal curves in `P^r` and the
//! quadrics containing them.
//!
//! Links are unions of one or two parametrized pieces; consecutive links
//! share `r + 2` anchor points, each recorded by its parameter on both sides.

mod chain;
pub(crate) mod quadrics;
mod rnc;

pub use chain::{
    hyperplane_subchain, larson_chain, mirror_chain, repeat_link, sample_chain, sample_chain_with, MAX_ATTEMPTS,
};
pub use quadrics::{
    expected_h0_ideal_quadrics, expected_restriction_rank, h0_ideal_quadrics, has_transverse_residues,
    is_quadric_generic, quadric_monomials, quadric_restriction_matrix, quadrics_containing, residual_divisor,
    residue_window, restriction_to_link, ResidueWindow, Side,
};
pub use rnc::{rnc_through, RncFit};

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::exactmath::{Field, FieldSpec, Matrix, Poly};

/// A parametrized rational curve `t ↦ (x_0(t) : … : x_r(t))`; row `i` of
/// `coeffs` holds `x_i`, low degree first.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamPiece<F: Field> {
    coeffs: Matrix<F>,
}

impl<F: Field> ParamPiece<F> {
    pub fn new(coeffs: Matrix<F>) -> Result<Self> {
        if coeffs.rows() < 2 || coeffs.cols() < 2 {
            return Err(Error::InvalidChain("a piece needs r >= 1 and degree >= 1".into()));
        }
        Ok(ParamPiece { coeffs })
    }

    /// The line `t ↦ a + t (b − a)`.
    pub fn line(field: &F, a: &[F::Elem], b: &[F::Elem]) -> Result<Self> {
        check_dim(a.len(), b.len())?;
        let coeffs = Matrix::from_fn(field, a.len(), 2, |i, j| {
            if j == 0 {
                a[i].clone()
            } else {
                field.sub(&b[i], &a[i])
            }
        });
        Self::new(coeffs)
    }

    pub fn field(&self) -> &F {
        self.coeffs.field()
    }

    pub fn coeffs(&self) -> &Matrix<F> {
        &self.coeffs
    }

    pub fn ambient(&self) -> usize {
        self.coeffs.rows() - 1
    }

    pub fn degree(&self) -> usize {
        self.coeffs.cols() - 1
    }

    pub fn coordinate(&self, i: usize) -> Poly<F> {
        Poly::new(self.field(), self.coeffs.row(i).to_vec())
    }

    pub fn eval(&self, t: &F::Elem) -> Vec<F::Elem> {
        (0..self.coeffs.rows()).map(|i| self.coordinate(i).eval(t)).collect()
    }

    /// The same curve with the coordinate `x_0 = 0` added in front.
    pub fn embed_in_hyperplane(&self) -> Self {
        let f = self.field();
        let coeffs = Matrix::from_fn(f, self.coeffs.rows() + 1, self.coeffs.cols(), |i, j| {
            if i == 0 {
                f.zero()
            } else {
                self.coeffs.get(i - 1, j).clone()
            }
        });
        ParamPiece { coeffs }
    }

    /// Drops the coordinate `x_0`.
    pub fn drop_first_coordinate(&self) -> Self {
        let idx: Vec<usize> = (1..self.coeffs.rows()).collect();
        ParamPiece {
            coeffs: self.coeffs.select_rows(&idx),
        }
    }
}

/// A point on a link: which piece, and the parameter on it.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkPoint<F: Field> {
    pub piece: usize,
    pub param: F::Elem,
}

/// A link of degree `r`: one rational normal curve, or a line meeting a
/// rational normal curve of degree `r − 1` at an internal node.
#[derive(Debug, Clone, PartialEq)]
pub struct Link<F: Field> {
    pieces: Vec<ParamPiece<F>>,
    internal_node: Option<(F::Elem, F::Elem)>,
}

impl<F: Field> Link<F> {
    pub fn smooth(piece: ParamPiece<F>) -> Self {
        Link {
            pieces: vec![piece],
            internal_node: None,
        }
    }

    /// `pieces[0] ∪ pieces[1]`, meeting at `pieces[0](node.0) = pieces[1](node.1)`.
    pub fn reducible(first: ParamPiece<F>, second: ParamPiece<F>, node: (F::Elem, F::Elem)) -> Result<Self> {
        check_dim(first.ambient(), second.ambient())?;
        if !proportional(first.field(), &first.eval(&node.0), &second.eval(&node.1)) {
            return Err(Error::InvalidChain("pieces do not meet at the internal node".into()));
        }
        Ok(Link {
            pieces: vec![first, second],
            internal_node: Some(node),
        })
    }

    pub fn pieces(&self) -> &[ParamPiece<F>] {
        &self.pieces
    }

    pub fn internal_node(&self) -> Option<&(F::Elem, F::Elem)> {
        self.internal_node.as_ref()
    }

    pub fn is_smooth(&self) -> bool {
        self.pieces.len() == 1
    }

    pub fn degree(&self) -> usize {
        self.pieces.iter().map(ParamPiece::degree).sum()
    }

    pub fn eval(&self, p: &LinkPoint<F>) -> Vec<F::Elem> {
        self.pieces[p.piece].eval(&p.param)
    }
}

/// An intersection point of consecutive links.
#[derive(Debug, Clone, PartialEq)]
pub struct Anchor<F: Field> {
    pub left: LinkPoint<F>,
    pub right: LinkPoint<F>,
    pub point: Vec<F::Elem>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Chain<F: Field> {
    field: F,
    r: usize,
    links: Vec<Link<F>>,
    anchors: Vec<Vec<Anchor<F>>>,
}

impl<F: Field> Chain<F> {
    /// Validates degrees, anchor counts and that every anchor lies on both
    /// adjacent links.
    pub fn new(field: &F, r: usize, links: Vec<Link<F>>, anchors: Vec<Vec<Anchor<F>>>) -> Result<Self> {
        if links.is_empty() {
            return Err(Error::InvalidChain("a chain needs at least one link".into()));
        }
        if anchors.len() + 1 != links.len() {
            return Err(Error::InvalidChain(format!(
                "{} links need {} anchor sets, found {}",
                links.len(),
                links.len() - 1,
                anchors.len()
            )));
        }
        for (i, link) in links.iter().enumerate() {
            if link.pieces.is_empty() || link.pieces.len() > 2 {
                return Err(Error::InvalidChain(format!("link {i} must have one or two pieces")));
            }
            if link.degree() != r || link.pieces.iter().any(|p| p.ambient() != r) {
                return Err(Error::InvalidChain(format!("link {i} is not a degree {r} curve in P^{r}")));
            }
        }
        for (i, set) in anchors.iter().enumerate() {
            if set.len() != r + 2 {
                return Err(Error::InvalidChain(format!(
                    "links {i} and {} share {} anchors, expected {}",
                    i + 1,
                    set.len(),
                    r + 2
                )));
            }
            for (k, a) in set.iter().enumerate() {
                let on_left = a.left.piece < links[i].pieces.len() && proportional(field, &links[i].eval(&a.left), &a.point);
                let on_right =
                    a.right.piece < links[i + 1].pieces.len() && proportional(field, &links[i + 1].eval(&a.right), &a.point);
                if !on_left || !on_right {
                    return Err(Error::InvalidChain(format!("anchor {k} between links {i} and {} is off the chain", i + 1)));
                }
            }
        }
        Ok(Chain {
            field: field.clone(),
            r,
            links,
            anchors,
        })
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    /// Dimension of the ambient projective space.
    pub fn r(&self) -> usize {
        self.r
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn links(&self) -> &[Link<F>] {
        &self.links
    }

    /// `anchors()[i]` lists `R_i ∩ R_{i+1}`.
    pub fn anchors(&self) -> &[Vec<Anchor<F>>] {
        &self.anchors
    }

    /// Links `i..=j` with their anchors.
    pub fn subchain(&self, i: usize, j: usize) -> Result<Self> {
        check_range(i, j, self.len())?;
        Ok(Chain {
            field: self.field.clone(),
            r: self.r,
            links: self.links[i..=j].to_vec(),
            anchors: self.anchors[i..j].to_vec(),
        })
    }

    pub fn to_record(&self) -> ChainRecord {
        let f = &self.field;
        let fmt_point = |p: &LinkPoint<F>| AnchorSide {
            piece: p.piece,
            param: f.format(&p.param),
        };
        ChainRecord {
            field: f.spec(),
            r: self.r,
            links: self
                .links
                .iter()
                .map(|l| LinkRecord {
                    pieces: l.pieces.iter().map(|p| p.coeffs.to_strings()).collect(),
                    internal_node: l.internal_node.as_ref().map(|(a, b)| [f.format(a), f.format(b)]),
                })
                .collect(),
            anchors: self
                .anchors
                .iter()
                .map(|set| {
                    set.iter()
                        .map(|a| AnchorRecord {
                            left: fmt_point(&a.left),
                            right: fmt_point(&a.right),
                            point: a.point.iter().map(|x| f.format(x)).collect(),
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn from_record(field: &F, rec: &ChainRecord) -> Result<Self> {
        let parse_side = |s: &AnchorSide| -> Result<LinkPoint<F>> {
            Ok(LinkPoint {
                piece: s.piece,
                param: field.parse(&s.param)?,
            })
        };
        let mut links = Vec::with_capacity(rec.links.len());
        for (i, l) in rec.links.iter().enumerate() {
            let mut pieces = Vec::with_capacity(l.pieces.len());
            for rows in &l.pieces {
                let cols = rows.first().map_or(0, Vec::len);
                if rows.len() != rec.r + 1 || rows.iter().any(|row| row.len() != cols) {
                    return Err(Error::InvalidChain(format!("link {i}: coefficient rows are ragged or not r+1 of them")));
                }
                let data = rows
                    .iter()
                    .map(|row| row.iter().map(|s| field.parse(s)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                pieces.push(ParamPiece::new(Matrix::from_rows(field, cols, data)?)?);
            }
            let link = match (pieces.len(), &l.internal_node) {
                (1, None) => Link::smooth(pieces.pop().expect("one piece")),
                (2, Some([a, b])) => {
                    let second = pieces.pop().expect("two pieces");
                    let first = pieces.pop().expect("two pieces");
                    Link::reducible(first, second, (field.parse(a)?, field.parse(b)?))?
                }
                _ => {
                    return Err(Error::InvalidChain(format!(
                        "link {i}: need one piece, or two pieces with an internal node"
                    )))
                }
            };
            links.push(link);
        }
        let anchors = rec
            .anchors
            .iter()
            .map(|set| {
                set.iter()
                    .map(|a| {
                        Ok(Anchor {
                            left: parse_side(&a.left)?,
                            right: parse_side(&a.right)?,
                            point: a.point.iter().map(|s| field.parse(s)).collect::<Result<Vec<_>>>()?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(field, rec.r, links, anchors)
    }
}

fn check_range(i: usize, j: usize, len: usize) -> Result<()> {
    if i > j || j >= len {
        return Err(Error::OutOfRange(format!("link range {i}..{j} is not inside 0..{}", len.saturating_sub(1))));
    }
    Ok(())
}

/// Whether two nonzero vectors span the same line.
pub fn proportional<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> bool {
    if a.len() != b.len() || a.iter().all(|x| f.is_zero(x)) || b.iter().all(|x| f.is_zero(x)) {
        return false;
    }
    (0..a.len()).all(|i| (i + 1..a.len()).all(|j| f.mul(&a[i], &b[j]) == f.mul(&a[j], &b[i])))
}

/// `dim MC_{r,n} = (r − 1)(r + 3) + (n − 1)(2r + 1)`.
pub fn mc_dimension(r: usize, n: usize) -> Result<usize> {
    if r < 3 || n < 1 {
        return Err(Error::OutOfRange(format!("need r >= 3 and n >= 1, got r={r}, n={n}")));
    }
    Ok((r - 1) * (r + 3) + (n - 1) * (2 * r + 1))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnchorSide {
    pub piece: usize,
    pub param: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnchorRecord {
    pub left: AnchorSide,
    pub right: AnchorSide,
    pub point: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkRecord {
    /// Per piece, the `r + 1` coefficient rows.
    pub pieces: Vec<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub internal_node: Option<[String; 2]>,
}

/// Serialized chain; all scalars are decimal strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainRecord {
    pub field: FieldSpec,
    pub r: usize,
    pub links: Vec<LinkRecord>,
    pub anchors: Vec<Vec<AnchorRecord>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::RationalField;

    #[test]
    fn mc_dimension_values() {
        assert_eq!(mc_dimension(3, 1).unwrap(), 12);
        assert_eq!(mc_dimension(3, 2).unwrap(), 19);
        assert_eq!(mc_dimension(4, 3).unwrap(), 39);
        assert!(mc_dimension(2, 1).is_err());
    }

    #[test]
    fn proportionality() {
        let q = RationalField;
        let a = vec![q.from_i64(1), q.from_i64(2)];
        let b = vec![q.from_i64(-3), q.from_i64(-6)];
        assert!(proportional(&q, &a, &b));
        assert!(!proportional(&q, &a, &[q.from_i64(1), q.from_i64(3)]));
        assert!(!proportional(&q, &a, &[q.zero(), q.zero()]));
    }

    #[test]
    fn line_pieces() {
        let q = RationalField;
        let a = vec![q.from_i64(1), q.from_i64(0), q.from_i64(2)];
        let b = vec![q.from_i64(0), q.from_i64(1), q.from_i64(1)];
        let l = ParamPiece::line(&q, &a, &b).unwrap();
        assert_eq!(l.degree(), 1);
        assert_eq!(l.eval(&q.zero()), a);
        assert_eq!(l.eval(&q.one()), b);
    }
}
