//! The second syzygy bundle `F` of a degree `d` cover of a chain of lines.
//!
//! For a cover whose relative canonical model is a chain of rational normal
//! curves of degree `d − 2` in `P^{d−2}`, the fiber of `F` over a point is
//! the space of quadrics through the `d` points above it. Everything here
//! lives inside the space `S` of quadrics on `P^{d−2}`, in monomial
//! coordinates; node fibers are written in their own canonical bases when a
//! `Filtration` is needed.

use serde::{Deserialize, Serialize};

use crate::chainbundle::{h1_end, GluedBundle};
use crate::error::{Error, Result};
use crate::exactmath::{Field, Matrix, Poly, Subspace};
use crate::flags::{flags_transverse, modify, DirectrixFlag, Filtration, SplittingType};
use crate::projchain::quadrics::{first_non_generic_range, pullback_matrix};
use crate::projchain::{has_transverse_residues, Chain};

fn binom2(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// `rk N_i` in the relative resolution of a degree `d` cover.
pub fn ce_rank(d: usize, i: usize) -> Result<usize> {
    if d < 3 || i < 1 || i > d - 2 {
        return Err(Error::OutOfRange(format!("need 3 <= d and 1 <= i <= d-2, got d={d}, i={i}")));
    }
    if i == d - 2 {
        return Ok(1);
    }
    Ok(i * (d - 2 - i) * binomial(d, i + 1) / (d - 1))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CEInvariants {
    pub d: usize,
    pub g: usize,
    pub rank_e: usize,
    pub degree_e: i64,
    pub rank_f: usize,
    pub degree_f: i64,
    /// `rk N_i` for `i = 1..=d−2`.
    pub syzygy_ranks: Vec<usize>,
}

pub fn f_invariants(d: usize, g: usize) -> Result<CEInvariants> {
    if d < 3 {
        return Err(Error::OutOfRange(format!("need d >= 3, got {d}")));
    }
    let (di, gi) = (d as i64, g as i64);
    Ok(CEInvariants {
        d,
        g,
        rank_e: d - 1,
        degree_e: gi + di - 1,
        rank_f: d * (d - 3) / 2,
        degree_f: (di - 3) * (gi + di - 1),
        syzygy_ranks: (1..=d - 2).map(|i| ce_rank(d, i)).collect::<Result<_>>()?,
    })
}

/// `(a, b)` with `g = (a − 1)(d − 1) + b·d`.
pub fn genus_decompose(g: usize, d: usize) -> Result<(usize, usize)> {
    if d < 3 {
        return Err(Error::OutOfRange(format!("need d >= 3, got {d}")));
    }
    let least = (d - 3) * (d - 1);
    if g < least {
        return Err(Error::OutOfRange(format!("genus {g} is below (d-3)(d-1) = {least}")));
    }
    let (q, rem) = (g / (d - 1), g % (d - 1));
    Ok((q + 1 - rem, rem))
}

/// Arithmetic genus of a degree `d` admissible cover of a chain of `n`
/// lines whose components over the lines have the given genera.
pub fn admissible_genus(d: usize, genera: &[i64], n: usize) -> i64 {
    1 + genera.iter().map(|g| g - 1).sum::<i64>() + d as i64 * (n as i64 - 1)
}

/// Splitting types of `E` and `F` for a general cover of genus 0 or 1.
/// `F` is `None` when it has rank zero (`d = 3`).
pub fn low_genus_splittings(d: usize, genus: usize) -> Result<(SplittingType, Option<SplittingType>)> {
    if d < 3 {
        return Err(Error::OutOfRange(format!("need d >= 3, got {d}")));
    }
    let rank_f = d * (d - 3) / 2;
    let (e, f) = match genus {
        0 => {
            let mut f = vec![1; d - 3];
            f.extend(std::iter::repeat_n(2, binom2(d - 2)));
            (vec![1; d - 1], f)
        }
        1 => {
            let mut e = vec![1; d - 2];
            e.push(2);
            (e, vec![2; rank_f])
        }
        _ => return Err(Error::OutOfRange(format!("genus must be 0 or 1, got {genus}"))),
    };
    let f = if f.is_empty() { None } else { Some(SplittingType::new(f)?) };
    Ok((SplittingType::new(e)?, f))
}

fn chain_degree<F: Field>(c: &Chain<F>) -> usize {
    c.r() + 2
}

fn check_node<F: Field>(c: &Chain<F>, j: usize) -> Result<()> {
    let len = c.anchors().len();
    if j >= len {
        return Err(Error::IndexOutOfRange { index: j, len });
    }
    Ok(())
}

fn smooth_piece_matrix<F: Field>(c: &Chain<F>, i: usize) -> Result<Matrix<F>> {
    let len = c.len();
    let link = c.links().get(i).ok_or(Error::IndexOutOfRange { index: i, len })?;
    if !link.is_smooth() {
        return Err(Error::ReducibleLink(i));
    }
    Ok(pullback_matrix(&link.pieces()[0]))
}

/// Quadrics through the `d` anchor points of node `j`, of dimension `d(d−3)/2`.
pub fn f_node_fiber<F: Field>(c: &Chain<F>, j: usize) -> Result<Subspace<F>> {
    check_node(c, j)?;
    let f = c.field();
    let d = chain_degree(c);
    let monomials = crate::projchain::quadric_monomials(c.r());
    let points: Vec<&Vec<F::Elem>> = c.anchors()[j].iter().map(|a| &a.point).collect();
    let eval = Matrix::from_fn(f, monomials.len(), points.len(), |m, k| {
        let (a, b) = monomials[m];
        f.mul(&points[k][a], &points[k][b])
    });
    let fiber = eval.left_kernel();
    expect_dim(&fiber, d * (d - 3) / 2, format!("fiber at node {j}"))?;
    Ok(fiber)
}

/// Quadrics containing link `i`, of dimension `binom(d − 2, 2)`.
pub fn f_directrix<F: Field>(c: &Chain<F>, i: usize) -> Result<Subspace<F>> {
    let w = smooth_piece_matrix(c, i)?.left_kernel();
    expect_dim(&w, binom2(chain_degree(c) - 2), format!("directrix of link {i}"))?;
    Ok(w)
}

fn expect_dim<F: Field>(s: &Subspace<F>, expected: usize, what: String) -> Result<()> {
    if s.dim() == expected {
        Ok(())
    } else {
        Err(Error::UnexpectedDimension {
            what,
            expected,
            found: s.dim(),
        })
    }
}

/// The divisor that anchor set `node` cuts on link `link`, as a polynomial
/// in the link's parameter.
fn anchor_poly<F: Field>(c: &Chain<F>, link: usize, node: usize) -> Poly<F> {
    let roots: Vec<F::Elem> = c.anchors()[node]
        .iter()
        .map(|a| if node + 1 == link { a.right.param.clone() } else { a.left.param.clone() })
        .collect();
    Poly::from_roots(c.field(), &roots)
}

/// Per-chain data shared by the flag computations.
struct Model<F: Field> {
    fibers: Vec<Subspace<F>>,
    directrices: Vec<Subspace<F>>,
    restrictions: Vec<Matrix<F>>,
}

impl<F: Field> Model<F> {
    fn new(c: &Chain<F>) -> Result<Self> {
        if c.r() < 3 {
            return Err(Error::OutOfRange(format!("need d >= 5, got {}", chain_degree(c))));
        }
        Ok(Model {
            fibers: (0..c.anchors().len()).map(|j| f_node_fiber(c, j)).collect::<Result<_>>()?,
            directrices: (0..c.len()).map(|i| f_directrix(c, i)).collect::<Result<_>>()?,
            restrictions: (0..c.len()).map(|i| smooth_piece_matrix(c, i)).collect::<Result<_>>()?,
        })
    }

    /// Moves a subspace of the fiber at node `from` along link `link` to the
    /// fiber at node `to`.
    ///
    /// Steps inside the directrix stay put. A step `N ⊇ W` is sent through
    /// `ρ(N) / f_from`, the sections of `O(d − 4)` on the link, and back via
    /// multiplication by `f_to`.
    fn transport(&self, c: &Chain<F>, step: &Subspace<F>, link: usize, from: usize, to: usize) -> Result<Subspace<F>> {
        let w = &self.directrices[link];
        if step.is_subspace_of(w)? {
            return Ok(step.clone());
        }
        if !w.is_subspace_of(step)? {
            return Err(Error::FlagDoesNotContainDirectrix);
        }
        let f = c.field();
        let rho = &self.restrictions[link];
        let width = rho.cols();
        let f_from = anchor_poly(c, link, from);
        let f_to = anchor_poly(c, link, to);
        let restricted = step.basis().mul(rho)?;
        let mut images = Vec::with_capacity(restricted.rows());
        for row in restricted.row_vecs() {
            let g = Poly::new(f, row.to_vec()).exact_divide(&f_from)?;
            images.push(g.mul(&f_to).padded(width));
        }
        let target = Subspace::span(f, width, images)?;
        let moved = target.preimage(&rho.transpose())?;
        expect_dim(&moved, step.dim(), format!("transport along link {link}"))?;
        Ok(moved)
    }

    fn relative(&self, node: usize, steps: &[Subspace<F>]) -> Result<Filtration<F>> {
        let fiber = &self.fibers[node];
        let rel = steps.iter().map(|s| s.relative_to(fiber)).collect::<Result<Vec<_>>>()?;
        Filtration::new(fiber.field(), fiber.dim(), rel)
    }

    fn absolute(&self, node: usize, flag: &Filtration<F>) -> Result<Vec<Subspace<F>>> {
        let fiber = &self.fibers[node];
        let steps = flag.steps();
        steps[1..steps.len() - 1].iter().map(|s| s.embed_into(fiber)).collect()
    }

    fn directrix_at(&self, node: usize, link: usize) -> Result<DirectrixFlag<F>> {
        DirectrixFlag::from_subspace(self.directrices[link].relative_to(&self.fibers[node])?)
    }

    fn left_flags(&self, c: &Chain<F>) -> Result<Vec<Filtration<F>>> {
        let nodes = c.anchors().len();
        let mut out: Vec<Filtration<F>> = Vec::with_capacity(nodes);
        for j in 0..nodes {
            let flag = if j == 0 {
                self.relative(0, &[self.directrices[0].clone()])?
            } else {
                let modified = modify(&out[j - 1], &self.directrix_at(j - 1, j)?)?;
                let steps = self
                    .absolute(j - 1, &modified)?
                    .iter()
                    .map(|s| self.transport(c, s, j, j - 1, j))
                    .collect::<Result<Vec<_>>>()?;
                self.relative(j, &steps)?
            };
            out.push(flag);
        }
        Ok(out)
    }

    fn right_flags(&self, c: &Chain<F>) -> Result<Vec<Filtration<F>>> {
        let nodes = c.anchors().len();
        let mut out: Vec<Option<Filtration<F>>> = vec![None; nodes];
        for j in (0..nodes).rev() {
            let flag = if j + 1 == nodes {
                self.relative(j, &[self.directrices[j + 1].clone()])?
            } else {
                let prev = out[j + 1].as_ref().expect("filled");
                let modified = modify(prev, &self.directrix_at(j + 1, j + 1)?)?;
                let steps = self
                    .absolute(j + 1, &modified)?
                    .iter()
                    .map(|s| self.transport(c, s, j + 1, j + 1, j))
                    .collect::<Result<Vec<_>>>()?;
                self.relative(j, &steps)?
            };
            out[j] = Some(flag);
        }
        Ok(out.into_iter().map(|f| f.expect("filled")).collect())
    }

    /// Frame of the fiber at node `node` seen from link `link`: the
    /// directrix basis, then lifts of `t^k · f_node` for `k < d − 3`.
    fn frame(&self, c: &Chain<F>, link: usize, node: usize) -> Result<Matrix<F>> {
        let f = c.field();
        let fiber = &self.fibers[node];
        let rho_t = self.restrictions[link].transpose();
        let width = rho_t.rows();
        let f_node = anchor_poly(c, link, node);
        let mut vectors: Vec<Vec<F::Elem>> = self.directrices[link].basis().row_vecs().map(<[_]>::to_vec).collect();
        for k in 0..chain_degree(c) - 3 {
            let mut shift = vec![f.zero(); k + 1];
            shift[k] = f.one();
            let target = Poly::new(f, shift).mul(&f_node).padded(width);
            let lift = rho_t
                .solve(&target)?
                .ok_or_else(|| Error::DegeneratePosition(format!("no quadric restricts to t^{k} f on link {link}")))?;
            vectors.push(lift);
        }
        let coords = vectors
            .iter()
            .map(|v| {
                fiber.coordinates_of(v)?.ok_or_else(|| Error::DegeneratePosition(format!("frame vector off the fiber at node {node}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let n = fiber.dim();
        Ok(Matrix::from_fn(f, n, n, |r, col| coords[col][r].clone()))
    }

    fn glued_bundle(&self, c: &Chain<F>) -> Result<GluedBundle<F>> {
        let d = chain_degree(c);
        let mut exps = vec![2; binom2(d - 2)];
        exps.extend(std::iter::repeat_n(1, d - 3));
        let component = SplittingType::new(exps)?;
        let gluings = (0..c.anchors().len())
            .map(|j| self.frame(c, j + 1, j)?.inverse()?.mul(&self.frame(c, j, j)?))
            .collect::<Result<Vec<_>>>()?;
        GluedBundle::new(c.field(), vec![component; c.len()], gluings)
    }
}

fn require_generic<F: Field>(c: &Chain<F>) -> Result<()> {
    if let Some((i, j)) = first_non_generic_range(c) {
        return Err(Error::PreconditionFailed(format!("chain is not quadric-generic on links {i}..={j}")));
    }
    if !has_transverse_residues(c)? {
        return Err(Error::PreconditionFailed("chain does not have transverse residues".into()));
    }
    Ok(())
}

/// Left flags of `F` at every node, in the canonical basis of the node fiber.
pub fn f_left_flags<F: Field>(c: &Chain<F>) -> Result<Vec<Filtration<F>>> {
    require_generic(c)?;
    Model::new(c)?.left_flags(c)
}

/// Right flags of `F` at every node, in the canonical basis of the node fiber.
pub fn f_right_flags<F: Field>(c: &Chain<F>) -> Result<Vec<Filtration<F>>> {
    require_generic(c)?;
    Model::new(c)?.right_flags(c)
}

/// `F` as a glued bundle with components `O(2)^{binom(d−2,2)} ⊕ O(1)^{d−3}`.
///
/// Component `i` is spanned by the directrix of link `i` and the sections
/// `t ↦ q⁰_k + t·q^∞_k`, where `q⁰_k, q^∞_k` restrict to `s^k` times the
/// two anchor divisors on the link.
pub fn f_glued_bundle<F: Field>(c: &Chain<F>) -> Result<GluedBundle<F>> {
    Model::new(c)?.glued_bundle(c)
}

/// Largest `rk F` for which `is_f_balanced` also runs the direct `h¹(End F)`
/// computation by default.
pub const DIRECT_RANK_LIMIT: usize = 14;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FDims {
    pub fiber: usize,
    pub directrix: usize,
    /// Step dimensions of the left and right flags at each node.
    pub left: Vec<Vec<usize>>,
    pub right: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FReport {
    pub d: usize,
    pub a: usize,
    pub quadric_generic: bool,
    pub transverse_residues: bool,
    pub flags_transverse_per_node: Vec<bool>,
    /// Flag transversality at every node.
    pub verdict: bool,
    /// `h¹(End F) = 0` on the glued model, when computed.
    pub direct: Option<bool>,
    /// Verdict, genericity predicates and direct route all agree.
    pub agreement: bool,
    pub first_failure: Option<usize>,
    pub dims: FDims,
}

/// Decides whether `F` is balanced on the chain, by flags and by the
/// quadric-genericity predicates, and reports both.
pub fn is_f_balanced<F: Field>(c: &Chain<F>) -> Result<(bool, FReport)> {
    let d = chain_degree(c);
    is_f_balanced_with(c, d * (d - 3) / 2 <= DIRECT_RANK_LIMIT)
}

pub fn is_f_balanced_with<F: Field>(c: &Chain<F>, direct: bool) -> Result<(bool, FReport)> {
    let d = chain_degree(c);
    let model = Model::new(c)?;
    let quadric_generic = first_non_generic_range(c).is_none();
    let transverse_residues = has_transverse_residues(c)?;
    let left = model.left_flags(c)?;
    let right = model.right_flags(c)?;
    let per_node = left
        .iter()
        .zip(&right)
        .map(|(l, r)| flags_transverse(l, r))
        .collect::<Result<Vec<_>>>()?;
    let verdict = per_node.iter().all(|&t| t);
    let direct = if direct {
        Some(h1_end(&model.glued_bundle(c)?) == 0)
    } else {
        None
    };
    let predicted = quadric_generic && transverse_residues;
    let report = FReport {
        d,
        a: c.len(),
        quadric_generic,
        transverse_residues,
        first_failure: per_node.iter().position(|&t| !t),
        flags_transverse_per_node: per_node,
        verdict,
        direct,
        agreement: verdict == predicted && direct.is_none_or(|b| b == verdict),
        dims: FDims {
            fiber: d * (d - 3) / 2,
            directrix: binom2(d - 2),
            left: left.iter().map(Filtration::dims).collect(),
            right: right.iter().map(Filtration::dims).collect(),
        },
    };
    Ok((verdict, report))
}
