//! Vector bundles on chains of projective lines.
//!
//! Component `i` carries a split bundle `V_i = ⊕ O(e)` written in splitting
//! coordinates; the gluing `g_i` identifies the fiber of `V_i` at ∞ with the
//! fiber of `V_{i+1}` at 0. Cohomology comes from the normalization sequence,
//! whose connecting map is the difference map below.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::exactmath::{dual_intersect_flat, Field, FieldSpec, Matrix, Subspace};
use crate::flags::{flags_transverse, left_flags, right_flags, SplittingType};

#[derive(Debug, Clone, PartialEq)]
pub struct GluedBundle<F: Field> {
    field: F,
    components: Vec<SplittingType>,
    gluings: Vec<Matrix<F>>,
    gluing_inverses: Vec<Matrix<F>>,
}

impl<F: Field> GluedBundle<F> {
    pub fn new(field: &F, components: Vec<SplittingType>, gluings: Vec<Matrix<F>>) -> Result<Self> {
        let Some(first) = components.first() else {
            return Err(Error::InvalidBundle("a bundle needs at least one component".into()));
        };
        let r = first.rank();
        if let Some(i) = components.iter().position(|c| c.rank() != r) {
            return Err(Error::InvalidBundle(format!(
                "component {i} has rank {} but component 0 has rank {r}",
                components[i].rank()
            )));
        }
        if gluings.len() + 1 != components.len() {
            return Err(Error::InvalidBundle(format!(
                "{} components need {} gluings, found {}",
                components.len(),
                components.len() - 1,
                gluings.len()
            )));
        }
        let mut gluing_inverses = Vec::with_capacity(gluings.len());
        for (i, g) in gluings.iter().enumerate() {
            if g.rows() != r || g.cols() != r {
                return Err(Error::InvalidBundle(format!("gluing {i} is not {r}x{r}")));
            }
            let inv = g
                .inverse()
                .map_err(|_| Error::InvalidBundle(format!("gluing {i} is singular")))?;
            gluing_inverses.push(inv);
        }
        Ok(GluedBundle {
            field: field.clone(),
            components,
            gluings,
            gluing_inverses,
        })
    }

    /// All gluings the identity.
    pub fn with_identity_gluings(field: &F, components: Vec<SplittingType>) -> Result<Self> {
        let r = components.first().map_or(0, SplittingType::rank);
        let gluings = vec![Matrix::identity(field, r); components.len().saturating_sub(1)];
        Self::new(field, components, gluings)
    }

    pub fn random<R: rand::Rng + ?Sized>(field: &F, components: Vec<SplittingType>, rng: &mut R) -> Result<Self> {
        let r = components.first().map_or(0, SplittingType::rank);
        let gluings = (1..components.len())
            .map(|_| Matrix::random_invertible(field, r, rng))
            .collect();
        Self::new(field, components, gluings)
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn components(&self) -> &[SplittingType] {
        &self.components
    }

    pub fn gluings(&self) -> &[Matrix<F>] {
        &self.gluings
    }

    pub fn gluing_inverses(&self) -> &[Matrix<F>] {
        &self.gluing_inverses
    }

    pub fn rank(&self) -> usize {
        self.components[0].rank()
    }

    pub fn node_count(&self) -> usize {
        self.gluings.len()
    }

    pub fn degree(&self) -> i64 {
        self.components.iter().map(SplittingType::degree).sum()
    }

    pub fn to_record(&self) -> BundleRecord {
        BundleRecord {
            field: self.field.spec(),
            components: self.components.iter().map(|c| c.exponents().to_vec()).collect(),
            gluings: self
                .gluings
                .iter()
                .map(|g| g.as_slice().iter().map(|x| self.field.format(x)).collect())
                .collect(),
        }
    }

    /// Reads a record over `field`; the record's own field tag is not checked.
    pub fn from_record(field: &F, rec: &BundleRecord) -> Result<Self> {
        let components = rec
            .components
            .iter()
            .map(|c| SplittingType::new(c.clone()))
            .collect::<Result<Vec<_>>>()?;
        let r = components.first().map_or(0, SplittingType::rank);
        let gluings = rec
            .gluings
            .iter()
            .enumerate()
            .map(|(i, g)| {
                if g.len() != r * r {
                    return Err(Error::InvalidBundle(format!(
                        "gluing {i} has {} entries, expected {}",
                        g.len(),
                        r * r
                    )));
                }
                let data = g.iter().map(|s| field.parse(s)).collect::<Result<Vec<_>>>()?;
                Matrix::from_vec(field, r, r, data)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(field, components, gluings)
    }
}

/// Serialized bundle: gluings as row-major decimal strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleRecord {
    pub field: FieldSpec,
    pub components: Vec<Vec<i64>>,
    pub gluings: Vec<Vec<String>>,
}

/// A global section of `End V_i`, recorded by its values at 0 and ∞.
#[derive(Debug, Clone, PartialEq)]
pub struct EndSection<F: Field> {
    pub at_zero: Matrix<F>,
    pub at_infinity: Matrix<F>,
}

/// Monomial basis of `H⁰(End V)` for a split `V`: entry `(s, t)` is a
/// polynomial of degree `e_s − e_t` when that is nonnegative. Ordered by
/// entry (row-major), then by ascending monomial degree.
pub fn h0_end_component<F: Field>(field: &F, s: &SplittingType) -> Vec<EndSection<F>> {
    let e = s.exponents();
    let r = e.len();
    let mut out = Vec::with_capacity(s.h0_end());
    for i in 0..r {
        for j in 0..r {
            let delta = e[i] - e[j];
            for m in 0..=delta {
                let mut at_zero = Matrix::zeros(field, r, r);
                let mut at_infinity = Matrix::zeros(field, r, r);
                if m == 0 {
                    at_zero.set(i, j, field.one());
                }
                if m == delta {
                    at_infinity.set(i, j, field.one());
                }
                out.push(EndSection { at_zero, at_infinity });
            }
        }
    }
    out
}

/// Rows: sections of `⊕ End V_i`; columns: the `r²` entries of each node in
/// turn. A section `M` of component `i` contributes `g_i M|∞ g_i⁻¹` at node
/// `i` and `−M|₀` at node `i − 1`.
pub fn difference_map<F: Field>(b: &GluedBundle<F>) -> Matrix<F> {
    let f = &b.field;
    let r = b.rank();
    let r2 = r * r;
    let nodes = b.node_count();
    let mut rows: Vec<Vec<F::Elem>> = Vec::new();
    for (i, comp) in b.components.iter().enumerate() {
        for sec in h0_end_component(f, comp) {
            let mut row = vec![f.zero(); nodes * r2];
            if i < nodes {
                let conj = b.gluings[i]
                    .mul(&sec.at_infinity)
                    .and_then(|m| m.mul(&b.gluing_inverses[i]))
                    .expect("square matrices of equal size");
                row[i * r2..(i + 1) * r2].clone_from_slice(conj.as_slice());
            }
            if i > 0 {
                for (x, y) in row[(i - 1) * r2..i * r2].iter_mut().zip(sec.at_zero.as_slice()) {
                    *x = f.sub(x, y);
                }
            }
            rows.push(row);
        }
    }
    Matrix::from_rows(f, nodes * r2, rows).expect("rows have node-block length")
}

/// `h⁰(End V) = Σ h⁰(End V_i) − rank D`.
pub fn h0_end<F: Field>(b: &GluedBundle<F>) -> usize {
    let sections: usize = b.components.iter().map(SplittingType::h0_end).sum();
    sections - difference_map(b).rank()
}

/// `h¹(End V) = corank D + Σ h¹(End V_i)`.
pub fn h1_end<F: Field>(b: &GluedBundle<F>) -> usize {
    let r = b.rank();
    let coker = b.node_count() * r * r - difference_map(b).rank();
    coker + b.components.iter().map(SplittingType::h1_end).sum::<usize>()
}

/// Both numbers from a single rank computation.
pub fn end_cohomology<F: Field>(b: &GluedBundle<F>) -> (usize, usize) {
    let r = b.rank();
    let rank = difference_map(b).rank();
    let h0: usize = b.components.iter().map(SplittingType::h0_end).sum::<usize>() - rank;
    let h1 = b.node_count() * r * r - rank + b.components.iter().map(SplittingType::h1_end).sum::<usize>();
    (h0, h1)
}

/// `h¹(End V) = 0`, computed directly.
pub fn is_balanced_direct<F: Field>(b: &GluedBundle<F>) -> bool {
    h1_end(b) == 0
}

/// Balanced components with transverse left and right flags at every node.
pub fn is_balanced_criteria<F: Field>(b: &GluedBundle<F>) -> bool {
    if b.components.iter().any(|c| !c.is_balanced()) {
        return false;
    }
    let left = left_flags(b).expect("components are balanced");
    let right = right_flags(b).expect("components are balanced");
    left.iter()
        .zip(&right)
        .all(|(l, r)| flags_transverse(l, r).expect("same ambient"))
}

/// An endomorphism `M` for which `A[ε] ∩ (I + εM)B[ε]` is not flat.
///
/// Takes `c ∈ A ∩ B` and `w ∉ A + B`, both nonzero, and sends `c ↦ w` while
/// killing the rest of a basis adapted to `A ∩ B ⊆ A, B ⊆ A + B`. Falls back
/// to random matrices if that ever fails to separate.
pub fn separating_endomorphism<F: Field>(a: &Subspace<F>, b: &Subspace<F>) -> Result<Matrix<F>> {
    check_dim(a.ambient_dim(), b.ambient_dim())?;
    if a.meets_properly(b)? {
        return Err(Error::SubspacesMeetProperly);
    }
    let f = a.field().clone();
    let r = a.ambient_dim();
    let ab = a.intersect(b)?;
    let sum = a.sum(b)?;

    let mut basis: Vec<Vec<F::Elem>> = ab.basis().row_vecs().map(<[_]>::to_vec).collect();
    for part in [a, b, &sum] {
        extend_basis(&f, r, &mut basis, part)?;
    }
    extend_basis(&f, r, &mut basis, &Subspace::full(&f, r))?;
    let w = basis[sum.dim()].clone();

    // M = [w 0 … 0] · P⁻¹ with P the adapted basis as columns.
    let p = Matrix::from_fn(&f, r, r, |i, j| basis[j][i].clone());
    let image = Matrix::from_fn(&f, r, r, |i, j| if j == 0 { w[i].clone() } else { f.zero() });
    let m = image.mul(&p.inverse()?)?;
    if !dual_intersect_flat(a, b, &m)?.1 {
        return Ok(m);
    }
    let mut rng = crate::rng::stream_rng(0, 0);
    for _ in 0..64 {
        let m = Matrix::random(&f, r, r, &mut rng);
        if !dual_intersect_flat(a, b, &m)?.1 {
            return Ok(m);
        }
    }
    Err(Error::GenericityExhausted(65))
}

/// Appends vectors of `target` to `basis` until it spans `target` plus the
/// old span.
fn extend_basis<F: Field>(f: &F, r: usize, basis: &mut Vec<Vec<F::Elem>>, target: &Subspace<F>) -> Result<()> {
    let mut span = Subspace::span(f, r, basis.clone())?;
    for v in target.basis().row_vecs() {
        if !span.contains_vector(v)? {
            basis.push(v.to_vec());
            span = Subspace::span(f, r, basis.clone())?;
        }
    }
    Ok(())
}

/// Whether the first-order deformation with node matrices `(0, …, M, …, 0)`
/// is not a coboundary, i.e. lies outside the image of the difference map.
pub fn deformation_is_nontrivial<F: Field>(b: &GluedBundle<F>, node: usize, m: &Matrix<F>) -> Result<bool> {
    let nodes = b.node_count();
    if node >= nodes {
        return Err(Error::IndexOutOfRange { index: node, len: nodes });
    }
    let r = b.rank();
    check_dim(r, m.rows())?;
    check_dim(r, m.cols())?;
    let d = difference_map(b);
    let mut row = vec![b.field.zero(); nodes * r * r];
    row[node * r * r..(node + 1) * r * r].clone_from_slice(m.as_slice());
    let extended = d.vstack(&Matrix::from_rows(&b.field, nodes * r * r, vec![row])?)?;
    Ok(extended.rank() > d.rank())
}

/// Sections of `⊕ V_i` against the node fibers: a section of `O(e)` is a
/// polynomial of degree at most `e`, with value at ∞ its `t^e` coefficient.
fn section_difference_map<F: Field>(b: &GluedBundle<F>) -> Matrix<F> {
    let f = &b.field;
    let r = b.rank();
    let nodes = b.node_count();
    let mut rows = Vec::new();
    for (i, comp) in b.components.iter().enumerate() {
        for (slot, &e) in comp.exponents().iter().enumerate() {
            for m in 0..=e {
                let mut row = vec![f.zero(); nodes * r];
                if i < nodes && m == e {
                    row[i * r..(i + 1) * r].clone_from_slice(&b.gluings[i].column(slot));
                }
                if i > 0 && m == 0 {
                    row[(i - 1) * r + slot] = f.neg(&f.one());
                }
                rows.push(row);
            }
        }
    }
    Matrix::from_rows(f, nodes * r, rows).expect("rows have node-block length")
}

fn line_h0(e: i64) -> usize {
    (e + 1).max(0) as usize
}

fn line_h1(e: i64) -> usize {
    (-e - 1).max(0) as usize
}

pub fn h0_bundle<F: Field>(b: &GluedBundle<F>) -> usize {
    let sections: usize = b.components.iter().flat_map(|c| c.exponents().iter().map(|&e| line_h0(e))).sum();
    sections - section_difference_map(b).rank()
}

pub fn h1_bundle<F: Field>(b: &GluedBundle<F>) -> usize {
    let local: usize = b.components.iter().flat_map(|c| c.exponents().iter().map(|&e| line_h1(e))).sum();
    b.node_count() * b.rank() - section_difference_map(b).rank() + local
}
