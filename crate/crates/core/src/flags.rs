//! Filtrations of fibers, directrix flags, modification and transport, and
//! the left/right flags of a bundle on a chain.

use serde::{Deserialize, Serialize};

use crate::chainbundle::GluedBundle;
use crate::error::{check_dim, Error, Result};
use crate::exactmath::{Field, Matrix, Subspace};

/// Degrees of the line-bundle summands, sorted descending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct SplittingType {
    exponents: Vec<i64>,
}

impl SplittingType {
    pub fn new(mut exponents: Vec<i64>) -> Result<Self> {
        if exponents.is_empty() {
            return Err(Error::EmptySplitting);
        }
        exponents.sort_unstable_by(|a, b| b.cmp(a));
        Ok(SplittingType { exponents })
    }

    /// `O(m)^a ⊕ O(m+1)^b`.
    pub fn balanced(m: i64, a: usize, b: usize) -> Result<Self> {
        let mut e = vec![m + 1; b];
        e.extend(std::iter::repeat_n(m, a));
        Self::new(e)
    }

    pub fn exponents(&self) -> &[i64] {
        &self.exponents
    }

    pub fn rank(&self) -> usize {
        self.exponents.len()
    }

    pub fn degree(&self) -> i64 {
        self.exponents.iter().sum()
    }

    pub fn max(&self) -> i64 {
        self.exponents[0]
    }

    pub fn min(&self) -> i64 {
        *self.exponents.last().expect("nonempty")
    }

    pub fn is_balanced(&self) -> bool {
        self.max() - self.min() <= 1
    }

    /// `h¹(End V) = Σ max(0, e_t − e_s − 1)` over ordered pairs.
    pub fn h1_end(&self) -> usize {
        let e = &self.exponents;
        e.iter()
            .flat_map(|s| e.iter().map(move |t| (t - s - 1).max(0) as usize))
            .sum()
    }

    /// `h⁰(End V) = Σ max(0, e_s − e_t + 1)` over ordered pairs.
    pub fn h0_end(&self) -> usize {
        let e = &self.exponents;
        e.iter()
            .flat_map(|s| e.iter().map(move |t| (s - t + 1).max(0) as usize))
            .sum()
    }
}

impl TryFrom<Vec<i64>> for SplittingType {
    type Error = Error;

    fn try_from(v: Vec<i64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SplittingType> for Vec<i64> {
    fn from(s: SplittingType) -> Self {
        s.exponents
    }
}

pub fn is_balanced_type(s: &SplittingType) -> bool {
    s.is_balanced()
}

/// A chain `0 = F^0 ⊊ F^1 ⊊ … ⊊ F^m = V`.
#[derive(Debug, Clone, PartialEq)]
pub struct Filtration<F: Field> {
    steps: Vec<Subspace<F>>,
}

impl<F: Field> Filtration<F> {
    /// Builds a filtration from nested steps, adding `0` and `V` and dropping
    /// repeated steps.
    pub fn new(field: &F, ambient: usize, steps: Vec<Subspace<F>>) -> Result<Self> {
        let mut out = vec![Subspace::zero(field, ambient)];
        for s in steps.into_iter().chain([Subspace::full(field, ambient)]) {
            check_dim(ambient, s.ambient_dim())?;
            let last = out.last().expect("nonempty");
            if !last.is_subspace_of(&s)? {
                return Err(Error::NotNested);
            }
            if s.dim() > last.dim() {
                out.push(s);
            }
        }
        Ok(Filtration { steps: out })
    }

    /// `{0 ⊂ V}`.
    pub fn trivial(field: &F, ambient: usize) -> Self {
        Filtration {
            steps: vec![Subspace::zero(field, ambient), Subspace::full(field, ambient)],
        }
    }

    /// The complete flag `⟨e_{σ(0)}⟩ ⊂ ⟨e_{σ(0)}, e_{σ(1)}⟩ ⊂ …`.
    pub fn coordinate(field: &F, order: &[usize]) -> Result<Self> {
        let n = order.len();
        let steps = (1..n).map(|i| Subspace::coordinate(field, n, &order[..i])).collect();
        Self::new(field, n, steps)
    }

    pub fn field(&self) -> &F {
        self.steps[0].field()
    }

    pub fn ambient_dim(&self) -> usize {
        self.steps[0].ambient_dim()
    }

    /// All steps, from `0` to `V`.
    pub fn steps(&self) -> &[Subspace<F>] {
        &self.steps
    }

    /// Dimensions of the steps.
    pub fn dims(&self) -> Vec<usize> {
        self.steps.iter().map(Subspace::dim).collect()
    }

    /// Number of proper nonzero steps.
    pub fn proper_len(&self) -> usize {
        self.steps.len() - 2
    }

    pub fn is_trivial(&self) -> bool {
        self.steps.len() == 2
    }

    pub fn has_step(&self, s: &Subspace<F>) -> bool {
        self.steps.iter().any(|t| t == s)
    }

    /// The flag carried along the linear isomorphism `g`.
    pub fn image(&self, g: &Matrix<F>) -> Result<Self> {
        let steps = self.steps.iter().map(|s| s.image(g)).collect::<Result<Vec<_>>>()?;
        Ok(Filtration { steps })
    }
}

/// The flag `{0 ⊂ W ⊂ V}` of a balanced splitting type; trivial when the
/// type is perfectly balanced.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectrixFlag<F: Field> {
    flag: Filtration<F>,
}

impl<F: Field> DirectrixFlag<F> {
    pub fn flag(&self) -> &Filtration<F> {
        &self.flag
    }

    /// `W`, or `None` for the trivial flag.
    pub fn subspace(&self) -> Option<&Subspace<F>> {
        (!self.flag.is_trivial()).then(|| &self.flag.steps[1])
    }

    /// Any two-step flag `{0 ⊂ B ⊂ V}`.
    pub fn from_subspace(b: Subspace<F>) -> Result<Self> {
        let field = b.field().clone();
        let n = b.ambient_dim();
        Ok(DirectrixFlag {
            flag: Filtration::new(&field, n, vec![b])?,
        })
    }
}

pub fn directrix<F: Field>(field: &F, s: &SplittingType) -> Result<DirectrixFlag<F>> {
    if !s.is_balanced() {
        return Err(Error::NotBalanced(s.exponents().to_vec()));
    }
    let top = s.max();
    // Summands are sorted descending, so the O(m+1) slots come first.
    let b = s.exponents().iter().take_while(|&&e| e == top).count();
    let w = if b == s.rank() {
        Subspace::full(field, s.rank())
    } else {
        Subspace::coordinate(field, s.rank(), &(0..b).collect::<Vec<_>>())
    };
    DirectrixFlag::from_subspace(w)
}

/// `F ∧ G`: the steps `F^i ∩ B` followed by `B + F^j`.
pub fn modify<F: Field>(f: &Filtration<F>, g: &DirectrixFlag<F>) -> Result<Filtration<F>> {
    check_dim(f.ambient_dim(), g.flag.ambient_dim())?;
    let Some(b) = g.subspace() else {
        return Ok(f.clone());
    };
    let mut steps = Vec::with_capacity(2 * f.steps.len());
    for s in &f.steps {
        steps.push(s.intersect(b)?);
    }
    for s in &f.steps {
        steps.push(b.sum(s)?);
    }
    Filtration::new(f.field(), f.ambient_dim(), steps)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// From the fiber at 0 to the fiber at ∞.
    Right,
    /// From the fiber at ∞ to the fiber at 0.
    Left,
}

/// Moves a filtration between the fibers at 0 and ∞ of a component.
///
/// In splitting coordinates both `PW` and `P(V/W)` are trivial, so the
/// representing subspaces do not change; only the precondition is checked.
pub fn transport<F: Field>(f: &Filtration<F>, s: &SplittingType, _direction: Direction) -> Result<Filtration<F>> {
    check_dim(s.rank(), f.ambient_dim())?;
    let d = directrix(f.field(), s)?;
    if let Some(w) = d.subspace() {
        if !f.has_step(w) {
            return Err(Error::FlagDoesNotContainDirectrix);
        }
    }
    Ok(f.clone())
}

/// Every pair of steps meets properly.
pub fn flags_transverse<F: Field>(f: &Filtration<F>, g: &Filtration<F>) -> Result<bool> {
    check_dim(f.ambient_dim(), g.ambient_dim())?;
    for a in &f.steps[1..f.steps.len() - 1] {
        for b in &g.steps[1..g.steps.len() - 1] {
            if !a.meets_properly(b)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Index of the first step of `f` containing `v`.
fn level<F: Field>(f: &Filtration<F>, v: &[F::Elem]) -> usize {
    f.steps
        .iter()
        .position(|s| s.contains_vector(v).expect("same ambient"))
        .expect("the last step is the whole space")
}

/// Writes `t = P − Q` with `P` preserving every step of `f` and `Q` every
/// step of `g`.
pub fn splitting_matrix_pair<F: Field>(
    f: &Filtration<F>,
    g: &Filtration<F>,
    t: &Matrix<F>,
) -> Result<(Matrix<F>, Matrix<F>)> {
    let n = f.ambient_dim();
    check_dim(n, g.ambient_dim())?;
    check_dim(n, t.rows())?;
    check_dim(n, t.cols())?;
    if !flags_transverse(f, g)? {
        return Err(Error::NotTransverse);
    }
    let field = f.field().clone();
    let (a, b) = (f.steps.len(), g.steps.len());

    // Basis adapted to both flags: for each cell F^i ∩ G^j, vectors
    // completing the span of the cells below and to the left.
    let mut cells: Vec<Vec<Subspace<F>>> = Vec::with_capacity(a);
    let mut basis: Vec<(usize, usize, Vec<F::Elem>)> = Vec::with_capacity(n);
    for i in 0..a {
        let mut row = Vec::with_capacity(b);
        for j in 0..b {
            let c = f.steps[i].intersect(&g.steps[j])?;
            if i > 0 && j > 0 {
                let below = cells[i - 1][j].sum(&row[j - 1])?;
                let rel = below.relative_to(&c)?;
                for v in rel.complement_basis() {
                    let w = c.basis().transpose().apply(&v)?;
                    basis.push((i, j, w));
                }
            }
            row.push(c);
        }
        cells.push(row);
    }
    check_dim(n, basis.len())?;

    let vmat = Matrix::from_fn(&field, n, n, |r, c| basis[c].2[r].clone());
    let vinv = vmat.inverse()?;
    let tp = vinv.mul(t)?.mul(&vmat)?;
    let p_adapted = Matrix::from_fn(&field, n, n, |r, c| {
        if basis[r].0 <= basis[c].0 {
            tp.get(r, c).clone()
        } else {
            field.zero()
        }
    });
    let p = vmat.mul(&p_adapted)?.mul(&vinv)?;
    let q = p.sub(t)?;
    for s in &f.steps {
        debug_assert!(s.image(&p)?.is_subspace_of(s)?);
    }
    for s in &g.steps {
        if !s.image(&q)?.is_subspace_of(s)? {
            return Err(Error::NotTransverse);
        }
    }
    debug_assert!(basis.iter().all(|(i, j, v)| level(f, v) == *i && level(g, v) == *j));
    Ok((p, q))
}

/// `L•_j` at every node `j`, in the coordinates of `V_{j+1}` at 0.
pub fn left_flags<F: Field>(b: &GluedBundle<F>) -> Result<Vec<Filtration<F>>> {
    let comps = b.components();
    check_balanced(comps)?;
    let field = b.field();
    let mut out = Vec::with_capacity(b.node_count());
    let mut current = directrix(field, &comps[0])?.flag;
    for j in 0..b.node_count() {
        let at_inf = transport(&current, &comps[j], Direction::Right)?;
        let crossed = at_inf.image(&b.gluings()[j])?;
        out.push(crossed.clone());
        current = modify(&crossed, &directrix(field, &comps[j + 1])?)?;
    }
    Ok(out)
}

/// `R•_j` at every node `j`, in the coordinates of `V_{j+1}` at 0.
pub fn right_flags<F: Field>(b: &GluedBundle<F>) -> Result<Vec<Filtration<F>>> {
    let comps = b.components();
    check_balanced(comps)?;
    let field = b.field();
    let nodes = b.node_count();
    let mut out = vec![None; nodes];
    if nodes == 0 {
        return Ok(Vec::new());
    }
    let last = comps.len() - 1;
    let mut current = directrix(field, &comps[last])?.flag;
    for j in (0..nodes).rev() {
        let at_zero = transport(&current, &comps[j + 1], Direction::Left)?;
        out[j] = Some(at_zero.clone());
        if j > 0 {
            let crossed = at_zero.image(&b.gluing_inverses()[j])?;
            current = modify(&crossed, &directrix(field, &comps[j])?)?;
        }
    }
    Ok(out.into_iter().map(|f| f.expect("filled")).collect())
}

fn check_balanced(comps: &[SplittingType]) -> Result<()> {
    match comps.iter().position(|s| !s.is_balanced()) {
        Some(i) => Err(Error::ComponentNotBalanced(i)),
        None => Ok(()),
    }
}
