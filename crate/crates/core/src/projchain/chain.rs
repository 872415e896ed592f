use rand::Rng;

use crate::error::{Error, Result};
use crate::exactmath::{Field, Matrix, Poly};
use crate::rng::stream_rng;

use super::{rnc_through, Anchor, Chain, Link, LinkPoint, ParamPiece};

/// Attempts before a random construction gives up.
pub const MAX_ATTEMPTS: usize = 8;

/// Draws limit before a parameter search counts as degenerate; only reached
/// when the field has barely more elements than the parameters needed.
const PARAM_DRAWS: usize = 64;

fn fresh_param<F: Field, R: Rng + ?Sized>(f: &F, rng: &mut R, used: &mut Vec<F::Elem>) -> Result<F::Elem> {
    for _ in 0..PARAM_DRAWS {
        let t = f.random(rng);
        if !used.contains(&t) {
            used.push(t.clone());
            return Ok(t);
        }
    }
    Err(Error::DegeneratePosition("no unused parameter found".into()))
}

fn random_point<F: Field, R: Rng + ?Sized>(f: &F, n: usize, rng: &mut R) -> Vec<F::Elem> {
    (0..n).map(|_| f.random(rng)).collect()
}

fn retry<T>(mut attempt: impl FnMut() -> Result<T>) -> Result<T> {
    for _ in 0..MAX_ATTEMPTS {
        match attempt() {
            Err(Error::DegeneratePosition(_)) => continue,
            other => return other,
        }
    }
    Err(Error::GenericityExhausted(MAX_ATTEMPTS))
}

fn smooth_anchor<F: Field>(left: F::Elem, right: F::Elem, point: Vec<F::Elem>) -> Anchor<F> {
    Anchor {
        left: LinkPoint { piece: 0, param: left },
        right: LinkPoint { piece: 0, param: right },
        point,
    }
}

/// A random maximally connected chain of `n` rational normal curves in `P^r`.
///
/// Each new link is the curve through `r + 2` random points of the previous
/// link and one random point of `P^r`.
pub fn sample_chain<F: Field>(field: &F, r: usize, n: usize, seed: u64) -> Result<Chain<F>> {
    sample_chain_with(field, r, n, &mut stream_rng(seed, 0))
}

pub fn sample_chain_with<F: Field, R: Rng + ?Sized>(field: &F, r: usize, n: usize, rng: &mut R) -> Result<Chain<F>> {
    if r < 3 || n < 1 {
        return Err(Error::OutOfRange(format!("need r >= 3 and n >= 1, got r={r}, n={n}")));
    }
    let f = field;
    let first = ParamPiece::new(Matrix::random_invertible(f, r + 1, rng))?;
    let mut links = vec![Link::smooth(first)];
    let mut anchors = Vec::with_capacity(n - 1);
    let mut used: Vec<F::Elem> = Vec::new();
    for _ in 1..n {
        let prev = links.last().expect("nonempty").pieces()[0].clone();
        let (fit, left_params, points) = retry(|| {
            let mut trial_used = used.clone();
            let params: Vec<_> = (0..r + 2).map(|_| fresh_param(f, rng, &mut trial_used)).collect::<Result<_>>()?;
            let mut points: Vec<_> = params.iter().map(|t| prev.eval(t)).collect();
            points.push(random_point(f, r + 1, rng));
            let fit = rnc_through(f, &points)?;
            points.pop();
            Ok((fit, params, points))
        })?;
        anchors.push(
            left_params
                .into_iter()
                .zip(fit.params.iter().cloned())
                .zip(points)
                .map(|((l, rt), p)| smooth_anchor(l, rt, p))
                .collect(),
        );
        used = fit.params.clone();
        links.push(Link::smooth(fit.piece));
    }
    Chain::new(f, r, links, anchors)
}

/// The inductive chain `R_0 ∪ (L_1 ∪ R̄_1) ∪ … ∪ (L_{n−1} ∪ R̄_{n−1})` with
/// every `R̄_i` in the hyperplane `x_0 = 0`.
///
/// `R_0` meets the hyperplane where `x_0(t) = ∏ (t − τ_j)` vanishes; `L_1` is
/// a secant line of `R_0`; `R̄_1` passes through `R_0 ∩ H` and `L_1 ∩ H`;
/// `R̄_{i+1}` meets `R̄_i` in `r + 1` points and each `L_i` joins `L_{i−1}`
/// to `R̄_i`.
pub fn larson_chain<F: Field>(field: &F, r: usize, n: usize, seed: u64) -> Result<Chain<F>> {
    if r < 3 || n < 2 {
        return Err(Error::OutOfRange(format!("need r >= 3 and n >= 2, got r={r}, n={n}")));
    }
    let mut rng = stream_rng(seed, 0);
    retry(|| larson_attempt(field, r, n, &mut rng))
}

fn larson_attempt<F: Field, R: Rng + ?Sized>(f: &F, r: usize, n: usize, rng: &mut R) -> Result<Chain<F>> {
    let degenerate = |why: &str| Error::DegeneratePosition(why.to_string());
    let drop0 = |p: &[F::Elem]| p[1..].to_vec();

    let mut used0 = Vec::new();
    let tau: Vec<_> = (0..r).map(|_| fresh_param(f, rng, &mut used0)).collect::<Result<_>>()?;
    let x0 = Poly::from_roots(f, &tau);
    let mut coeffs = Matrix::random(f, r + 1, r + 1, rng);
    for (k, c) in x0.padded(r + 1).into_iter().enumerate() {
        coeffs.set(0, k, c);
    }
    if !coeffs.is_invertible() {
        return Err(degenerate("R_0 is degenerate"));
    }
    let r0 = ParamPiece::new(coeffs)?;

    let (u1, u2) = (fresh_param(f, rng, &mut used0)?, fresh_param(f, rng, &mut used0)?);
    let (a, b) = (r0.eval(&u1), r0.eval(&u2));
    let l1 = ParamPiece::line(f, &a, &b)?;
    let denom = f.sub(&a[0], &b[0]);
    let s_star = f.div(&a[0], &denom).ok_or_else(|| degenerate("secant line lies in a parallel hyperplane"))?;
    let p = l1.eval(&s_star);

    let mut points: Vec<Vec<F::Elem>> = tau.iter().map(|t| drop0(&r0.eval(t))).collect();
    points.push(drop0(&p));
    points.push(random_point(f, r, rng));
    let fit = rnc_through(f, &points)?;
    let mut bar = fit.piece;
    let mut bar_used = fit.params.clone();

    let link1 = Link::reducible(l1.clone(), bar.embed_in_hyperplane(), (s_star.clone(), fit.params[r].clone()))?;
    let mut first_anchors: Vec<Anchor<F>> = tau
        .iter()
        .zip(&fit.params)
        .map(|(t, s)| Anchor {
            left: LinkPoint { piece: 0, param: t.clone() },
            right: LinkPoint { piece: 1, param: s.clone() },
            point: r0.eval(t),
        })
        .collect();
    for (u, s) in [(u1, f.zero()), (u2, f.one())] {
        first_anchors.push(Anchor {
            left: LinkPoint { piece: 0, param: u.clone() },
            right: LinkPoint { piece: 0, param: s },
            point: r0.eval(&u),
        });
    }

    let mut links = vec![Link::smooth(r0), link1];
    let mut anchors = vec![first_anchors];
    let mut line = l1;
    let mut line_used = vec![f.zero(), f.one(), s_star];

    for _ in 2..n {
        let params: Vec<_> = (0..r + 1).map(|_| fresh_param(f, rng, &mut bar_used)).collect::<Result<_>>()?;
        let mut points: Vec<_> = params.iter().map(|t| bar.eval(t)).collect();
        points.push(random_point(f, r, rng));
        let fit = rnc_through(f, &points)?;
        let next_bar = fit.piece;
        let mut next_bar_used = fit.params.clone();

        let sigma = fresh_param(f, rng, &mut line_used)?;
        let rho = fresh_param(f, rng, &mut next_bar_used)?;
        let x = line.eval(&sigma);
        let y = next_bar.embed_in_hyperplane().eval(&rho);
        let next_line = ParamPiece::line(f, &x, &y)?;
        if next_line.coeffs().column(1).iter().all(|c| f.is_zero(c)) {
            return Err(degenerate("connecting line collapsed to a point"));
        }

        let mut set: Vec<Anchor<F>> = params
            .iter()
            .zip(&fit.params)
            .map(|(t, s)| Anchor {
                left: LinkPoint { piece: 1, param: t.clone() },
                right: LinkPoint { piece: 1, param: s.clone() },
                point: bar.embed_in_hyperplane().eval(t),
            })
            .collect();
        set.push(Anchor {
            left: LinkPoint { piece: 0, param: sigma },
            right: LinkPoint { piece: 0, param: f.zero() },
            point: x,
        });
        anchors.push(set);
        links.push(Link::reducible(next_line.clone(), next_bar.embed_in_hyperplane(), (f.one(), rho))?);

        line = next_line;
        line_used = vec![f.zero(), f.one()];
        bar = next_bar;
        bar_used = next_bar_used;
    }
    Chain::new(f, r, links, anchors)
}

/// The chain `R̄_1 ∪ … ∪ R̄_{n−1}` in the hyperplane `x_0 = 0 ≅ P^{r−1}` of a
/// chain built by [`larson_chain`].
pub fn hyperplane_subchain<F: Field>(c: &Chain<F>) -> Result<Chain<F>> {
    let f = c.field();
    if c.len() < 2 || c.links()[1..].iter().any(Link::is_smooth) {
        return Err(Error::InvalidChain("expected a smooth first link followed by reducible links".into()));
    }
    let links = c.links()[1..]
        .iter()
        .map(|l| Link::smooth(l.pieces()[1].drop_first_coordinate()))
        .collect();
    let anchors = c.anchors()[1..]
        .iter()
        .map(|set| {
            set.iter()
                .filter(|a| a.left.piece == 1 && a.right.piece == 1)
                .map(|a| smooth_anchor(a.left.param.clone(), a.right.param.clone(), a.point[1..].to_vec()))
                .collect()
        })
        .collect();
    Chain::new(f, c.r() - 1, links, anchors)
}

/// A chain `R_0, …, R_h, R_{h−1}, …, R_0` of length `r + 2` (`r` odd,
/// `h = (r+1)/2`), symmetric about the middle link. Both halves of its only
/// residue window are the same curve, so their residual divisors coincide.
pub fn mirror_chain<F: Field>(field: &F, r: usize, seed: u64) -> Result<Chain<F>> {
    if r % 2 == 0 {
        return Err(Error::OutOfRange(format!("mirror chains need odd r, got {r}")));
    }
    let h = r.div_ceil(2);
    let half = sample_chain(field, r, h + 1, seed)?;
    let mut links = half.links().to_vec();
    let mut anchors = half.anchors().to_vec();
    for k in 1..=h {
        links.push(half.links()[h - k].clone());
        anchors.push(
            half.anchors()[h - k]
                .iter()
                .map(|a| Anchor {
                    left: a.right.clone(),
                    right: a.left.clone(),
                    point: a.point.clone(),
                })
                .collect(),
        );
    }
    Chain::new(field, r, links, anchors)
}

/// Inserts a second copy of the smooth link `i` right after it, meeting the
/// original in `r + 2` random points.
pub fn repeat_link<F: Field, R: Rng + ?Sized>(c: &Chain<F>, i: usize, rng: &mut R) -> Result<Chain<F>> {
    let f = c.field();
    let Some(link) = c.links().get(i) else {
        return Err(Error::IndexOutOfRange { index: i, len: c.len() });
    };
    if !link.is_smooth() {
        return Err(Error::ReducibleLink(i));
    }
    let piece = &link.pieces()[0];
    let mut used: Vec<F::Elem> = c
        .anchors()
        .iter()
        .enumerate()
        .flat_map(|(j, set)| {
            set.iter().filter_map(move |a| match (j + 1 == i, j == i) {
                (true, _) => Some(a.right.param.clone()),
                (_, true) => Some(a.left.param.clone()),
                _ => None,
            })
        })
        .collect();
    let set = (0..c.r() + 2)
        .map(|_| {
            let t = fresh_param(f, rng, &mut used)?;
            let p = piece.eval(&t);
            Ok(smooth_anchor(t.clone(), t, p))
        })
        .collect::<Result<_>>()?;
    let mut links = c.links().to_vec();
    links.insert(i + 1, link.clone());
    let mut anchors = c.anchors().to_vec();
    anchors.insert(i, set);
    Chain::new(f, c.r(), links, anchors)
}
