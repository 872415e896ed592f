use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context};
use serde::de::DeserializeOwned;
use serde::Serialize;

use quadchain::chainbundle::{end_cohomology, is_balanced_criteria};
use quadchain::fbundle::{genus_decompose, is_f_balanced_with, low_genus_splittings, FReport, DIRECT_RANK_LIMIT};
use quadchain::flags::{flags_transverse, left_flags, right_flags, Filtration};
use quadchain::projchain::{
    expected_h0_ideal_quadrics, expected_restriction_rank, has_transverse_residues, is_quadric_generic, larson_chain,
    quadric_restriction_matrix, sample_chain,
};
use quadchain::{BundleRecord, Chain, ChainRecord, Field, FieldSpec, GluedBundle};

use crate::range::InclusiveRange;
use crate::Status;

fn read_json<T: DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

#[derive(Serialize)]
struct NodeFlags {
    node: usize,
    left_dims: Vec<usize>,
    right_dims: Vec<usize>,
    /// Proper steps, each as rows of a basis.
    left: Vec<Vec<Vec<String>>>,
    right: Vec<Vec<Vec<String>>>,
    transverse: bool,
}

#[derive(Serialize)]
struct BundleReport {
    field: FieldSpec,
    rank: usize,
    components: Vec<Vec<i64>>,
    h0_end: usize,
    h1_end: usize,
    balanced_direct: bool,
    balanced_criteria: bool,
    agree: bool,
    /// Absent when some component is unbalanced.
    flags: Option<Vec<NodeFlags>>,
}

fn proper_steps<F: Field>(f: &Filtration<F>) -> Vec<Vec<Vec<String>>> {
    let steps = f.steps();
    steps[1..steps.len() - 1].iter().map(|s| s.basis().to_strings()).collect()
}

pub fn check_bundle(input: &Path) -> anyhow::Result<Status> {
    let rec: BundleRecord = read_json(input)?;
    with_field!(rec.field, f => check_bundle_in(f, &rec))
}

fn check_bundle_in<F: Field>(f: &F, rec: &BundleRecord) -> anyhow::Result<Status> {
    let b = GluedBundle::from_record(f, rec)?;
    let (h0, h1) = end_cohomology(&b);
    let direct = h1 == 0;
    let criteria = is_balanced_criteria(&b);
    let flags = if b.components().iter().all(|c| c.is_balanced()) {
        let left = left_flags(&b)?;
        let right = right_flags(&b)?;
        let nodes = left
            .iter()
            .zip(&right)
            .enumerate()
            .map(|(node, (l, r))| {
                Ok(NodeFlags {
                    node,
                    left_dims: l.dims(),
                    right_dims: r.dims(),
                    left: proper_steps(l),
                    right: proper_steps(r),
                    transverse: flags_transverse(l, r)?,
                })
            })
            .collect::<quadchain::Result<Vec<_>>>()?;
        Some(nodes)
    } else {
        None
    };
    emit(
        &BundleReport {
            field: f.spec(),
            rank: b.rank(),
            components: b.components().iter().map(|c| c.exponents().to_vec()).collect(),
            h0_end: h0,
            h1_end: h1,
            balanced_direct: direct,
            balanced_criteria: criteria,
            agree: direct == criteria,
            flags,
        },
        None,
    )?;
    Ok(if direct == criteria { Status::Ok } else { Status::Disagreement })
}

pub fn gen_chain(r: usize, n: usize, seed: u64, larson: bool, field: FieldSpec, out: Option<&Path>) -> anyhow::Result<Status> {
    let record = with_field!(field, f => {
        let c = if larson { larson_chain(f, r, n, seed)? } else { sample_chain(f, r, n, seed)? };
        c.to_record()
    });
    emit(&record, out)?;
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct QuadricsReport {
    r: usize,
    links: usize,
    range: [usize; 2],
    restriction_rank: usize,
    expected_restriction_rank: usize,
    h0_ideal_quadrics: usize,
    expected_h0_ideal_quadrics: usize,
    quadric_generic: bool,
    /// `None` when the residue test does not apply to reducible links.
    transverse_residues: Option<bool>,
}

pub fn quadrics(input: &Path, range: Option<InclusiveRange>) -> anyhow::Result<Status> {
    let rec: ChainRecord = read_json(input)?;
    with_field!(rec.field, f => quadrics_in(&Chain::from_record(f, &rec)?, range))
}

fn quadrics_in<F: Field>(c: &Chain<F>, range: Option<InclusiveRange>) -> anyhow::Result<Status> {
    let (i, j) = range.map_or((0, c.len() - 1), |r| (r.start, r.end));
    if i > j || j >= c.len() {
        bail!("range {i}..{j} is not inside the {} links of the chain", c.len());
    }
    let sub = c.subchain(i, j)?;
    let m = quadric_restriction_matrix(c, i, j)?;
    let rank = m.rank();
    let len = j - i + 1;
    emit(
        &QuadricsReport {
            r: c.r(),
            links: c.len(),
            range: [i, j],
            restriction_rank: rank,
            expected_restriction_rank: expected_restriction_rank(c.r(), len),
            h0_ideal_quadrics: m.rows() - rank,
            expected_h0_ideal_quadrics: expected_h0_ideal_quadrics(c.r(), len),
            quadric_generic: is_quadric_generic(&sub),
            transverse_residues: has_transverse_residues(&sub).ok(),
        },
        None,
    )?;
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct Certificate {
    seed: u64,
    field: FieldSpec,
    /// Elliptic components; they carry a twist of the trivial bundle.
    b: usize,
    genus: usize,
    /// `(a, b)` with `g = (a − 1)(d − 1) + b·d`, when `g ≥ (d − 3)(d − 1)`.
    decomposition: Option<(usize, usize)>,
    elliptic_f_type: Option<Vec<i64>>,
    #[serde(flatten)]
    report: FReport,
}

pub fn fbundle(d: usize, a: usize, b: usize, seed: u64, field: FieldSpec, direct: bool) -> anyhow::Result<Status> {
    if d < 5 || a < 1 {
        bail!("need d >= 5 and a >= 1, got d={d}, a={a}");
    }
    let genus = (a - 1) * (d - 1) + b * d;
    let elliptic_f_type = if b > 0 {
        low_genus_splittings(d, 1)?.1.map(|s| s.exponents().to_vec())
    } else {
        None
    };
    let direct = direct || d * (d - 3) / 2 <= DIRECT_RANK_LIMIT;
    let report = with_field!(field, f => is_f_balanced_with(&sample_chain(f, d - 2, a, seed)?, direct)?.1);
    let agreement = report.agreement;
    emit(
        &Certificate {
            seed,
            field,
            b,
            genus,
            decomposition: genus_decompose(genus, d).ok(),
            elliptic_f_type,
            report,
        },
        None,
    )?;
    Ok(if agreement { Status::Ok } else { Status::Disagreement })
}
