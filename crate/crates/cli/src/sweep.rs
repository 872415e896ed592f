//! Grid sweeps over `(r, n)` with one CSV row per cell.
//!
//! Rows are keyed by a hash of everything that determines their contents, so
//! rerunning a sweep into the same file only computes the missing cells.

use std::fs::{File, OpenOptions};
use std::path::Path;
use std::time::Instant;

use anyhow::Context;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use quadchain::projchain::{expected_h0_ideal_quadrics, h0_ideal_quadrics, has_transverse_residues, sample_chain_with};
use quadchain::rng::{cell_stream, stream_rng};
use quadchain::{Field, FieldSpec};

use crate::range::InclusiveRange;
use crate::Status;

pub struct SweepConfig {
    pub r_range: InclusiveRange,
    pub n_range: InclusiveRange,
    pub trials: usize,
    pub seed: u64,
    pub field: FieldSpec,
    pub timings: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub key: String,
    pub r: usize,
    pub n: usize,
    pub field: String,
    pub seed: u64,
    pub trials: usize,
    pub h0_expected: usize,
    pub h0_matches: usize,
    pub h0_min: Option<usize>,
    pub h0_max: Option<usize>,
    pub success_rate: f64,
    /// Trials where the residue test applies (odd `r`, `n ≥ r + 2`).
    pub residue_trials: usize,
    pub residue_transverse: usize,
    /// Trials whose chain could not be sampled.
    pub exhausted: usize,
    pub elapsed_ms: Option<u64>,
}

/// First 16 hex digits of the SHA-256 of the cell's configuration.
pub fn cell_key(r: usize, n: usize, trials: usize, seed: u64, field: &FieldSpec) -> String {
    let config = format!("quadchain-sweep-v1|r={r}|n={n}|trials={trials}|seed={seed}|field={field}");
    hex::encode(Sha256::digest(config.as_bytes()))[..16].to_string()
}

struct Trial {
    h0: usize,
    residues: Option<bool>,
}

fn trial<F: Field>(f: &F, r: usize, n: usize, seed: u64, t: usize) -> quadchain::Result<Option<Trial>> {
    let chain = match sample_chain_with(f, r, n, &mut stream_rng(seed, cell_stream(r, n, t))) {
        Ok(c) => c,
        Err(quadchain::Error::GenericityExhausted(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let residues = if r % 2 == 1 && n >= r + 2 {
        Some(has_transverse_residues(&chain)?)
    } else {
        None
    };
    Ok(Some(Trial {
        h0: h0_ideal_quadrics(&chain, 0, n - 1)?,
        residues,
    }))
}

fn cell<F: Field>(f: &F, cfg: &SweepConfig, r: usize, n: usize, key: String) -> quadchain::Result<SweepRow> {
    let start = Instant::now();
    let results = (0..cfg.trials)
        .into_par_iter()
        .map(|t| trial(f, r, n, cfg.seed, t))
        .collect::<quadchain::Result<Vec<_>>>()?;
    let done: Vec<&Trial> = results.iter().flatten().collect();
    let expected = expected_h0_ideal_quadrics(r, n);
    let matches = done.iter().filter(|t| t.h0 == expected).count();
    let residues: Vec<bool> = done.iter().filter_map(|t| t.residues).collect();
    Ok(SweepRow {
        key,
        r,
        n,
        field: cfg.field.to_string(),
        seed: cfg.seed,
        trials: cfg.trials,
        h0_expected: expected,
        h0_matches: matches,
        h0_min: done.iter().map(|t| t.h0).min(),
        h0_max: done.iter().map(|t| t.h0).max(),
        success_rate: if cfg.trials == 0 { 1.0 } else { matches as f64 / cfg.trials as f64 },
        residue_trials: residues.len(),
        residue_transverse: residues.iter().filter(|&&b| b).count(),
        exhausted: results.len() - done.len(),
        elapsed_ms: cfg.timings.then(|| start.elapsed().as_millis() as u64),
    })
}

/// Rows already present in `path`.
pub fn read_rows(path: &Path) -> anyhow::Result<Vec<SweepRow>> {
    if !path.exists() || std::fs::metadata(path)?.len() == 0 {
        return Ok(Vec::new());
    }
    let mut reader = csv::Reader::from_path(path)?;
    reader
        .deserialize()
        .collect::<Result<Vec<SweepRow>, _>>()
        .with_context(|| format!("reading rows of {}", path.display()))
}

pub fn run(cfg: &SweepConfig, out: &Path) -> anyhow::Result<Status> {
    let existing: std::collections::HashSet<String> = read_rows(out)?.into_iter().map(|row| row.key).collect();
    let fresh = !out.exists() || std::fs::metadata(out)?.len() == 0;
    let file: File = OpenOptions::new().create(true).append(true).open(out)?;
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    if fresh {
        writer.write_record(HEADER)?;
        writer.flush()?;
    }
    let (mut written, mut skipped) = (0, 0);
    for r in cfg.r_range.iter() {
        for n in cfg.n_range.iter() {
            let key = cell_key(r, n, cfg.trials, cfg.seed, &cfg.field);
            if existing.contains(&key) {
                skipped += 1;
                continue;
            }
            let row = with_field!(cfg.field, f => cell(f, cfg, r, n, key)?);
            writer.serialize(&row)?;
            // One flush per cell, so an interrupted sweep resumes cleanly.
            writer.flush()?;
            written += 1;
        }
    }
    eprintln!("sweep: {written} rows written, {skipped} already present");
    Ok(Status::Ok)
}

const HEADER: [&str; 15] = [
    "key",
    "r",
    "n",
    "field",
    "seed",
    "trials",
    "h0_expected",
    "h0_matches",
    "h0_min",
    "h0_max",
    "success_rate",
    "residue_trials",
    "residue_transverse",
    "exhausted",
    "elapsed_ms",
];
