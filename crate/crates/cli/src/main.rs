use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use quadchain::FieldSpec;

/// Runs `$body` with `$f` bound to the field named by `$spec`.
macro_rules! with_field {
    ($spec:expr, $f:ident => $body:expr) => {
        match $spec {
            quadchain::FieldSpec::Prime(p) => {
                let $f = &quadchain::PrimeField::new(p)?;
                $body
            }
            quadchain::FieldSpec::Rational => {
                let $f = &quadchain::RationalField;
                $body
            }
        }
    };
}

mod commands;
mod range;
mod sweep;

use range::InclusiveRange;

/// Exact balancedness checks for bundles on chains of rational curves.
#[derive(Debug, Parser)]
#[command(name = "quadchain", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cohomology of End and both balancedness verdicts for a glued bundle.
    CheckBundle {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Sample a maximally connected chain of rational normal curves.
    GenChain {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Build the degenerate chain through a hyperplane instead.
        #[arg(long)]
        larson: bool,
        #[arg(long, env = "QUADCHAIN_PRIME", default_value_t = FieldSpec::default())]
        field: FieldSpec,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Quadrics containing a chain or a range of its links.
    Quadrics {
        #[arg(long = "in")]
        input: PathBuf,
        /// Link indices `i..j`, inclusive, counted from 0.
        #[arg(long)]
        range: Option<InclusiveRange>,
    },
    /// Balancedness certificate for the bundle of quadrics of a random cover.
    Fbundle {
        #[arg(long)]
        d: usize,
        /// Rational components.
        #[arg(long)]
        a: usize,
        /// Elliptic components.
        #[arg(long, default_value_t = 0)]
        b: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, env = "QUADCHAIN_PRIME", default_value_t = FieldSpec::default())]
        field: FieldSpec,
        /// Also compute h1(End F) directly, whatever the rank.
        #[arg(long)]
        direct: bool,
    },
    /// Success rates of the quadric count and residue checks over a grid.
    Sweep {
        #[arg(long)]
        r_range: InclusiveRange,
        #[arg(long)]
        n_range: InclusiveRange,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, env = "QUADCHAIN_PRIME", default_value_t = FieldSpec::default())]
        field: FieldSpec,
        /// Record wall-clock time per row; rows are then no longer
        /// reproducible byte for byte.
        #[arg(long)]
        timings: bool,
    },
}

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    Disagreement = 1,
    InputError = 2,
    GenericityExhausted = 3,
}

fn status_of(err: &anyhow::Error) -> Status {
    let core = err.chain().find_map(|e| e.downcast_ref::<quadchain::Error>());
    match core {
        Some(quadchain::Error::GenericityExhausted(_)) => Status::GenericityExhausted,
        _ => Status::InputError,
    }
}

fn run(cli: Cli) -> anyhow::Result<Status> {
    match cli.command {
        Command::CheckBundle { input } => commands::check_bundle(&input),
        Command::GenChain {
            r,
            n,
            seed,
            larson,
            field,
            out,
        } => commands::gen_chain(r, n, seed, larson, field, out.as_deref()),
        Command::Quadrics { input, range } => commands::quadrics(&input, range),
        Command::Fbundle {
            d,
            a,
            b,
            seed,
            field,
            direct,
        } => commands::fbundle(d, a, b, seed, field, direct),
        Command::Sweep {
            r_range,
            n_range,
            trials,
            seed,
            out,
            field,
            timings,
        } => {
            let config = sweep::SweepConfig {
                r_range,
                n_range,
                trials,
                seed,
                field,
                timings,
            };
            sweep::run(&config, &out).with_context(|| format!("sweep into {}", out.display()))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let status = match run(cli) {
        Ok(status) => status,
        Err(err) => {
            eprintln!("error: {err:#}");
            status_of(&err)
        }
    };
    ExitCode::from(status as u8)
}
