//! Exact cohomology of vector bundles on chains of rational curves, chains of
//! rational normal curves and their quadrics, and the bundle-of-quadrics
//! balancedness certificate built on both.

pub mod chainbundle;
pub mod error;
pub mod exactmath;
pub mod fbundle;
pub mod flags;
pub mod projchain;
pub mod rng;

pub use chainbundle::{BundleRecord, GluedBundle};
pub use error::{Error, Result};
pub use exactmath::{Field, FieldSpec, Matrix, Poly, PrimeField, RationalField, Subspace};
pub use fbundle::{CEInvariants, FReport};
pub use flags::{DirectrixFlag, Filtration, SplittingType};
pub use projchain::{Chain, ChainRecord};
