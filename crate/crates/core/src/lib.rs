//! Finite-scale kernel for expected utility, rank-dependent (dual) utility
//! and Choquet integrals, with LP-based elicitation of utilities and
//! distortion functions from observed comparisons.
//!
//! The crate is `no_std` and needs only `alloc`. Masses and probability
//! levels are exact rationals; outcome values are `f64`.

#![no_std]

extern crate alloc;

pub mod du;
pub mod elicit;
mod error;
pub mod eu;
pub mod lp;
pub mod measure;
pub mod num;
pub mod pwl;
pub mod quantile;

pub use du::DistortionFunction;
pub use elicit::{Comparison, PreferenceDataset, Relation};
pub use error::{Error, Result};
pub use eu::UtilityFunction;
pub use measure::{are_comonotonic, DiscreteMeasure, FiniteRandomVariable, IntervalPartition, OutcomePoint};
pub use num::Rational;
pub use quantile::StepQuantile;
