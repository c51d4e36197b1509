//! Manipulation, pairwise dependence and Condorcet-paradox quantities for
//! social choice functions on small profiles, computed exactly by
//! enumeration or estimated by seeded sampling.
//!
//! Exact values are [`Exact`] rationals. Inequality predicates are generic
//! over [`Scalar`], so they accept `f32`, `f64` and [`Exact`] alike.

pub mod arrowlab;
pub mod error;
pub mod harness;
pub mod maniplab;
pub mod prefcore;
pub mod report;
pub mod scalar;
pub mod scfzoo;
pub mod ternary;

pub use error::{Error, Result};
pub use prefcore::{Alternative, LinearOrder, OrderIndex, PairwiseColumn, Profile, TernaryVector, Voter};
pub use report::{MetricRecord, MetricReport, Mode};
pub use scalar::Scalar;
pub use scfzoo::{RuleSpec, Scf, ScfRule, ScfTable};

/// Exact rational probabilities.
pub type Exact = num_rational::BigRational;

/// Floating-point estimates.
pub type Real = f64;
