//! E-values: calibration against p-values, merging under arbitrary,
//! sequential or independent dependence, and multiple testing by closure.
//!
//! All merging and adjustment functions are pure. E-values may be `+inf`;
//! any infinite input makes a merged e-value infinite.

// `!(x >= 0.0)` style guards are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibration;
pub mod cli;
pub mod cross_merging;
pub mod e_merging;
pub mod error;
pub mod multiple_testing;
pub mod numerics;
pub mod oracle;
pub mod p_merging;
pub mod parallel;
pub mod simulation;
pub mod types;

pub use error::{Error, Result};
pub use parallel::Execution;
pub use types::{EValue, EVector, PValue, PVector};
