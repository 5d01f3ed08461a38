//! Validated scalar and vector wrappers for e-values and p-values.
//!
//! E-values live on the extended half line `[0, +inf]`; p-values on `[0, 1]`.
//! NaN is rejected at construction so it can never reach a merging function.

use std::fmt;
use std::ops::Deref;

use crate::error::{Error, Result};

/// An extended nonnegative real, the realised value of an e-variable.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EValue(f64);

impl EValue {
    pub const ZERO: EValue = EValue(0.0);
    pub const ONE: EValue = EValue(1.0);
    pub const INFINITY: EValue = EValue(f64::INFINITY);

    pub fn new(e: f64) -> Result<Self> {
        if e.is_nan() || e < 0.0 || e == f64::NEG_INFINITY {
            return Err(Error::InvalidEValue(e));
        }
        // normalise -0.0
        Ok(EValue(if e == 0.0 { 0.0 } else { e }))
    }

    pub(crate) fn new_unchecked(e: f64) -> Self {
        debug_assert!(e >= 0.0, "e-value invariant violated: {e}");
        EValue(e)
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }
}

impl fmt::Display for EValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl From<EValue> for f64 {
    fn from(e: EValue) -> f64 {
        e.0
    }
}

/// A realised p-value in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PValue(f64);

impl PValue {
    pub const ZERO: PValue = PValue(0.0);
    pub const ONE: PValue = PValue(1.0);

    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidPValue(p));
        }
        Ok(PValue(if p == 0.0 { 0.0 } else { p }))
    }

    /// Clamps into `[0, 1]`; used for outputs of formulas that are
    /// mathematically in range but may drift by an ulp.
    pub(crate) fn clamped(p: f64) -> Self {
        debug_assert!(!p.is_nan());
        PValue(p.clamp(0.0, 1.0))
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl fmt::Display for PValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl From<PValue> for f64 {
    fn from(p: PValue) -> f64 {
        p.0
    }
}

/// A non-empty list of e-values.
#[derive(Debug, Clone, PartialEq)]
pub struct EVector(Vec<f64>);

impl EVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        for &e in &values {
            EValue::new(e)?;
        }
        Ok(EVector(values))
    }

    pub fn from_slice(values: &[f64]) -> Result<Self> {
        Self::new(values.to_vec())
    }

    pub(crate) fn new_unchecked(values: Vec<f64>) -> Self {
        debug_assert!(!values.is_empty() && values.iter().all(|&e| e >= 0.0));
        EVector(values)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn get(&self, i: usize) -> EValue {
        EValue(self.0[i])
    }

    pub fn has_infinite(&self) -> bool {
        self.0.iter().any(|e| e.is_infinite())
    }
}

impl Deref for EVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// A non-empty list of p-values.
#[derive(Debug, Clone, PartialEq)]
pub struct PVector(Vec<f64>);

impl PVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        for &p in &values {
            PValue::new(p)?;
        }
        Ok(PVector(values))
    }

    pub fn from_slice(values: &[f64]) -> Result<Self> {
        Self::new(values.to_vec())
    }

    pub(crate) fn new_unchecked(values: Vec<f64>) -> Self {
        debug_assert!(!values.is_empty() && values.iter().all(|p| (0.0..=1.0).contains(p)));
        PVector(values)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn get(&self, i: usize) -> PValue {
        PValue(self.0[i])
    }
}

impl Deref for PVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Permutation sorting `values` ascending, ties broken by original index.
pub(crate) fn ascending_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    order
}
