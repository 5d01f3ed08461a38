//! Classical p-merging functions.
//!
//! `simes` and `fisher` are only valid for independent p-values; the others
//! are valid under arbitrary dependence.

use std::fmt;

use crate::error::{Error, Result};
use crate::numerics::chi2_survival_even;
use crate::types::{PValue, PVector};

fn ascending(p: &[f64]) -> Vec<f64> {
    let mut v = p.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// `(m · p) / j`, the scaled order statistic shared by Simes, Rüger and the
/// closed-testing procedures. Keeping one evaluation order makes their
/// outputs bit-identical wherever they coincide mathematically.
#[inline]
pub(crate) fn scaled_order_stat(m: usize, p: f64, j: usize) -> f64 {
    (m as f64 * p) / j as f64
}

/// `min(1, K · min p)`.
pub fn bonferroni(p: &PVector) -> PValue {
    let min = p.iter().copied().fold(1.0, f64::min);
    PValue::clamped(scaled_order_stat(p.len(), min, 1))
}

/// `min(1, (K/k) p_(k))` with `p_(k)` the k-th smallest entry.
pub fn ruger_p(k: usize, p: &PVector) -> Result<PValue> {
    if !(1..=p.len()).contains(&k) {
        return Err(Error::IndexOutOfRange {
            name: "k",
            value: k,
            max: p.len(),
        });
    }
    let sorted = ascending(p);
    Ok(PValue::clamped(scaled_order_stat(p.len(), sorted[k - 1], k)))
}

/// Simes's function `min_k (K/k) p_(k)`.
pub fn simes(p: &PVector) -> PValue {
    let m = p.len();
    let v = ascending(p)
        .iter()
        .enumerate()
        .map(|(i, &x)| scaled_order_stat(m, x, i + 1))
        .fold(f64::INFINITY, f64::min);
    PValue::clamped(v)
}

/// Fisher's method: the χ²(2K) survival function at `−2 Σ ln p_k`.
///
/// A zero entry gives 0; for K = 1 the input is returned unchanged.
pub fn fisher(p: &PVector) -> PValue {
    if p.contains(&0.0) {
        return PValue::ZERO;
    }
    if p.len() == 1 {
        return p.get(0);
    }
    let stat = -2.0 * p.iter().map(|x| x.ln()).sum::<f64>();
    let s = chi2_survival_even(2 * p.len() as u64, stat.max(0.0))
        .expect("degrees of freedom are even and the statistic is nonnegative");
    PValue::clamped(s)
}

/// The largest entry; valid but inadmissible.
pub fn maximum(p: &PVector) -> PValue {
    PValue::clamped(p.iter().copied().fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PMerger {
    Bonferroni,
    Ruger { k: usize },
    Simes,
    Fisher,
    Maximum,
}

impl PMerger {
    pub fn apply(&self, p: &PVector) -> Result<PValue> {
        match self {
            PMerger::Bonferroni => Ok(bonferroni(p)),
            PMerger::Ruger { k } => ruger_p(*k, p),
            PMerger::Simes => Ok(simes(p)),
            PMerger::Fisher => Ok(fisher(p)),
            PMerger::Maximum => Ok(maximum(p)),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PMerger::Bonferroni => "bonferroni",
            PMerger::Ruger { .. } => "ruger",
            PMerger::Simes => "simes",
            PMerger::Fisher => "fisher",
            PMerger::Maximum => "max",
        }
    }

    /// Whether validity needs independent inputs.
    pub fn requires_independence(&self) -> bool {
        matches!(self, PMerger::Simes | PMerger::Fisher)
    }
}

impl fmt::Display for PMerger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PMerger::Ruger { k } => write!(f, "ruger(k={k})"),
            other => f.write_str(other.name()),
        }
    }
}
