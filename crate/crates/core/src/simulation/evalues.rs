//! Base e-values and p-values of the Gaussian experiments, for testing
//! N(0, 1) against the alternative N(δ, 1) from one observation `x`.

use crate::numerics::std_normal_cdf;
use crate::types::{EValue, PValue};

/// Log of the likelihood ratio of N(δ, 1) to N(0, 1).
#[inline]
pub(crate) fn ln_lr(x: f64, delta: f64) -> f64 {
    x * delta - delta * delta / 2.0
}

/// The likelihood ratio `exp(xδ − δ²/2)`.
pub fn lr_evalue(x: f64, delta: f64) -> EValue {
    EValue::new_unchecked(ln_lr(x, delta).exp())
}

/// `Φ(x)`, the most powerful p-value against δ < 0.
pub fn neyman_pearson_pvalue(x: f64) -> PValue {
    PValue::clamped(std_normal_cdf(x))
}

/// The likelihood ratio of the half-and-half mixture of N(δ, 1) and N(0, 1).
pub fn mixture_evalue(x: f64, delta: f64) -> EValue {
    mixture_evalue_weighted(x, delta, 0.5)
}

/// `w · exp(xδ − δ²/2) + (1 − w)`, the likelihood ratio of the mixture with
/// weight `w` on the alternative. `w = 1` is the plain likelihood ratio.
pub fn mixture_evalue_weighted(x: f64, delta: f64, w: f64) -> EValue {
    if w == 1.0 {
        return lr_evalue(x, delta);
    }
    EValue::new_unchecked(w * ln_lr(x, delta).exp() + (1.0 - w))
}

/// Log of [`universal_martingale`] given the number and sum of observations.
#[inline]
pub(crate) fn ln_universal(k: usize, sum: f64) -> f64 {
    let n = (k + 1) as f64;
    sum * sum / (2.0 * n) - 0.5 * n.ln()
}

/// The likelihood ratio after mixing the alternative mean over N(0, 1):
/// `(K+1)^{-1/2} exp((Σx)² / (2(K+1)))`.
pub fn universal_martingale(xs: &[f64]) -> EValue {
    EValue::new_unchecked(ln_universal(xs.len(), xs.iter().sum()).exp())
}
