//! Merging functions that turn e-values into a p-value or p-values into an
//! e-value.

use crate::calibration::{calibrate_power, e_to_p, CalibratorSpec};
use crate::e_merging::{arithmetic_mean, check_simplex};
use crate::error::{Error, Result};
use crate::types::{EValue, EVector, PValue, PVector};

/// `min(1, K / Σ e_k)`: calibrate the arithmetic mean.
pub fn e_to_p_merge(e: &EVector) -> PValue {
    e_to_p(arithmetic_mean(e))
}

/// `(κ/K) Σ p_k^{κ−1}`: the mean of power-calibrated p-values.
pub fn p_to_e_merge(kappa: f64, p: &PVector) -> Result<EValue> {
    let calibrated = p
        .iter()
        .map(|&x| calibrate_power(PValue::clamped(x), kappa).map(EValue::get))
        .collect::<Result<Vec<_>>>()?;
    Ok(arithmetic_mean(&EVector::new_unchecked(calibrated)))
}

/// `Σ w_k f_k(p_k)` with per-coordinate calibrators. Coordinates with zero
/// weight do not contribute, even if their calibrated value is infinite.
pub fn p_to_e_mixture(weights: &[f64], calibrators: &[CalibratorSpec], p: &PVector) -> Result<EValue> {
    check_simplex(weights, p.len())?;
    if calibrators.len() != p.len() {
        return Err(Error::InvalidSpec(format!(
            "expected {} calibrators, got {}",
            p.len(),
            calibrators.len()
        )));
    }
    for c in calibrators {
        c.validate()?;
    }
    let mut total = 0.0;
    for ((&w, c), &x) in weights.iter().zip(calibrators).zip(p.iter()) {
        if w == 0.0 {
            continue;
        }
        total += w * c.apply(PValue::clamped(x))?.get();
    }
    Ok(EValue::new_unchecked(total))
}

/// `1 / max_k (e_1 ⋯ e_k)`, capped at 1, for sequential e-values in the
/// order given. The empty prefix counts, so the result is never above 1.
pub fn ville_se_to_p(e: &EVector) -> PValue {
    let mut running = 1.0f64;
    let mut best = 1.0f64;
    for &x in e.iter() {
        running *= x;
        best = best.max(running);
        if running.is_infinite() || running == 0.0 {
            break;
        }
    }
    e_to_p(EValue::new_unchecked(best))
}
