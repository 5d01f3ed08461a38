//! Symmetric e-merging functions and ie/se-merging functions.
//!
//! Every function here follows the extended-real convention: if any input is
//! +inf the merged value is +inf, whatever the finite-orthant formula would
//! give (including the `0 · inf` case of the product).

use std::fmt;

use crate::error::{Error, Result};
use crate::types::{EValue, EVector};

/// Dependence structure under which a merging function is known to be valid.
///
/// Validity is nested: a function valid for arbitrary dependence is valid
/// for sequential inputs, which in turn covers independent inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MergeClass {
    Arbitrary,
    Sequential,
    Independent,
}

impl MergeClass {
    /// Whether a function of this class may be applied to inputs with the
    /// given dependence structure.
    pub fn valid_under(self, inputs: MergeClass) -> bool {
        self <= inputs
    }

    pub fn name(self) -> &'static str {
        match self {
            MergeClass::Arbitrary => "arbitrary",
            MergeClass::Sequential => "sequential",
            MergeClass::Independent => "independent",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "arbitrary" => Ok(MergeClass::Arbitrary),
            "sequential" => Ok(MergeClass::Sequential),
            "independent" => Ok(MergeClass::Independent),
            _ => Err(Error::UnknownMethod(s.to_string())),
        }
    }
}

impl fmt::Display for MergeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn sum(e: &[f64]) -> f64 {
    e.iter().sum()
}

/// The arithmetic mean, the essentially dominant symmetric e-merging function.
pub fn arithmetic_mean(e: &EVector) -> EValue {
    if e.has_infinite() {
        return EValue::INFINITY;
    }
    EValue::new_unchecked(sum(e) / e.len() as f64)
}

fn check_unit(name: &'static str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange {
            name,
            value: x,
            expected: "a value in [0, 1]",
        })
    }
}

/// `λ + (1 − λ) · mean(e)`.
pub fn convex_mixture(lambda: f64, e: &EVector) -> Result<EValue> {
    check_unit("lambda", lambda)?;
    if e.has_infinite() {
        return Ok(EValue::INFINITY);
    }
    let m = arithmetic_mean(e).get();
    Ok(EValue::new_unchecked(lambda + (1.0 - lambda) * m))
}

fn binomial(k: usize, n: usize) -> f64 {
    let n = n.min(k - n);
    let mut c = 1.0;
    for i in 0..n {
        c = c * (k - i) as f64 / (i + 1) as f64;
    }
    c
}

/// Elementary symmetric polynomials e_0..=e_max of the inputs.
fn elementary_symmetric(e: &[f64], max: usize) -> Vec<f64> {
    let mut es = vec![0.0; max + 1];
    es[0] = 1.0;
    for (i, &x) in e.iter().enumerate() {
        for j in (1..=max.min(i + 1)).rev() {
            es[j] += es[j - 1] * x;
        }
    }
    es
}

fn check_order(n: usize, k: usize) -> Result<()> {
    if n <= k {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange {
            name: "n",
            value: n,
            max: k,
        })
    }
}

/// The U-statistic of order `n`: the average over all n-subsets of the
/// product of their entries. `n = 0` gives 1, `n = 1` the mean, `n = K` the
/// product.
pub fn u_statistic(n: usize, e: &EVector) -> Result<EValue> {
    check_order(n, e.len())?;
    if e.has_infinite() {
        return Ok(EValue::INFINITY);
    }
    let es = elementary_symmetric(e, n);
    Ok(EValue::new_unchecked(es[n] / binomial(e.len(), n)))
}

pub(crate) fn check_simplex(weights: &[f64], expected_len: usize) -> Result<()> {
    if weights.len() != expected_len {
        return Err(Error::InvalidWeights(format!(
            "expected {expected_len} weights, got {}",
            weights.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !(**w >= 0.0) || !w.is_finite()) {
        return Err(Error::InvalidWeights(format!(
            "weight {w} is not a finite nonnegative number"
        )));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidWeights(format!("weights sum to {total}, not 1")));
    }
    Ok(())
}

/// Convex mixture `Σ_n w_n U_n(e)` of U-statistics; `weights` has K+1 entries.
pub fn u_mixture(weights: &[f64], e: &EVector) -> Result<EValue> {
    check_simplex(weights, e.len() + 1)?;
    if e.has_infinite() {
        return Ok(EValue::INFINITY);
    }
    let top = weights.iter().rposition(|&w| w > 0.0).unwrap_or(0);
    let es = elementary_symmetric(e, top);
    let k = e.len();
    let v = weights[..=top]
        .iter()
        .enumerate()
        .filter(|(_, &w)| w > 0.0)
        .map(|(n, &w)| w * es[n] / binomial(k, n))
        .sum();
    Ok(EValue::new_unchecked(v))
}

/// The product ie-merging function; valid for sequential inputs.
pub fn product(e: &EVector) -> EValue {
    if e.has_infinite() {
        return EValue::INFINITY;
    }
    EValue::new_unchecked(e.iter().product())
}

fn descending(e: &[f64]) -> Vec<f64> {
    let mut v = e.to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

fn check_rank(k: usize, len: usize) -> Result<()> {
    if (1..=len).contains(&k) {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange {
            name: "k",
            value: k,
            max: len,
        })
    }
}

/// `(k/K) e_[k]` with `e_[k]` the k-th largest entry.
pub fn ruger_e(k: usize, e: &EVector) -> Result<EValue> {
    check_rank(k, e.len())?;
    if e.has_infinite() {
        return Ok(EValue::INFINITY);
    }
    let sorted = descending(e);
    Ok(EValue::new_unchecked(k as f64 * sorted[k - 1] / e.len() as f64))
}

/// `max_k (k/K) e_[k]`. Valid, but dominated by the arithmetic mean.
pub fn e_simes(e: &EVector) -> EValue {
    if e.has_infinite() {
        return EValue::INFINITY;
    }
    let big_k = e.len() as f64;
    let v = descending(e)
        .iter()
        .enumerate()
        .map(|(i, &x)| (i + 1) as f64 * x / big_k)
        .fold(0.0, f64::max);
    EValue::new_unchecked(v)
}

/// Power-mean e-merging family `c_r · M_{r,K}(e)`.
///
/// The coefficient is 1 for r ≤ 1 and `K^{1/r−1}` for r > 1 (so r = +inf
/// gives max/K). r = 0 is the geometric mean and r = −inf the minimum. For
/// r ≤ 0 a zero entry yields 0, the limit of the power mean.
pub fn m_family_e(r: f64, e: &EVector) -> Result<EValue> {
    if r.is_nan() {
        return Err(Error::ParameterOutOfRange {
            name: "r",
            value: r,
            expected: "r in [-inf, inf]",
        });
    }
    if e.has_infinite() {
        return Ok(EValue::INFINITY);
    }
    let k = e.len() as f64;
    let max = e.iter().copied().fold(0.0, f64::max);
    let min = e.iter().copied().fold(f64::INFINITY, f64::min);
    if r == 1.0 {
        return Ok(arithmetic_mean(e));
    }
    let v = if r == f64::INFINITY {
        max / k
    } else if r == f64::NEG_INFINITY {
        min
    } else if r <= 0.0 && min == 0.0 {
        0.0
    } else if r == 0.0 {
        (e.iter().map(|x| x.ln()).sum::<f64>() / k).exp()
    } else if max == 0.0 {
        0.0
    } else {
        // Scale by an extreme entry so that x^r stays in range.
        let scale = if r > 0.0 { max } else { min };
        let mean_pow = e.iter().map(|x| (x / scale).powf(r)).sum::<f64>() / k;
        let m = scale * mean_pow.powf(1.0 / r);
        if r > 1.0 {
            k.powf(1.0 / r - 1.0) * m
        } else {
            m
        }
    };
    Ok(EValue::new_unchecked(v))
}

/// A merging function from the catalogue, with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum EMerger {
    Mean,
    ConvexMixture { lambda: f64 },
    UStatistic { n: usize },
    UMixture { weights: Vec<f64> },
    Product,
    Ruger { k: usize },
    Simes,
    MFamily { r: f64 },
}

impl EMerger {
    pub fn apply(&self, e: &EVector) -> Result<EValue> {
        match self {
            EMerger::Mean => Ok(arithmetic_mean(e)),
            EMerger::ConvexMixture { lambda } => convex_mixture(*lambda, e),
            EMerger::UStatistic { n } => u_statistic(*n, e),
            EMerger::UMixture { weights } => u_mixture(weights, e),
            EMerger::Product => Ok(product(e)),
            EMerger::Ruger { k } => ruger_e(*k, e),
            EMerger::Simes => Ok(e_simes(e)),
            EMerger::MFamily { r } => m_family_e(*r, e),
        }
    }

    /// The weakest dependence assumption under which the function is valid.
    pub fn class(&self) -> MergeClass {
        match self {
            EMerger::Mean
            | EMerger::ConvexMixture { .. }
            | EMerger::Ruger { .. }
            | EMerger::Simes
            | EMerger::MFamily { .. } => MergeClass::Arbitrary,
            EMerger::UStatistic { n } if *n <= 1 => MergeClass::Arbitrary,
            EMerger::UMixture { weights } if weights.iter().skip(2).all(|&w| w == 0.0) => MergeClass::Arbitrary,
            EMerger::UStatistic { .. } | EMerger::UMixture { .. } | EMerger::Product => MergeClass::Sequential,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            EMerger::Mean => "average",
            EMerger::ConvexMixture { .. } => "mixture",
            EMerger::UStatistic { .. } => "u-stat",
            EMerger::UMixture { .. } => "u-mixture",
            EMerger::Product => "product",
            EMerger::Ruger { .. } => "ruger",
            EMerger::Simes => "simes",
            EMerger::MFamily { .. } => "m-family",
        }
    }
}

impl fmt::Display for EMerger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EMerger::ConvexMixture { lambda } => write!(f, "mixture(lambda={lambda})"),
            EMerger::UStatistic { n } => write!(f, "u-stat(n={n})"),
            EMerger::UMixture { weights } => write!(f, "u-mixture(weights={weights:?})"),
            EMerger::Ruger { k } => write!(f, "ruger(k={k})"),
            EMerger::MFamily { r } => write!(f, "m-family(r={r})"),
            other => f.write_str(other.name()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(v: &[f64]) -> EVector {
        EVector::from_slice(v).unwrap()
    }

    #[test]
    fn mean_examples() {
        assert_eq!(arithmetic_mean(&ev(&[1.0, 1.0, 1.0])).get(), 1.0);
        assert_eq!(arithmetic_mean(&ev(&[4.0, 0.5])).get(), 2.25);
        assert_eq!(arithmetic_mean(&ev(&[0.0, 0.0])).get(), 0.0);
        assert!(arithmetic_mean(&ev(&[0.0, f64::INFINITY])).is_infinite());
    }

    #[test]
    fn mixture_examples() {
        assert_eq!(convex_mixture(1.0, &ev(&[7.0, 0.0])).unwrap().get(), 1.0);
        assert_eq!(convex_mixture(0.0, &ev(&[4.0, 0.5])).unwrap().get(), 2.25);
        assert_eq!(convex_mixture(0.5, &ev(&[4.0, 0.5])).unwrap().get(), 1.625);
        assert!(convex_mixture(1.5, &ev(&[1.0])).is_err());
        assert!(convex_mixture(-0.1, &ev(&[1.0])).is_err());
    }

    #[test]
    fn u_statistic_examples() {
        let e = ev(&[1.0, 2.0, 3.0]);
        assert_eq!(u_statistic(1, &e).unwrap().get(), 2.0);
        assert_eq!(u_statistic(2, &ev(&[2.0, 3.0])).unwrap().get(), 6.0);
        assert!((u_statistic(2, &e).unwrap().get() - 11.0 / 3.0).abs() < 1e-15);
        assert_eq!(u_statistic(0, &e).unwrap().get(), 1.0);
        assert!(u_statistic(4, &e).is_err());
    }

    #[test]
    fn u_mixture_examples() {
        let e = ev(&[2.0, 3.0]);
        assert_eq!(u_mixture(&[0.0, 1.0, 0.0], &e).unwrap(), arithmetic_mean(&e));
        assert_eq!(u_mixture(&[0.0, 0.0, 1.0], &e).unwrap(), product(&e));
        assert_eq!(u_mixture(&[0.0, 0.5, 0.5], &e).unwrap().get(), 4.25);
        assert!(u_mixture(&[0.5, 0.5], &e).is_err());
        assert!(u_mixture(&[0.5, 0.6, 0.0], &e).is_err());
        assert!(u_mixture(&[-0.5, 1.5, 0.0], &e).is_err());
    }

    #[test]
    fn product_examples() {
        assert_eq!(product(&ev(&[2.0, 3.0])).get(), 6.0);
        assert_eq!(product(&ev(&[2.0, 0.0, 9.0])).get(), 0.0);
        assert_eq!(product(&ev(&[1.0; 5])).get(), 1.0);
        // 0 · inf resolves to +inf
        assert!(product(&ev(&[0.0, f64::INFINITY])).is_infinite());
    }

    #[test]
    fn ruger_examples() {
        let e = ev(&[8.0, 2.0]);
        assert_eq!(ruger_e(2, &e).unwrap().get(), 2.0);
        assert_eq!(ruger_e(1, &e).unwrap().get(), 4.0);
        assert_eq!(ruger_e(3, &ev(&[1.5; 3])).unwrap().get(), 1.5);
        assert!(ruger_e(0, &e).is_err());
        assert!(ruger_e(3, &e).is_err());
    }

    #[test]
    fn simes_examples() {
        assert_eq!(e_simes(&ev(&[8.0, 2.0])).get(), 4.0);
        assert_eq!(e_simes(&ev(&[1.0, 1.0])).get(), 1.0);
        assert_eq!(e_simes(&ev(&[0.0; 4])).get(), 0.0);
    }

    #[test]
    fn m_family_examples() {
        let e = ev(&[4.0, 0.5]);
        assert_eq!(m_family_e(1.0, &e).unwrap(), arithmetic_mean(&e));
        assert_eq!(m_family_e(f64::INFINITY, &ev(&[8.0, 2.0])).unwrap().get(), 4.0);
        assert!((m_family_e(2.0, &ev(&[3.0, 4.0])).unwrap().get() - 2.5).abs() < 1e-15);
        assert!((m_family_e(0.0, &ev(&[4.0, 1.0])).unwrap().get() - 2.0).abs() < 1e-15);
        assert_eq!(m_family_e(f64::NEG_INFINITY, &ev(&[4.0, 1.0])).unwrap().get(), 1.0);
        assert_eq!(m_family_e(-2.0, &ev(&[4.0, 0.0])).unwrap().get(), 0.0);
        assert_eq!(m_family_e(0.0, &ev(&[4.0, 0.0])).unwrap().get(), 0.0);
        assert!(m_family_e(f64::NAN, &e).is_err());
    }

    #[test]
    fn m_family_is_precise_on_the_diagonal() {
        for &r in &[-3.0, -1.0, 0.0, 0.3, 1.0] {
            let v = m_family_e(r, &ev(&[7.0, 7.0, 7.0])).unwrap().get();
            assert!((v - 7.0).abs() < 1e-12, "r={r}: {v}");
        }
    }

    #[test]
    fn infinite_inputs_propagate_everywhere() {
        let e = ev(&[0.0, f64::INFINITY, 2.0]);
        for m in [
            EMerger::Mean,
            EMerger::ConvexMixture { lambda: 0.3 },
            EMerger::UStatistic { n: 0 },
            EMerger::UStatistic { n: 2 },
            EMerger::UMixture {
                weights: vec![0.25, 0.25, 0.25, 0.25],
            },
            EMerger::Product,
            EMerger::Ruger { k: 3 },
            EMerger::Simes,
            EMerger::MFamily { r: -2.0 },
            EMerger::MFamily { r: 0.0 },
        ] {
            assert!(m.apply(&e).unwrap().is_infinite(), "{m}");
        }
    }

    #[test]
    fn classes() {
        assert_eq!(EMerger::Mean.class(), MergeClass::Arbitrary);
        assert_eq!(EMerger::Product.class(), MergeClass::Sequential);
        assert_eq!(EMerger::UStatistic { n: 1 }.class(), MergeClass::Arbitrary);
        assert_eq!(EMerger::UStatistic { n: 2 }.class(), MergeClass::Sequential);
        assert_eq!(
            EMerger::UMixture {
                weights: vec![0.5, 0.5, 0.0]
            }
            .class(),
            MergeClass::Arbitrary
        );
        assert!(MergeClass::Arbitrary.valid_under(MergeClass::Independent));
        assert!(MergeClass::Sequential.valid_under(MergeClass::Independent));
        assert!(!MergeClass::Sequential.valid_under(MergeClass::Arbitrary));
    }
}
