//! Multiple testing: adjusted e-values from the closure of the mean and
//! product, and adjusted p-values from closed testing on top of Bonferroni,
//! Simes, Fisher or any symmetric increasing p-merging function.
//!
//! Sorting breaks ties by original index, so every procedure is
//! deterministic and equivariant under permutations of its input.

use crate::error::{Error, Result};
use crate::numerics::chi2_survival_even;
use crate::p_merging::scaled_order_stat;
use crate::types::{ascending_order, EVector, PValue, PVector};

#[derive(Debug, Clone, PartialEq)]
pub struct AdjustedEValues {
    pub original: EVector,
    pub adjusted: EVector,
    /// 0-based permutation sorting `original` ascending.
    pub ordering: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdjustedPValues {
    pub original: PVector,
    pub adjusted: PVector,
    /// 0-based permutation sorting `original` ascending.
    pub ordering: Vec<usize>,
}

fn unsort(order: &[usize], sorted_values: Vec<f64>) -> Vec<f64> {
    let mut out = vec![0.0; order.len()];
    for (v, &i) in sorted_values.into_iter().zip(order) {
        out[i] = v;
    }
    out
}

fn e_result(e: &EVector, ordering: Vec<usize>, adjusted: Vec<f64>) -> AdjustedEValues {
    AdjustedEValues {
        original: e.clone(),
        adjusted: EVector::new_unchecked(adjusted),
        ordering,
    }
}

fn p_result(p: &PVector, ordering: Vec<usize>, adjusted_sorted: Vec<f64>) -> AdjustedPValues {
    let adjusted = unsort(&ordering, adjusted_sorted);
    AdjustedPValues {
        original: p.clone(),
        adjusted: PVector::new_unchecked(adjusted.into_iter().map(|x| x.clamp(0.0, 1.0)).collect()),
        ordering,
    }
}

/// Adjusts e-values by the closure of the arithmetic mean: each output is
/// the smallest average over index sets containing that index. O(K²).
pub fn adjust_e_average(e: &EVector) -> AdjustedEValues {
    let order = ascending_order(e);
    let sorted: Vec<f64> = order.iter().map(|&i| e[i]).collect();
    // prefix[i] = sum of the i smallest values
    let mut prefix = Vec::with_capacity(sorted.len());
    let mut acc = 0.0;
    prefix.push(acc);
    for &x in &sorted[..sorted.len() - 1] {
        acc += x;
        prefix.push(acc);
    }
    let adjusted_sorted = sorted
        .iter()
        .enumerate()
        .map(|(k, &x)| (1..=k).map(|i| (x + prefix[i]) / (i + 1) as f64).fold(x, f64::min))
        .collect();
    let adjusted = unsort(&order, adjusted_sorted);
    e_result(e, order, adjusted)
}

/// Which formula [`adjust_e_product_with`] uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProductAdjustment {
    /// `e_k · Π_{i≠k, e_i<1} e_i`, the minimum product over index sets
    /// containing k.
    #[default]
    Closure,
    /// `a · e_k` with `a` the product of all entries below 1. Smaller than
    /// the closure value whenever `e_k < 1`, since `e_k` is counted twice.
    PseudocodeLiteral,
}

/// Adjusts sequential e-values by the closure of the product. O(K), no
/// sorting needed.
pub fn adjust_e_product(e: &EVector) -> AdjustedEValues {
    adjust_e_product_with(e, ProductAdjustment::Closure)
}

pub fn adjust_e_product_with(e: &EVector, variant: ProductAdjustment) -> AdjustedEValues {
    let below_one: f64 = e.iter().filter(|&&x| x < 1.0).product();
    let adjusted = e
        .iter()
        .map(|&x| {
            if x.is_infinite() {
                f64::INFINITY
            } else if x < 1.0 && variant == ProductAdjustment::Closure {
                below_one
            } else {
                x * below_one
            }
        })
        .collect();
    e_result(e, ascending_order(e), adjusted)
}

/// Holm's step-down procedure, the closure of Bonferroni.
pub fn holm_adjust(p: &PVector) -> AdjustedPValues {
    let order = ascending_order(p);
    let k = p.len();
    let mut running = 0.0f64;
    let adjusted_sorted = order
        .iter()
        .enumerate()
        .map(|(j, &i)| {
            let q = scaled_order_stat(k - j, p[i], 1).min(1.0);
            running = running.max(q);
            running
        })
        .collect();
    p_result(p, order, adjusted_sorted)
}

/// Hommel's procedure, the closure of Simes, via Wright's O(K²) scheme.
pub fn hommel_adjust(p: &PVector) -> AdjustedPValues {
    let order = ascending_order(p);
    let s: Vec<f64> = order.iter().map(|&i| p[i]).collect();
    let n = s.len();
    let simes_all = s
        .iter()
        .enumerate()
        .map(|(j, &x)| scaled_order_stat(n, x, j + 1))
        .fold(f64::INFINITY, f64::min);
    let mut pa = vec![simes_all; n];
    let mut q = vec![simes_all; n];
    for m in (2..n).rev() {
        // Simes over the largest m − 1 values, at ranks 2..=m of an m-set.
        let top = (2..=m)
            .map(|j| scaled_order_stat(m, s[n - m + j - 1], j))
            .fold(f64::INFINITY, f64::min);
        for i in 0..=(n - m) {
            q[i] = scaled_order_stat(m, s[i], 1).min(top);
        }
        let pivot = q[n - m];
        for qi in &mut q[n - m + 1..] {
            *qi = pivot;
        }
        for (a, &b) in pa.iter_mut().zip(&q) {
            *a = a.max(b);
        }
    }
    let adjusted_sorted = pa.iter().zip(&s).map(|(&a, &x)| a.max(x)).collect();
    p_result(p, order, adjusted_sorted)
}

/// Closed testing for a symmetric p-merging function increasing in each
/// argument, with O(K²) evaluations of `merge`.
pub fn fact_generic<F>(merge: F, p: &PVector) -> Result<AdjustedPValues>
where
    F: Fn(&PVector) -> Result<PValue>,
{
    let order = ascending_order(p);
    let s: Vec<f64> = order.iter().map(|&i| p[i]).collect();
    let n = s.len();
    let suffix = (0..n)
        .map(|i| merge(&PVector::new_unchecked(s[i..].to_vec())).map(PValue::get))
        .collect::<Result<Vec<_>>>()?;
    let mut adjusted_sorted = Vec::with_capacity(n);
    let mut subset = Vec::with_capacity(n);
    for k in 0..n {
        let own = s[k];
        let mut best = merge(&PVector::new_unchecked(vec![own]))?.get();
        for i in k + 1..n {
            subset.clear();
            subset.push(own);
            subset.extend_from_slice(&s[i..]);
            let v = merge(&PVector::new_unchecked(subset.clone()))?.get();
            best = best.max(v);
        }
        for &v in &suffix[..=k] {
            best = best.max(v);
        }
        adjusted_sorted.push(best);
    }
    Ok(p_result(p, order, adjusted_sorted))
}

/// Closed testing on top of Fisher's method using suffix sums of
/// `−2 ln p`. Zero p-values are rejected.
pub fn fact_fisher(p: &PVector) -> Result<AdjustedPValues> {
    if let Some(i) = p.iter().position(|&x| x == 0.0) {
        return Err(Error::ZeroPValue(i));
    }
    let order = ascending_order(p);
    let s: Vec<f64> = order.iter().map(|&i| p[i]).collect();
    let n = s.len();
    let mut sums = vec![0.0; n + 1];
    for i in (0..n).rev() {
        sums[i] = sums[i + 1] - 2.0 * s[i].ln();
    }
    let survival = |dof: usize, x: f64| chi2_survival_even(dof as u64, x.max(0.0));
    let suffix = (0..n)
        .map(|i| survival(2 * (n - i), sums[i]))
        .collect::<Result<Vec<_>>>()?;
    let mut adjusted_sorted = Vec::with_capacity(n);
    for k in 0..n {
        let own = -2.0 * s[k].ln();
        let mut best = s[k];
        for i in (k + 1..n).rev() {
            best = best.max(survival(2 * (n + 1 - i), own + sums[i])?);
        }
        for &v in &suffix[..=k] {
            best = best.max(v);
        }
        adjusted_sorted.push(best);
    }
    Ok(p_result(p, order, adjusted_sorted))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::p_merging::{bonferroni, fisher, maximum, simes};

    fn ev(v: &[f64]) -> EVector {
        EVector::from_slice(v).unwrap()
    }
    fn pv(v: &[f64]) -> PVector {
        PVector::from_slice(v).unwrap()
    }

    fn assert_close(got: &[f64], want: &[f64], tol: f64) {
        assert_eq!(got.len(), want.len());
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() <= tol, "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn average_examples() {
        let a = adjust_e_average(&ev(&[8.0, 1.0, 0.2]));
        assert_close(&a.adjusted, &[9.2 / 3.0, 0.6, 0.2], 1e-15);
        assert_eq!(a.ordering, vec![2, 1, 0]);
        assert_eq!(adjust_e_average(&ev(&[4.0, 0.5])).adjusted.as_slice(), &[2.25, 0.5]);
        assert_eq!(adjust_e_average(&ev(&[3.0; 5])).adjusted.as_slice(), &[3.0; 5]);
    }

    #[test]
    fn product_examples() {
        assert_eq!(adjust_e_product(&ev(&[4.0, 0.5])).adjusted.as_slice(), &[2.0, 0.5]);
        assert_eq!(
            adjust_e_product(&ev(&[1.0, 3.0, 7.0])).adjusted.as_slice(),
            &[1.0, 3.0, 7.0]
        );
        assert_eq!(adjust_e_product(&ev(&[0.5, 0.5])).adjusted.as_slice(), &[0.25, 0.25]);
        let literal = adjust_e_product_with(&ev(&[4.0, 0.5]), ProductAdjustment::PseudocodeLiteral);
        assert_eq!(literal.adjusted.as_slice(), &[2.0, 0.25]);
    }

    #[test]
    fn product_with_infinity_and_zero() {
        let a = adjust_e_product(&ev(&[f64::INFINITY, 0.0, 2.0]));
        assert_eq!(a.adjusted.as_slice(), &[f64::INFINITY, 0.0, 0.0]);
    }

    #[test]
    fn holm_examples() {
        assert_close(&holm_adjust(&pv(&[0.01, 0.04])).adjusted, &[0.02, 0.04], 1e-17);
        assert_eq!(holm_adjust(&pv(&[0.5, 0.5])).adjusted.as_slice(), &[1.0, 1.0]);
        assert_eq!(holm_adjust(&pv(&[0.3])).adjusted.as_slice(), &[0.3]);
    }

    #[test]
    fn hommel_examples() {
        assert_close(&hommel_adjust(&pv(&[0.01, 0.04])).adjusted, &[0.02, 0.04], 1e-17);
        assert_eq!(hommel_adjust(&pv(&[0.02, 0.03])).adjusted.as_slice(), &[0.03, 0.03]);
        assert_eq!(hommel_adjust(&pv(&[0.3])).adjusted.as_slice(), &[0.3]);
    }

    #[test]
    fn hommel_matches_a_known_reference() {
        // Values from R: p.adjust(c(0.01, 0.02, 0.03, 0.04, 0.05), "hommel")
        let a = hommel_adjust(&pv(&[0.01, 0.02, 0.03, 0.04, 0.05]));
        assert_close(&a.adjusted, &[0.05; 5], 1e-15);
        // p.adjust(c(0.001, 0.2, 0.03, 0.8), "hommel") = 0.004 0.4 0.09 0.8
        let b = hommel_adjust(&pv(&[0.001, 0.2, 0.03, 0.8]));
        assert_close(&b.adjusted, &[0.004, 0.4, 0.09, 0.8], 1e-15);
    }

    #[test]
    fn fact_generic_reduces_to_known_procedures() {
        let p = pv(&[0.03, 0.001, 0.2, 0.04, 0.5, 0.011]);
        let holm = fact_generic(|s| Ok(bonferroni(s)), &p).unwrap();
        assert_eq!(holm.adjusted, holm_adjust(&p).adjusted);
        let hommel = fact_generic(|s| Ok(simes(s)), &p).unwrap();
        assert_eq!(hommel.adjusted, hommel_adjust(&p).adjusted);
        let max = fact_generic(|s| Ok(maximum(s)), &pv(&[0.2, 0.7])).unwrap();
        assert_eq!(max.adjusted.as_slice(), &[0.7, 0.7]);
    }

    #[test]
    fn fact_generic_propagates_errors() {
        let r = fact_generic(|_| Err(Error::Undefined("test")), &pv(&[0.1, 0.2]));
        assert!(r.is_err());
    }

    #[test]
    fn fact_fisher_examples() {
        assert_close(&fact_fisher(&pv(&[0.05, 0.05])).unwrap().adjusted, &[0.05, 0.05], 1e-15);
        let a = fact_fisher(&pv(&[0.01, 0.8])).unwrap();
        assert!((a.adjusted[0] - 0.0466265).abs() < 1e-6, "{:?}", a.adjusted);
        assert_eq!(a.adjusted[1], 0.8);
        assert_eq!(fact_fisher(&pv(&[0.37])).unwrap().adjusted.as_slice(), &[0.37]);
        assert!(matches!(fact_fisher(&pv(&[0.3, 0.0])), Err(Error::ZeroPValue(1))));
    }

    #[test]
    fn fact_fisher_agrees_with_generic() {
        let p = pv(&[0.03, 0.001, 0.2, 0.04, 0.5, 0.011, 0.9]);
        let fast = fact_fisher(&p).unwrap();
        let slow = fact_generic(|s| Ok(fisher(s)), &p).unwrap();
        assert_close(&fast.adjusted, &slow.adjusted, 1e-12);
    }
}
