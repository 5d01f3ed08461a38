//! Exact and brute-force checks used to validate the merging and adjustment
//! procedures.
//!
//! Validity of an e-merging function means `E[F(E_1, …, E_K)] ≤ 1` for every
//! admissible joint law of the inputs. The checks here evaluate that
//! expectation exactly on finitely supported laws chosen adversarially.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::e_merging::MergeClass;
use crate::error::{Error, Result};
use crate::parallel::{map_chunks, map_indexed, Execution};
use crate::types::{EValue, EVector, PValue, PVector};

/// Largest dimension accepted by the subset enumerations.
pub const MAX_BRUTE_DIM: usize = 20;
/// Excess over 1 tolerated before an expectation counts as a violation.
pub const VALIDITY_TOLERANCE: f64 = 1e-9;

const PROB_TOLERANCE: f64 = 1e-12;
const MAX_SUPPORT: usize = 1 << 20;
const MAX_PERMUTED_DIM: usize = 6;

/// How the rows of a [`DiscreteJointSpec`] were generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coupling {
    IndependentProduct,
    ExchangeablePermutation,
    Explicit,
}

/// A finitely supported joint law of K e-variables.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteJointSpec {
    support: Vec<Vec<f64>>,
    probs: Vec<f64>,
    coupling: Coupling,
}

impl DiscreteJointSpec {
    /// A law given row by row. Rejects ragged or empty support, invalid
    /// e-values, probabilities that do not sum to 1, and marginals with mean
    /// above 1.
    pub fn explicit(support: Vec<Vec<f64>>, probs: Vec<f64>) -> Result<Self> {
        Self::build(support, probs, Coupling::Explicit)
    }

    fn build(support: Vec<Vec<f64>>, probs: Vec<f64>, coupling: Coupling) -> Result<Self> {
        let spec = DiscreteJointSpec {
            support,
            probs,
            coupling,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        if self.support.is_empty() || self.support.len() != self.probs.len() {
            return bad(format!(
                "{} support rows for {} probabilities",
                self.support.len(),
                self.probs.len()
            ));
        }
        let k = self.support[0].len();
        if k == 0 || self.support.iter().any(|r| r.len() != k) {
            return bad("support rows must share a positive length".into());
        }
        if let Some(&x) = self.support.iter().flatten().find(|x| !(**x >= 0.0)) {
            return bad(format!("{x} is not an e-value"));
        }
        if let Some(&q) = self.probs.iter().find(|q| !(**q >= 0.0) || !q.is_finite()) {
            return bad(format!("{q} is not a probability"));
        }
        let total: f64 = self.probs.iter().sum();
        if (total - 1.0).abs() > PROB_TOLERANCE {
            return bad(format!("probabilities sum to {total}"));
        }
        for c in 0..k {
            let mean = self.marginal_mean(c);
            if !(mean <= 1.0 + PROB_TOLERANCE) {
                return bad(format!("coordinate {c} has mean {mean} > 1"));
            }
        }
        Ok(())
    }

    fn marginal_mean(&self, c: usize) -> f64 {
        self.support
            .iter()
            .zip(&self.probs)
            .filter(|(_, &q)| q > 0.0)
            .map(|(row, &q)| q * row[c])
            .sum()
    }

    /// Independent coordinates, each with a finite marginal given as
    /// `(values, probabilities)`. The support is the full product.
    pub fn independent(marginals: &[(Vec<f64>, Vec<f64>)]) -> Result<Self> {
        if marginals.is_empty() {
            return Err(Error::EmptyInput);
        }
        let rows = marginals
            .iter()
            .try_fold(1usize, |acc, (v, _)| acc.checked_mul(v.len()))
            .filter(|&n| n <= MAX_SUPPORT)
            .ok_or_else(|| Error::InvalidSpec("product support too large".into()))?;
        let mut support = vec![Vec::with_capacity(marginals.len()); 1];
        let mut probs = vec![1.0];
        for (values, weights) in marginals {
            if values.len() != weights.len() || values.is_empty() {
                return Err(Error::InvalidSpec(
                    "marginal values and weights differ in length".into(),
                ));
            }
            let mut next_support = Vec::with_capacity(support.len() * values.len());
            let mut next_probs = Vec::with_capacity(support.len() * values.len());
            for (row, &q) in support.iter().zip(&probs) {
                for (&v, &w) in values.iter().zip(weights) {
                    let mut r = row.clone();
                    r.push(v);
                    next_support.push(r);
                    next_probs.push(q * w);
                }
            }
            support = next_support;
            probs = next_probs;
        }
        debug_assert_eq!(support.len(), rows);
        Self::build(support, probs, Coupling::IndependentProduct)
    }

    /// Independent two-point marginals: coordinate k equals `high[k]` with
    /// probability `(1 − low[k]) / (high[k] − low[k])` and `low[k]` otherwise,
    /// so each has mean exactly 1. Requires `low < 1 < high` pointwise.
    pub fn independent_two_point(low: &[f64], high: &[f64]) -> Result<Self> {
        if low.len() != high.len() {
            return Err(Error::InvalidSpec("low and high differ in length".into()));
        }
        let marginals = low
            .iter()
            .zip(high)
            .map(|(&l, &h)| {
                if !(0.0..1.0).contains(&l) || !(h > 1.0) || !h.is_finite() {
                    return Err(Error::InvalidSpec(format!("need 0 <= {l} < 1 < {h}")));
                }
                let up = (1.0 - l) / (h - l);
                Ok((vec![l, h], vec![1.0 - up, up]))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::independent(&marginals)
    }

    /// All permutations of `e` (cyclic shifts when K > 6), jointly scaled by
    /// an event of probability `1/a` with `a = max(mean(e), 1)`; the
    /// complement maps to the zero vector. Every marginal has mean
    /// `mean(e)/a ≤ 1`.
    pub fn exchangeable(e: &[f64]) -> Result<Self> {
        if e.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some(&x) = e.iter().find(|x| !(**x >= 0.0) || x.is_infinite()) {
            return Err(Error::InvalidSpec(format!("{x} is not a finite e-value")));
        }
        let k = e.len();
        let a = (e.iter().sum::<f64>() / k as f64).max(1.0);
        let mut rows = if k <= MAX_PERMUTED_DIM {
            permutations(e)
        } else {
            (0..k).map(|s| (0..k).map(|i| e[(i + s) % k]).collect()).collect()
        };
        let each = 1.0 / (a * rows.len() as f64);
        let mut probs = vec![each; rows.len()];
        let rest = 1.0 - 1.0 / a;
        if rest > 0.0 {
            rows.push(vec![0.0; k]);
            probs.push(rest);
        }
        Self::build(rows, probs, Coupling::ExchangeablePermutation)
    }

    /// `e` on an event of probability `1/max(max(e), 1)`, zero elsewhere:
    /// all coordinates driven by the same event.
    pub fn comonotone(e: &[f64]) -> Result<Self> {
        if e.is_empty() {
            return Err(Error::EmptyInput);
        }
        let top = e.iter().copied().fold(1.0, f64::max);
        let mut support = vec![e.to_vec()];
        let mut probs = vec![1.0 / top];
        if top > 1.0 {
            support.push(vec![0.0; e.len()]);
            probs.push(1.0 - 1.0 / top);
        }
        Self::build(support, probs, Coupling::Explicit)
    }

    pub fn support(&self) -> &[Vec<f64>] {
        &self.support
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn coupling(&self) -> Coupling {
        self.coupling
    }

    pub fn dim(&self) -> usize {
        self.support[0].len()
    }
}

fn permutations(e: &[f64]) -> Vec<Vec<f64>> {
    // Heap's algorithm
    let mut a = e.to_vec();
    let n = a.len();
    let mut out = vec![a.clone()];
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            out.push(a.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// `E[F(E)]` under `spec`. Rows of probability zero are skipped, so a
/// function that is infinite there does not turn the result into NaN.
pub fn exact_expectation<F>(merge: F, spec: &DiscreteJointSpec) -> f64
where
    F: Fn(&EVector) -> EValue,
{
    spec.support
        .iter()
        .zip(&spec.probs)
        .filter(|(_, &q)| q > 0.0)
        .map(|(row, &q)| q * merge(&EVector::new_unchecked(row.clone())).get())
        .sum()
}

/// Parameters of [`check_e_merging_validity`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValidityConfig {
    /// Number of inputs K.
    pub dim: usize,
    pub trials: usize,
    pub seed: u64,
    pub execution: Execution,
}

impl ValidityConfig {
    pub fn new(dim: usize, trials: usize, seed: u64) -> Self {
        ValidityConfig {
            dim,
            trials,
            seed,
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ValidityOutcome {
    Pass {
        trials: usize,
        max_expectation: f64,
    },
    Fail {
        trial: usize,
        expectation: f64,
        witness: DiscreteJointSpec,
    },
}

impl ValidityOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, ValidityOutcome::Pass { .. })
    }
}

fn random_evector(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    match rng.random_range(0..4) {
        0 => (0..k).map(|_| rng.random_range(0.0..10.0)).collect(),
        1 => (0..k).map(|_| rng.random_range(-7.0f64..7.0).exp()).collect(),
        2 => (0..k)
            .map(|_| {
                if rng.random_bool(0.5) {
                    0.0
                } else {
                    rng.random_range(0.0..20.0)
                }
            })
            .collect(),
        _ => vec![rng.random_range(0.0..5.0); k],
    }
}

fn random_explicit(rng: &mut ChaCha8Rng, k: usize) -> Result<DiscreteJointSpec> {
    let m = rng.random_range(2..=6);
    let mut support: Vec<Vec<f64>> = (0..m).map(|_| random_evector(rng, k)).collect();
    let raw: Vec<f64> = (0..m).map(|_| rng.random_range(0.01..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let probs: Vec<f64> = raw.iter().map(|w| w / total).collect();
    // Rescale each coordinate to mean exactly 1, the tightest admissible law.
    for c in 0..k {
        let mean: f64 = support.iter().zip(&probs).map(|(r, q)| q * r[c]).sum();
        if mean > 0.0 {
            for row in &mut support {
                row[c] /= mean;
            }
        }
    }
    DiscreteJointSpec::explicit(support, probs)
}

fn random_independent(rng: &mut ChaCha8Rng, k: usize) -> Result<DiscreteJointSpec> {
    let low: Vec<f64> = (0..k)
        .map(|_| {
            if rng.random_bool(0.5) {
                0.0
            } else {
                rng.random_range(0.0..1.0)
            }
        })
        .collect();
    let high: Vec<f64> = (0..k).map(|_| 1.0 + rng.random_range(-3.0f64..4.0).exp()).collect();
    DiscreteJointSpec::independent_two_point(&low, &high)
}

/// The law used by trial `trial`; regenerating it is deterministic.
fn trial_spec(class: MergeClass, k: usize, seed: u64, trial: usize) -> Result<DiscreteJointSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    match class {
        MergeClass::Arbitrary => match trial % 3 {
            0 => DiscreteJointSpec::exchangeable(&random_evector(&mut rng, k)),
            1 => DiscreteJointSpec::comonotone(&random_evector(&mut rng, k)),
            _ => random_explicit(&mut rng, k),
        },
        MergeClass::Sequential | MergeClass::Independent => random_independent(&mut rng, k),
    }
}

/// Searches for a joint law under which `merge` has expectation above
/// `1 + 1e-9`.
///
/// For arbitrary dependence the laws are exchangeable permutation couplings
/// scaled by an event, comonotone two-point laws and random explicit laws
/// with marginal means 1. For sequential or independent inputs they are
/// products of two-point marginals with mean 1. The first failing trial is
/// returned with its law as a witness.
pub fn check_e_merging_validity<F>(merge: F, class: MergeClass, cfg: ValidityConfig) -> Result<ValidityOutcome>
where
    F: Fn(&EVector) -> EValue + Sync + Send,
{
    if cfg.trials == 0 {
        return Err(Error::ParameterOutOfRange {
            name: "trials",
            value: 0.0,
            expected: "trials >= 1",
        });
    }
    if cfg.dim == 0 || cfg.dim > MAX_BRUTE_DIM {
        return Err(Error::DimensionTooLarge {
            k: cfg.dim,
            max: MAX_BRUTE_DIM,
        });
    }
    let expectations = map_indexed(cfg.trials, cfg.execution, |t| {
        trial_spec(class, cfg.dim, cfg.seed, t).map(|spec| exact_expectation(&merge, &spec))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let failing = expectations.iter().position(|&x| !(x <= 1.0 + VALIDITY_TOLERANCE));
    Ok(match failing {
        Some(trial) => ValidityOutcome::Fail {
            trial,
            expectation: expectations[trial],
            witness: trial_spec(class, cfg.dim, cfg.seed, trial)?,
        },
        None => ValidityOutcome::Pass {
            trials: cfg.trials,
            max_expectation: expectations.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        },
    })
}

fn check_dim(k: usize) -> Result<()> {
    if k > MAX_BRUTE_DIM {
        Err(Error::DimensionTooLarge { k, max: MAX_BRUTE_DIM })
    } else {
        Ok(())
    }
}

/// Per-index extremum of `merge` over every index set containing that
/// index; `better(a, b)` picks the preferred of two values.
fn closure_over_subsets<M, B>(values: &[f64], exec: Execution, merge: M, better: B, init: f64) -> Vec<f64>
where
    M: Fn(Vec<f64>) -> f64 + Sync + Send,
    B: Fn(f64, f64) -> f64 + Sync + Send + Copy,
{
    let k = values.len();
    let masks = 1usize << k;
    let partial = map_chunks(masks, exec, |range| {
        let mut best = vec![init; k];
        let mut subset = Vec::with_capacity(k);
        for mask in range.filter(|&m| m != 0) {
            subset.clear();
            subset.extend((0..k).filter(|i| mask >> i & 1 == 1).map(|i| values[i]));
            let v = merge(subset.clone());
            for (i, b) in best.iter_mut().enumerate() {
                if mask >> i & 1 == 1 {
                    *b = better(*b, v);
                }
            }
        }
        best
    });
    partial.into_iter().fold(vec![init; k], |acc, part| {
        acc.iter().zip(&part).map(|(&a, &b)| better(a, b)).collect()
    })
}

/// `min` of `merge` over index sets containing each k, by enumeration of
/// all 2^K − 1 subsets (K ≤ 20).
pub fn brute_closure_e<F>(merge: F, e: &EVector, exec: Execution) -> Result<EVector>
where
    F: Fn(&EVector) -> EValue + Sync + Send,
{
    check_dim(e.len())?;
    let out = closure_over_subsets(
        e,
        exec,
        |s| merge(&EVector::new_unchecked(s)).get(),
        f64::min,
        f64::INFINITY,
    );
    Ok(EVector::new_unchecked(out))
}

/// `max` of `merge` over index sets containing each k, by enumeration of
/// all 2^K − 1 subsets (K ≤ 20).
pub fn brute_closure_p<F>(merge: F, p: &PVector, exec: Execution) -> Result<PVector>
where
    F: Fn(&PVector) -> PValue + Sync + Send,
{
    check_dim(p.len())?;
    let out = closure_over_subsets(p, exec, |s| merge(&PVector::new_unchecked(s)).get(), f64::max, 0.0);
    Ok(PVector::new_unchecked(out))
}

#[derive(Debug, Clone, PartialEq)]
pub enum DominationOutcome {
    /// `F ≤ G + slack` at every one of `points` grid points.
    Dominated { points: usize },
    /// The first grid point, in lexicographic order, where `F > G + slack`.
    Counterexample { point: Vec<f64>, f: f64, g: f64 },
}

impl DominationOutcome {
    pub fn is_dominated(&self) -> bool {
        matches!(self, DominationOutcome::Dominated { .. })
    }
}

/// Compares `f ≤ g + slack` at every point of `grid^k`.
pub fn check_domination_grid<F, G>(
    f: F,
    g: G,
    k: usize,
    grid: &[f64],
    slack: f64,
    exec: Execution,
) -> Result<DominationOutcome>
where
    F: Fn(&EVector) -> EValue + Sync + Send,
    G: Fn(&EVector) -> EValue + Sync + Send,
{
    if k == 0 || grid.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(&x) = grid.iter().find(|x| !(**x >= 0.0) || x.is_infinite()) {
        return Err(Error::InvalidSpec(format!("grid value {x} is not a finite e-value")));
    }
    let n = grid.len();
    let points = u32::try_from(k)
        .ok()
        .and_then(|k| n.checked_pow(k))
        .filter(|&p| p <= 1 << 28)
        .ok_or_else(|| Error::InvalidSpec(format!("grid of {n}^{k} points is too large")))?;
    let point_at = |mut idx: usize| -> Vec<f64> {
        let mut v = vec![0.0; k];
        for slot in v.iter_mut().rev() {
            *slot = grid[idx % n];
            idx /= n;
        }
        v
    };
    let firsts = map_chunks(points, exec, |range| {
        range.into_iter().find_map(|idx| {
            let e = EVector::new_unchecked(point_at(idx));
            let (fv, gv) = (f(&e).get(), g(&e).get());
            (!(fv <= gv + slack)).then(|| (e.into_vec(), fv, gv))
        })
    });
    Ok(match firsts.into_iter().flatten().next() {
        Some((point, f, g)) => DominationOutcome::Counterexample { point, f, g },
        None => DominationOutcome::Dominated { points },
    })
}
