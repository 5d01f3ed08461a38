//! Seeded Monte Carlo experiments: combining many observations about one
//! hypothesis, and testing many hypotheses with one observation each.

use std::fmt;

use crate::calibration::{vs_bound, P_CLAMP};
use crate::error::{Error, Result};
use crate::multiple_testing::{adjust_e_average, adjust_e_product, fact_fisher, holm_adjust, hommel_adjust};
use crate::numerics::chi2_ln_survival_even;
use crate::p_merging::scaled_order_stat;
use crate::parallel::{map_indexed, Execution};
use crate::simulation::csv::Series;
use crate::simulation::evalues::{ln_lr, ln_universal, mixture_evalue, mixture_evalue_weighted, neyman_pearson_pvalue};
use crate::simulation::rng::GaussianStream;
use crate::types::{EVector, PValue, PVector};

macro_rules! method_enum {
    ($(#[$doc:meta])* $name:ident { $($variant:ident => $label:literal),+ $(,)? }) => {
        $(#[$doc])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn name(self) -> &'static str {
                match self {
                    $($name::$variant => $label),+
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }
    };
}

method_enum! {
    /// Statistics tracked along the observation sequence.
    CombiningMethod {
        ProductLr => "product-lr",
        FisherRecip => "fisher-recip",
        FisherVs => "fisher-vs",
        Universal => "universal",
        Average => "average",
        SimesRecip => "simes-recip",
        SimesVs => "simes-vs",
        BonferroniRecip => "bonferroni-recip",
        WrongLr => "wrong-lr",
    }
}

method_enum! {
    /// Per-hypothesis adjusted values reported by the multiple-testing
    /// experiment. p-value procedures are reported on the e-value scale,
    /// either as reciprocals or through the VS bound.
    MultipleMethod {
        AvgAdjust => "avg-adjust",
        ProductAdjust => "product-adjust",
        HolmRecip => "holm-recip",
        HolmVs => "holm-vs",
        HommelRecip => "hommel-recip",
        HommelVs => "hommel-vs",
        FactFisherRecip => "fact-fisher-recip",
        FactFisherVs => "fact-fisher-vs",
    }
}

impl CombiningMethod {
    pub fn parse(s: &str) -> Result<Vec<Self>> {
        if s == "all" {
            return Ok(Self::ALL.to_vec());
        }
        match Self::ALL.iter().find(|m| m.name() == s) {
            Some(&m) => Ok(vec![m]),
            None => Err(Error::UnknownMethod(s.to_string())),
        }
    }
}

impl MultipleMethod {
    /// Accepts a full method name, or `holm`, `hommel`, `fact-fisher` for
    /// both the reciprocal and the VS column.
    pub fn parse(s: &str) -> Result<Vec<Self>> {
        use MultipleMethod::*;
        Ok(match s {
            "all" => Self::ALL.to_vec(),
            "holm" => vec![HolmRecip, HolmVs],
            "hommel" => vec![HommelRecip, HommelVs],
            "fact-fisher" => vec![FactFisherRecip, FactFisherVs],
            _ => match Self::ALL.iter().find(|m| m.name() == s) {
                Some(&m) => vec![m],
                None => return Err(Error::UnknownMethod(s.to_string())),
            },
        })
    }
}

/// Parses a comma-separated method list, dropping duplicates.
pub fn parse_methods<T: PartialEq>(list: &str, parse: fn(&str) -> Result<Vec<T>>) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for token in list.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        for m in parse(token)? {
            if !out.contains(&m) {
                out.push(m);
            }
        }
    }
    if out.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CombiningConfig {
    /// Mean of the alternative, in units of the standard deviation.
    pub delta: f64,
    pub n_obs: usize,
    pub n_seeds: usize,
    /// The first `⌈fraction · n_obs⌉` observations come from the
    /// alternative, the rest from the null.
    pub fraction_alternative: f64,
    pub methods: Vec<CombiningMethod>,
}

impl CombiningConfig {
    /// 10 000 observations from N(−0.1, 1), 100 seeds.
    pub fn figure2() -> Self {
        CombiningConfig {
            delta: -0.1,
            n_obs: 10_000,
            n_seeds: 100,
            fraction_alternative: 1.0,
            methods: CombiningMethod::ALL.to_vec(),
        }
    }

    /// As [`CombiningConfig::figure2`] with only the first half from the
    /// alternative.
    pub fn figure6() -> Self {
        CombiningConfig {
            fraction_alternative: 0.5,
            ..Self::figure2()
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("n_obs", self.n_obs)?;
        check_positive("n_seeds", self.n_seeds)?;
        check_delta(self.delta)?;
        if !(0.0..=1.0).contains(&self.fraction_alternative) {
            return Err(Error::ParameterOutOfRange {
                name: "fraction_alternative",
                value: self.fraction_alternative,
                expected: "a value in [0, 1]",
            });
        }
        if self.methods.is_empty() {
            return Err(Error::EmptyInput);
        }
        Ok(())
    }

    fn n_alternative(&self) -> usize {
        ((self.fraction_alternative * self.n_obs as f64).ceil() as usize).min(self.n_obs)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultipleConfig {
    pub n_hypotheses: usize,
    /// The first `n_false` hypotheses are false (observations drawn from the
    /// alternative).
    pub n_false: usize,
    pub delta: f64,
    pub n_seeds: usize,
    pub methods: Vec<MultipleMethod>,
}

impl MultipleConfig {
    /// 20 hypotheses, the first 10 false, δ = −4, 1000 seeds.
    pub fn figure4() -> Self {
        MultipleConfig {
            n_hypotheses: 20,
            n_false: 10,
            delta: -4.0,
            n_seeds: 1000,
            methods: MultipleMethod::ALL.to_vec(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("n_hypotheses", self.n_hypotheses)?;
        check_positive("n_seeds", self.n_seeds)?;
        check_delta(self.delta)?;
        if self.n_false > self.n_hypotheses {
            return Err(Error::IndexOutOfRange {
                name: "n_false",
                value: self.n_false,
                max: self.n_hypotheses,
            });
        }
        if self.methods.is_empty() {
            return Err(Error::EmptyInput);
        }
        Ok(())
    }
}

fn check_positive(name: &'static str, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::ParameterOutOfRange {
            name,
            value: 0.0,
            expected: "a positive integer",
        });
    }
    Ok(())
}

fn check_delta(delta: f64) -> Result<()> {
    if !delta.is_finite() {
        return Err(Error::ParameterOutOfRange {
            name: "delta",
            value: delta,
            expected: "a finite number",
        });
    }
    Ok(())
}

/// VS bound of `exp(ln_p)`, continued in log space below the p-value clamp.
fn vs_from_ln_p(ln_p: f64) -> f64 {
    if ln_p >= P_CLAMP.ln() {
        vs_bound(PValue::clamped(ln_p.exp()))
    } else {
        (-1.0 - ln_p - (-ln_p).ln()).exp()
    }
}

/// Running Simes p-value over a growing sample.
struct RunningSimes {
    sorted: Vec<f64>,
}

impl RunningSimes {
    fn push(&mut self, p: f64) -> f64 {
        let at = self.sorted.partition_point(|&q| q <= p);
        self.sorted.insert(at, p);
        let k = self.sorted.len();
        self.sorted
            .iter()
            .enumerate()
            .map(|(j, &q)| scaled_order_stat(k, q, j + 1))
            .fold(1.0, f64::min)
    }
}

/// Trajectories of every requested method for one seed, indexed
/// `[method][K − 1]`.
fn combining_paths(cfg: &CombiningConfig, seed_base: u64, seed: usize) -> Result<Vec<Vec<f64>>> {
    let n = cfg.n_obs;
    let n_alt = cfg.n_alternative();
    let mut stream = GaussianStream::new(seed_base, seed as u64);
    let xs: Vec<f64> = (0..n)
        .map(|i| stream.sample(if i < n_alt { cfg.delta } else { 0.0 }))
        .collect();
    let w = cfg.fraction_alternative;
    let mut paths = Vec::with_capacity(cfg.methods.len());
    for &method in &cfg.methods {
        let mut out = Vec::with_capacity(n);
        match method {
            CombiningMethod::ProductLr => {
                let mut ln = 0.0;
                for &x in &xs {
                    ln += mixture_evalue_weighted(x, cfg.delta, w).get().ln();
                    out.push(ln.exp());
                }
            }
            CombiningMethod::WrongLr => {
                let mut ln = 0.0;
                for &x in &xs {
                    ln += ln_lr(x, cfg.delta);
                    out.push(ln.exp());
                }
            }
            CombiningMethod::Universal => {
                let mut sum = 0.0;
                for (k, &x) in xs.iter().enumerate() {
                    sum += x;
                    out.push(ln_universal(k + 1, sum).exp());
                }
            }
            CombiningMethod::Average => {
                let mut sum = 0.0;
                for (k, &x) in xs.iter().enumerate() {
                    sum += mixture_evalue_weighted(x, cfg.delta, w).get();
                    out.push(sum / (k + 1) as f64);
                }
            }
            CombiningMethod::FisherRecip | CombiningMethod::FisherVs => {
                let mut stat = 0.0;
                for (k, &x) in xs.iter().enumerate() {
                    let p = neyman_pearson_pvalue(x).get();
                    stat -= 2.0 * p.ln();
                    let ln_p = if k == 0 {
                        p.ln()
                    } else {
                        chi2_ln_survival_even(2 * (k as u64 + 1), stat)?
                    };
                    out.push(if method == CombiningMethod::FisherRecip {
                        (-ln_p).exp()
                    } else {
                        vs_from_ln_p(ln_p)
                    });
                }
            }
            CombiningMethod::SimesRecip | CombiningMethod::SimesVs => {
                let mut simes = RunningSimes {
                    sorted: Vec::with_capacity(n),
                };
                for &x in &xs {
                    let p = simes.push(neyman_pearson_pvalue(x).get());
                    out.push(if method == CombiningMethod::SimesRecip {
                        1.0 / p
                    } else {
                        vs_bound(PValue::clamped(p))
                    });
                }
            }
            CombiningMethod::BonferroniRecip => {
                let mut min = 1.0f64;
                for (k, &x) in xs.iter().enumerate() {
                    min = min.min(neyman_pearson_pvalue(x).get());
                    out.push(1.0 / scaled_order_stat(k + 1, min, 1).min(1.0));
                }
            }
        }
        paths.push(out);
    }
    Ok(paths)
}

/// Lower median (the ⌈n/2⌉-th smallest value).
pub(crate) fn lower_median(values: &mut [f64]) -> f64 {
    let mid = (values.len() - 1) / 2;
    let (_, m, _) = values.select_nth_unstable_by(mid, f64::total_cmp);
    *m
}

/// Per-index lower medians over seeds of `[seed][method][index]` paths.
fn medians(per_seed: &[Vec<Vec<f64>>], n_methods: usize, len: usize) -> Vec<Vec<f64>> {
    let mut column = vec![0.0; per_seed.len()];
    (0..len)
        .map(|i| {
            (0..n_methods)
                .map(|m| {
                    for (slot, paths) in column.iter_mut().zip(per_seed) {
                        *slot = paths[m][i];
                    }
                    lower_median(&mut column)
                })
                .collect()
        })
        .collect()
}

/// Runs the combining experiment and returns, for every K, the median over
/// seeds of each method's value after K observations.
pub fn run_combining_experiment(cfg: &CombiningConfig, seed_base: u64, exec: Execution) -> Result<Series> {
    cfg.validate()?;
    let per_seed = map_indexed(cfg.n_seeds, exec, |s| combining_paths(cfg, seed_base, s))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let rows = medians(&per_seed, cfg.methods.len(), cfg.n_obs);
    Ok(Series::new(
        cfg.methods.iter().map(|m| m.name().to_string()).collect(),
        rows.into_iter().enumerate().map(|(k, v)| (k + 1, v)).collect(),
    ))
}

fn reciprocal(p: f64) -> f64 {
    1.0 / p
}

fn vs(p: f64) -> f64 {
    vs_bound(PValue::clamped(p))
}

fn multiple_values(cfg: &MultipleConfig, seed_base: u64, seed: usize) -> Result<Vec<Vec<f64>>> {
    let mut stream = GaussianStream::new(seed_base, seed as u64);
    let xs: Vec<f64> = (0..cfg.n_hypotheses)
        .map(|i| stream.sample(if i < cfg.n_false { cfg.delta } else { 0.0 }))
        .collect();
    let e = EVector::new_unchecked(xs.iter().map(|&x| mixture_evalue(x, cfg.delta).get()).collect());
    let p = PVector::new_unchecked(xs.iter().map(|&x| neyman_pearson_pvalue(x).get()).collect());

    let mut holm = None;
    let mut hommel = None;
    let mut fisher = None;
    let mut out = Vec::with_capacity(cfg.methods.len());
    for &method in &cfg.methods {
        use MultipleMethod::*;
        let transform: fn(f64) -> f64 = match method {
            HolmRecip | HommelRecip | FactFisherRecip => reciprocal,
            _ => vs,
        };
        let column = match method {
            AvgAdjust => adjust_e_average(&e).adjusted.into_vec(),
            ProductAdjust => adjust_e_product(&e).adjusted.into_vec(),
            HolmRecip | HolmVs => {
                let adj = holm.get_or_insert_with(|| holm_adjust(&p).adjusted);
                adj.iter().map(|&q| transform(q)).collect()
            }
            HommelRecip | HommelVs => {
                let adj = hommel.get_or_insert_with(|| hommel_adjust(&p).adjusted);
                adj.iter().map(|&q| transform(q)).collect()
            }
            FactFisherRecip | FactFisherVs => {
                if fisher.is_none() {
                    fisher = Some(fact_fisher(&p)?.adjusted);
                }
                let adj = fisher.as_ref().expect("just computed");
                adj.iter().map(|&q| transform(q)).collect()
            }
        };
        out.push(column);
    }
    Ok(out)
}

/// Runs the multiple-testing experiment and returns, for every hypothesis
/// (0-based), the median over seeds of each method's adjusted value.
pub fn run_multiple_experiment(cfg: &MultipleConfig, seed_base: u64, exec: Execution) -> Result<Series> {
    cfg.validate()?;
    let per_seed = map_indexed(cfg.n_seeds, exec, |s| multiple_values(cfg, seed_base, s))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let rows = medians(&per_seed, cfg.methods.len(), cfg.n_hypotheses);
    Ok(Series::new(
        cfg.methods.iter().map(|m| m.name().to_string()).collect(),
        rows.into_iter().enumerate().collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lower_median_picks_the_lower_middle() {
        assert_eq!(lower_median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(lower_median(&mut [4.0, 1.0, 3.0, 2.0]), 2.0);
        assert_eq!(lower_median(&mut [5.0]), 5.0);
        assert_eq!(lower_median(&mut [f64::INFINITY, 1.0]), 1.0);
    }

    #[test]
    fn null_product_is_exactly_one() {
        let cfg = CombiningConfig {
            delta: 0.0,
            n_obs: 1,
            n_seeds: 5,
            fraction_alternative: 1.0,
            methods: vec![CombiningMethod::ProductLr],
        };
        let s = run_combining_experiment(&cfg, 0, Execution::Sequential).unwrap();
        assert_eq!(s.rows()[0].values, vec![1.0]);
    }

    #[test]
    fn running_simes_matches_batch_simes() {
        use crate::p_merging::simes;
        let ps = [0.3, 0.02, 0.5, 0.011, 0.9, 0.2];
        let mut r = RunningSimes { sorted: Vec::new() };
        for k in 1..=ps.len() {
            let got = r.push(ps[k - 1]);
            assert_eq!(got, simes(&PVector::from_slice(&ps[..k]).unwrap()).get());
        }
    }

    #[test]
    fn vs_in_log_space_is_continuous() {
        let ln_p = P_CLAMP.ln();
        let inside = vs_from_ln_p(ln_p + 1e-9);
        let outside = vs_from_ln_p(ln_p - 1e-9);
        assert!((inside / outside - 1.0).abs() < 1e-6);
    }

    #[test]
    fn single_false_hypothesis_is_not_adjusted() {
        let cfg = MultipleConfig {
            n_hypotheses: 1,
            n_false: 1,
            delta: -4.0,
            n_seeds: 3,
            methods: vec![MultipleMethod::AvgAdjust],
        };
        let s = run_multiple_experiment(&cfg, 9, Execution::Sequential).unwrap();
        let mut base: Vec<f64> = (0..3)
            .map(|seed| {
                let x = GaussianStream::new(9, seed).sample(-4.0);
                mixture_evalue(x, -4.0).get()
            })
            .collect();
        assert_eq!(s.rows()[0].values[0], lower_median(&mut base));
    }

    #[test]
    fn methods_parse() {
        assert_eq!(
            parse_methods("product-lr, universal,product-lr", CombiningMethod::parse).unwrap(),
            vec![CombiningMethod::ProductLr, CombiningMethod::Universal]
        );
        assert_eq!(parse_methods("holm", MultipleMethod::parse).unwrap().len(), 2);
        assert!(parse_methods("nope", CombiningMethod::parse).is_err());
        assert!(parse_methods("", MultipleMethod::parse).is_err());
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut c = CombiningConfig::figure2();
        c.fraction_alternative = 1.5;
        assert!(c.validate().is_err());
        let mut m = MultipleConfig::figure4();
        m.n_false = 21;
        assert!(m.validate().is_err());
    }
}
