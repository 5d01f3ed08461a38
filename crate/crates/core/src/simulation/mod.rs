//! Reproducible Gaussian experiments producing median trajectories over
//! seeds.

mod csv;
mod evalues;
mod experiments;
mod rng;

pub use csv::{format_significant, Series, SeriesResult};
pub use evalues::{lr_evalue, mixture_evalue, mixture_evalue_weighted, neyman_pearson_pvalue, universal_martingale};
pub use experiments::{
    parse_methods, run_combining_experiment, run_multiple_experiment, CombiningConfig, CombiningMethod, MultipleConfig,
    MultipleMethod,
};
pub use rng::{gaussian_sample, GaussianStream};
