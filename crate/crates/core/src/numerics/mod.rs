//! Special functions used by the calibrators, Fisher's method and the
//! Gaussian experiments. All functions are pure and reentrant.

mod gamma;
mod normal;
mod quadrature;

pub use gamma::{chi2_ln_survival_even, chi2_survival_even, ln_gamma, lower_incomplete_gamma};
pub use normal::{std_normal_cdf, std_normal_pdf, std_normal_quantile};
pub use quadrature::{integrate_unit_interval, Quadrature};
