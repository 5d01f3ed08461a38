//! Input generators shared by the integration tests.
#![allow(dead_code)]

use evalues::{EVector, PVector};
use rand::Rng;

/// An e-value of the form m · 2^j with a 4-bit mantissa, so that sums of a
/// dozen of them and their products are exact in binary floating point.
pub fn dyadic_evalue<R: Rng>(rng: &mut R) -> f64 {
    let m = rng.random_range(0..=15) as f64;
    let j = rng.random_range(-4..=3);
    m * 2f64.powi(j)
}

/// Dyadic e-values with occasional exact ties, zeros and +inf.
pub fn dyadic_evector<R: Rng>(rng: &mut R, k: usize, allow_infinite: bool) -> EVector {
    let mut v: Vec<f64> = (0..k).map(|_| dyadic_evalue(rng)).collect();
    if k > 1 && rng.random_bool(0.2) {
        let (a, b) = (rng.random_range(0..k), rng.random_range(0..k));
        v[a] = v[b];
    }
    if allow_infinite && rng.random_bool(0.05) {
        let i = rng.random_range(0..k);
        v[i] = f64::INFINITY;
    }
    EVector::new(v).unwrap()
}

/// p-values spread over several orders of magnitude, with ties and ones.
pub fn random_pvector<R: Rng>(rng: &mut R, k: usize) -> PVector {
    let mut v: Vec<f64> = (0..k)
        .map(|_| match rng.random_range(0..4) {
            0 => rng.random_range(0.0f64..1.0).max(f64::MIN_POSITIVE),
            1 => 10f64.powf(rng.random_range(-8.0..0.0)),
            2 => (rng.random_range(1..=20) as f64) / 20.0,
            _ => rng.random_range(0.0f64..0.1).max(1e-12),
        })
        .collect();
    if k > 1 && rng.random_bool(0.2) {
        let (a, b) = (rng.random_range(0..k), rng.random_range(0..k));
        v[a] = v[b];
    }
    PVector::new(v).unwrap()
}
