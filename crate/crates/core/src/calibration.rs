//! p-to-e calibrators, the VS bound, and e-to-p calibration.
//!
//! A decreasing `f: [0,1] → [0,∞]` is a calibrator exactly when
//! `∫₀¹ f ≤ 1`; [`check_calibrator`] tests that condition numerically.

use std::fmt;

use crate::error::{Error, Result};
use crate::numerics::{integrate_unit_interval, lower_incomplete_gamma, Quadrature};
use crate::types::{EValue, PValue};

/// p-values below this are treated as exact zeros and mapped to +inf.
///
/// The formulas overflow or lose their singular behaviour long before the
/// mathematical limit, so we short-circuit instead of returning a large
/// finite value that merely reflects rounding.
pub const P_CLAMP: f64 = 1e-300;

fn check_open_unit_kappa(kappa: f64) -> Result<()> {
    if kappa > 0.0 && kappa < 1.0 {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange {
            name: "kappa",
            value: kappa,
            expected: "0 < kappa < 1",
        })
    }
}

fn check_positive_kappa(kappa: f64) -> Result<()> {
    if kappa > 0.0 && kappa.is_finite() {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange {
            name: "kappa",
            value: kappa,
            expected: "kappa > 0",
        })
    }
}

/// The power calibrator `κ p^{κ−1}`, κ ∈ (0, 1).
pub fn calibrate_power(p: PValue, kappa: f64) -> Result<EValue> {
    check_open_unit_kappa(kappa)?;
    let p = p.get();
    if p < P_CLAMP {
        return Ok(EValue::INFINITY);
    }
    Ok(EValue::new_unchecked(kappa * p.powf(kappa - 1.0)))
}

/// The VS bound `max_κ κ p^{κ−1}`.
///
/// This is an upper bound on what the power family can achieve and is **not**
/// a valid e-value; it is returned as a plain number and deliberately kept
/// out of [`CalibratorSpec`].
pub fn vs_bound(p: PValue) -> f64 {
    let p = p.get();
    if p < P_CLAMP {
        return f64::INFINITY;
    }
    if p <= (-1.0f64).exp() {
        let v = -(-1.0f64).exp() / (p * p.ln());
        v.max(1.0)
    } else {
        1.0
    }
}

/// The power family integrated over κ ∈ [0, 1]:
/// `(1 − p + p ln p) / (p (−ln p)²)`.
///
/// With t = −ln p this equals `(e^t − 1 − t)/t²`; for t < 1 that form is
/// summed as a series to avoid cancellation near p = 1, where the limit is 1/2.
pub fn calibrate_integrated(p: PValue) -> EValue {
    let p = p.get();
    if p < P_CLAMP {
        return EValue::INFINITY;
    }
    let t = -p.ln();
    let v = if t < 1.0 {
        // Σ_{j≥0} t^j / (j+2)!
        let mut term = 0.5;
        let mut sum = term;
        let mut j = 0.0;
        while term > sum * 1e-18 {
            j += 1.0;
            term *= t / (j + 2.0);
            sum += term;
        }
        sum
    } else {
        (1.0 - p + p * p.ln()) / (p * t * t)
    };
    EValue::new_unchecked(v)
}

/// The calibrator `H_κ`: `κ(1+κ)^κ / (p (−ln p)^{1+κ})` on `(0, e^{−1−κ}]`,
/// zero above and +inf at zero.
pub fn calibrate_h(p: PValue, kappa: f64) -> Result<EValue> {
    check_positive_kappa(kappa)?;
    let p = p.get();
    if p < P_CLAMP {
        return Ok(EValue::INFINITY);
    }
    if p > (-1.0 - kappa).exp() {
        return Ok(EValue::ZERO);
    }
    let t = -p.ln();
    let v = kappa * (1.0 + kappa).powf(kappa) / (p * t.powf(1.0 + kappa));
    Ok(EValue::new_unchecked(v))
}

/// The calibrator `F_κ(p) = κ γ(1+κ, −ln p) / (p (−ln p)^{1+κ})`, the
/// power family mixed over κ' with density κ κ'^{κ−1}.
///
/// At p = 1 the continuous limit κ/(1+κ) is returned.
pub fn calibrate_f_kappa(p: PValue, kappa: f64) -> Result<EValue> {
    check_positive_kappa(kappa)?;
    let p = p.get();
    if p < P_CLAMP {
        return Ok(EValue::INFINITY);
    }
    if p == 1.0 {
        return Ok(EValue::new_unchecked(kappa / (1.0 + kappa)));
    }
    let t = -p.ln();
    let a = 1.0 + kappa;
    let g = lower_incomplete_gamma(a, t)?;
    Ok(EValue::new_unchecked(kappa * g / (p * t.powf(a))))
}

/// The admissible e-to-p calibrator `min(1, 1/e)`.
pub fn e_to_p(e: EValue) -> PValue {
    let e = e.get();
    if e <= 1.0 {
        PValue::ONE
    } else {
        PValue::clamped(1.0 / e)
    }
}

/// A calibrator from the implemented catalogue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CalibratorSpec {
    /// `κ p^{κ−1}`, κ ∈ (0, 1).
    PowerKappa(f64),
    /// The power family integrated over κ.
    Integrated,
    /// `H_κ`, κ > 0.
    HKappa(f64),
    /// `F_κ`, κ > 0.
    FKappa(f64),
}

impl CalibratorSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            CalibratorSpec::PowerKappa(k) => check_open_unit_kappa(k),
            CalibratorSpec::Integrated => Ok(()),
            CalibratorSpec::HKappa(k) | CalibratorSpec::FKappa(k) => check_positive_kappa(k),
        }
    }

    pub fn apply(&self, p: PValue) -> Result<EValue> {
        match *self {
            CalibratorSpec::PowerKappa(k) => calibrate_power(p, k),
            CalibratorSpec::Integrated => Ok(calibrate_integrated(p)),
            CalibratorSpec::HKappa(k) => calibrate_h(p, k),
            CalibratorSpec::FKappa(k) => calibrate_f_kappa(p, k),
        }
    }

    /// Parses `power:0.5`, `integrated`, `h:1`, `f:2`.
    pub fn parse(s: &str) -> Result<Self> {
        let (name, param) = match s.split_once(':') {
            Some((n, v)) => (n, Some(v)),
            None => (s, None),
        };
        let kappa = || -> Result<f64> {
            param
                .ok_or_else(|| Error::UnknownMethod(format!("{s} (missing :kappa)")))?
                .parse::<f64>()
                .map_err(|_| Error::UnknownMethod(s.to_string()))
        };
        let spec = match name {
            "power" => CalibratorSpec::PowerKappa(kappa()?),
            "integrated" => CalibratorSpec::Integrated,
            "h" => CalibratorSpec::HKappa(kappa()?),
            "f" => CalibratorSpec::FKappa(kappa()?),
            _ => return Err(Error::UnknownMethod(s.to_string())),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for CalibratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CalibratorSpec::PowerKappa(k) => write!(f, "power:{k}"),
            CalibratorSpec::Integrated => write!(f, "integrated"),
            CalibratorSpec::HKappa(k) => write!(f, "h:{k}"),
            CalibratorSpec::FKappa(k) => write!(f, "f:{k}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CalibratorVerdict {
    Valid { integral: Quadrature },
    Invalid { integral: Quadrature, excess: f64 },
}

impl CalibratorVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, CalibratorVerdict::Valid { .. })
    }
}

/// Checks `∫₀¹ f ≤ 1 + tol` for a decreasing `f`.
pub fn check_calibrator<F: Fn(f64) -> f64>(f: F, tol: f64) -> Result<CalibratorVerdict> {
    let integral = integrate_unit_interval(f, tol)?;
    if integral.value <= 1.0 + tol {
        Ok(CalibratorVerdict::Valid { integral })
    } else {
        Ok(CalibratorVerdict::Invalid {
            integral,
            excess: integral.value - 1.0,
        })
    }
}

/// Jeffreys's evidence categories for an e-value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum JeffreysCategory {
    SupportsNull,
    BareMention,
    Substantial,
    Strong,
    VeryStrong,
    Decisive,
}

impl JeffreysCategory {
    pub fn label(self) -> &'static str {
        match self {
            JeffreysCategory::SupportsNull => "supports-null",
            JeffreysCategory::BareMention => "bare-mention",
            JeffreysCategory::Substantial => "substantial",
            JeffreysCategory::Strong => "strong",
            JeffreysCategory::VeryStrong => "very-strong",
            JeffreysCategory::Decisive => "decisive",
        }
    }
}

impl fmt::Display for JeffreysCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Cut points 1, √10, 10, 10^{3/2}, 100; each interval is closed on the left.
pub fn jeffreys_category(e: EValue) -> JeffreysCategory {
    let e = e.get();
    let sqrt10 = 10f64.sqrt();
    if e < 1.0 {
        JeffreysCategory::SupportsNull
    } else if e < sqrt10 {
        JeffreysCategory::BareMention
    } else if e < 10.0 {
        JeffreysCategory::Substantial
    } else if e < 10.0 * sqrt10 {
        JeffreysCategory::Strong
    } else if e < 100.0 {
        JeffreysCategory::VeryStrong
    } else {
        JeffreysCategory::Decisive
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn p(x: f64) -> PValue {
        PValue::new(x).unwrap()
    }

    #[test]
    fn power_examples() {
        assert_eq!(calibrate_power(p(0.25), 0.5).unwrap().get(), 1.0);
        assert_eq!(calibrate_power(p(1.0), 0.3).unwrap().get(), 0.3);
        assert!(calibrate_power(p(0.0), 0.3).unwrap().is_infinite());
        assert!(calibrate_power(p(0.5), 1.0).is_err());
        assert!(calibrate_power(p(0.5), 0.0).is_err());
    }

    #[test]
    fn vs_examples() {
        assert!((vs_bound(p((-1.0f64).exp())) - 1.0).abs() < 1e-15);
        assert_eq!(vs_bound(p(0.5)), 1.0);
        assert!((vs_bound(p(0.01)) - 7.988).abs() < 1e-3);
        assert!(vs_bound(p(0.0)).is_infinite());
    }

    #[test]
    fn integrated_examples() {
        assert!(calibrate_integrated(p(0.0)).is_infinite());
        let at_inv_e = calibrate_integrated(p((-1.0f64).exp())).get();
        assert!((at_inv_e - (E - 2.0)).abs() < 1e-12);
        assert_eq!(calibrate_integrated(p(1.0)).get(), 0.5);
        let near_one = calibrate_integrated(p(1.0 - 1e-8)).get();
        assert!((near_one - 0.5).abs() < 1e-8);
    }

    #[test]
    fn integrated_branches_agree_at_switch() {
        // t = 1 is the switch between series and closed form.
        let lo = calibrate_integrated(p((-0.999_999_9f64).exp())).get();
        let hi = calibrate_integrated(p((-1.000_000_1f64).exp())).get();
        assert!((lo - hi).abs() < 1e-6);
    }

    #[test]
    fn h_examples() {
        assert_eq!(calibrate_h(p(0.5), 1.0).unwrap().get(), 0.0);
        let v = calibrate_h(p((-2.0f64).exp()), 1.0).unwrap().get();
        assert!((v - 3.694_528).abs() < 1e-6, "{v}");
        assert!(calibrate_h(p(0.0), 1.0).unwrap().is_infinite());
        assert!(calibrate_h(p(0.1), 0.0).is_err());
    }

    #[test]
    fn f_kappa_examples() {
        let v = calibrate_f_kappa(p((-1.0f64).exp()), 1.0).unwrap().get();
        assert!((v - 0.718_282).abs() < 1e-6);
        assert!((v - calibrate_integrated(p((-1.0f64).exp())).get()).abs() < 1e-9);
        assert!(calibrate_f_kappa(p(0.0), 2.0).unwrap().is_infinite());
        assert!(calibrate_f_kappa(p(0.3), -1.0).is_err());
        assert_eq!(calibrate_f_kappa(p(1.0), 1.0).unwrap().get(), 0.5);
        let near = calibrate_f_kappa(p(1.0 - 1e-8), 3.0).unwrap().get();
        assert!((near - 0.75).abs() < 1e-7);
    }

    #[test]
    fn e_to_p_examples() {
        assert_eq!(e_to_p(EValue::new(2.0).unwrap()).get(), 0.5);
        assert_eq!(e_to_p(EValue::new(0.5).unwrap()).get(), 1.0);
        assert_eq!(e_to_p(EValue::INFINITY).get(), 0.0);
        assert_eq!(e_to_p(EValue::ZERO).get(), 1.0);
    }

    #[test]
    fn check_calibrator_examples() {
        let power = check_calibrator(|x| calibrate_power(p(x), 0.5).unwrap().get(), 1e-9).unwrap();
        assert!(power.is_valid());
        match check_calibrator(|_| 2.0, 1e-9).unwrap() {
            CalibratorVerdict::Invalid { excess, .. } => assert!((excess - 1.0).abs() < 1e-9),
            v => panic!("expected invalid, got {v:?}"),
        }
        match check_calibrator(|x| if x <= 0.1 { 10.0 } else { 0.0 }, 1e-9).unwrap() {
            CalibratorVerdict::Valid { integral } => assert!((integral.value - 1.0).abs() < 1e-9),
            v => panic!("expected valid, got {v:?}"),
        }
    }

    #[test]
    fn jeffreys_examples() {
        let cat = |x: f64| jeffreys_category(EValue::new(x).unwrap());
        assert_eq!(cat(0.5), JeffreysCategory::SupportsNull);
        assert_eq!(cat(2.0), JeffreysCategory::BareMention);
        assert_eq!(cat(5.0), JeffreysCategory::Substantial);
        assert_eq!(cat(20.0), JeffreysCategory::Strong);
        assert_eq!(cat(50.0), JeffreysCategory::VeryStrong);
        assert_eq!(cat(150.0), JeffreysCategory::Decisive);
        assert_eq!(cat(f64::INFINITY), JeffreysCategory::Decisive);
    }

    #[test]
    fn spec_parsing() {
        assert_eq!(
            CalibratorSpec::parse("power:0.5").unwrap(),
            CalibratorSpec::PowerKappa(0.5)
        );
        assert_eq!(CalibratorSpec::parse("integrated").unwrap(), CalibratorSpec::Integrated);
        assert!(CalibratorSpec::parse("power:1.5").is_err());
        assert!(CalibratorSpec::parse("vs").is_err());
    }
}
