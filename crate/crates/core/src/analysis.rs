//! Dimension scans, sign-pattern analysis and the fixed-precision study.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::arithmetic::{to_sig_digits, PrecisionContext, Real};
use crate::energy::{self, dirichlet_sum, BoundaryCondition, EnergyResult, EnergySign};
use crate::error::{Error, Result};

/// Last dimension of the alternating Dirichlet sign pattern.
pub const LAST_ALTERNATING_DIMENSION: u32 = 34;

/// Base of the logarithm in [`scaled_value`].
pub const SCALED_LOG_BASE: u32 = 10;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignViolation {
    pub dimension: u32,
    pub expected: EnergySign,
    pub actual: EnergySign,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanReport {
    pub bc: BoundaryCondition,
    pub d_min: u32,
    pub d_max: u32,
    /// One result per dimension in `d_min..=d_max`, ascending.
    pub results: Vec<EnergyResult>,
    /// Smallest even D with a negative Dirichlet energy, when in range.
    pub critical_dimension: Option<u32>,
    pub sign_pattern_violations: Vec<SignViolation>,
}

/// Expected sign: Neumann is always negative; Dirichlet alternates as
/// (-1)^D through D = 34 and stays negative afterwards.
pub fn expected_sign(bc: BoundaryCondition, dimension: u32) -> EnergySign {
    match bc {
        BoundaryCondition::Neumann => EnergySign::Negative,
        BoundaryCondition::Dirichlet if dimension <= LAST_ALTERNATING_DIMENSION => EnergySign::alternating(dimension),
        BoundaryCondition::Dirichlet => EnergySign::Negative,
    }
}

pub fn scan(bc: BoundaryCondition, d_min: u32, d_max: u32, ctx: &PrecisionContext) -> Result<ScanReport> {
    if d_min < 1 || d_min > d_max {
        return Err(Error::invalid(format!(
            "scan range requires 1 <= from <= to, got {d_min}..{d_max}"
        )));
    }
    let results = (d_min..=d_max)
        .into_par_iter()
        .map(|d| energy::energy(bc, d, ctx))
        .collect::<Result<Vec<_>>>()?;
    let critical_dimension = match bc {
        BoundaryCondition::Dirichlet => results
            .iter()
            .find(|r| r.dimension % 2 == 0 && r.sign == EnergySign::Negative)
            .map(|r| r.dimension),
        BoundaryCondition::Neumann => None,
    };
    let sign_pattern_violations = results
        .iter()
        .filter_map(|r| {
            let expected = expected_sign(bc, r.dimension);
            (expected != r.sign).then_some(SignViolation {
                dimension: r.dimension,
                expected,
                actual: r.sign,
            })
        })
        .collect();
    Ok(ScanReport {
        bc,
        d_min,
        d_max,
        results,
        critical_dimension,
        sign_pattern_violations,
    })
}

/// -E / (|E| log10|E|) for 0 < |E| < 1; keeps the sign of E and maps the
/// magnitude to 1/|log10|E||.
pub fn scaled_value(e: &EnergyResult) -> Result<Real> {
    scaled_real(&e.value)
}

pub fn scaled_real(e: &Real) -> Result<Real> {
    if e.is_zero() {
        return Err(Error::invalid("scaled value undefined for E = 0"));
    }
    let digits = e.digits();
    let work = digits + 5;
    let magnitude = e.abs().with_digits(work);
    if magnitude >= Real::one(work) {
        return Err(Error::invalid("scaled value requires |E| < 1"));
    }
    let ln10 = Real::from_int(10, work).ln()?;
    let log10 = magnitude.ln()?.div_with(&ln10, work)?;
    let denom = magnitude.mul_with(&log10, work);
    Ok((-e.with_digits(work)).div_with(&denom, work)?.with_digits(digits))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SettingOutcome {
    pub digits: u32,
    /// First D whose one-significant-digit rendering (with sign) differs
    /// from the reference.
    pub first_first_digit_error: Option<u32>,
    pub first_sign_error: Option<u32>,
    /// Values in ascending D, as evaluated at the setting.
    #[serde(skip)]
    pub values: Vec<Real>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionStudyReport {
    pub d_min: u32,
    pub d_max: u32,
    pub digit_settings: Vec<u32>,
    pub reference_digits: u32,
    pub reference: Vec<Real>,
    pub per_setting: BTreeMap<u32, SettingOutcome>,
}

impl PrecisionStudyReport {
    pub fn dimensions(&self) -> impl Iterator<Item = u32> {
        self.d_min..=self.d_max
    }

    pub fn value(&self, digits: u32, dimension: u32) -> Option<&Real> {
        let idx = dimension.checked_sub(self.d_min)? as usize;
        self.per_setting.get(&digits)?.values.get(idx)
    }

    pub fn reference_value(&self, dimension: u32) -> Option<&Real> {
        self.reference.get(dimension.checked_sub(self.d_min)? as usize)
    }

    /// Dimensions where two settings disagree at `sig` significant digits.
    pub fn disagreements(&self, a: u32, b: u32, sig: u32) -> Result<Vec<u32>> {
        let mut out = Vec::new();
        for d in self.dimensions() {
            let (Some(x), Some(y)) = (self.value(a, d), self.value(b, d)) else {
                return Err(Error::invalid(format!("digit setting {a} or {b} not in study")));
            };
            if to_sig_digits(x, sig)? != to_sig_digits(y, sig)? {
                out.push(d);
            }
        }
        Ok(out)
    }
}

/// Evaluates the Dirichlet sum at each fixed decimal width (every operation
/// rounded half-even to that many digits, terms summed in ascending p, no
/// guard digits, no refusal) and compares against a guarded reference.
pub fn precision_study(
    d_min: u32,
    d_max: u32,
    digit_settings: &[u32],
    reference_digits: u32,
) -> Result<PrecisionStudyReport> {
    if d_min < 1 || d_min > d_max {
        return Err(Error::invalid(format!(
            "study range requires 1 <= from <= to, got {d_min}..{d_max}"
        )));
    }
    if digit_settings.is_empty() {
        return Err(Error::invalid("at least one digit setting is required"));
    }
    let max_setting = *digit_settings.iter().max().unwrap();
    if reference_digits <= max_setting + 20 {
        return Err(Error::invalid(format!(
            "reference precision {reference_digits} must exceed the largest setting {max_setting} by more than 20"
        )));
    }
    let reference_ctx = PrecisionContext::new(reference_digits)?;
    let reference = (d_min..=d_max)
        .into_par_iter()
        .map(|d| energy::dirichlet_energy(d, &reference_ctx).map(|r| r.value))
        .collect::<Result<Vec<_>>>()?;

    let mut per_setting = BTreeMap::new();
    for &digits in digit_settings {
        let ctx = PrecisionContext::new(digits)?;
        let values = (d_min..=d_max)
            .into_par_iter()
            .map(|d| dirichlet_sum(d, &ctx).map(|(v, _)| v))
            .collect::<Result<Vec<_>>>()?;
        let mut first_digit = None;
        let mut first_sign = None;
        for ((d, v), r) in (d_min..=d_max).zip(&values).zip(&reference) {
            if first_digit.is_none() && to_sig_digits(v, 1)? != to_sig_digits(r, 1)? {
                first_digit = Some(d);
            }
            if first_sign.is_none() && v.signum() != r.signum() {
                first_sign = Some(d);
            }
        }
        per_setting.insert(
            digits,
            SettingOutcome {
                digits,
                first_first_digit_error: first_digit,
                first_sign_error: first_sign,
                values,
            },
        );
    }
    let mut settings = digit_settings.to_vec();
    settings.sort_unstable();
    settings.dedup();
    Ok(PrecisionStudyReport {
        d_min,
        d_max,
        digit_settings: settings,
        reference_digits,
        reference,
        per_setting,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(s: &str) -> Real {
        Real::parse_with_digits(s, 30).unwrap()
    }

    #[test]
    fn scaled_value_examples() {
        assert_eq!(scaled_real(&real("-0.1")).unwrap(), real("-1"));
        assert_eq!(scaled_real(&real("0.01")).unwrap(), real("0.5"));
        assert!(scaled_real(&real("1")).is_err());
        assert!(scaled_real(&real("-2.5")).is_err());
        assert!(scaled_real(&Real::zero(30)).is_err());
    }

    #[test]
    fn scan_validation() {
        let c = PrecisionContext::new(20).unwrap();
        assert!(scan(BoundaryCondition::Dirichlet, 5, 3, &c).is_err());
        assert!(scan(BoundaryCondition::Dirichlet, 0, 3, &c).is_err());
    }

    #[test]
    fn neumann_scan_is_negative_and_growing() {
        let c = PrecisionContext::new(20).unwrap();
        let report = scan(BoundaryCondition::Neumann, 1, 6, &c).unwrap();
        assert!(report.sign_pattern_violations.is_empty());
        assert_eq!(report.critical_dimension, None);
        let mags: Vec<Real> = report.results.iter().map(|r| r.value.abs()).collect();
        assert!(mags.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn short_dirichlet_scan_has_no_critical_dimension() {
        let c = PrecisionContext::new(20).unwrap();
        let report = scan(BoundaryCondition::Dirichlet, 1, 34, &c).unwrap();
        assert_eq!(report.critical_dimension, None);
        assert!(report.sign_pattern_violations.is_empty());
        for r in &report.results {
            assert_eq!(r.sign, EnergySign::alternating(r.dimension));
        }
    }

    #[test]
    fn study_validation() {
        assert!(precision_study(10, 12, &[], 100).is_err());
        assert!(precision_study(10, 12, &[16, 50], 60).is_err());
        assert!(precision_study(12, 10, &[16], 100).is_err());
    }
}
