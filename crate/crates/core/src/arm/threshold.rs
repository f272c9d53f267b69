use serde::{Deserialize, Serialize};

use super::ArmError;

/// Fixed-point scale for threshold comparisons (nine decimal places).
const SCALE: u128 = 1_000_000_000;

/// A non-negative decimal cut-off compared against count ratios exactly.
///
/// The value is rounded to nine decimals once, so `count / n >= 0.05`
/// becomes `count * 10^9 >= 50_000_000 * n` with no float rounding at the
/// boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Threshold {
    units: u128,
}

impl Threshold {
    pub fn new(value: f64) -> Result<Self, ArmError> {
        if !value.is_finite() || value < 0.0 {
            return Err(ArmError::Threshold(format!(
                "threshold must be finite and non-negative, got {value}"
            )));
        }
        Ok(Threshold {
            units: (value * SCALE as f64).round() as u128,
        })
    }

    pub fn value(&self) -> f64 {
        self.units as f64 / SCALE as f64
    }

    /// `num / den >= self`, for `den > 0`.
    pub fn admits(&self, num: u128, den: u128) -> bool {
        num * SCALE >= self.units * den
    }

    /// Smallest count `c` with `c / n >= self`.
    pub fn min_count(&self, n: usize) -> usize {
        (self.units * n as u128).div_ceil(SCALE) as usize
    }
}

/// Rule mining cut-offs: minimum support, confidence and lift, and the
/// maximum number of items in a rule (antecedent plus consequent).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    pub min_support: f64,
    pub min_confidence: f64,
    pub min_lift: f64,
    pub max_len: usize,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            min_support: 0.05,
            min_confidence: 0.6,
            min_lift: 1.2,
            max_len: 3,
        }
    }
}

pub(crate) struct Cutoffs {
    pub support: Threshold,
    pub confidence: Threshold,
    pub lift: Threshold,
}

impl Thresholds {
    pub fn validate(&self) -> Result<(), ArmError> {
        let frac = |name: &str, v: f64| {
            if v > 0.0 && v <= 1.0 {
                Ok(())
            } else {
                Err(ArmError::Threshold(format!("{name} must be in (0, 1], got {v}")))
            }
        };
        frac("min_support", self.min_support)?;
        frac("min_confidence", self.min_confidence)?;
        if !(self.min_lift >= 0.0 && self.min_lift.is_finite()) {
            return Err(ArmError::Threshold(format!(
                "min_lift must be >= 0, got {}",
                self.min_lift
            )));
        }
        if self.max_len < 2 {
            return Err(ArmError::Threshold(format!(
                "max_len must be at least 2, got {}",
                self.max_len
            )));
        }
        Ok(())
    }

    pub(crate) fn cutoffs(&self) -> Result<Cutoffs, ArmError> {
        self.validate()?;
        Ok(Cutoffs {
            support: Threshold::new(self.min_support)?,
            confidence: Threshold::new(self.min_confidence)?,
            lift: Threshold::new(self.min_lift)?,
        })
    }
}
