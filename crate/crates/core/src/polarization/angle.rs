use std::fmt;

use crate::error::{Error, Result};

/// Linear polarization angle in degrees, reduced to `[0, 180)`.
///
/// A linear polarization at `θ` and `θ + 180°` is the same physical state,
/// so every constructor folds the input into the half-open canonical range.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct PolarizationAngle(f64);

impl PolarizationAngle {
    pub const ZERO: Self = Self(0.0);
    pub const RIGHT: Self = Self(90.0);

    pub fn new(raw_degrees: f64) -> Result<Self> {
        normalize_angle(raw_degrees)
    }

    pub fn degrees(self) -> f64 {
        self.0
    }

    pub fn radians(self) -> f64 {
        self.0.to_radians()
    }

    /// Adds `delta` and folds the sum back into `[0, 180)`.
    pub fn rotated(self, delta: PolarizationAngle) -> Self {
        fold(self.0 + delta.0)
    }

    /// Signed offset from `self` to `other`, in `(-90, 90]`.
    pub fn signed_offset_to(self, other: PolarizationAngle) -> f64 {
        let mut d = (other.0 - self.0).rem_euclid(180.0);
        if d > 90.0 {
            d -= 180.0;
        }
        d
    }
}

impl fmt::Display for PolarizationAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6}", self.0)
    }
}

/// Reduces `raw_degrees` modulo 180 into `[0, 180)`.
pub fn normalize_angle(raw_degrees: f64) -> Result<PolarizationAngle> {
    if !raw_degrees.is_finite() {
        return Err(Error::NonFiniteAngle(raw_degrees));
    }
    Ok(fold(raw_degrees))
}

fn fold(degrees: f64) -> PolarizationAngle {
    let r = degrees.rem_euclid(180.0);
    // rem_euclid of a tiny negative rounds up to exactly 180.0
    PolarizationAngle(if r >= 180.0 { 0.0 } else { r })
}
