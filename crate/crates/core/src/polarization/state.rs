use super::angle::PolarizationAngle;
use super::NORM_TOL;
use crate::error::{Error, Result};

/// Real-amplitude qubit state `a0|H⟩ + a1|V⟩`.
///
/// The protocol only ever prepares linear polarizations, so amplitudes are real.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureState {
    a0: f64,
    a1: f64,
}

impl PureState {
    pub fn new(a0: f64, a1: f64) -> Result<Self> {
        let norm = a0 * a0 + a1 * a1;
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidConfig(format!(
                "pure state amplitudes must have unit norm, got {norm}"
            )));
        }
        Ok(Self { a0, a1 })
    }

    pub fn amplitudes(&self) -> (f64, f64) {
        (self.a0, self.a1)
    }
}

/// `cos θ |H⟩ + sin θ |V⟩`.
pub fn pure_state(angle: PolarizationAngle) -> PureState {
    let (s, c) = angle.radians().sin_cos();
    PureState { a0: c, a1: s }
}
