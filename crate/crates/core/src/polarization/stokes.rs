use num_complex::Complex64;

use super::density::DensityMatrix;
use super::STOKES_BALL_TOL;
use crate::error::{Error, Result};

/// Stokes coordinates `Sᵢ = Tr(σᵢ ρ)`.
///
/// Index convention: `s1` is the D/A (real off-diagonal) axis, `s2` the R/L
/// axis and `s3` the H/V axis, so a 45° linear state sits at `(1, 1, 0, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StokesVector {
    pub s0: f64,
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
}

impl StokesVector {
    pub fn new(s0: f64, s1: f64, s2: f64, s3: f64) -> Self {
        Self { s0, s1, s2, s3 }
    }

    /// Length of the Poincaré-sphere vector `(s1, s2, s3)`.
    pub fn radius(&self) -> f64 {
        self.radius_sqr().sqrt()
    }

    pub fn radius_sqr(&self) -> f64 {
        self.s1 * self.s1 + self.s2 * self.s2 + self.s3 * self.s3
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        (self.radius_sqr() - 1.0).abs() <= tol
    }
}

pub fn stokes_from_density(rho: &DensityMatrix) -> StokesVector {
    let e = rho.entries();
    StokesVector {
        s0: e[0][0].re + e[1][1].re,
        s1: e[0][1].re + e[1][0].re,
        // Tr(σ₂ρ) = i(ρ₀₁ − ρ₁₀)
        s2: e[1][0].im - e[0][1].im,
        s3: e[0][0].re - e[1][1].re,
    }
}

/// `ρ = ½ Σᵢ Sᵢ σᵢ`.
pub fn density_from_stokes(s: &StokesVector) -> Result<DensityMatrix> {
    if (s.s0 - 1.0).abs() > STOKES_BALL_TOL {
        return Err(Error::UnnormalizedStokes(s.s0));
    }
    if s.radius_sqr() > 1.0 + STOKES_BALL_TOL {
        return Err(Error::NonPhysicalStokes { norm: s.radius() });
    }
    DensityMatrix::new(stokes_matrix(s))
}

/// `½ Σᵢ Sᵢ σᵢ` without any physicality check.
pub(crate) fn stokes_matrix(s: &StokesVector) -> [[Complex64; 2]; 2] {
    [
        [
            Complex64::new(0.5 * (s.s0 + s.s3), 0.0),
            Complex64::new(0.5 * s.s1, -0.5 * s.s2),
        ],
        [
            Complex64::new(0.5 * s.s1, 0.5 * s.s2),
            Complex64::new(0.5 * (s.s0 - s.s3), 0.0),
        ],
    ]
}
