//! Closed-form eigendecomposition of 2×2 Hermitian matrices.
//!
//! For `[[a, b], [b*, d]]` the eigenvalues are `m ± r` with `m = (a + d)/2`
//! and `r = √(((a − d)/2)² + |b|²)`. The eigenvalues of a density matrix are
//! the intensities of its two principal polarizations, and the eigenvector
//! angles give their directions.

use num_complex::Complex64;

use super::angle::PolarizationAngle;
use super::density::DensityMatrix;
use super::stokes::stokes_from_density;
use super::{DEGENERACY_TOL, HERMITIAN_TOL};

/// Eigenvalues (descending) and eigenvector angles of a density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spectrum {
    pub lambda_max: f64,
    pub lambda_min: f64,
    /// `None` when the spectrum is degenerate.
    pub principal_angle: Option<PolarizationAngle>,
    pub minor_angle: Option<PolarizationAngle>,
    /// Unit eigenvector for `lambda_max`, first nonzero component real positive.
    pub principal_vector: [Complex64; 2],
    pub minor_vector: [Complex64; 2],
}

impl Spectrum {
    pub fn is_degenerate(&self) -> bool {
        self.principal_angle.is_none()
    }
}

pub(crate) struct RawEigen {
    pub high: f64,
    pub low: f64,
    pub v_high: [Complex64; 2],
    pub v_low: [Complex64; 2],
}

/// Eigen-solve for `[[a, b], [conj(b), d]]`; no validity assumptions.
pub(crate) fn hermitian_eigen(a: f64, d: f64, b: Complex64) -> RawEigen {
    let mean = 0.5 * (a + d);
    let half_gap = 0.5 * (a - d);
    let r = half_gap.hypot(b.norm());
    let high = mean + r;
    let low = mean - r;

    // Two algebraically equivalent candidates; the longer one is better conditioned.
    let u = [b, Complex64::new(high - a, 0.0)];
    let w = [Complex64::new(high - d, 0.0), b.conj()];
    let nu = norm(&u);
    let nw = norm(&w);
    let v_high = if nu.max(nw) <= f64::MIN_POSITIVE {
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
    } else if nw >= nu {
        phase_normalize([w[0] / nw, w[1] / nw])
    } else {
        phase_normalize([u[0] / nu, u[1] / nu])
    };
    let v_low = phase_normalize([-v_high[1].conj(), v_high[0].conj()]);
    RawEigen {
        high,
        low,
        v_high,
        v_low,
    }
}

fn norm(v: &[Complex64; 2]) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr()).sqrt()
}

/// Rescales by a global phase so the first nonzero component is real positive.
fn phase_normalize(v: [Complex64; 2]) -> [Complex64; 2] {
    let pivot = if v[0].norm() > 1e-15 { v[0] } else { v[1] };
    let n = pivot.norm();
    if n == 0.0 {
        return v;
    }
    let phase = pivot.conj() / n;
    let mut out = [v[0] * phase, v[1] * phase];
    // kill the rounding residue on the pivot
    if v[0].norm() > 1e-15 {
        out[0].im = 0.0;
    } else {
        out[1].im = 0.0;
    }
    out
}

fn vector_angle(v: &[Complex64; 2]) -> PolarizationAngle {
    PolarizationAngle::new(v[1].re.atan2(v[0].re).to_degrees()).unwrap_or_default()
}

pub fn eigendecompose(rho: &DensityMatrix) -> Spectrum {
    let e = rho.entries();
    let raw = hermitian_eigen(e[0][0].re, e[1][1].re, e[0][1]);
    let lambda_min = raw.low.max(0.0);
    let lambda_max = raw.high.min(1.0);

    let (principal_angle, minor_angle) = if (raw.high - raw.low).abs() < DEGENERACY_TOL {
        (None, None)
    } else if rho.is_real() && raw.v_high.iter().all(|z| z.im.abs() <= HERMITIAN_TOL) {
        (
            Some(vector_angle(&raw.v_high)),
            Some(vector_angle(&raw.v_low)),
        )
    } else {
        // Complex eigenvectors: project the principal axis onto the linear
        // polarization plane of the Poincaré sphere.
        let s = stokes_from_density(rho);
        let principal =
            PolarizationAngle::new(0.5 * s.s1.atan2(s.s3).to_degrees()).unwrap_or_default();
        (
            Some(principal),
            Some(principal.rotated(PolarizationAngle::RIGHT)),
        )
    };

    Spectrum {
        lambda_max,
        lambda_min,
        principal_angle,
        minor_angle,
        principal_vector: raw.v_high,
        minor_vector: raw.v_low,
    }
}
