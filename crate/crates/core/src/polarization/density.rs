use std::fmt;

use num_complex::Complex64;

use super::spectrum::hermitian_eigen;
use super::state::PureState;
use super::{HERMITIAN_TOL, PSD_TOL, TRACE_TOL};
use crate::error::{Error, Result};

/// 2×2 density operator: Hermitian, unit trace, positive semidefinite.
///
/// The invariants are checked at construction, so any value of this type
/// can be handed to the measurement and decomposition routines directly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    entries: [[Complex64; 2]; 2],
}

impl DensityMatrix {
    pub fn new(entries: [[Complex64; 2]; 2]) -> Result<Self> {
        validate(&entries)?;
        Ok(Self { entries })
    }

    /// Real symmetric matrix `[[a, b], [b, d]]`.
    pub fn from_real(a: f64, b: f64, d: f64) -> Result<Self> {
        Self::new([
            [Complex64::new(a, 0.0), Complex64::new(b, 0.0)],
            [Complex64::new(b, 0.0), Complex64::new(d, 0.0)],
        ])
    }

    pub fn maximally_mixed() -> Self {
        Self {
            entries: [
                [Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.0)],
                [Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0)],
            ],
        }
    }

    pub fn entries(&self) -> &[[Complex64; 2]; 2] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row][col]
    }

    pub fn trace(&self) -> f64 {
        self.entries[0][0].re + self.entries[1][1].re
    }

    /// True when every entry has zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.entries
            .iter()
            .flatten()
            .all(|z| z.im.abs() <= HERMITIAN_TOL)
    }

    /// Row-major entries as real parts, for real-valued matrices.
    pub fn real_parts(&self) -> [[f64; 2]; 2] {
        let e = &self.entries;
        [[e[0][0].re, e[0][1].re], [e[1][0].re, e[1][1].re]]
    }

    pub fn purity(&self) -> f64 {
        purity(self)
    }

    pub fn is_pure(&self, epsilon_purity: f64) -> bool {
        purity(self) > 1.0 - epsilon_purity
    }
}

impl fmt::Display for DensityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let real = self.is_real();
        let cell = |z: Complex64| {
            if real {
                format!("{:.6}", z.re)
            } else {
                format!("{:.6}{:+.6}i", z.re, z.im)
            }
        };
        let e = &self.entries;
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            cell(e[0][0]),
            cell(e[0][1]),
            cell(e[1][0]),
            cell(e[1][1])
        )
    }
}

fn validate(e: &[[Complex64; 2]; 2]) -> Result<()> {
    if e.iter()
        .flatten()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(Error::InvalidDensity("non-finite entry".into()));
    }
    if e[0][0].im.abs() > HERMITIAN_TOL || e[1][1].im.abs() > HERMITIAN_TOL {
        return Err(Error::InvalidDensity("diagonal has imaginary part".into()));
    }
    if (e[0][1] - e[1][0].conj()).norm() > HERMITIAN_TOL {
        return Err(Error::InvalidDensity("not Hermitian".into()));
    }
    let trace = e[0][0].re + e[1][1].re;
    if (trace - 1.0).abs() > TRACE_TOL {
        return Err(Error::InvalidDensity(format!("trace is {trace}")));
    }
    let eig = hermitian_eigen(e[0][0].re, e[1][1].re, e[0][1]);
    if eig.low < -PSD_TOL {
        return Err(Error::InvalidDensity(format!(
            "negative eigenvalue {}",
            eig.low
        )));
    }
    Ok(())
}

/// `|ψ⟩⟨ψ|` for a real-amplitude state.
pub fn density_of_pure(state: PureState) -> DensityMatrix {
    let (a0, a1) = state.amplitudes();
    DensityMatrix {
        entries: [
            [Complex64::new(a0 * a0, 0.0), Complex64::new(a0 * a1, 0.0)],
            [Complex64::new(a0 * a1, 0.0), Complex64::new(a1 * a1, 0.0)],
        ],
    }
}

/// `tr(ρ²)`, in `[0.5, 1]` for a valid density matrix.
pub fn purity(rho: &DensityMatrix) -> f64 {
    let e = &rho.entries;
    e[0][0].re * e[0][0].re + e[1][1].re * e[1][1].re + 2.0 * e[0][1].norm_sqr()
}

/// Frobenius norm of `a − b`.
pub fn matrix_distance(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    a.entries
        .iter()
        .flatten()
        .zip(b.entries.iter().flatten())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}
