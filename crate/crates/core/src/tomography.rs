//! Simulated projective polarization tomography.
//!
//! Each of the three bases (H/V, D/A, R/L) receives the same number of
//! photons. Counts are turned into a Stokes estimate by frequency
//! differences, inverted linearly, and projected back onto the set of
//! physical density matrices when sampling noise pushes the estimate
//! outside the Poincaré ball.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use rand::distr::{Bernoulli, Distribution};

use crate::error::{Error, Result};
use crate::polarization::{
    hermitian_eigen, stokes_from_density, stokes_matrix, DensityMatrix, StokesVector,
};
use crate::rng::{rng_from_seed, SimRng};

pub const COUNTS_CSV_HEADER: &str = "n_h,n_v,n_d,n_a,n_r,n_l";

/// Photon counts per projector outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MeasurementCounts {
    pub n_h: u64,
    pub n_v: u64,
    pub n_d: u64,
    pub n_a: u64,
    pub n_r: u64,
    pub n_l: u64,
}

impl MeasurementCounts {
    pub fn new(n_h: u64, n_v: u64, n_d: u64, n_a: u64, n_r: u64, n_l: u64) -> Self {
        Self {
            n_h,
            n_v,
            n_d,
            n_a,
            n_r,
            n_l,
        }
    }

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.n_h, self.n_v, self.n_d, self.n_a, self.n_r, self.n_l
        )
    }

    /// Header plus one row.
    pub fn to_csv(&self) -> String {
        format!("{COUNTS_CSV_HEADER}\n{}\n", self.to_csv_row())
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv()).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

/// Born-rule outcome probabilities for the six projectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BornProbabilities {
    pub p_h: f64,
    pub p_v: f64,
    pub p_d: f64,
    pub p_a: f64,
    pub p_r: f64,
    pub p_l: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProjectionMode {
    /// Clip negative eigenvalues to zero and renormalize the trace.
    #[default]
    ClipRenormalize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TomographyConfig {
    pub photons_per_basis: u64,
    pub seed: u64,
    pub projection_mode: ProjectionMode,
}

impl TomographyConfig {
    pub fn new(photons_per_basis: u64, seed: u64) -> Result<Self> {
        let config = Self {
            photons_per_basis,
            seed,
            projection_mode: ProjectionMode::ClipRenormalize,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.photons_per_basis == 0 {
            return Err(Error::InvalidConfig(
                "photons_per_basis must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

pub fn born_probabilities(rho: &DensityMatrix) -> BornProbabilities {
    let s = stokes_from_density(rho);
    let p_h = rho.get(0, 0).re.clamp(0.0, 1.0);
    let p_d = (0.5 * (1.0 + s.s1)).clamp(0.0, 1.0);
    let p_r = (0.5 * (1.0 + s.s2)).clamp(0.0, 1.0);
    BornProbabilities {
        p_h,
        p_v: 1.0 - p_h,
        p_d,
        p_a: 1.0 - p_d,
        p_r,
        p_l: 1.0 - p_r,
    }
}

/// Draws `config.photons_per_basis` outcomes per basis from a generator
/// seeded with `config.seed`.
pub fn simulate_counts(rho: &DensityMatrix, config: &TomographyConfig) -> MeasurementCounts {
    let mut rng = rng_from_seed(config.seed);
    simulate_counts_with(rho, config.photons_per_basis, &mut rng)
}

/// Same as [`simulate_counts`] with a caller-owned generator.
pub fn simulate_counts_with(
    rho: &DensityMatrix,
    photons_per_basis: u64,
    rng: &mut SimRng,
) -> MeasurementCounts {
    let p = born_probabilities(rho);
    let mut draw = |prob: f64| -> (u64, u64) {
        let bern = Bernoulli::new(prob).expect("probability clamped to [0, 1]");
        let hits = (0..photons_per_basis).filter(|_| bern.sample(rng)).count() as u64;
        (hits, photons_per_basis - hits)
    };
    let (n_h, n_v) = draw(p.p_h);
    let (n_d, n_a) = draw(p.p_d);
    let (n_r, n_l) = draw(p.p_r);
    MeasurementCounts {
        n_h,
        n_v,
        n_d,
        n_a,
        n_r,
        n_l,
    }
}

pub fn stokes_estimate(counts: &MeasurementCounts) -> Result<StokesVector> {
    let contrast = |plus: u64, minus: u64, basis: &'static str| -> Result<f64> {
        let total = plus + minus;
        if total == 0 {
            return Err(Error::EmptyBasis(basis));
        }
        Ok((plus as f64 - minus as f64) / total as f64)
    };
    Ok(StokesVector {
        s0: 1.0,
        s1: contrast(counts.n_d, counts.n_a, "D/A")?,
        s2: contrast(counts.n_r, counts.n_l, "R/L")?,
        s3: contrast(counts.n_h, counts.n_v, "H/V")?,
    })
}

/// Stokes vector implied by exact outcome probabilities (infinite-sample limit).
pub fn stokes_from_probabilities(p: &BornProbabilities) -> StokesVector {
    StokesVector {
        s0: 1.0,
        s1: p.p_d - p.p_a,
        s2: p.p_r - p.p_l,
        s3: p.p_h - p.p_v,
    }
}

/// Linear inversion followed by projection onto physical states.
pub fn reconstruct(counts: &MeasurementCounts) -> Result<DensityMatrix> {
    Ok(project_physical(&stokes_estimate(counts)?))
}

/// Reconstruction from exact probabilities instead of sampled counts.
pub fn reconstruct_exact(p: &BornProbabilities) -> DensityMatrix {
    project_physical(&stokes_from_probabilities(p))
}

/// Density matrix `½ Σ Sᵢσᵢ`, with negative eigenvalues clipped to zero and
/// the trace renormalized when the raw estimate is not positive semidefinite.
pub fn project_physical(s: &StokesVector) -> DensityMatrix {
    let raw = stokes_matrix(s);
    let eig = hermitian_eigen(raw[0][0].re, raw[1][1].re, raw[0][1]);
    if eig.low >= 0.0 {
        if let Ok(rho) = DensityMatrix::new(raw) {
            return rho;
        }
    }
    let high = eig.high.max(0.0);
    let low = eig.low.max(0.0);
    let sum = high + low;
    if sum <= 0.0 {
        return DensityMatrix::maximally_mixed();
    }
    let (wh, wl) = (high / sum, low / sum);
    let outer = |v: &[Complex64; 2], i: usize, j: usize| v[i] * v[j].conj();
    let entry = |i, j| wh * outer(&eig.v_high, i, j) + wl * outer(&eig.v_low, i, j);
    let a = entry(0, 0).re;
    let d = entry(1, 1).re;
    let b = entry(0, 1);
    let tr = a + d;
    DensityMatrix::new([
        [Complex64::new(a / tr, 0.0), b / tr],
        [b.conj() / tr, Complex64::new(d / tr, 0.0)],
    ])
    .expect("clipped spectral reconstruction is physical")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polarization::{density_at, matrix_distance, PolarizationAngle};

    fn rho_at(deg: f64) -> DensityMatrix {
        density_at(PolarizationAngle::new(deg).unwrap())
    }

    #[test]
    fn born_examples() {
        let p = born_probabilities(&rho_at(30.0));
        assert!((p.p_h - 0.75).abs() < 1e-12);
        assert!((p.p_v - 0.25).abs() < 1e-12);

        let p = born_probabilities(&DensityMatrix::from_real(0.5, 0.5, 0.5).unwrap());
        assert_eq!((p.p_d, p.p_a), (1.0, 0.0));

        let p = born_probabilities(&DensityMatrix::maximally_mixed());
        for q in [p.p_h, p.p_v, p.p_d, p.p_a, p.p_r, p.p_l] {
            assert_eq!(q, 0.5);
        }
    }

    #[test]
    fn deterministic_outcome_counts() {
        let cfg = TomographyConfig::new(1000, 99).unwrap();
        let c = simulate_counts(&rho_at(0.0), &cfg);
        assert_eq!((c.n_h, c.n_v), (1000, 0));
    }

    #[test]
    fn counts_are_reproducible() {
        let cfg = TomographyConfig::new(100, 42).unwrap();
        assert_eq!(
            simulate_counts(&rho_at(30.0), &cfg),
            simulate_counts(&rho_at(30.0), &cfg)
        );
    }

    #[test]
    fn large_sample_frequency() {
        let cfg = TomographyConfig::new(1_000_000, 3).unwrap();
        let c = simulate_counts(&rho_at(30.0), &cfg);
        let f = c.n_h as f64 / 1e6;
        assert!((0.7487..=0.7513).contains(&f), "{f}");
    }

    #[test]
    fn zero_photons_rejected() {
        assert!(TomographyConfig::new(0, 1).is_err());
    }

    #[test]
    fn stokes_from_counts() {
        let s = stokes_estimate(&MeasurementCounts::new(75, 25, 93, 7, 50, 50)).unwrap();
        assert!((s.s1 - 0.86).abs() < 1e-12);
        assert_eq!(s.s2, 0.0);
        assert!((s.s3 - 0.5).abs() < 1e-12);

        let s = stokes_estimate(&MeasurementCounts::new(5, 5, 5, 5, 5, 5)).unwrap();
        assert_eq!(s, StokesVector::new(1.0, 0.0, 0.0, 0.0));

        let s = stokes_estimate(&MeasurementCounts::new(100, 0, 50, 50, 50, 50)).unwrap();
        assert_eq!(s, StokesVector::new(1.0, 0.0, 0.0, 1.0));
    }

    #[test]
    fn empty_basis_is_an_error() {
        let err = stokes_estimate(&MeasurementCounts::new(10, 0, 0, 0, 5, 5)).unwrap_err();
        assert!(matches!(err, Error::EmptyBasis("D/A")));
        assert!(reconstruct(&MeasurementCounts::default()).is_err());
    }

    #[test]
    fn reconstruct_rounded_counts() {
        let c = MeasurementCounts::new(750, 250, 933, 67, 500, 500);
        let rho = reconstruct(&c).unwrap();
        assert!(matrix_distance(&rho, &rho_at(30.0)) < 2e-3);
    }

    #[test]
    fn reconstruct_projects_overlong_vectors() {
        let c = MeasurementCounts::new(100, 0, 100, 0, 50, 50);
        let rho = reconstruct(&c).unwrap();
        let sp = crate::polarization::eigendecompose(&rho);
        assert!(sp.lambda_min >= 0.0);
        assert!((rho.trace() - 1.0).abs() < 1e-12);
        // clipping keeps the direction and lands on the sphere surface
        let s = stokes_from_density(&rho);
        assert!((s.radius() - 1.0).abs() < 1e-12);
        assert!((s.s1 - s.s3).abs() < 1e-12);
    }

    #[test]
    fn reconstruct_uniform_counts() {
        let rho = reconstruct(&MeasurementCounts::new(7, 7, 7, 7, 7, 7)).unwrap();
        assert_eq!(rho, DensityMatrix::maximally_mixed());
    }

    #[test]
    fn exact_mode_is_lossless() {
        let mixed = DensityMatrix::from_real(0.7, 0.4464, 0.3).unwrap();
        for rho in [rho_at(30.0), mixed, DensityMatrix::maximally_mixed()] {
            let back = reconstruct_exact(&born_probabilities(&rho));
            assert!(matrix_distance(&back, &rho) < 1e-12);
        }
    }

    #[test]
    fn csv_row() {
        let c = MeasurementCounts::new(1, 2, 3, 4, 5, 6);
        assert_eq!(c.to_csv(), "n_h,n_v,n_d,n_a,n_r,n_l\n1,2,3,4,5,6\n");
    }
}
