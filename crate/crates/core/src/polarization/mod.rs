//! Single-qubit linear-polarization algebra: angles, pure states, density
//! operators, mixtures, rotations, Stokes coordinates and 2×2 spectra.

mod angle;
mod density;
mod ensemble;
mod spectrum;
mod state;
mod stokes;

pub use angle::{normalize_angle, PolarizationAngle};
pub use density::{density_of_pure, matrix_distance, purity, DensityMatrix};
pub use ensemble::{ensemble_density, rotate_ensemble, Component, PhotonEnsemble};
pub use spectrum::{eigendecompose, Spectrum};
pub use state::{pure_state, PureState};
pub use stokes::{density_from_stokes, stokes_from_density, StokesVector};

pub(crate) use spectrum::hermitian_eigen;
pub(crate) use stokes::stokes_matrix;

pub const NORM_TOL: f64 = 1e-12;
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;
pub const STOKES_BALL_TOL: f64 = 1e-10;
/// `|λ_max − λ_min|` below this leaves the eigenvector angles undefined.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Density matrix of the pure linear polarization at `angle`.
pub fn density_at(angle: PolarizationAngle) -> DensityMatrix {
    density_of_pure(pure_state(angle))
}
