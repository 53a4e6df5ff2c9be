//! Simulator for the intensity-and-state-aware (ISA) polarization ping-pong
//! protocol: density-matrix eavesdropper detection, simulated single-qubit
//! tomography and peak-intensity sweeps.

pub mod cli;
pub mod error;
pub mod polarization;
pub mod protocol;
pub mod rng;
pub mod sweep;
pub mod tomography;

pub use error::{Error, Result};
pub use polarization::{
    density_at, density_from_stokes, density_of_pure, eigendecompose, ensemble_density,
    matrix_distance, normalize_angle, pure_state, purity, rotate_ensemble, stokes_from_density,
    DensityMatrix, PhotonEnsemble, PolarizationAngle, PureState, Spectrum, StokesVector,
};
pub use protocol::{
    decide, intensity_check, run_protocol, Bit, Decision, EveConfig, Mode, ProtocolConfig,
    ProtocolOutcome, StageIntensities,
};
pub use sweep::{closed_form_lambda_max, sweep_delta_family, sweep_siphon, SweepRecord, SweepSpec};
pub use tomography::{
    born_probabilities, reconstruct, simulate_counts, stokes_estimate, MeasurementCounts,
    TomographyConfig,
};
