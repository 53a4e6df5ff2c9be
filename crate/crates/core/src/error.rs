use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("angle must be finite, got {0}")]
    NonFiniteAngle(f64),

    #[error("ensemble has no photons")]
    EmptyEnsemble,

    #[error("matrix is not a valid density matrix: {0}")]
    InvalidDensity(String),

    #[error("stokes vector is non-physical: |s| = {norm:.6} exceeds the unit ball")]
    NonPhysicalStokes { norm: f64 },

    #[error("stokes vector must have s0 = 1, got {0}")]
    UnnormalizedStokes(f64),

    #[error("no photons recorded in the {0} basis")]
    EmptyBasis(&'static str),

    #[error("stage {stage}: eve siphons {requested} photons but only {available} are available")]
    SiphonExceedsAvailable {
        stage: u8,
        requested: u64,
        available: u64,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
