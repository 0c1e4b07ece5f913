use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("species file: {0}")]
    Schema(String),

    #[error("quantum defects must not increase with l: {0}")]
    DefectOrdering(String),

    #[error("invalid quantum numbers: {0}")]
    QuantumNumbers(String),

    #[error("radial grid too coarse: step {step} exceeds 1/{min_points} of the local wavelength {wavelength}")]
    GridTooCoarse {
        step: f64,
        wavelength: f64,
        min_points: f64,
    },

    #[error("radial integration failed for {level}: {reason}")]
    Integration { level: String, reason: String },

    #[error("wavefunction grids are incompatible: {0}")]
    Grid(String),

    #[error("Förster resonance in channel {channel}: |δ_AB| = {defect_mhz:.3} MHz for n_A = {n_a}, n_B = {n_b} is below the {guard_mhz} MHz guard")]
    ForsterResonance {
        channel: String,
        n_a: u32,
        n_b: u32,
        defect_mhz: f64,
        guard_mhz: f64,
    },

    #[error("matrix is not Hermitian: asymmetry {0:e}")]
    NotHermitian(f64),

    #[error("eigenvalue {energy_mhz:e} MHz carries overlap {weight:e}: blockade vanishes")]
    ForsterZero { energy_mhz: f64, weight: f64 },

    #[error("propagation step phase {phase:.3} rad exceeds the limit {limit:.3} rad")]
    StepTooLarge { phase: f64, limit: f64 },

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration: {0}")]
    Config(String),

    #[error("output: {0}")]
    Output(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
