//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "pump detuned from red mode by {detuning_hz:.3e} Hz (tolerance {tolerance_hz:.3e} Hz)"
    )]
    PumpDetuned { detuning_hz: f64, tolerance_hz: f64 },

    #[error("degenerate field profile: {0}")]
    DegenerateProfile(String),

    #[error("calibration window too narrow: {0}")]
    CalibrationWindow(String),

    #[error("conversion bandwidth unresolved: half-power points fall outside the grid")]
    BandwidthUnresolved,

    #[error("no comb-line pairs inside the search window")]
    NoCandidates,

    #[error("degenerate Vernier configuration: FSR difference is zero")]
    DegenerateVernier,

    #[error("voltage {voltage_v} V outside allowed window [{v_min_v} V, {v_max_v} V]")]
    VoltageOutOfRange {
        voltage_v: f64,
        v_min_v: f64,
        v_max_v: f64,
    },

    #[error(
        "no frequency-matching solution inside the voltage window; best residuals \
         intra_a {intra_a_hz:.3e} Hz, intra_b {intra_b_hz:.3e} Hz, inter {inter_hz:.3e} Hz"
    )]
    InfeasibleMatching {
        intra_a_hz: f64,
        intra_b_hz: f64,
        inter_hz: f64,
    },

    #[error("incompatible detuning grids: {0}")]
    IncompatibleGrids(String),

    #[error("noise two-point system is singular: on-resonance reflection equals one")]
    UninvertibleNoiseSystem,

    #[error("infeasible noise input: {0}")]
    InfeasibleNoiseInput(String),

    #[error("sine fit is rank-deficient: {0}")]
    FitRankDeficient(String),

    #[error("{path}: {message}")]
    FileFormat { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
