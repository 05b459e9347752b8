use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("degenerate schedule: |cos θ| = {0:e} makes the azimuthal drive rate diverge")]
    DegenerateSchedule(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("input state is not normalized (norm = {0})")]
    NotNormalized(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("unknown gate `{0}`")]
    UnknownGate(String),

    #[error("{steps} integration steps are too few: trace drifted by {drift:e}")]
    StepRefinement { steps: usize, drift: f64 },

    #[error("infeasible design: {0}")]
    InfeasibleDesign(String),

    #[error("manifest key `{key}`: {reason}")]
    Manifest { key: String, reason: String },

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
