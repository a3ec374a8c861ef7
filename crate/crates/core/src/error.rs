use thiserror::Error;

/// Errors raised while building or running a simulation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("spin must be non-negative, got 2s = {0}")]
    NegativeSpin(i64),

    #[error("cannot parse spin from {0:?}: expected forms like \"3\", \"3/2\" or \"1.5\"")]
    SpinParse(String),

    #[error("non-finite input to sgn: {0}")]
    NonFinite(f64),

    #[error("direction norm {norm} is not within {tolerance} of 1")]
    NotUnit { norm: f64, tolerance: f64 },

    #[error("cannot parse direction from {0:?}")]
    DirectionParse(String),

    #[error("matrix is not a proper rotation (orthogonality error {orthogonality}, det {determinant})")]
    NotRotation { orthogonality: f64, determinant: f64 },

    #[error("transcript has {got} cbits, chain has {expected} steps")]
    TranscriptLength { expected: usize, got: usize },

    #[error("cos(a, b) = {0} lies outside [-1, 1]")]
    CosineOutOfRange(f64),

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("chi-square test needs at least two categories and a positive total")]
    EmptyCounts,

    #[error("standard error is zero but mean {mean} differs from target {target}")]
    DegenerateZTest { mean: f64, target: f64 },

    #[error("eigendecomposition did not converge after {0} sweeps")]
    EigenNoConvergence(usize),

    #[error("eigenvalue {value} could not be matched to the spin grid (nearest error {error})")]
    EigenMismatch { value: f64, error: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Stable snake_case name of the variant, for machine-readable output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NegativeSpin(_) => "negative_spin",
            Error::SpinParse(_) => "spin_parse",
            Error::NonFinite(_) => "non_finite",
            Error::NotUnit { .. } => "not_unit",
            Error::DirectionParse(_) => "direction_parse",
            Error::NotRotation { .. } => "not_rotation",
            Error::TranscriptLength { .. } => "transcript_length",
            Error::CosineOutOfRange(_) => "cosine_out_of_range",
            Error::TooFewSamples { .. } => "too_few_samples",
            Error::EmptyCounts => "empty_counts",
            Error::DegenerateZTest { .. } => "degenerate_z_test",
            Error::EigenNoConvergence(_) => "eigen_no_convergence",
            Error::EigenMismatch { .. } => "eigen_mismatch",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
        }
    }
}
