use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid correlation matrix: {0}")]
    InvalidCorrelation(String),

    #[error("unsupported geometry: {0}")]
    UnsupportedGeometry(String),

    #[error("invalid sweep configuration: {0}")]
    Config(String),

    #[error("solver budget exceeded: {modes} modes requested, at most {limit} allowed in {dimension}d")]
    Budget {
        modes: usize,
        limit: usize,
        dimension: usize,
    },

    #[error("orbitals are linearly dependent (Gram determinant {gram:e})")]
    DependentOrbitals { gram: f64 },

    #[error("state is not number conserving: off-sector weight {leakage:e}")]
    NotNumberConserving { leakage: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("sweep failed at L = {scale}: {source}")]
    SweepRow {
        scale: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True when the failure comes from the numerics rather than from bad
    /// input. The CLI maps these to exit code 1 and everything else to 2.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Numerical(_) | Error::InvalidCorrelation(_) => true,
            Error::NotNumberConserving { .. } => true,
            Error::SweepRow { source, .. } => source.is_numerical(),
            Error::Io(_) | Error::Csv(_) | Error::Json(_) => true,
            _ => false,
        }
    }
}
