use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("toroidal lattice needs width and height >= 3, got {width}x{height}")]
    DimensionTooSmall { width: usize, height: usize },

    #[error("label {label} at site {site} is outside 0..{num_labels}")]
    LabelOutOfRange {
        site: usize,
        label: usize,
        num_labels: usize,
    },

    #[error("site {site} is outside a lattice of {num_sites} sites")]
    SiteOutOfRange { site: usize, num_sites: usize },

    #[error("expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("need at least {min} samples, got {got}")]
    InsufficientSamples { got: usize, min: usize },

    #[error("Fisher information is singular (eigenvalue {eigenvalue:e}, largest {largest:e}); increase the number of Monte Carlo samples")]
    SingularFim { eigenvalue: f64, largest: f64 },

    #[error("intractable at this size: {states:e} configurations exceed the enumeration cap of {cap}")]
    Intractable { states: f64, cap: u64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::SingularFim { .. } => 3,
            Error::Intractable { .. } => 4,
            Error::Io(_) => 1,
            _ => 2,
        }
    }
}
