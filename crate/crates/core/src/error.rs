use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid quantum numbers, dimensions or argument ranges.
    #[error("domain error: {0}")]
    Domain(String),

    /// The readout Clebsch-Gordan coefficient `⟨j,μ;l,0|j,μ⟩` vanishes for
    /// the listed multipole orders, so the inversion formula is undefined.
    #[error(
        "vanishing readout denominator for two_j={two_j}, two_mu={two_mu}: \
         <j,mu;l,0|j,mu> = 0 for l in {ls:?}"
    )]
    VanishingDenominator { two_j: i32, two_mu: i32, ls: Vec<u32> },

    #[error("grid too coarse: quadrature exact through degree {available:?}, need {needed}")]
    GridTooCoarse { needed: u32, available: Option<u32> },

    #[error("inconsistent multipole coefficients: imaginary residue {residue:e} exceeds {tolerance:e}")]
    InconsistentCoefficients { residue: f64, tolerance: f64 },

    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("stationary point: |d<Jz_out>/dphi| = {derivative:e}")]
    StationaryPoint { derivative: f64 },

    #[error("ill-conditioned inversion (condition number {condition:e}); use a longer or denser time grid")]
    IllConditioned { condition: f64 },

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
