use thiserror::Error;

/// Every failure the library reports.
#[derive(Debug, Error)]
pub enum Error {
    #[error("levels ({n}, {m}) never cross: need n + m < 0 and B > 0")]
    NoCrossing { n: i64, m: i64 },
    #[error("ill-conditioned crossing: {0}")]
    IllConditionedCrossing(String),
    #[error("exact degeneracy at x = {x}, delta = {delta}")]
    DegeneratePoint { x: f64, delta: f64 },
    #[error("trajectory left the potential domain at t = {t} (a = {a}, eta = {eta})")]
    DomainExit { t: f64, a: f64, eta: f64 },
    #[error("turning point: kinetic energy {kinetic} is not positive at a = {a}")]
    TurningPoint { a: f64, kinetic: f64 },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("grid too small: tail mass {tail_mass:e} exceeds {limit:e}")]
    GridTooSmall { tail_mass: f64, limit: f64 },
    #[error("normalization bug: accumulated imaginary part {0:e}")]
    NormalizationBug(f64),
    #[error("regime violation: {0}")]
    RegimeViolation(String),
    #[error("series did not converge: {0}")]
    SeriesDivergence(String),
    #[error("unknown level tag {0:?}")]
    InvalidLevel(String),
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("linear solver breakdown at row {row}")]
    SolverBreakdown { row: usize },
    #[error("radius must be positive, got {0}")]
    InvalidRadius(f64),
    #[error("perturbation is not real valued (imaginary part {0:e})")]
    NonRealPerturbation(f64),
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Wraps the error with the pipeline stage that produced it.
    pub fn at(self, stage: &'static str) -> Self {
        Error::Stage { stage, source: Box::new(self) }
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(std::io::Error::other(e))
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(std::io::Error::other(e))
    }
}

/// Tags a result's error with a pipeline stage.
pub trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| e.at(stage))
    }
}
