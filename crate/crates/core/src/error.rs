use thiserror::Error;

/// Errors raised by the morphometric pipeline.
#[derive(Debug, Error)]
pub enum PfsdmError {
    #[error("expected exactly one foreground component, found {0}")]
    MultipleComponents(usize),
    #[error("foreground region touches the image border")]
    BorderContact,
    #[error("degenerate shape: {0}")]
    DegenerateShape(String),
    #[error("invalid contour: {0}")]
    InvalidContour(String),
    #[error("unknown shape kind `{0}`")]
    InvalidKind(String),
    #[error("point leaves the domain (-1,1)^2: {0}")]
    OutOfDomain(String),
    #[error("ill-conditioned least-squares system: {0}")]
    IllConditioned(String),
    #[error("solver diverged: {0}")]
    SolverDiverged(String),
    #[error("closest-point projection undefined at the disk center")]
    UndefinedProjection,
    #[error("degenerate cohort: normalizing constant m_{0} is zero")]
    DegenerateCohort(usize),
    #[error("incompatible moment curves: {0}")]
    IncompatibleCurves(String),
    #[error("degenerate embedding: {0}")]
    DegenerateEmbedding(String),
    #[error("class `{0}` has a single member")]
    SingletonClass(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Coarse error classes used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    InputFormat,
    Solver,
    DegenerateData,
}

impl PfsdmError {
    /// Stable variant name, printed by the CLI.
    pub fn name(&self) -> &'static str {
        match self {
            Self::MultipleComponents(_) => "MultipleComponents",
            Self::BorderContact => "BorderContact",
            Self::DegenerateShape(_) => "DegenerateShape",
            Self::InvalidContour(_) => "InvalidContour",
            Self::InvalidKind(_) => "InvalidKind",
            Self::OutOfDomain(_) => "OutOfDomain",
            Self::IllConditioned(_) => "IllConditioned",
            Self::SolverDiverged(_) => "SolverDiverged",
            Self::UndefinedProjection => "UndefinedProjection",
            Self::DegenerateCohort(_) => "DegenerateCohort",
            Self::IncompatibleCurves(_) => "IncompatibleCurves",
            Self::DegenerateEmbedding(_) => "DegenerateEmbedding",
            Self::SingletonClass(_) => "SingletonClass",
            Self::InvalidConfig(_) => "InvalidConfig",
            Self::Format(_) => "Format",
            Self::Io(_) => "Io",
            Self::Json(_) => "Json",
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Self::InvalidKind(_) | Self::InvalidConfig(_) => ErrorClass::Usage,
            Self::Format(_) | Self::Io(_) | Self::Json(_) | Self::InvalidContour(_) => {
                ErrorClass::InputFormat
            }
            Self::IllConditioned(_) | Self::SolverDiverged(_) => ErrorClass::Solver,
            Self::MultipleComponents(_)
            | Self::BorderContact
            | Self::DegenerateShape(_)
            | Self::OutOfDomain(_)
            | Self::UndefinedProjection
            | Self::DegenerateCohort(_)
            | Self::IncompatibleCurves(_)
            | Self::DegenerateEmbedding(_)
            | Self::SingletonClass(_) => ErrorClass::DegenerateData,
        }
    }
}

pub type Result<T, E = PfsdmError> = std::result::Result<T, E>;
