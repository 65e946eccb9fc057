use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("usage error: {0}")]
    Usage(String),
    /// A numerical result failed its post-hoc accuracy check.
    #[error("accuracy error: {0}")]
    Accuracy(String),
    #[error("solver error: {0}")]
    Solver(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Machine-readable category, used in CLI error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Geometry(_) => "geometry",
            Error::Domain(_) => "domain",
            Error::Usage(_) => "usage",
            Error::Accuracy(_) => "accuracy",
            Error::Solver(_) => "solver",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
