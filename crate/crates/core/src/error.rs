use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("pole of an elliptic function near {0}")]
    Pole(String),
    #[error("branch selection failed: {0}")]
    Branch(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("singular point at s = {s}: {detail}")]
    Singular { s: f64, detail: String },
    #[error("curve self-intersects between samples {i} and {j} (distance {distance:e})")]
    SelfIntersection { i: usize, j: usize, distance: f64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) => 2,
            Error::Input(_) | Error::Io(_) => 3,
            _ => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
