use std::fmt;

/// A failed run, classified by exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags or configuration (exit 2).
    Config(String),
    /// The data does not fit the request (exit 3).
    Data(String),
    /// Anything else, e.g. an output write error (exit 1).
    Internal(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 2,
            Failure::Data(_) => 3,
            Failure::Internal(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "configuration error: {m}"),
            Failure::Data(m) => write!(f, "data error: {m}"),
            Failure::Internal(e) => write!(f, "internal error: {e:#}"),
        }
    }
}

impl From<devperf::Error> for Failure {
    fn from(e: devperf::Error) -> Self {
        use devperf::Error as E;
        match e {
            E::InvalidConfig(_) | E::InvalidFolds { .. } => Failure::Config(e.to_string()),
            E::Io { .. } => Failure::Internal(e.into()),
            _ => Failure::Data(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Internal(e.into())
    }
}
