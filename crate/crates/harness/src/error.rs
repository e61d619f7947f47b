use std::io;

/// Process exit codes of the `bnls` binary.
pub mod exit {
    pub const OK: i32 = 0;
    pub const CONFIG: i32 = 2;
    pub const NUMERICAL: i32 = 3;
    pub const ACCEPTANCE: i32 = 4;
}

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("config error at line {line}: `{key}`: {message}")]
    Config {
        line: usize,
        key: String,
        message: String,
    },
    #[error("{0}")]
    Input(String),
    #[error("invalid parameter: {0}")]
    Parameter(bnls::Error),
    #[error("numerical failure: {0}")]
    Numerical(bnls::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("{failed} acceptance criteria failed")]
    Acceptance { failed: usize },
}

impl HarnessError {
    pub fn config(line: usize, key: impl Into<String>, message: impl Into<String>) -> Self {
        HarnessError::Config {
            line,
            key: key.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: io::Error) -> Self {
        HarnessError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Numerical(_) => exit::NUMERICAL,
            HarnessError::Acceptance { .. } => exit::ACCEPTANCE,
            _ => exit::CONFIG,
        }
    }
}

impl From<bnls::Error> for HarnessError {
    fn from(e: bnls::Error) -> Self {
        use bnls::Error as E;
        match e {
            E::NumericalAbort { .. }
            | E::QuadratureNoConvergence { .. }
            | E::PicardDiverged { .. }
            | E::NewtonDiverged { .. }
            | E::LinearizedUnstable { .. }
            | E::MajorantOverflow { .. } => HarnessError::Numerical(e),
            other => HarnessError::Parameter(other),
        }
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;
