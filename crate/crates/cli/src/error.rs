use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid {path}: {reason}")]
    Validation { path: String, reason: String },

    #[error("{0}")]
    Convergence(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn validation(path: impl Into<String>, reason: impl Into<String>) -> Self {
        Self::Validation {
            path: path.into(),
            reason: reason.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation { .. } => 2,
            Self::Convergence(_) => 3,
            Self::Io { .. } => 1,
        }
    }
}

impl From<adnovel_core::Error> for CliError {
    fn from(e: adnovel_core::Error) -> Self {
        use adnovel_core::Error;
        match e {
            Error::Domain(reason) => Self::validation("parameters", reason),
            Error::Invalid { what, reason } => Self::validation(what, reason),
            e @ Error::Convergence { .. } => {
                let detail = match &e {
                    Error::Convergence { last_iterates, .. } => {
                        format!("; last iterates {:?} and {:?}", last_iterates.0, last_iterates.1)
                    }
                    _ => String::new(),
                };
                Self::Convergence(format!("{e}{detail}"))
            }
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
