use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

/// One failed check while loading a workspace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Issue {
    pub kind: String,
    pub name: String,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} `{}`: {}", self.kind, self.name, self.message)
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}:{line}:{col}: {msg}", .file.display())]
    Parse {
        file: PathBuf,
        line: usize,
        col: usize,
        msg: String,
    },

    #[error("validation failed:\n{}", .issues.iter().map(|i| format!("  {i}")).collect::<Vec<_>>().join("\n"))]
    Validation { issues: Vec<Issue> },

    #[error("unknown command `{0}`")]
    UnknownCommand(String),

    #[error("no {kind} named `{name}` in the workspace")]
    UnknownName { kind: &'static str, name: String },

    #[error("{0}")]
    Usage(String),

    #[error("{context}: {source}")]
    Core {
        context: String,
        #[source]
        source: tcm_core::Error,
    },

    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn core(context: impl Into<String>, source: tcm_core::Error) -> Self {
        CliError::Core {
            context: context.into(),
            source,
        }
    }

    /// 3 for an enumeration cap, 1 for I/O, 2 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core {
                source: tcm_core::Error::SizeLimit { .. },
                ..
            } => 3,
            CliError::Io { .. } => 1,
            _ => 2,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

pub(crate) trait Context<T> {
    fn context(self, what: impl FnOnce() -> String) -> Result<T>;
}

impl<T> Context<T> for tcm_core::Result<T> {
    fn context(self, what: impl FnOnce() -> String) -> Result<T> {
        self.map_err(|e| CliError::core(what(), e))
    }
}
