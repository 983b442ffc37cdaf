use std::path::{Path, PathBuf};

use plumepipe_core::error::{DatasetError, EvalError, FilterError, FormatError, GeometryError, RasterError, SynthError};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("io: {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] plumepipe_core::Error),
}

macro_rules! from_core {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Core(e.into())
            }
        }
    )*};
}
from_core!(RasterError, GeometryError, DatasetError, FilterError, EvalError, SynthError, FormatError);

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    pub fn module(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Io { .. } => "io",
            CliError::Core(e) => e.module(),
        }
    }

    /// Single-line JSON form written to stderr on failure.
    pub fn to_json_line(&self) -> String {
        #[derive(Serialize)]
        struct Line<'a> {
            error: &'a str,
            module: &'a str,
            message: String,
        }
        let line = Line { error: "plumepipe", module: self.module(), message: self.to_string() };
        serde_json::to_string(&line).expect("plain strings serialize")
    }
}

pub type CliResult<T> = Result<T, CliError>;
