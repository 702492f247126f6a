use std::path::PathBuf;

use thiserror::Error;

/// Pipeline stages, used to label failures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Load,
    Recipe,
    Split,
    Preprocess,
    Dbna,
    Ega,
    Wald,
    Holdout,
    CrossValidation,
    Comparison,
    Report,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Stage::Load => "load",
            Stage::Recipe => "recipe",
            Stage::Split => "split",
            Stage::Preprocess => "preprocess",
            Stage::Dbna => "dbna",
            Stage::Ega => "ega",
            Stage::Wald => "wald",
            Stage::Holdout => "holdout",
            Stage::CrossValidation => "cross-validation",
            Stage::Comparison => "comparison",
            Stage::Report => "report",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum EgaError {
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: row {row}, column `{column}`: {message}")]
    Cell {
        path: PathBuf,
        row: usize,
        column: String,
        message: String,
    },
    #[error("{path}: {message}")]
    Data { path: PathBuf, message: String },
    #[error("{stage} stage: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: ega_core::Error,
    },
    #[error(transparent)]
    Core(#[from] ega_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl EgaError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        EgaError::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 config error, 3 data error, 4 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            EgaError::Config(_) | EgaError::Json { .. } => 2,
            EgaError::Stage { source, .. } | EgaError::Core(source) if source.is_numerical() => 4,
            _ => 3,
        }
    }
}

pub(crate) trait AtStage<T> {
    fn at(self, stage: Stage) -> Result<T, EgaError>;
}

impl<T> AtStage<T> for Result<T, ega_core::Error> {
    fn at(self, stage: Stage) -> Result<T, EgaError> {
        self.map_err(|source| EgaError::Stage { stage, source })
    }
}
