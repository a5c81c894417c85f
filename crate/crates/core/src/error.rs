use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at row {row}: {msg}")]
    Parse { row: usize, msg: String },

    #[error("data error: {0}")]
    Data(String),

    #[error("empty panel: {0}")]
    EmptyPanel(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("estimation error: {0}")]
    Estimation(String),

    #[error("undefined correlation: {0}")]
    UndefinedCorrelation(String),

    #[error("undefined rank statistic: {0}")]
    UndefinedRank(String),

    #[error("singular fit: {0}")]
    SingularFit(String),

    #[error("ticker {ticker}: {source}")]
    Ticker {
        ticker: String,
        #[source]
        source: Box<Error>,
    },

    #[error("stage {stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn for_ticker(self, ticker: &str) -> Self {
        Error::Ticker {
            ticker: ticker.to_string(),
            source: Box::new(self),
        }
    }

    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Process exit code: 1 data, 2 configuration, 3 estimation.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Data(_) | Error::EmptyPanel(_) | Error::Io { .. } => 1,
            Error::Config(_) => 2,
            Error::Estimation(_)
            | Error::UndefinedCorrelation(_)
            | Error::UndefinedRank(_)
            | Error::SingularFit(_) => 3,
            Error::Ticker { source, .. } | Error::Stage { source, .. } => source.exit_code(),
        }
    }

    /// The innermost error, with ticker and stage wrappers removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::Ticker { source, .. } | Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }
}
