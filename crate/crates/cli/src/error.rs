use std::path::PathBuf;

use thiserror::Error;
use tradecast::arima::ArimaError;
use tradecast::gbdt::GbdtError;
use tradecast::kmeans::KMeansError;
use tradecast::panel::PanelError;
use tradecast::stats::StatsError;

/// Top-level error: every variant maps to one stable machine-readable code
/// so failures print as `error[Code]: human text`.
#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Panel(#[from] PanelError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    KMeans(#[from] KMeansError),
    #[error(transparent)]
    Arima(#[from] ArimaError),
    #[error(transparent)]
    Gbdt(#[from] GbdtError),
    #[error("failed to write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("bad config: {0}")]
    Config(String),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Panel(e) => e.code(),
            CliError::Stats(e) => e.code(),
            CliError::KMeans(e) => e.code(),
            CliError::Arima(e) => e.code(),
            CliError::Gbdt(e) => e.code(),
            CliError::Io { .. } => "Io",
            CliError::Config(_) => "Config",
            CliError::Usage(_) => "Usage",
        }
    }

    pub fn io(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
        move |source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}
