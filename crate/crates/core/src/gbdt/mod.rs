//! Histogram-based gradient-boosted regression trees with leaf-wise growth.
//!
//! The squared-error objective has unit curvature, so per-leaf statistics
//! reduce to (gradient sum, row count). Feature values are pre-bucketed into
//! at most `max_bins` bins (plus a dedicated missing bin per feature) and
//! split search scans bin boundaries. Each round draws a seeded
//! `feature_fraction` subset of features, grows one tree by repeatedly
//! splitting the highest-gain leaf, and records the validation MSE; training
//! stops when the best validation MSE has not improved for
//! `early_stopping_rounds` rounds.

mod binning;
mod importance;
mod persist;
mod train;
mod tree;

pub use binning::{bin_panel, build_bins, BinMapper, BinnedFeature, FeatureBins};
pub use importance::{feature_importance, FeatureImportance, ImportanceEntry, ImportanceKind};
pub use train::{gbdt_fit, gbdt_predict, predict_with_rounds};
pub use tree::{Node, Tree};

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GbdtError {
    #[error("training set is empty")]
    EmptyTrain,
    #[error("target column `{0}` is missing or not numeric")]
    NonNumericTarget(String),
    #[error("target value missing at row {row}")]
    MissingTargetValue { row: usize },
    #[error("early stopping requires a non-empty validation set")]
    NoValidWithEarlyStop,
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("bad model file: {0}")]
    ModelFormat(String),
    #[error("failed to access {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl GbdtError {
    pub fn code(&self) -> &'static str {
        match self {
            GbdtError::EmptyTrain => "EmptyTrain",
            GbdtError::NonNumericTarget(_) => "NonNumericTarget",
            GbdtError::MissingTargetValue { .. } => "MissingTargetValue",
            GbdtError::NoValidWithEarlyStop => "NoValidWithEarlyStop",
            GbdtError::SchemaMismatch(_) => "SchemaMismatch",
            GbdtError::InvalidParams(_) => "InvalidParams",
            GbdtError::ModelFormat(_) => "ModelFormat",
            GbdtError::Io { .. } => "Io",
        }
    }
}

/// Training hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct GbdtParams {
    pub learning_rate: f64,
    pub num_leaves: usize,
    pub max_depth: usize,
    pub feature_fraction: f64,
    /// 0 disables early stopping (validation set becomes optional).
    pub early_stopping_rounds: usize,
    pub max_rounds: usize,
    pub min_data_in_leaf: usize,
    pub max_bins: usize,
    pub lambda_l2: f64,
    pub seed: u64,
}

impl Default for GbdtParams {
    fn default() -> Self {
        GbdtParams {
            learning_rate: 0.01,
            num_leaves: 31,
            max_depth: 8,
            feature_fraction: 0.6,
            early_stopping_rounds: 500,
            max_rounds: 5000,
            min_data_in_leaf: 20,
            max_bins: 255,
            lambda_l2: 0.0,
            seed: 0,
        }
    }
}

impl GbdtParams {
    pub fn validate(&self) -> Result<(), GbdtError> {
        let fail = |msg: String| Err(GbdtError::InvalidParams(msg));
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return fail(format!("learning_rate {} must be positive", self.learning_rate));
        }
        if self.num_leaves < 2 {
            return fail(format!("num_leaves {} must be at least 2", self.num_leaves));
        }
        if self.max_depth < 1 {
            return fail("max_depth must be at least 1".to_string());
        }
        if !(self.feature_fraction > 0.0 && self.feature_fraction <= 1.0) {
            return fail(format!(
                "feature_fraction {} must lie in (0, 1]",
                self.feature_fraction
            ));
        }
        if self.max_rounds < 1 {
            return fail("max_rounds must be at least 1".to_string());
        }
        if self.min_data_in_leaf < 1 {
            return fail("min_data_in_leaf must be at least 1".to_string());
        }
        if self.max_bins < 2 || self.max_bins > u16::MAX as usize - 1 {
            return fail(format!(
                "max_bins {} must lie in [2, {}]",
                self.max_bins,
                u16::MAX - 1
            ));
        }
        if self.lambda_l2.is_nan() || self.lambda_l2 < 0.0 {
            return fail(format!("lambda_l2 {} must be non-negative", self.lambda_l2));
        }
        Ok(())
    }
}

/// Fitted boosted ensemble. The prediction for a row is
/// `base_score + learning_rate · Σ tree outputs` over `trees[0..best_round]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GbdtModel {
    pub base_score: f64,
    pub trees: Vec<Tree>,
    pub params: GbdtParams,
    pub bin_mapper: BinMapper,
    pub target: String,
    /// Tree-count prefix chosen by early stopping (argmin validation MSE;
    /// 0 means the base score alone was best).
    pub best_round: usize,
    /// Validation MSE after each round, in training order.
    pub eval_history: Vec<f64>,
}

impl GbdtModel {
    pub fn feature_names(&self) -> Vec<&str> {
        self.bin_mapper
            .features
            .iter()
            .map(|f| f.name.as_str())
            .collect()
    }
}
