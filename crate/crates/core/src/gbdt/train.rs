//! Boosting loop with per-round feature sampling and early stopping.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::panel::{ColumnData, FeatureColumn, PanelTable};

use super::binning::{bin_panel, build_bins};
use super::tree::{grow_tree, GrowContext};
use super::{GbdtError, GbdtModel, GbdtParams};

/// Resolves the target column: `value_usd` or any numeric feature. Every
/// cell must be present.
fn target_values(panel: &PanelTable, target: &str) -> Result<Vec<f64>, GbdtError> {
    let values = match target {
        "value_usd" => panel.values.clone(),
        name => match panel.feature(name) {
            Some(FeatureColumn {
                data: ColumnData::Numeric(v),
                ..
            }) => v.clone(),
            _ => return Err(GbdtError::NonNumericTarget(name.to_string())),
        },
    };
    if let Some(row) = values.iter().position(|v| v.is_nan()) {
        return Err(GbdtError::MissingTargetValue { row });
    }
    Ok(values)
}

fn predictor_columns<'a>(panel: &'a PanelTable, target: &str) -> Vec<&'a FeatureColumn> {
    panel.features.iter().filter(|f| f.name != target).collect()
}

/// Trains a boosted ensemble on `train`, tracking MSE on `valid` for early
/// stopping. With `early_stopping_rounds = 0` the validation set may be
/// empty and training runs to `max_rounds`.
pub fn gbdt_fit(
    train: &PanelTable,
    valid: &PanelTable,
    target: &str,
    params: &GbdtParams,
) -> Result<GbdtModel, GbdtError> {
    params.validate()?;
    if train.is_empty() {
        return Err(GbdtError::EmptyTrain);
    }
    let early_stopping = params.early_stopping_rounds > 0;
    if early_stopping && valid.is_empty() {
        return Err(GbdtError::NoValidWithEarlyStop);
    }

    let y_train = target_values(train, target)?;
    let feature_cols: Vec<FeatureColumn> = predictor_columns(train, target)
        .into_iter()
        .cloned()
        .collect();
    // Bin ids are u16; categorical bins are identity-coded and bypass
    // max_bins, so cap label cardinality here.
    for col in &feature_cols {
        if let ColumnData::Categorical { labels, .. } = &col.data {
            if labels.len() > u16::MAX as usize - 1 {
                return Err(GbdtError::SchemaMismatch(format!(
                    "categorical feature `{}` has {} labels, limit is {}",
                    col.name,
                    labels.len(),
                    u16::MAX - 1
                )));
            }
        }
    }
    let mapper = build_bins(&feature_cols, params.max_bins);
    let train_bins = bin_panel(&mapper, train)?;
    let n_value_bins: Vec<usize> = mapper
        .features
        .iter()
        .map(|f| f.bins.n_value_bins())
        .collect();
    let missing_bins = mapper.missing_bins();

    let use_valid = !valid.is_empty();
    let (y_valid, valid_bins) = if use_valid {
        (target_values(valid, target)?, bin_panel(&mapper, valid)?)
    } else {
        (Vec::new(), Vec::new())
    };

    let n = train.len() as f64;
    let base_score = y_train.iter().sum::<f64>() / n;
    let mut train_pred = vec![base_score; train.len()];
    let mut valid_pred = vec![base_score; valid.len()];

    let valid_mse = |pred: &[f64]| -> f64 {
        pred.iter()
            .zip(&y_valid)
            .map(|(p, y)| (p - y) * (p - y))
            .sum::<f64>()
            / pred.len() as f64
    };

    let n_features = mapper.features.len();
    let subset_size = ((params.feature_fraction * n_features as f64).ceil() as usize)
        .clamp(1, n_features.max(1));
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let mut trees = Vec::new();
    let mut eval_history = Vec::new();
    let mut best_round = 0usize;
    let mut best_mse = if use_valid { valid_mse(&valid_pred) } else { f64::INFINITY };
    let mut gradients = vec![0.0; train.len()];

    for _round in 0..params.max_rounds {
        let eligible: Vec<usize> = if subset_size >= n_features {
            (0..n_features).collect()
        } else {
            let mut drawn = rand::seq::index::sample(&mut rng, n_features, subset_size).into_vec();
            drawn.sort_unstable();
            drawn
        };

        for (g, (p, y)) in gradients.iter_mut().zip(train_pred.iter().zip(&y_train)) {
            *g = p - y;
        }
        let ctx = GrowContext {
            bins: &train_bins,
            n_value_bins: &n_value_bins,
            gradients: &gradients,
            params,
        };
        let (tree, regions) = grow_tree(&ctx, &eligible);
        if tree.n_internal() == 0 {
            // No split had positive gain; further rounds cannot change that.
            break;
        }
        for (rows, value) in &regions {
            let delta = params.learning_rate * value;
            for &r in rows {
                train_pred[r as usize] += delta;
            }
        }
        if use_valid {
            for (i, pred) in valid_pred.iter_mut().enumerate() {
                *pred += params.learning_rate * tree.output(&|f| valid_bins[f][i], &missing_bins);
            }
        }
        trees.push(tree);

        if use_valid {
            let mse = valid_mse(&valid_pred);
            eval_history.push(mse);
            if mse < best_mse {
                best_mse = mse;
                best_round = trees.len();
            } else if early_stopping && trees.len() - best_round >= params.early_stopping_rounds {
                break;
            }
        }
    }
    if !use_valid {
        best_round = trees.len();
    }

    Ok(GbdtModel {
        base_score,
        trees,
        params: params.clone(),
        bin_mapper: mapper,
        target: target.to_string(),
        best_round,
        eval_history,
    })
}

/// Predicts with the early-stopping prefix (`best_round` trees).
pub fn gbdt_predict(model: &GbdtModel, panel: &PanelTable) -> Result<Vec<f64>, GbdtError> {
    predict_with_rounds(model, panel, model.best_round)
}

/// Predicts with exactly the first `rounds` trees (capped at the total).
pub fn predict_with_rounds(
    model: &GbdtModel,
    panel: &PanelTable,
    rounds: usize,
) -> Result<Vec<f64>, GbdtError> {
    let bins = bin_panel(&model.bin_mapper, panel)?;
    let missing_bins = model.bin_mapper.missing_bins();
    let rounds = rounds.min(model.trees.len());
    let mut out = vec![model.base_score; panel.len()];
    for tree in &model.trees[..rounds] {
        for (i, pred) in out.iter_mut().enumerate() {
            *pred += model.params.learning_rate * tree.output(&|f| bins[f][i], &missing_bins);
        }
    }
    Ok(out)
}
