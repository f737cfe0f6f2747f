use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use serde::Serialize;
use tradecast::gbdt::{
    feature_importance, gbdt_fit, gbdt_predict, GbdtModel, GbdtParams, ImportanceKind,
};
use tradecast::panel::PanelTable;
use tradecast::stats::r_squared;

use crate::commands::load_panel;
use crate::config::Ctx;
use crate::error::CliError;
use crate::{DataArgs, GbdtParamArgs};

const MODEL_FILE: &str = "gbdt_model.txt";

fn resolve_params(ctx: &Ctx, args: &GbdtParamArgs) -> Result<GbdtParams, CliError> {
    let defaults = GbdtParams::default();
    Ok(GbdtParams {
        learning_rate: ctx.resolve(args.learning_rate, "learning_rate", defaults.learning_rate)?,
        num_leaves: ctx.resolve(args.num_leaves, "num_leaves", defaults.num_leaves)?,
        max_depth: ctx.resolve(args.max_depth, "max_depth", defaults.max_depth)?,
        feature_fraction: ctx.resolve(
            args.feature_fraction,
            "feature_fraction",
            defaults.feature_fraction,
        )?,
        early_stopping_rounds: ctx.resolve(
            args.early_stopping_rounds,
            "early_stopping_rounds",
            defaults.early_stopping_rounds,
        )?,
        max_rounds: ctx.resolve(args.max_rounds, "max_rounds", defaults.max_rounds)?,
        min_data_in_leaf: ctx.resolve(
            args.min_data_in_leaf,
            "min_data_in_leaf",
            defaults.min_data_in_leaf,
        )?,
        max_bins: ctx.resolve(args.max_bins, "max_bins", defaults.max_bins)?,
        lambda_l2: ctx.resolve(args.lambda_l2, "lambda_l2", defaults.lambda_l2)?,
        seed: ctx.seed,
    })
}

/// Panel prepared for tree training: optional commodity filter plus the
/// year key exposed as a numeric feature.
fn training_panel(ctx: &Ctx, data: &DataArgs) -> Result<PanelTable, CliError> {
    let mut panel = load_panel(ctx, data)?;
    if let Some(commodity) = ctx.commodity() {
        panel = panel.filter_commodity(commodity);
    }
    Ok(panel.with_year_feature())
}

fn model_path(ctx: &Ctx, flag: Option<PathBuf>) -> Result<PathBuf, CliError> {
    Ok(ctx
        .resolve_opt(flag, "model")?
        .unwrap_or_else(|| ctx.out_path(MODEL_FILE)))
}

pub fn train(ctx: &Ctx, data: &DataArgs, args: &GbdtParamArgs) -> Result<(), CliError> {
    let holdout = ctx.resolve(args.holdout_years, "holdout_years", 3)?;
    let target = ctx.resolve(args.target.clone(), "target", "value_usd".to_string())?;
    let params = resolve_params(ctx, args)?;

    let panel = training_panel(ctx, data)?;
    let (train, valid) = panel.time_split(holdout)?;
    let model = gbdt_fit(&train, &valid, &target, &params)?;

    let out = ctx.out_path(MODEL_FILE);
    model.save_file(&out)?;
    let hist_path = ctx.out_path("eval_history.csv");
    let mut hist = std::fs::File::create(&hist_path).map_err(CliError::io(&hist_path))?;
    writeln!(hist, "round,valid_mse").map_err(CliError::io(&hist_path))?;
    for (i, mse) in model.eval_history.iter().enumerate() {
        writeln!(hist, "{},{}", i + 1, mse).map_err(CliError::io(&hist_path))?;
    }

    let best_mse = model
        .eval_history
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    println!(
        "trained {} rounds on {} rows ({} valid rows, holdout {} years)",
        model.trees.len(),
        train.len(),
        valid.len(),
        holdout
    );
    println!("best round {} with valid MSE {}", model.best_round, best_mse);
    println!("wrote {MODEL_FILE}, eval_history.csv");
    Ok(())
}

pub fn predict(ctx: &Ctx, data: &DataArgs, model: Option<PathBuf>) -> Result<(), CliError> {
    let model = GbdtModel::load_file(&model_path(ctx, model)?)?;
    let panel = training_panel(ctx, data)?;
    let predictions = gbdt_predict(&model, &panel)?;

    let csv_path = ctx.out_path("predictions.csv");
    let mut file = std::fs::File::create(&csv_path).map_err(CliError::io(&csv_path))?;
    writeln!(file, "origin_iso3,dest_iso3,commodity,year,actual,predicted")
        .map_err(CliError::io(&csv_path))?;
    for (i, prediction) in predictions.iter().enumerate() {
        writeln!(
            file,
            "{},{},{},{},{},{}",
            panel.origins[i],
            panel.dests[i],
            panel.commodities[i],
            panel.years[i],
            panel.values[i],
            prediction
        )
        .map_err(CliError::io(&csv_path))?;
    }
    println!("predicted {} rows with {} trees", panel.len(), model.best_round);
    println!("wrote predictions.csv");
    Ok(())
}

pub fn importance(ctx: &Ctx, model: Option<PathBuf>, kind: Option<String>) -> Result<(), CliError> {
    let model = GbdtModel::load_file(&model_path(ctx, model)?)?;
    let kind_name = ctx.resolve(kind, "kind", "gain".to_string())?;
    let kind: ImportanceKind = kind_name.parse().map_err(CliError::Usage)?;
    let report = feature_importance(&model, kind);

    print!("{}", report.render_lines());

    let txt_path = ctx.out_path("importance.txt");
    std::fs::write(&txt_path, report.render_lines()).map_err(CliError::io(&txt_path))?;
    let csv_path = ctx.out_path("importance.csv");
    let file = std::fs::File::create(&csv_path).map_err(CliError::io(&csv_path))?;
    report
        .write_csv(std::io::BufWriter::new(file))
        .map_err(CliError::io(&csv_path))?;
    println!("wrote importance.txt, importance.csv");
    Ok(())
}

#[derive(Serialize)]
struct Metrics {
    commodity: String,
    r2: f64,
    rounds_used: usize,
    best_round: usize,
}

pub fn evaluate(
    ctx: &Ctx,
    data: &DataArgs,
    model: Option<PathBuf>,
    holdout_years: Option<usize>,
) -> Result<(), CliError> {
    let holdout = ctx.resolve(holdout_years, "holdout_years", 3)?;
    let model = GbdtModel::load_file(&model_path(ctx, model)?)?;
    let panel = training_panel(ctx, data)?;
    let (_, valid) = panel.time_split(holdout)?;
    let predictions = gbdt_predict(&model, &valid)?;

    let mut groups: BTreeMap<String, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for (i, prediction) in predictions.iter().enumerate() {
        let entry = groups
            .entry(valid.commodities[i].to_string())
            .or_default();
        entry.0.push(valid.values[i]);
        entry.1.push(*prediction);
    }

    let mut metrics = Vec::new();
    for (commodity, (actual, predicted)) in &groups {
        let r2 = r_squared(actual, predicted)?;
        metrics.push(Metrics {
            commodity: commodity.clone(),
            r2,
            rounds_used: model.trees.len(),
            best_round: model.best_round,
        });
    }

    for m in &metrics {
        println!("{}", serde_json::to_string(m).expect("metrics serialize"));
    }
    let json_path = ctx.out_path("metrics.json");
    let payload = if metrics.len() == 1 {
        serde_json::to_string_pretty(&metrics[0]).expect("metrics serialize")
    } else {
        serde_json::to_string_pretty(&metrics).expect("metrics serialize")
    };
    std::fs::write(&json_path, payload + "\n").map_err(CliError::io(&json_path))?;
    println!("wrote metrics.json");
    Ok(())
}
