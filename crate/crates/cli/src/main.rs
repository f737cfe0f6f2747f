//! `tradecast` — joins trade and covariate snapshots, then explains and
//! forecasts the panel: correlations, exporter rankings, least-squares
//! projections, country clustering, ARIMA interval forecasts and
//! gradient-boosted trees.

mod chart;
mod commands;
mod config;
mod error;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::Ctx;
use crate::error::CliError;

#[derive(Parser)]
#[command(name = "tradecast", version, about = "Trade panel analytics and forecasting")]
struct Cli {
    /// Flat key = value config file; flags override file values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory for generated files.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Seed for every randomized step.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Commodity filter (Wheat, Milk, Rice, Corn, Beef, Soy, Sugar).
    #[arg(long, global = true, value_name = "NAME")]
    commodity: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default, Clone)]
struct DataArgs {
    /// Trade snapshot CSV (origin_iso3,dest_iso3,commodity,year,value_usd).
    #[arg(long, value_name = "PATH")]
    trade: Option<PathBuf>,
    /// Covariate snapshot CSV (origin_iso3,dest_iso3,year,<feature...>).
    #[arg(long, value_name = "PATH")]
    econ: Option<PathBuf>,
    /// Pre-joined panel CSV (as written by `join`).
    #[arg(long, value_name = "PATH")]
    panel: Option<PathBuf>,
}

#[derive(Args, Default, Clone)]
struct GbdtParamArgs {
    #[arg(long)]
    target: Option<String>,
    #[arg(long)]
    holdout_years: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    num_leaves: Option<usize>,
    #[arg(long)]
    max_depth: Option<usize>,
    #[arg(long)]
    feature_fraction: Option<f64>,
    #[arg(long)]
    early_stopping_rounds: Option<usize>,
    #[arg(long)]
    max_rounds: Option<usize>,
    #[arg(long)]
    min_data_in_leaf: Option<usize>,
    #[arg(long)]
    max_bins: Option<usize>,
    #[arg(long)]
    lambda_l2: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse both snapshots and inner-join them into panel.csv.
    Join {
        #[command(flatten)]
        data: DataArgs,
    },
    /// Pairwise correlations of numeric panel columns (CSV + heatmap SVG).
    Correlate {
        #[command(flatten)]
        data: DataArgs,
        /// Comma-separated columns; defaults to every numeric feature.
        #[arg(long, value_name = "LIST")]
        features: Option<String>,
    },
    /// Rank exporters of a commodity by total value (CSV + bar chart SVG).
    TopExporters {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_name = "N")]
        n: Option<usize>,
    },
    /// Straight-line projection of one exporter's annual totals.
    Project {
        #[command(flatten)]
        data: DataArgs,
        /// Exporter ISO3 code.
        #[arg(long, value_name = "ISO3")]
        exporter: Option<String>,
        /// Years to project past the end of the data.
        #[arg(long, value_name = "N")]
        years: Option<usize>,
    },
    /// Group countries by aggregated features with k-means.
    Cluster {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_name = "K")]
        k: Option<usize>,
        /// Comma-separated per-country features; `trade_total` is built in.
        #[arg(long, value_name = "LIST")]
        features: Option<String>,
    },
    /// ARIMA interval forecast of one exporter's annual totals.
    Arima {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_name = "ISO3")]
        exporter: Option<String>,
        /// Forecast horizon in years.
        #[arg(long, value_name = "H")]
        horizon: Option<usize>,
        /// Model order `p,d,q`, or `auto` for AICc selection.
        #[arg(long, value_name = "ORDER")]
        order: Option<String>,
        /// Force the drift term on or off (default: on when d >= 1).
        #[arg(long, value_name = "BOOL")]
        drift: Option<bool>,
        /// Fit on data up to this year; later actuals fill the table.
        #[arg(long, value_name = "YEAR")]
        train_through: Option<i32>,
    },
    /// Gradient-boosted trees over the joined panel.
    #[command(subcommand)]
    Gbdt(GbdtCommand),
}

#[derive(Subcommand)]
enum GbdtCommand {
    /// Time-split the panel, train with early stopping, save the model.
    Train {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        params: GbdtParamArgs,
    },
    /// Predict every panel row with a saved model.
    Predict {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_name = "PATH")]
        model: Option<PathBuf>,
    },
    /// Split/gain importance report of a saved model.
    Importance {
        #[arg(long, value_name = "PATH")]
        model: Option<PathBuf>,
        /// `split` or `gain`.
        #[arg(long, value_name = "KIND")]
        kind: Option<String>,
    },
    /// Holdout R² per commodity for a saved model.
    Evaluate {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_name = "PATH")]
        model: Option<PathBuf>,
        #[arg(long)]
        holdout_years: Option<usize>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let ctx = Ctx::new(cli.config.as_deref(), cli.out, cli.seed, cli.commodity)?;
    match cli.command {
        Command::Join { data } => commands::join::run(&ctx, &data),
        Command::Correlate { data, features } => commands::correlate::run(&ctx, &data, features),
        Command::TopExporters { data, n } => commands::top_exporters::run(&ctx, &data, n),
        Command::Project { data, exporter, years } => {
            commands::project::run(&ctx, &data, exporter, years)
        }
        Command::Cluster { data, k, features } => commands::cluster::run(&ctx, &data, k, features),
        Command::Arima {
            data,
            exporter,
            horizon,
            order,
            drift,
            train_through,
        } => commands::arima::run(&ctx, &data, exporter, horizon, order, drift, train_through),
        Command::Gbdt(sub) => match sub {
            GbdtCommand::Train { data, params } => commands::gbdt::train(&ctx, &data, &params),
            GbdtCommand::Predict { data, model } => commands::gbdt::predict(&ctx, &data, model),
            GbdtCommand::Importance { model, kind } => commands::gbdt::importance(&ctx, model, kind),
            GbdtCommand::Evaluate {
                data,
                model,
                holdout_years,
            } => commands::gbdt::evaluate(&ctx, &data, model, holdout_years),
        },
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("error[{}]: {err}", err.code());
        std::process::exit(1);
    }
}
