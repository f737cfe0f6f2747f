pub mod arima;
pub mod cluster;
pub mod correlate;
pub mod gbdt;
pub mod join;
pub mod project;
pub mod top_exporters;

use std::collections::BTreeMap;
use std::path::PathBuf;

use tradecast::panel::{
    inner_join, parse_econ_csv, parse_trade_csv, Commodity, PanelTable, TradeRecord,
};

use crate::config::Ctx;
use crate::error::CliError;
use crate::DataArgs;

/// Loads a panel from `--panel`, or joins `--trade`/`--econ`.
pub fn load_panel(ctx: &Ctx, data: &DataArgs) -> Result<PanelTable, CliError> {
    let panel_path = ctx.resolve_opt(data.panel.clone(), "panel")?;
    if let Some(path) = panel_path {
        return Ok(PanelTable::read_csv(&path)?);
    }
    let trade_path: Option<PathBuf> = ctx.resolve_opt(data.trade.clone(), "trade")?;
    let econ_path: Option<PathBuf> = ctx.resolve_opt(data.econ.clone(), "econ")?;
    match (trade_path, econ_path) {
        (Some(trade), Some(econ)) => {
            let trade = parse_trade_csv(&trade)?;
            let econ = parse_econ_csv(&econ)?;
            Ok(inner_join(&trade, &econ)?)
        }
        _ => Err(CliError::Usage(
            "provide either --panel, or both --trade and --econ".to_string(),
        )),
    }
}

pub fn load_trade(ctx: &Ctx, data: &DataArgs) -> Result<Vec<TradeRecord>, CliError> {
    let trade_path: PathBuf = ctx
        .resolve_opt(data.trade.clone(), "trade")?
        .ok_or_else(|| CliError::Usage("--trade is required for this command".to_string()))?;
    Ok(parse_trade_csv(&trade_path)?)
}

/// Trade records as a feature-less panel (keys and values only).
pub fn panel_from_trade(trade: &[TradeRecord]) -> Result<PanelTable, CliError> {
    let mut sorted: Vec<&TradeRecord> = trade.iter().collect();
    sorted.sort_by(|a, b| {
        (a.commodity, &a.origin, &a.dest, a.year).cmp(&(b.commodity, &b.origin, &b.dest, b.year))
    });
    let table = PanelTable {
        origins: sorted.iter().map(|t| t.origin.clone()).collect(),
        dests: sorted.iter().map(|t| t.dest.clone()).collect(),
        commodities: sorted.iter().map(|t| t.commodity).collect(),
        years: sorted.iter().map(|t| t.year).collect(),
        values: sorted.iter().map(|t| t.value).collect(),
        features: Vec::new(),
    };
    table.check_unique_keys()?;
    Ok(table)
}

/// Annual totals (summed over destinations) for one exporter and commodity,
/// ascending by year.
pub fn annual_series(
    trade: &[TradeRecord],
    exporter: &str,
    commodity: Commodity,
) -> Vec<(i32, f64)> {
    let mut by_year: BTreeMap<i32, f64> = BTreeMap::new();
    for t in trade {
        if t.origin == exporter && t.commodity == commodity {
            *by_year.entry(t.year).or_insert(0.0) += t.value;
        }
    }
    by_year.into_iter().collect()
}

pub fn require_exporter(ctx: &Ctx, exporter: Option<String>) -> Result<String, CliError> {
    ctx.resolve_opt(exporter, "exporter")?
        .ok_or_else(|| CliError::Usage("--exporter is required for this command".to_string()))
}

/// Comma-separated list flag ("a,b,c").
pub fn parse_list(raw: Option<String>) -> Option<Vec<String>> {
    raw.map(|s| {
        s.split(',')
            .map(|p| p.trim().to_string())
            .filter(|p| !p.is_empty())
            .collect()
    })
}
