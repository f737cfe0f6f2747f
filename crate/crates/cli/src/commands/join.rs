use std::path::PathBuf;

use tradecast::panel::{inner_join, parse_econ_csv, parse_trade_csv};

use crate::config::Ctx;
use crate::error::CliError;
use crate::DataArgs;

pub fn run(ctx: &Ctx, data: &DataArgs) -> Result<(), CliError> {
    let trade_path: PathBuf = ctx
        .resolve_opt(data.trade.clone(), "trade")?
        .ok_or_else(|| CliError::Usage("--trade is required".to_string()))?;
    let econ_path: PathBuf = ctx
        .resolve_opt(data.econ.clone(), "econ")?
        .ok_or_else(|| CliError::Usage("--econ is required".to_string()))?;

    let trade = parse_trade_csv(&trade_path)?;
    let econ = parse_econ_csv(&econ_path)?;
    let panel = inner_join(&trade, &econ)?;

    let out = ctx.out_path("panel.csv");
    panel.write_csv_file(&out)?;
    println!(
        "joined {} trade rows -> {} panel rows ({} feature columns)",
        trade.len(),
        panel.len(),
        panel.features.len()
    );
    if panel.is_empty() {
        println!("warning: join produced 0 rows (no overlapping keys)");
    }
    println!("wrote panel.csv");
    Ok(())
}
