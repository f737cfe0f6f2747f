use std::io::Write;

use crate::chart;
use crate::commands::{load_trade, panel_from_trade};
use crate::config::Ctx;
use crate::error::CliError;
use crate::DataArgs;

pub fn run(ctx: &Ctx, data: &DataArgs, n: Option<usize>) -> Result<(), CliError> {
    let commodity = ctx.require_commodity()?;
    let n = ctx.resolve(n, "n", 5)?;
    if n == 0 {
        return Err(CliError::Usage("--n must be at least 1".to_string()));
    }
    let trade = load_trade(ctx, data)?;
    let panel = panel_from_trade(&trade)?;
    let ranked = panel.top_exporters(commodity, n);

    let csv_path = ctx.out_path("top_exporters.csv");
    let mut file = std::fs::File::create(&csv_path).map_err(CliError::io(&csv_path))?;
    writeln!(file, "country,total_value_usd").map_err(CliError::io(&csv_path))?;
    for (country, total) in &ranked {
        writeln!(file, "{country},{total}").map_err(CliError::io(&csv_path))?;
    }
    chart::write_bar_chart(
        &ctx.out_path("top_exporters.svg"),
        &format!("Top {commodity} exporters"),
        &ranked,
    )?;

    for (rank, (country, total)) in ranked.iter().enumerate() {
        println!("{}. {country}  {total}", rank + 1);
    }
    println!("wrote top_exporters.csv, top_exporters.svg");
    Ok(())
}
