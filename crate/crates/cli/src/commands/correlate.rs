use tradecast::panel::ColumnData;
use tradecast::stats::correlation_matrix;

use crate::chart;
use crate::commands::{load_panel, parse_list};
use crate::config::Ctx;
use crate::error::CliError;
use crate::DataArgs;

pub fn run(ctx: &Ctx, data: &DataArgs, features: Option<String>) -> Result<(), CliError> {
    let mut panel = load_panel(ctx, data)?;
    if let Some(commodity) = ctx.commodity() {
        panel = panel.filter_commodity(commodity);
    }
    let features = parse_list(ctx.resolve_opt(features, "features")?);
    let columns: Vec<String> = match features {
        Some(list) => list,
        // Default: every numeric feature column, schema order.
        None => panel
            .features
            .iter()
            .filter(|f| matches!(f.data, ColumnData::Numeric(_)))
            .map(|f| f.name.clone())
            .collect(),
    };
    if columns.is_empty() {
        return Err(CliError::Usage(
            "no numeric columns to correlate (use --features)".to_string(),
        ));
    }

    let matrix = correlation_matrix(&panel, &columns)?;
    let csv_path = ctx.out_path("correlations.csv");
    let file = std::fs::File::create(&csv_path).map_err(CliError::io(&csv_path))?;
    matrix
        .write_csv(std::io::BufWriter::new(file))
        .map_err(CliError::io(&csv_path))?;
    chart::write_heatmap(
        &ctx.out_path("correlations.svg"),
        "Feature correlations",
        &matrix.names,
        &matrix.values,
    )?;

    println!(
        "correlations over {} columns ({} rows, {} cells skipped)",
        matrix.names.len(),
        panel.len(),
        matrix.skipped.len()
    );
    println!("wrote correlations.csv, correlations.svg");
    Ok(())
}
