use std::io::Write;

use tradecast::stats::{ols_fit, ols_forecast};

use crate::chart::{self, Series};
use crate::commands::{annual_series, load_trade, require_exporter};
use crate::config::Ctx;
use crate::error::CliError;
use crate::DataArgs;

pub fn run(
    ctx: &Ctx,
    data: &DataArgs,
    exporter: Option<String>,
    years: Option<usize>,
) -> Result<(), CliError> {
    let commodity = ctx.require_commodity()?;
    let exporter = require_exporter(ctx, exporter)?;
    let ahead = ctx.resolve(years, "years", 3)?;

    let trade = load_trade(ctx, data)?;
    let history = annual_series(&trade, &exporter, commodity);
    if history.is_empty() {
        return Err(CliError::Usage(format!(
            "no {commodity} rows for exporter {exporter}"
        )));
    }
    let xs: Vec<f64> = history.iter().map(|(y, _)| *y as f64).collect();
    let ys: Vec<f64> = history.iter().map(|(_, v)| *v).collect();
    let model = ols_fit(&xs, &ys)?;

    let last_year = history.last().unwrap().0;
    let future_years: Vec<i32> = (1..=ahead as i32).map(|k| last_year + k).collect();
    let projection = ols_forecast(&model, &future_years);

    let csv_path = ctx.out_path("projection.csv");
    let mut file = std::fs::File::create(&csv_path).map_err(CliError::io(&csv_path))?;
    writeln!(file, "year,actual,forecast").map_err(CliError::io(&csv_path))?;
    for (year, value) in &history {
        writeln!(file, "{year},{value},{}", model.predict(*year as f64))
            .map_err(CliError::io(&csv_path))?;
    }
    for (year, value) in &projection {
        writeln!(file, "{year},,{value}").map_err(CliError::io(&csv_path))?;
    }

    // History and projection as distinct series; the projection segment
    // starts at the last observed point so the two lines connect.
    let mut projected_points = vec![(last_year as f64, model.predict(last_year as f64))];
    projected_points.extend(projection.iter().map(|(y, v)| (*y as f64, *v)));
    chart::write_line_chart(
        &ctx.out_path("projection.svg"),
        &format!("{exporter} {commodity} exports, straight-line projection"),
        &[
            Series {
                name: "history".to_string(),
                color: "#4878a8",
                points: history.iter().map(|(y, v)| (*y as f64, *v)).collect(),
            },
            Series {
                name: "projection".to_string(),
                color: "#c03028",
                points: projected_points,
            },
        ],
    )?;

    println!(
        "fit over {} years: slope {} per year, intercept {}, r2 {:.4}",
        model.n, model.slope, model.intercept, model.r_squared
    );
    for (year, value) in &projection {
        println!("{year}: {value}");
    }
    println!("wrote projection.csv, projection.svg");
    Ok(())
}
