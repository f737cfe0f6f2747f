use tradecast::arima::{arima_fit, forecast_intervals, select_order, ArimaSpec};

use crate::commands::{annual_series, load_trade, require_exporter};
use crate::config::Ctx;
use crate::error::CliError;
use crate::DataArgs;

fn parse_order(raw: &str, drift_flag: Option<bool>) -> Result<ArimaSpec, CliError> {
    let parts: Vec<&str> = raw.split(',').map(|p| p.trim()).collect();
    if parts.len() != 3 {
        return Err(CliError::Usage(format!(
            "bad --order `{raw}` (expected `p,d,q`, e.g. 0,1,0)"
        )));
    }
    let parse = |s: &str| -> Result<usize, CliError> {
        s.parse()
            .map_err(|_| CliError::Usage(format!("bad order component `{s}`")))
    };
    let (p, d, q) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
    let drift = drift_flag.unwrap_or(d >= 1);
    Ok(ArimaSpec::new(p, d, q, drift)?)
}

#[allow(clippy::too_many_arguments)]
pub fn run(
    ctx: &Ctx,
    data: &DataArgs,
    exporter: Option<String>,
    horizon: Option<usize>,
    order: Option<String>,
    drift: Option<bool>,
    train_through: Option<i32>,
) -> Result<(), CliError> {
    let commodity = ctx.require_commodity()?;
    let exporter = require_exporter(ctx, exporter)?;
    let horizon = ctx.resolve(horizon, "horizon", 8)?;
    if horizon == 0 {
        return Err(CliError::Usage("--horizon must be at least 1".to_string()));
    }
    let order = ctx.resolve_opt(order, "order")?;
    let drift = ctx.resolve_opt(drift, "drift")?;
    let train_through = ctx.resolve_opt(train_through, "train_through")?;

    let trade = load_trade(ctx, data)?;
    let series = annual_series(&trade, &exporter, commodity);
    if series.is_empty() {
        return Err(CliError::Usage(format!(
            "no {commodity} rows for exporter {exporter}"
        )));
    }
    let last_year = series.last().unwrap().0;
    let cutoff = train_through.unwrap_or(last_year);
    let train: Vec<f64> = series
        .iter()
        .filter(|(y, _)| *y <= cutoff)
        .map(|(_, v)| *v)
        .collect();

    let spec = match order.as_deref() {
        None | Some("auto") => {
            // Default grid: p,q <= 2, d in {0,1}, drift whenever d >= 1.
            select_order(&train, 2, 2, &[0, 1])?
        }
        Some(raw) => parse_order(raw, drift)?,
    };
    let fit = arima_fit(&train, spec)?;

    let actuals: Vec<Option<f64>> = (1..=horizon)
        .map(|h| {
            let year = cutoff + h as i32;
            series.iter().find(|(y, _)| *y == year).map(|(_, v)| *v)
        })
        .collect();
    let table = forecast_intervals(&fit, horizon, cutoff + 1, &actuals);

    let csv_path = ctx.out_path("arima_forecast.csv");
    let file = std::fs::File::create(&csv_path).map_err(CliError::io(&csv_path))?;
    table
        .write_csv(std::io::BufWriter::new(file))
        .map_err(CliError::io(&csv_path))?;

    println!(
        "{spec} fit on {} observations through {cutoff}: mu {}, sigma2 {}",
        fit.n_obs, fit.mu, fit.sigma2
    );
    print!("{}", table.render_console());
    println!("wrote arima_forecast.csv");
    Ok(())
}
