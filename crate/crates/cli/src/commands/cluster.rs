use std::collections::BTreeMap;

use tradecast::kmeans::{assign, kmeans_fit, standardize, write_cluster_csv};
use tradecast::panel::{ColumnData, PanelTable};

use crate::commands::{load_panel, parse_list};
use crate::config::Ctx;
use crate::error::CliError;
use crate::DataArgs;

struct CountryMatrix {
    countries: Vec<String>,
    rows: Vec<Vec<f64>>,
    dropped: Vec<String>,
}

/// Per-origin aggregates: `trade_total` is the summed export value, every
/// other requested feature is the mean of its non-missing cells over the
/// country's rows.
fn country_features(panel: &PanelTable, features: &[String]) -> Result<CountryMatrix, CliError> {
    let mut per_country: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for i in 0..panel.len() {
        per_country.entry(panel.origins[i].as_str()).or_default().push(i);
    }

    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(features.len());
    for name in features {
        if name == "trade_total" {
            columns.push(
                per_country
                    .values()
                    .map(|rows| rows.iter().map(|&i| panel.values[i]).sum())
                    .collect(),
            );
            continue;
        }
        let col = panel.feature(name).ok_or_else(|| {
            CliError::Usage(format!("unknown cluster feature `{name}` (hint: trade_total is built in)"))
        })?;
        let values = match &col.data {
            ColumnData::Numeric(v) => v,
            ColumnData::Categorical { .. } => {
                return Err(CliError::Usage(format!(
                    "cluster feature `{name}` is categorical; only numeric features can be aggregated"
                )))
            }
        };
        columns.push(
            per_country
                .values()
                .map(|rows| {
                    let present: Vec<f64> = rows
                        .iter()
                        .map(|&i| values[i])
                        .filter(|v| !v.is_nan())
                        .collect();
                    if present.is_empty() {
                        f64::NAN
                    } else {
                        present.iter().sum::<f64>() / present.len() as f64
                    }
                })
                .collect(),
        );
    }

    let all_countries: Vec<String> = per_country.keys().map(|c| c.to_string()).collect();
    let mut matrix = CountryMatrix {
        countries: Vec::new(),
        rows: Vec::new(),
        dropped: Vec::new(),
    };
    for (r, country) in all_countries.iter().enumerate() {
        let row: Vec<f64> = columns.iter().map(|c| c[r]).collect();
        if row.iter().any(|v| v.is_nan()) {
            matrix.dropped.push(country.clone());
        } else {
            matrix.rows.push(row);
            matrix.countries.push(country.clone());
        }
    }
    Ok(matrix)
}

pub fn run(
    ctx: &Ctx,
    data: &DataArgs,
    k: Option<usize>,
    features: Option<String>,
) -> Result<(), CliError> {
    let k = ctx.resolve(k, "k", 3)?;
    let mut panel = load_panel(ctx, data)?;
    if let Some(commodity) = ctx.commodity() {
        panel = panel.filter_commodity(commodity);
    }
    let feature_names = parse_list(ctx.resolve_opt(features, "features")?)
        .unwrap_or_else(|| vec!["trade_total".to_string()]);

    let matrix = country_features(&panel, &feature_names)?;
    if !matrix.dropped.is_empty() {
        println!(
            "dropped {} countries with missing features: {}",
            matrix.dropped.len(),
            matrix.dropped.join(",")
        );
    }

    let (scaled, scales) = standardize(&matrix.rows);
    let model = kmeans_fit(&scaled, k, ctx.seed, feature_names.clone(), scales)?;
    let labeled: Vec<(String, Vec<f64>)> = matrix.countries.into_iter().zip(scaled).collect();
    let assignments = assign(&model, &labeled)?;

    let csv_path = ctx.out_path("clusters.csv");
    let file = std::fs::File::create(&csv_path).map_err(CliError::io(&csv_path))?;
    write_cluster_csv(std::io::BufWriter::new(file), &assignments)
        .map_err(CliError::io(&csv_path))?;

    let mut sizes = vec![0usize; model.k];
    for (_, c, _) in &assignments {
        sizes[*c] += 1;
    }
    println!(
        "k-means over {} countries, {} features (seed {}), inertia {:.6}",
        assignments.len(),
        feature_names.len(),
        ctx.seed,
        model.inertia
    );
    for (c, size) in sizes.iter().enumerate() {
        let members: Vec<&str> = assignments
            .iter()
            .filter(|(_, cl, _)| *cl == c)
            .map(|(name, _, _)| name.as_str())
            .collect();
        println!("cluster {}: {} countries ({})", c + 1, size, members.join(","));
    }
    println!("wrote clusters.csv");
    Ok(())
}
