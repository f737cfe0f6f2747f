//! End-to-end tests of the `tradecast` binary against fixture data.

use std::path::{Path, PathBuf};
use std::process::Output;

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_tradecast")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    std::process::Command::new(binary())
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).to_string()
}

/// Minimal XML well-formedness check: every opened tag closes in order.
fn assert_well_formed_xml(text: &str) {
    let mut stack: Vec<String> = Vec::new();
    let mut rest = text;
    while let Some(start) = rest.find('<') {
        rest = &rest[start + 1..];
        let end = rest.find('>').expect("unclosed tag bracket");
        let tag = &rest[..end];
        rest = &rest[end + 1..];
        if tag.starts_with('?') || tag.starts_with('!') {
            continue;
        }
        if let Some(name) = tag.strip_prefix('/') {
            let open = stack.pop().unwrap_or_else(|| panic!("stray closing tag </{name}>"));
            assert_eq!(open, name, "mismatched closing tag");
        } else if !tag.ends_with('/') {
            let name: String = tag.split_whitespace().next().unwrap_or("").to_string();
            stack.push(name);
        }
    }
    assert!(stack.is_empty(), "unclosed tags: {stack:?}");
}

#[test]
fn join_reports_row_counts() {
    let dir = tempfile::tempdir().unwrap();
    let trade = dir.path().join("trade.csv");
    let econ = dir.path().join("econ.csv");
    std::fs::write(
        &trade,
        "origin_iso3,dest_iso3,commodity,year,value_usd\n\
         AUS,JPN,Beef,2015,10\nAUS,JPN,Beef,2016,11\nUSA,CAN,Corn,2015,12\n",
    )
    .unwrap();
    std::fs::write(
        &econ,
        "origin_iso3,dest_iso3,year,distance\nAUS,JPN,2015,6800\nUSA,CAN,2015,734\n",
    )
    .unwrap();
    let out = run(&[
        "join",
        "--trade",
        trade.to_str().unwrap(),
        "--econ",
        econ.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("3 trade rows -> 2 panel rows"));
    let panel = std::fs::read_to_string(dir.path().join("panel.csv")).unwrap();
    assert_eq!(panel.lines().count(), 3); // header + 2 rows
}

#[test]
fn join_disjoint_keys_warn() {
    let dir = tempfile::tempdir().unwrap();
    let trade = dir.path().join("trade.csv");
    let econ = dir.path().join("econ.csv");
    std::fs::write(
        &trade,
        "origin_iso3,dest_iso3,commodity,year,value_usd\nAUS,JPN,Beef,2015,10\n",
    )
    .unwrap();
    std::fs::write(&econ, "origin_iso3,dest_iso3,year,distance\nUSA,CAN,2015,734\n").unwrap();
    let out = run(&[
        "join",
        "--trade",
        trade.to_str().unwrap(),
        "--econ",
        econ.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("0 panel rows"));
    assert!(stdout(&out).contains("warning"));
}

#[test]
fn missing_file_fails_with_machine_code() {
    let dir = tempfile::tempdir().unwrap();
    let econ = fixture("econ.csv");
    let out = run(&[
        "join",
        "--trade",
        "/no/such/trade.csv",
        "--econ",
        econ.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    let err = stderr(&out);
    assert!(err.starts_with("error[MissingFile]:"), "stderr: {err}");
    assert_eq!(err.trim_end().lines().count(), 1);
}

#[test]
fn correlate_writes_matrix_and_heatmap() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "correlate",
        "--trade",
        fixture("trade.csv").to_str().unwrap(),
        "--econ",
        fixture("econ.csv").to_str().unwrap(),
        "--features",
        "gdp_o,gdpcap_o,pop_o",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let csv = std::fs::read_to_string(dir.path().join("correlations.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 4); // header + 3 rows
    assert_eq!(lines[0], ",gdp_o,gdpcap_o,pop_o");

    // Library as oracle: re-derive the same matrix from the joined panel.
    let trade = tradecast::panel::parse_trade_csv(&fixture("trade.csv")).unwrap();
    let econ = tradecast::panel::parse_econ_csv(&fixture("econ.csv")).unwrap();
    let panel = tradecast::panel::inner_join(&trade, &econ).unwrap();
    let names: Vec<String> = ["gdp_o", "gdpcap_o", "pop_o"].iter().map(|s| s.to_string()).collect();
    let matrix = tradecast::stats::correlation_matrix(&panel, &names).unwrap();
    let mut expected = Vec::new();
    matrix.write_csv(&mut expected).unwrap();
    assert_eq!(csv, String::from_utf8(expected).unwrap());

    let svg = std::fs::read_to_string(dir.path().join("correlations.svg")).unwrap();
    assert_well_formed_xml(&svg);
    assert!(svg.contains("gdp_o"));
}

#[test]
fn correlate_unknown_column_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "correlate",
        "--trade",
        fixture("trade.csv").to_str().unwrap(),
        "--econ",
        fixture("econ.csv").to_str().unwrap(),
        "--features",
        "nope",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    assert!(stderr(&out).starts_with("error[UnknownColumn]:"));
}

#[test]
fn top_exporters_echoes_the_expected_ranking() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "top-exporters",
        "--trade",
        fixture("trade.csv").to_str().unwrap(),
        "--commodity",
        "Beef",
        "--n",
        "5",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let csv = std::fs::read_to_string(dir.path().join("top_exporters.csv")).unwrap();
    let countries: Vec<&str> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(countries, vec!["AUS", "DEU", "NLD", "FRA", "USA"]);

    // The bar chart references exactly the countries present in the CSV.
    let svg = std::fs::read_to_string(dir.path().join("top_exporters.svg")).unwrap();
    assert_well_formed_xml(&svg);
    for country in countries {
        assert!(svg.contains(country), "{country} missing from SVG");
    }
}

#[test]
fn project_continues_an_arithmetic_progression() {
    let dir = tempfile::tempdir().unwrap();
    let trade = dir.path().join("trade.csv");
    let mut content = String::from("origin_iso3,dest_iso3,commodity,year,value_usd\n");
    for (i, year) in (2010..=2016).enumerate() {
        content.push_str(&format!("AUS,JPN,Beef,{year},{}\n", 1000 + 50 * i));
    }
    std::fs::write(&trade, content).unwrap();
    let out = run(&[
        "project",
        "--trade",
        trade.to_str().unwrap(),
        "--commodity",
        "Beef",
        "--exporter",
        "AUS",
        "--years",
        "3",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let csv = std::fs::read_to_string(dir.path().join("projection.csv")).unwrap();
    let forecast_rows: Vec<(i32, f64)> = csv
        .lines()
        .skip(1)
        .filter(|l| l.split(',').nth(1).unwrap().is_empty())
        .map(|l| {
            let mut parts = l.split(',');
            let year = parts.next().unwrap().parse().unwrap();
            parts.next();
            (year, parts.next().unwrap().parse().unwrap())
        })
        .collect();
    assert_eq!(forecast_rows.len(), 3);
    for (k, (year, value)) in forecast_rows.iter().enumerate() {
        assert_eq!(*year, 2017 + k as i32);
        let expected = 1000.0 + 50.0 * (7 + k) as f64;
        assert!((value - expected).abs() < 1e-6, "year {year}: {value} vs {expected}");
    }
    let svg = std::fs::read_to_string(dir.path().join("projection.svg")).unwrap();
    assert_well_formed_xml(&svg);
    assert!(svg.contains("projection"));
}

/// Annual series shaped so a (0,1,0)+drift fit reproduces the reference
/// beef-forecast table: differences average 104423 with sample standard
/// deviation 301027, last level 5489820.
fn table1_series() -> Vec<f64> {
    let mu = 104423.0;
    let sigma = 301027.0;
    let c = sigma * (9.0f64 / 10.0).sqrt();
    let mut series = vec![5489820.0 - 10.0 * mu];
    for i in 0..10 {
        let e = if i % 2 == 0 { c } else { -c };
        let next = series.last().unwrap() + mu + e;
        series.push(next);
    }
    series
}

const TABLE1: [[f64; 5]; 8] = [
    [5594243.0, 5208462.0, 5980024.0, 5004242.0, 6184244.0],
    [5698666.0, 5153090.0, 6244242.0, 4864279.0, 6533053.0],
    [5803089.0, 5134898.0, 6471281.0, 4781178.0, 6825000.0],
    [5907513.0, 5135951.0, 6679074.0, 4727511.0, 7087514.0],
    [6011936.0, 5149304.0, 6874567.0, 4692654.0, 7331217.0],
    [6116359.0, 5171393.0, 7061325.0, 4671159.0, 7561559.0],
    [6220782.0, 5200102.0, 7241462.0, 4659787.0, 7781777.0],
    [6325205.0, 5234053.0, 7416358.0, 4656432.0, 7993979.0],
];

#[test]
fn arima_replicates_the_reference_forecast_table() {
    let dir = tempfile::tempdir().unwrap();
    let trade = dir.path().join("trade.csv");
    let mut content = String::from("origin_iso3,dest_iso3,commodity,year,value_usd\n");
    for (i, value) in table1_series().iter().enumerate() {
        content.push_str(&format!("AUS,JPN,Beef,{},{value}\n", 2003 + i as i32));
    }
    std::fs::write(&trade, content).unwrap();
    let out = run(&[
        "arima",
        "--trade",
        trade.to_str().unwrap(),
        "--commodity",
        "Beef",
        "--exporter",
        "AUS",
        "--order",
        "0,1,0",
        "--horizon",
        "8",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let csv = std::fs::read_to_string(dir.path().join("arima_forecast.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 8);
    for (h, row) in rows.iter().enumerate() {
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells[0].parse::<i32>().unwrap(), 2014 + h as i32);
        assert!(cells[1].is_empty(), "no actuals past the data");
        for (k, expected) in TABLE1[h].iter().enumerate() {
            let got: f64 = cells[2 + k].parse().unwrap();
            let rel = (got - expected).abs() / expected;
            assert!(rel < 1e-4, "row {h} col {k}: {got} vs {expected} (rel {rel:.2e})");
        }
    }
    // Console table shows the same forecasts and the X convention.
    let text = stdout(&out);
    assert!(text.contains(" X "));
    assert!(text.contains("Low 80"));
}

#[test]
fn arima_noiseless_progression_zero_width_and_consistent_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let trade = dir.path().join("trade.csv");
    let mut content = String::from("origin_iso3,dest_iso3,commodity,year,value_usd\n");
    for (i, year) in (2005..=2019).enumerate() {
        content.push_str(&format!("AUS,JPN,Beef,{year},{}\n", 700 + 25 * i));
    }
    std::fs::write(&trade, content).unwrap();
    let out = run(&[
        "arima",
        "--trade",
        trade.to_str().unwrap(),
        "--commodity",
        "Beef",
        "--exporter",
        "AUS",
        "--order",
        "0,1,0",
        "--horizon",
        "3",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let csv = std::fs::read_to_string(dir.path().join("arima_forecast.csv")).unwrap();
    let console = stdout(&out);
    for (h, row) in csv.lines().skip(1).enumerate() {
        let cells: Vec<&str> = row.split(',').collect();
        let forecast: f64 = cells[2].parse().unwrap();
        let lo95: f64 = cells[5].parse().unwrap();
        let hi95: f64 = cells[6].parse().unwrap();
        let expected = 700.0 + 25.0 * (14 + 1 + h) as f64;
        assert!((forecast - expected).abs() < 1e-9);
        assert!((hi95 - lo95).abs() < 1e-9);
        // Every CSV cell appears verbatim in the console table.
        for cell in &cells[2..] {
            assert!(console.contains(*cell), "cell {cell} missing from console");
        }
    }
}

#[test]
fn cluster_writes_sorted_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "cluster",
        "--trade",
        fixture("trade.csv").to_str().unwrap(),
        "--econ",
        fixture("econ.csv").to_str().unwrap(),
        "--features",
        "trade_total,gdp_o,pop_o",
        "--k",
        "3",
        "--seed",
        "7",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let csv = std::fs::read_to_string(dir.path().join("clusters.csv")).unwrap();
    let rows: Vec<(u32, String)> = csv
        .lines()
        .skip(1)
        .map(|l| {
            let mut parts = l.split(',');
            let country = parts.next().unwrap().to_string();
            let cluster = parts.next().unwrap().parse().unwrap();
            (cluster, country)
        })
        .collect();
    assert_eq!(rows.len(), 12);
    let mut sorted = rows.clone();
    sorted.sort();
    assert_eq!(rows, sorted, "rows must be sorted by cluster then country");
}

#[test]
fn gbdt_pipeline_train_predict_importance_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let trade = fixture("trade.csv");
    let econ = fixture("econ.csv");
    let common = [
        "--trade",
        trade.to_str().unwrap(),
        "--econ",
        econ.to_str().unwrap(),
        "--commodity",
        "Beef",
        "--out",
        out_dir,
        "--seed",
        "7",
    ];

    let mut args = vec!["gbdt", "train", "--max-rounds", "400", "--min-data-in-leaf", "5", "--holdout-years", "3"];
    args.extend_from_slice(&common);
    let out = run(&args);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert!(dir.path().join("gbdt_model.txt").exists());
    let history = std::fs::read_to_string(dir.path().join("eval_history.csv")).unwrap();
    assert!(history.starts_with("round,valid_mse\n"));
    assert!(history.lines().count() > 1);

    let mut args = vec!["gbdt", "predict"];
    args.extend_from_slice(&common);
    let out = run(&args);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let predictions = std::fs::read_to_string(dir.path().join("predictions.csv")).unwrap();
    assert!(predictions.starts_with("origin_iso3,dest_iso3,commodity,year,actual,predicted\n"));

    let out = run(&["gbdt", "importance", "--kind", "gain", "--out", out_dir, "--seed", "7"]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let first = text.lines().next().unwrap();
    // Conclusions-style line: `name: split, gain`.
    assert!(first.contains(": ") && first.contains(", "), "line: {first}");
    let csv = std::fs::read_to_string(dir.path().join("importance.csv")).unwrap();
    assert!(csv.starts_with("feature,split,gain,gain_share\n"));

    let mut args = vec!["gbdt", "evaluate", "--holdout-years", "3"];
    args.extend_from_slice(&common);
    let out = run(&args);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let metrics: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("metrics.json")).unwrap())
            .unwrap();
    assert_eq!(metrics["commodity"], "Beef");
    assert!(metrics["r2"].as_f64().unwrap() > 0.0);
    assert!(metrics["rounds_used"].as_u64().unwrap() > 0);
}

#[test]
fn gbdt_evaluate_constant_target_surfaces_zero_variance() {
    let dir = tempfile::tempdir().unwrap();
    let trade = dir.path().join("trade.csv");
    let econ = dir.path().join("econ.csv");
    let mut t = String::from("origin_iso3,dest_iso3,commodity,year,value_usd\n");
    let mut e = String::from("origin_iso3,dest_iso3,year,distance\n");
    for year in 2010..=2019 {
        // Constant target everywhere.
        t.push_str(&format!("AUS,JPN,Beef,{year},5\n"));
        t.push_str(&format!("USA,CAN,Beef,{year},5\n"));
        e.push_str(&format!("AUS,JPN,{year},6800\n"));
        e.push_str(&format!("USA,CAN,{year},734\n"));
    }
    std::fs::write(&trade, t).unwrap();
    std::fs::write(&econ, e).unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let out = run(&[
        "gbdt",
        "train",
        "--trade",
        trade.to_str().unwrap(),
        "--econ",
        econ.to_str().unwrap(),
        "--holdout-years",
        "2",
        "--min-data-in-leaf",
        "1",
        "--max-rounds",
        "10",
        "--out",
        out_dir,
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let out = run(&[
        "gbdt",
        "evaluate",
        "--trade",
        trade.to_str().unwrap(),
        "--econ",
        econ.to_str().unwrap(),
        "--holdout-years",
        "2",
        "--out",
        out_dir,
    ]);
    assert!(!out.status.success());
    assert!(stderr(&out).starts_with("error[ZeroVariance]:"), "stderr: {}", stderr(&out));
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(
        &cfg,
        format!(
            "trade = {}\ncommodity = Beef\nn = 3\n",
            fixture("trade.csv").display()
        ),
    )
    .unwrap();
    let out = run(&[
        "top-exporters",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let csv = std::fs::read_to_string(dir.path().join("top_exporters.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4); // header + 3 from config

    // Flag overrides the config's n.
    let out = run(&[
        "top-exporters",
        "--config",
        cfg.to_str().unwrap(),
        "--n",
        "2",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("top_exporters.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn unknown_commodity_is_a_usage_error() {
    let out = run(&["top-exporters", "--trade", "x.csv", "--commodity", "Pork"]);
    assert!(!out.status.success());
    assert!(stderr(&out).starts_with("error[Usage]:"));
}
