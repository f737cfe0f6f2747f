//! Acceptance suite: one test per shipping criterion, each printing a
//! PASS line (visible with `--nocapture`) and checking its runtime budget.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tradecast::arima::{arima_fit, forecast_intervals, ArimaFit, ArimaSpec};
use tradecast::gbdt::{
    bin_panel, feature_importance, gbdt_fit, gbdt_predict, predict_with_rounds, GbdtModel,
    GbdtParams, ImportanceKind, Node,
};
use tradecast::kmeans::{assign, kmeans_fit, standardize};
use tradecast::panel::{
    inner_join, ColumnData, Commodity, EconRecord, FeatureColumn, FeatureValue, PanelTable,
    TradeRecord,
};
use tradecast::stats::{correlation_matrix, ols_fit, pearson, r_squared};

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen::<f64>().max(1e-12);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn finish(criterion: &str, what: &str, start: Instant, budget: Duration) {
    let elapsed = start.elapsed();
    assert!(
        elapsed <= budget,
        "criterion {criterion} exceeded its {budget:?} budget: {elapsed:?}"
    );
    println!("PASS criterion {criterion}: {what} ({elapsed:.2?})");
}

// ------------------------------------------------------------------------
// Criterion 1: reference-table replication.

/// Reference forecast/interval cells for the beef-trade fixture, 2014..2021:
/// (forecast, lo80, hi80, lo95, hi95) per row.
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
const TABLE1_ACTUALS: [f64; 4] = [6939233.0, 7357932.0, 5921218.0, 5843209.0];

#[test]
fn criterion_1_table1_replication() {
    let start = Instant::now();
    // Parameters recovered from the table itself: mu is the constant
    // forecast first-difference, sigma comes from the h=1 80% half-width,
    // the last observation is the first forecast minus mu.
    let fit = ArimaFit {
        spec: ArimaSpec::new(0, 1, 0, true).unwrap(),
        phi: Vec::new(),
        theta: Vec::new(),
        mu: 104423.0,
        sigma2: 301027.0 * 301027.0,
        tail_obs: vec![5489820.0],
        tail_resid: Vec::new(),
        n_obs: 26,
    };
    let actuals: Vec<Option<f64>> = TABLE1_ACTUALS.iter().map(|&a| Some(a)).collect();
    let table = forecast_intervals(&fit, 8, 2014, &actuals);
    assert_eq!(table.rows.len(), 8);
    for (h, row) in table.rows.iter().enumerate() {
        assert_eq!(row.year, 2014 + h as i32);
        let got = [row.forecast, row.lo80, row.hi80, row.lo95, row.hi95];
        for (k, (g, e)) in got.iter().zip(&TABLE1[h]).enumerate() {
            let rel = (g - e).abs() / e.abs();
            assert!(
                rel < 1e-4,
                "row {} cell {k}: got {g}, table says {e} (rel {rel:.2e})",
                row.year
            );
        }
        assert_eq!(row.actual, TABLE1_ACTUALS.get(h).copied());
    }
    finish(
        "1",
        "all 40 reference forecast/interval cells within 0.01%",
        start,
        Duration::from_secs(1),
    );
}

// ------------------------------------------------------------------------
// Criterion 2: interval geometry on randomized random-walk fits.

#[test]
fn criterion_2_interval_geometry() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(802);
    for case in 0..1000 {
        let drift = rng.gen_bool(0.5);
        let fit = ArimaFit {
            spec: ArimaSpec::new(0, 1, 0, drift).unwrap(),
            phi: Vec::new(),
            theta: Vec::new(),
            mu: if drift { rng.gen_range(-1e5..1e5) } else { 0.0 },
            sigma2: rng.gen_range(1e-9..1e12),
            tail_obs: vec![rng.gen_range(-1e7..1e7)],
            tail_resid: Vec::new(),
            n_obs: 40,
        };
        let horizon = rng.gen_range(2..=12);
        let table = forecast_intervals(&fit, horizon, 2000, &[]);
        let half1 = (table.rows[0].hi80 - table.rows[0].lo80) / 2.0;
        for (h, row) in table.rows.iter().enumerate() {
            assert!(row.lo95 <= row.lo80 && row.lo80 <= row.forecast);
            assert!(row.forecast <= row.hi80 && row.hi80 <= row.hi95);
            let half = (row.hi80 - row.lo80) / 2.0;
            let ratio = half / half1;
            let expected = ((h + 1) as f64).sqrt();
            assert!(
                (ratio - expected).abs() < 1e-9,
                "case {case} h {}: ratio {ratio} vs {expected}",
                h + 1
            );
        }
    }
    finish(
        "2",
        "sqrt-h interval growth and bound ordering on 1000 randomized fits",
        start,
        Duration::from_secs(5),
    );
}

// ------------------------------------------------------------------------
// Criterion 3: AR(1) coefficient recovery across seeds.

#[test]
fn criterion_3_ar1_recovery() {
    let start = Instant::now();
    let mut hits = 0;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(30_000 + seed);
        let mut x = 0.0;
        let series: Vec<f64> = (0..500)
            .map(|_| {
                x = 0.5 * x + gaussian(&mut rng);
                x
            })
            .collect();
        let fit = arima_fit(&series, ArimaSpec::new(1, 0, 0, false).unwrap()).unwrap();
        if (fit.phi[0] - 0.5).abs() <= 0.08 {
            hits += 1;
        }
    }
    assert!(hits >= 95, "only {hits}/100 seeds recovered phi within 0.08");
    finish(
        "3",
        &format!("phi recovered within ±0.08 on {hits}/100 seeds"),
        start,
        Duration::from_secs(30),
    );
}

// ------------------------------------------------------------------------
// Criterion 4: boosted-tree recovery of a synthetic nonlinear target.

/// Additive nonlinear signal in features 0..5; features 5..10 are noise.
fn synthetic_signal(x: &[f64]) -> f64 {
    6.0 * (1.2 * x[0]).sin() + x[1] * x[1] + 2.5 * x[2].abs()
        + if x[3] > 0.0 { 4.0 } else { -4.0 }
        + 2.0 * x[4]
}

fn synthetic_panel(n: usize, seed: u64) -> PanelTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut columns: Vec<Vec<f64>> = (0..10).map(|_| Vec::with_capacity(n)).collect();
    let mut target = Vec::with_capacity(n);
    for _ in 0..n {
        let x: Vec<f64> = (0..10).map(|_| rng.gen_range(-3.0..3.0)).collect();
        target.push(synthetic_signal(&x) + 0.3 * gaussian(&mut rng));
        for (c, v) in columns.iter_mut().zip(&x) {
            c.push(*v);
        }
    }
    let code = |i: usize| {
        let a = (b'A' + ((i / 676) % 26) as u8) as char;
        let b = (b'A' + ((i / 26) % 26) as u8) as char;
        let c = (b'A' + (i % 26) as u8) as char;
        format!("{a}{b}{c}")
    };
    PanelTable {
        origins: (0..n).map(code).collect(),
        dests: vec!["ZZZ".into(); n],
        commodities: vec![Commodity::Beef; n],
        // First 80% of rows in early years, the rest in the 4 holdout years.
        years: (0..n).map(|i| 2000 + (i * 20 / n) as i32).collect(),
        values: target,
        features: columns
            .into_iter()
            .enumerate()
            .map(|(k, data)| FeatureColumn {
                name: if k < 5 {
                    format!("signal_{k}")
                } else {
                    format!("noise_{}", k - 5)
                },
                data: ColumnData::Numeric(data),
            })
            .collect(),
    }
}

#[test]
fn criterion_4_gbdt_synthetic_recovery() {
    let start = Instant::now();
    let panel = synthetic_panel(2000, 44);
    let (train, valid) = panel.time_split(4).unwrap();
    assert_eq!(valid.len(), 400);
    let params = GbdtParams {
        learning_rate: 0.01,
        feature_fraction: 0.6,
        max_depth: 8,
        early_stopping_rounds: 500,
        max_rounds: 5000,
        num_leaves: 31,
        min_data_in_leaf: 20,
        lambda_l2: 0.0,
        max_bins: 255,
        seed: 7,
    };
    let model = gbdt_fit(&train, &valid, "value_usd", &params).unwrap();
    let predictions = gbdt_predict(&model, &valid).unwrap();
    let r2 = r_squared(&valid.values, &predictions).unwrap();
    assert!(r2 >= 0.85, "holdout R² {r2:.4} below 0.85");

    let importance = feature_importance(&model, ImportanceKind::Gain);
    let gain_of = |name: &str| {
        importance
            .entries
            .iter()
            .find(|e| e.name == name)
            .unwrap()
            .total_gain
    };
    let min_signal = (0..5).map(|k| gain_of(&format!("signal_{k}"))).fold(f64::INFINITY, f64::min);
    let max_noise = (0..5).map(|k| gain_of(&format!("noise_{k}"))).fold(0.0f64, f64::max);
    assert!(
        min_signal > max_noise,
        "weakest signal gain {min_signal:.3} does not beat strongest noise gain {max_noise:.3}"
    );
    finish(
        "4",
        &format!("holdout R² {r2:.4}, informative features outrank noise by gain"),
        start,
        Duration::from_secs(120),
    );
}

// ------------------------------------------------------------------------
// Criterion 5: boosted-tree internal invariants.

fn stump_oracle(
    bins: &[Vec<u16>],
    n_value_bins: &[usize],
    gradients: &[f64],
) -> (usize, u16, bool, f64) {
    let n = gradients.len();
    let total_g: f64 = gradients.iter().sum();
    let parent = total_g * total_g / n as f64;
    let mut best = (0usize, 0u16, false, 0.0f64);
    let mut best_gain = 0.0;
    for (f, column) in bins.iter().enumerate() {
        let nv = n_value_bins[f];
        let mut hist_g = vec![0.0; nv + 1];
        let mut hist_c = vec![0u32; nv + 1];
        for (r, &b) in column.iter().enumerate() {
            hist_g[b as usize] += gradients[r];
            hist_c[b as usize] += 1;
        }
        let (miss_g, miss_c) = (hist_g[nv], hist_c[nv]);
        let mut left_g = 0.0;
        let mut left_c = 0u32;
        for b in 0..nv {
            left_g += hist_g[b];
            left_c += hist_c[b];
            for missing_left in [false, true] {
                let (gl, cl) = if missing_left {
                    (left_g + miss_g, left_c + miss_c)
                } else {
                    (left_g, left_c)
                };
                let cr = n as u32 - cl;
                if cl < 1 || cr < 1 {
                    continue;
                }
                let gr = total_g - gl;
                let gain = gl * gl / cl as f64 + gr * gr / cr as f64 - parent;
                if gain > best_gain {
                    best_gain = gain;
                    best = (f, b as u16, missing_left, gain);
                }
            }
        }
    }
    best
}

#[test]
fn criterion_5_gbdt_internal_invariants() {
    let start = Instant::now();
    let panel = synthetic_panel(600, 91);
    let (train, valid) = panel.time_split(4).unwrap();

    // (a) training MSE never increases across rounds.
    let params = GbdtParams {
        learning_rate: 0.1,
        max_rounds: 120,
        early_stopping_rounds: 0,
        min_data_in_leaf: 5,
        feature_fraction: 0.6,
        seed: 3,
        ..GbdtParams::default()
    };
    let model = gbdt_fit(&train, &valid, "value_usd", &params).unwrap();
    assert!(!model.trees.is_empty());
    let mse_at = |rounds: usize| {
        let pred = predict_with_rounds(&model, &train, rounds).unwrap();
        pred.iter()
            .zip(&train.values)
            .map(|(p, y)| (p - y) * (p - y))
            .sum::<f64>()
            / train.len() as f64
    };
    let mut prev = mse_at(0);
    for r in 1..=model.trees.len() {
        let cur = mse_at(r);
        assert!(cur <= prev * (1.0 + 1e-12) + 1e-12, "train MSE rose at round {r}");
        prev = cur;
    }

    // (b) split counts sum to the internal node count (traversal oracle).
    let importance = feature_importance(&model, ImportanceKind::Split);
    let split_sum: u64 = importance.entries.iter().map(|e| e.split_count).sum();
    let internal: usize = model.trees[..model.best_round]
        .iter()
        .map(|t| {
            t.nodes
                .iter()
                .filter(|n| matches!(n, Node::Split { .. }))
                .count()
        })
        .sum();
    assert_eq!(split_sum, internal as u64);

    // (c) stump mode reproduces an exhaustive split search.
    let stump_params = GbdtParams {
        feature_fraction: 1.0,
        num_leaves: 2,
        max_rounds: 1,
        early_stopping_rounds: 0,
        min_data_in_leaf: 1,
        lambda_l2: 0.0,
        seed: 1,
        ..GbdtParams::default()
    };
    let stump = gbdt_fit(&train, &PanelTable::default(), "value_usd", &stump_params).unwrap();
    assert_eq!(stump.trees.len(), 1);
    let bins = bin_panel(&stump.bin_mapper, &train).unwrap();
    let n_value_bins: Vec<usize> = stump
        .bin_mapper
        .features
        .iter()
        .map(|f| f.bins.n_value_bins())
        .collect();
    let base = stump.base_score;
    let gradients: Vec<f64> = train.values.iter().map(|y| base - y).collect();
    let (of, ob, om, ogain) = stump_oracle(&bins, &n_value_bins, &gradients);
    match &stump.trees[0].nodes[0] {
        Node::Split {
            feature,
            threshold_bin,
            missing_left,
            gain,
            ..
        } => {
            assert_eq!((*feature, *threshold_bin, *missing_left), (of, ob, om));
            assert!((gain - ogain).abs() <= 1e-12 * ogain.abs().max(1.0));
        }
        other => panic!("stump has no root split: {other:?}"),
    }

    // (d) save -> load -> predict is bit-identical.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.txt");
    model.save_file(&path).unwrap();
    let loaded = GbdtModel::load_file(&path).unwrap();
    assert_eq!(model, loaded);
    let a = gbdt_predict(&model, &valid).unwrap();
    let b = gbdt_predict(&loaded, &valid).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.to_bits(), y.to_bits());
    }
    finish(
        "5",
        "monotone train MSE, split-count audit, exhaustive stump, bit-identical reload",
        start,
        Duration::from_secs(60),
    );
}

// ------------------------------------------------------------------------
// Criterion 6: join and scalar statistics against independent oracles.

fn random_iso(rng: &mut ChaCha8Rng, pool: usize) -> String {
    let i = rng.gen_range(0..pool);
    format!("C{}{}", (b'A' + (i / 26) as u8) as char, (b'A' + (i % 26) as u8) as char)
}

#[test]
fn criterion_6_join_and_stats_oracles() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    for case in 0..500 {
        // --- join instance (≤ 200 trade rows) ---
        let pool = rng.gen_range(2..=6);
        let mut trade = Vec::new();
        let mut keys = std::collections::HashSet::new();
        for _ in 0..rng.gen_range(0..=200) {
            let origin = random_iso(&mut rng, pool);
            let dest = random_iso(&mut rng, pool);
            if origin == dest {
                continue;
            }
            let commodity = [Commodity::Beef, Commodity::Soy][rng.gen_range(0..2)];
            let year = rng.gen_range(2000..2005);
            if keys.insert((origin.clone(), dest.clone(), commodity, year)) {
                trade.push(TradeRecord {
                    origin,
                    dest,
                    commodity,
                    year,
                    value: rng.gen_range(0.0..1e6),
                });
            }
        }
        let mut econ = Vec::new();
        let mut econ_keys = std::collections::HashSet::new();
        for _ in 0..rng.gen_range(0..=100) {
            let origin = random_iso(&mut rng, pool);
            let dest = random_iso(&mut rng, pool);
            let year = rng.gen_range(2000..2005);
            if econ_keys.insert((origin.clone(), dest.clone(), year)) {
                econ.push(EconRecord {
                    origin,
                    dest,
                    year,
                    features: vec![(
                        "distance".to_string(),
                        FeatureValue::Number(rng.gen_range(1.0..2e4)),
                    )],
                });
            }
        }
        let table = inner_join(&trade, &econ).unwrap();
        let mut expected: Vec<(Commodity, String, String, i32, f64, f64)> = Vec::new();
        for t in &trade {
            for e in &econ {
                if t.origin == e.origin && t.dest == e.dest && t.year == e.year {
                    let d = match &e.features[0].1 {
                        FeatureValue::Number(v) => *v,
                        _ => unreachable!(),
                    };
                    expected.push((t.commodity, t.origin.clone(), t.dest.clone(), t.year, t.value, d));
                }
            }
        }
        expected.sort_by(|a, b| {
            (a.0, &a.1, &a.2, a.3).partial_cmp(&(b.0, &b.1, &b.2, b.3)).unwrap()
        });
        let got: Vec<(Commodity, String, String, i32, f64, f64)> = (0..table.len())
            .map(|i| {
                let d = match &table.features[0].data {
                    ColumnData::Numeric(v) => v[i],
                    _ => unreachable!(),
                };
                (
                    table.commodities[i],
                    table.origins[i].clone(),
                    table.dests[i].clone(),
                    table.years[i],
                    table.values[i],
                    d,
                )
            })
            .collect();
        assert_eq!(got, expected, "join mismatch in case {case}");

        // --- stats instance ---
        let n = rng.gen_range(3..60);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-100.0..100.0)).collect();
        let y: Vec<f64> = x
            .iter()
            .map(|&v| 2.5 * v + rng.gen_range(-50.0..50.0))
            .collect();
        let model = ols_fit(&x, &y).unwrap();
        // Normal equations solved directly by Cramer's rule.
        let nf = n as f64;
        let sx: f64 = x.iter().sum();
        let sy: f64 = y.iter().sum();
        let sxx: f64 = x.iter().map(|v| v * v).sum();
        let sxy: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let det = nf * sxx - sx * sx;
        let slope = (nf * sxy - sx * sy) / det;
        let intercept = (sy * sxx - sx * sxy) / det;
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
        assert!(rel(model.slope, slope) < 1e-9);
        assert!(rel(model.intercept, intercept) < 1e-9);

        let fitted: Vec<f64> = x.iter().map(|&v| model.predict(v)).collect();
        let r = pearson(&x, &y).unwrap();
        assert!((r_squared(&y, &fitted).unwrap() - r * r).abs() < 1e-9);

        // --- matrix instance (every cell equals a scalar pearson call) ---
        if case % 5 == 0 {
            let rows = rng.gen_range(4..50);
            let cols: Vec<Vec<f64>> = (0..3)
                .map(|_| {
                    (0..rows)
                        .map(|_| {
                            if rng.gen_bool(0.1) {
                                f64::NAN
                            } else {
                                rng.gen_range(-5.0..5.0)
                            }
                        })
                        .collect()
                })
                .collect();
            let panel = PanelTable {
                origins: vec!["AAA".into(); rows],
                dests: vec!["BBB".into(); rows],
                commodities: vec![Commodity::Beef; rows],
                years: (0..rows as i32).map(|i| 2000 + i).collect(),
                values: vec![0.0; rows],
                features: cols
                    .iter()
                    .enumerate()
                    .map(|(k, data)| FeatureColumn {
                        name: format!("f{k}"),
                        data: ColumnData::Numeric(data.clone()),
                    })
                    .collect(),
            };
            let names: Vec<String> = (0..3).map(|k| format!("f{k}")).collect();
            let matrix = correlation_matrix(&panel, &names).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    assert_eq!(matrix.get(i, j), pearson(&cols[i], &cols[j]).ok());
                }
            }
        }
    }
    finish(
        "6",
        "join, OLS, R² and correlation cells agree with oracles on 500 instances",
        start,
        Duration::from_secs(30),
    );
}

// ------------------------------------------------------------------------
// Criterion 7: k-means structure.

fn exhaustive_k2(rows: &[Vec<f64>]) -> f64 {
    let n = rows.len();
    let dims = rows[0].len();
    let mut best = f64::INFINITY;
    for mask in 1..(1u32 << n) - 1 {
        let mut sums = [vec![0.0; dims], vec![0.0; dims]];
        let mut counts = [0usize; 2];
        for (i, row) in rows.iter().enumerate() {
            let c = ((mask >> i) & 1) as usize;
            counts[c] += 1;
            for (s, v) in sums[c].iter_mut().zip(row) {
                *s += v;
            }
        }
        let mut inertia = 0.0;
        for (i, row) in rows.iter().enumerate() {
            let c = ((mask >> i) & 1) as usize;
            for (v, s) in row.iter().zip(&sums[c]) {
                let centroid = s / counts[c] as f64;
                inertia += (v - centroid) * (v - centroid);
            }
        }
        best = best.min(inertia);
    }
    best
}

fn exhaustive_k3(rows: &[Vec<f64>]) -> f64 {
    let n = rows.len();
    let dims = rows[0].len();
    let mut best = f64::INFINITY;
    let total = 3u32.pow(n as u32);
    for mut mask in 0..total {
        let mut labels = Vec::with_capacity(n);
        for _ in 0..n {
            labels.push((mask % 3) as usize);
            mask /= 3;
        }
        let mut sums = vec![vec![0.0; dims]; 3];
        let mut counts = [0usize; 3];
        for (row, &c) in rows.iter().zip(&labels) {
            counts[c] += 1;
            for (s, v) in sums[c].iter_mut().zip(row) {
                *s += v;
            }
        }
        let mut inertia = 0.0;
        for (row, &c) in rows.iter().zip(&labels) {
            if counts[c] == 0 {
                continue;
            }
            for (v, s) in row.iter().zip(&sums[c]) {
                let centroid = s / counts[c] as f64;
                inertia += (v - centroid) * (v - centroid);
            }
        }
        best = best.min(inertia);
    }
    best
}

/// Three-tier country fixture: raw feature rows (trade total, gdp, pop).
fn tier_fixture() -> Vec<(String, Vec<f64>)> {
    let tier1 = ["CHN", "USA"];
    let tier2 = ["JPN", "DEU", "CAN", "GBR", "IND", "FRA"];
    let tier3 = ["BRA", "MEX", "NLD", "AUS"];
    let mut rows = Vec::new();
    for (i, c) in tier1.iter().enumerate() {
        let j = i as f64;
        rows.push((c.to_string(), vec![1000.0 + 5.0 * j, 20.0 + 0.3 * j, 10.0 + 0.2 * j]));
    }
    for (i, c) in tier2.iter().enumerate() {
        let j = i as f64;
        rows.push((c.to_string(), vec![100.0 + 2.0 * j, 5.0 + 0.1 * j, 3.0 + 0.1 * j]));
    }
    for (i, c) in tier3.iter().enumerate() {
        let j = i as f64;
        rows.push((c.to_string(), vec![10.0 + 1.0 * j, 1.0 + 0.05 * j, 1.0 + 0.05 * j]));
    }
    rows
}

#[test]
fn criterion_7_kmeans_structure() {
    let start = Instant::now();

    // (a) k = 2 on ≤ 12 points reaches the exhaustive-partition optimum.
    let mut matches = 0;
    for seed in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(700 + seed);
        let n = rng.gen_range(5..=12);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| vec![rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0)])
            .collect();
        let model = kmeans_fit(&rows, 2, seed, Vec::new(), Vec::new()).unwrap();
        let optimum = exhaustive_k2(&rows);
        if (model.inertia - optimum).abs() <= 1e-9 * optimum.max(1.0) {
            matches += 1;
        }
    }
    assert!(matches >= 9, "only {matches}/10 runs reached the k=2 optimum");

    // (b) the three-tier fixture: k = 3 isolates the top tier exactly and
    // the fit matches the exhaustive three-way optimum.
    let fixture = tier_fixture();
    let raw: Vec<Vec<f64>> = fixture.iter().map(|(_, r)| r.clone()).collect();
    let (scaled, scales) = standardize(&raw);
    let model = kmeans_fit(
        &scaled,
        3,
        7,
        vec!["trade_total".into(), "gdp".into(), "pop".into()],
        scales,
    )
    .unwrap();
    let optimum = exhaustive_k3(&scaled);
    assert!(
        (model.inertia - optimum).abs() <= 1e-9 * optimum.max(1.0),
        "k=3 inertia {} differs from exhaustive optimum {}",
        model.inertia,
        optimum
    );

    let labeled: Vec<(String, Vec<f64>)> = fixture
        .iter()
        .map(|(c, _)| c.clone())
        .zip(scaled.iter().cloned())
        .collect();
    let assignments = assign(&model, &labeled).unwrap();
    let by_cluster: BTreeMap<usize, Vec<&str>> =
        assignments.iter().fold(BTreeMap::new(), |mut acc, (c, cl, _)| {
            acc.entry(*cl).or_default().push(c.as_str());
            acc
        });
    // Canonical order puts the biggest traders in cluster 0 ("cluster 1").
    assert_eq!(by_cluster[&0], vec!["CHN", "USA"]);
    let mut mid: Vec<&str> = by_cluster[&1].clone();
    mid.sort_unstable();
    assert_eq!(mid, vec!["CAN", "DEU", "FRA", "GBR", "IND", "JPN"]);
    assert_eq!(by_cluster[&2].len(), 4);

    finish(
        "7",
        &format!("k=2 optimum on {matches}/10 instances; top tier isolated at k=3"),
        start,
        Duration::from_secs(10),
    );
}

// ------------------------------------------------------------------------
// Criterion 8: byte-identical CLI runs under a fixed seed.

fn fixture_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn run_all_subcommands(out: &Path) -> Vec<(String, Vec<u8>)> {
    let trade = fixture_path("trade.csv");
    let econ = fixture_path("econ.csv");
    let trade = trade.to_str().unwrap();
    let econ = econ.to_str().unwrap();
    let out_str = out.to_str().unwrap();
    let model = out.join("gbdt_model.txt");
    let model = model.to_str().unwrap();

    let invocations: Vec<Vec<&str>> = vec![
        vec!["join", "--trade", trade, "--econ", econ],
        vec!["correlate", "--trade", trade, "--econ", econ],
        vec!["top-exporters", "--trade", trade, "--commodity", "Beef", "--n", "5"],
        vec![
            "project", "--trade", trade, "--commodity", "Beef", "--exporter", "AUS", "--years", "3",
        ],
        vec![
            "cluster", "--trade", trade, "--econ", econ, "--k", "3", "--features",
            "trade_total,gdp_o,pop_o",
        ],
        vec![
            "arima", "--trade", trade, "--commodity", "Beef", "--exporter", "AUS", "--horizon", "6",
        ],
        vec![
            "gbdt", "train", "--trade", trade, "--econ", econ, "--commodity", "Beef",
            "--holdout-years", "3", "--max-rounds", "300", "--min-data-in-leaf", "5",
        ],
        vec![
            "gbdt", "predict", "--trade", trade, "--econ", econ, "--commodity", "Beef",
            "--model", model,
        ],
        vec!["gbdt", "importance", "--model", model, "--kind", "gain"],
        vec![
            "gbdt", "evaluate", "--trade", trade, "--econ", econ, "--commodity", "Beef",
            "--holdout-years", "3", "--model", model,
        ],
    ];

    let mut artifacts = Vec::new();
    for args in invocations {
        // Label by subcommand only: flag values may hold per-run paths.
        let label: String = args
            .iter()
            .take_while(|a| !a.starts_with("--"))
            .copied()
            .collect::<Vec<&str>>()
            .join(" ");
        let output = std::process::Command::new(env!("CARGO_BIN_EXE_tradecast"))
            .args(&args)
            .args(["--out", out_str, "--seed", "7"])
            .output()
            .expect("binary runs");
        assert!(
            output.status.success(),
            "`{}` failed: {}",
            args.join(" "),
            String::from_utf8_lossy(&output.stderr)
        );
        artifacts.push((format!("stdout:{label}"), output.stdout));
    }

    let mut names: Vec<String> = std::fs::read_dir(out)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().to_string())
        .collect();
    names.sort();
    for name in names {
        let bytes = std::fs::read(out.join(&name)).unwrap();
        artifacts.push((format!("file:{name}"), bytes));
    }
    artifacts
}

#[test]
fn criterion_8_cli_determinism() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let run_a = dir.path().join("a");
    let run_b = dir.path().join("b");
    std::fs::create_dir_all(&run_a).unwrap();
    std::fs::create_dir_all(&run_b).unwrap();
    let a = run_all_subcommands(&run_a);
    let b = run_all_subcommands(&run_b);
    assert_eq!(a.len(), b.len());
    let mut compared = 0;
    for ((name_a, bytes_a), (name_b, bytes_b)) in a.iter().zip(&b) {
        assert_eq!(name_a, name_b);
        assert_eq!(
            bytes_a, bytes_b,
            "artifact `{name_a}` differs between identical runs"
        );
        compared += 1;
    }
    finish(
        "8",
        &format!("{compared} stdout streams and output files byte-identical across runs"),
        start,
        Duration::from_secs(60),
    );
}
