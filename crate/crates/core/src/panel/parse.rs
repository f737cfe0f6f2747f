//! CSV parsers for the two raw snapshots.

use std::collections::HashSet;
use std::io::{BufRead, BufReader};
use std::path::Path;

use super::table::open_file;
use super::{valid_iso3, Commodity, EconRecord, FeatureValue, PanelError, TradeRecord, YEAR_MAX, YEAR_MIN};

const TRADE_HEADER: &str = "origin_iso3,dest_iso3,commodity,year,value_usd";
const ECON_KEY_HEADER: [&str; 3] = ["origin_iso3", "dest_iso3", "year"];

/// Parses a trade snapshot. Rows violating the record invariants
/// (origin = dest, negative value, year out of range, malformed fields) are
/// rejected with their 1-based line number.
pub fn parse_trade_csv(path: &Path) -> Result<Vec<TradeRecord>, PanelError> {
    let file = open_file(path)?;
    let mut lines = BufReader::new(file).lines().enumerate();

    let header = match lines.next() {
        Some((_, h)) => h.map_err(|source| io_err(path, source))?,
        None => String::new(),
    };
    let header = header.trim_end_matches('\r');
    if header != TRADE_HEADER {
        return Err(PanelError::HeaderMismatch {
            expected: TRADE_HEADER.to_string(),
            found: header.to_string(),
        });
    }

    let mut records = Vec::new();
    for (idx, line) in lines {
        let line = line.map_err(|source| io_err(path, source))?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let row_err = |reason: String| PanelError::RowError { line: lineno, reason };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(row_err(format!("expected 5 fields, found {}", fields.len())));
        }
        let origin = fields[0].to_string();
        let dest = fields[1].to_string();
        if !valid_iso3(&origin) {
            return Err(row_err(format!("invalid origin ISO3 `{origin}`")));
        }
        if !valid_iso3(&dest) {
            return Err(row_err(format!("invalid dest ISO3 `{dest}`")));
        }
        if origin == dest {
            return Err(row_err(format!("origin equals dest ({origin})")));
        }
        let commodity: Commodity = fields[2].parse().map_err(row_err)?;
        let year: i32 = fields[3]
            .parse()
            .map_err(|_| row_err(format!("invalid year `{}`", fields[3])))?;
        if !(YEAR_MIN..=YEAR_MAX).contains(&year) {
            return Err(row_err(format!("year {year} outside [{YEAR_MIN}, {YEAR_MAX}]")));
        }
        let value: f64 = fields[4]
            .parse()
            .map_err(|_| row_err(format!("invalid value `{}`", fields[4])))?;
        if !value.is_finite() || value < 0.0 {
            return Err(row_err(format!("value {value} is negative or non-finite")));
        }
        records.push(TradeRecord {
            origin,
            dest,
            commodity,
            year,
            value,
        });
    }
    Ok(records)
}

/// Parses a covariate snapshot. Feature kinds are inferred per column: all
/// non-empty cells parse as finite numbers → numeric, otherwise categorical.
/// Empty cells mean missing. `(origin, dest, year)` must be unique.
pub fn parse_econ_csv(path: &Path) -> Result<Vec<EconRecord>, PanelError> {
    let file = open_file(path)?;
    let mut lines = BufReader::new(file).lines().enumerate();

    let header = match lines.next() {
        Some((_, h)) => h.map_err(|source| io_err(path, source))?,
        None => String::new(),
    };
    let header = header.trim_end_matches('\r');
    let cols: Vec<&str> = header.split(',').collect();
    let mismatch = |found: &str| PanelError::HeaderMismatch {
        expected: "origin_iso3,dest_iso3,year,<feature...>".to_string(),
        found: found.to_string(),
    };
    if cols.len() < 4 || cols[..3] != ECON_KEY_HEADER[..] {
        return Err(mismatch(header));
    }
    let feature_names: Vec<String> = cols[3..].iter().map(|s| s.to_string()).collect();
    let mut seen_names = HashSet::new();
    for name in &feature_names {
        if name.is_empty() || !seen_names.insert(name.as_str()) {
            return Err(mismatch(header));
        }
    }

    let mut keys: Vec<(String, String, i32)> = Vec::new();
    let mut cells: Vec<Vec<String>> = Vec::new();
    let mut seen_keys = HashSet::new();
    for (idx, line) in lines {
        let line = line.map_err(|source| io_err(path, source))?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let row_err = |reason: String| PanelError::RowError { line: lineno, reason };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != cols.len() {
            return Err(row_err(format!(
                "expected {} fields, found {}",
                cols.len(),
                fields.len()
            )));
        }
        let origin = fields[0].to_string();
        let dest = fields[1].to_string();
        if !valid_iso3(&origin) || !valid_iso3(&dest) {
            return Err(row_err(format!("invalid ISO3 code in `{origin}`/`{dest}`")));
        }
        let year: i32 = fields[2]
            .parse()
            .map_err(|_| row_err(format!("invalid year `{}`", fields[2])))?;
        if !seen_keys.insert((origin.clone(), dest.clone(), year)) {
            return Err(PanelError::DuplicateKey { origin, dest, year });
        }
        keys.push((origin, dest, year));
        cells.push(fields[3..].iter().map(|s| s.to_string()).collect());
    }

    // Per-column kind inference over the whole file.
    let n_features = feature_names.len();
    let mut numeric = vec![true; n_features];
    for row in &cells {
        for (k, cell) in row.iter().enumerate() {
            if numeric[k] && !cell.is_empty() {
                numeric[k] = cell.parse::<f64>().map(|v| v.is_finite()).unwrap_or(false);
            }
        }
    }

    let records = keys
        .into_iter()
        .zip(cells)
        .map(|((origin, dest, year), row)| EconRecord {
            origin,
            dest,
            year,
            features: feature_names
                .iter()
                .zip(row)
                .enumerate()
                .map(|(k, (name, cell))| {
                    let value = if cell.is_empty() {
                        FeatureValue::Missing
                    } else if numeric[k] {
                        FeatureValue::Number(cell.parse().unwrap())
                    } else {
                        FeatureValue::Label(cell)
                    };
                    (name.clone(), value)
                })
                .collect(),
        })
        .collect();
    Ok(records)
}

fn io_err(path: &Path, source: std::io::Error) -> PanelError {
    PanelError::Io {
        path: path.to_path_buf(),
        source,
    }
}
