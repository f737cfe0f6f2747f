//! Column-oriented joined panel: key columns, the trade-value target, and
//! typed feature columns.

use std::collections::BTreeSet;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use super::{valid_iso3, Commodity, PanelError, YEAR_MAX, YEAR_MIN};

/// Feature column payload. Missing numeric cells are stored as NaN; missing
/// categorical cells as `None`. Categorical codes index into `labels`, which
/// is sorted, so code assignment does not depend on row order.
#[derive(Debug, Clone)]
pub enum ColumnData {
    Numeric(Vec<f64>),
    Categorical {
        codes: Vec<Option<u32>>,
        labels: Vec<String>,
    },
}

impl PartialEq for ColumnData {
    /// Cell-wise equality with NaN missing markers comparing equal, so a
    /// CSV round trip of a table with missing cells is still an identity.
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (ColumnData::Numeric(a), ColumnData::Numeric(b)) => {
                a.len() == b.len()
                    && a.iter()
                        .zip(b)
                        .all(|(x, y)| x == y || (x.is_nan() && y.is_nan()))
            }
            (
                ColumnData::Categorical { codes: ca, labels: la },
                ColumnData::Categorical { codes: cb, labels: lb },
            ) => ca == cb && la == lb,
            _ => false,
        }
    }
}

impl ColumnData {
    pub fn len(&self) -> usize {
        match self {
            ColumnData::Numeric(v) => v.len(),
            ColumnData::Categorical { codes, .. } => codes.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self, ColumnData::Numeric(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureColumn {
    pub name: String,
    pub data: ColumnData,
}

/// Joined country-commodity-year panel.
///
/// All columns have equal length and the `(origin, dest, commodity, year)`
/// key is unique. Rows are kept sorted by `(commodity, origin, dest, year)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PanelTable {
    pub origins: Vec<String>,
    pub dests: Vec<String>,
    pub commodities: Vec<Commodity>,
    pub years: Vec<i32>,
    /// Target column (`value_usd`).
    pub values: Vec<f64>,
    pub features: Vec<FeatureColumn>,
}

pub(crate) const PANEL_KEY_HEADER: &str = "origin_iso3,dest_iso3,commodity,year,value_usd";

impl PanelTable {
    pub fn len(&self) -> usize {
        self.origins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.origins.is_empty()
    }

    pub fn feature(&self, name: &str) -> Option<&FeatureColumn> {
        self.features.iter().find(|f| f.name == name)
    }

    /// Numeric view of a column: feature columns by name, plus the target
    /// `value_usd` and the `year` key. Returns `None` for categorical or
    /// unknown columns. Missing cells surface as NaN.
    pub fn numeric_column(&self, name: &str) -> Option<Vec<f64>> {
        match name {
            "value_usd" => Some(self.values.clone()),
            "year" if self.feature("year").is_none() => {
                Some(self.years.iter().map(|&y| y as f64).collect())
            }
            _ => match self.feature(name)? {
                FeatureColumn {
                    data: ColumnData::Numeric(v),
                    ..
                } => Some(v.clone()),
                _ => None,
            },
        }
    }

    pub fn feature_names(&self) -> Vec<String> {
        self.features.iter().map(|f| f.name.clone()).collect()
    }

    /// Distinct years present, ascending.
    pub fn distinct_years(&self) -> Vec<i32> {
        let set: BTreeSet<i32> = self.years.iter().copied().collect();
        set.into_iter().collect()
    }

    /// Verifies the `(origin, dest, commodity, year)` key is unique.
    pub fn check_unique_keys(&self) -> Result<(), PanelError> {
        check_unique_keys(self)
    }

    /// Copies the `year` key into a numeric feature column so tree models can
    /// split on it. No-op when a feature named `year` already exists.
    pub fn with_year_feature(mut self) -> Self {
        if self.feature("year").is_none() {
            let data = self.years.iter().map(|&y| y as f64).collect();
            self.features.push(FeatureColumn {
                name: "year".to_string(),
                data: ColumnData::Numeric(data),
            });
        }
        self
    }

    /// Keeps the rows whose index satisfies `keep`; schema (names, kinds and
    /// label dictionaries) is unchanged.
    pub(crate) fn retain_rows(&self, keep: impl Fn(usize) -> bool) -> PanelTable {
        let idx: Vec<usize> = (0..self.len()).filter(|&i| keep(i)).collect();
        PanelTable {
            origins: idx.iter().map(|&i| self.origins[i].clone()).collect(),
            dests: idx.iter().map(|&i| self.dests[i].clone()).collect(),
            commodities: idx.iter().map(|&i| self.commodities[i]).collect(),
            years: idx.iter().map(|&i| self.years[i]).collect(),
            values: idx.iter().map(|&i| self.values[i]).collect(),
            features: self
                .features
                .iter()
                .map(|f| FeatureColumn {
                    name: f.name.clone(),
                    data: match &f.data {
                        ColumnData::Numeric(v) => {
                            ColumnData::Numeric(idx.iter().map(|&i| v[i]).collect())
                        }
                        ColumnData::Categorical { codes, labels } => ColumnData::Categorical {
                            codes: idx.iter().map(|&i| codes[i]).collect(),
                            labels: labels.clone(),
                        },
                    },
                })
                .collect(),
        }
    }

    /// Serializes the panel: keys first, `value_usd`, then feature columns in
    /// schema order. Missing cells are empty; floats use the shortest
    /// round-trip representation so a re-parse reproduces the table.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let mut header = PANEL_KEY_HEADER.to_string();
        for f in &self.features {
            header.push(',');
            header.push_str(&f.name);
        }
        writeln!(w, "{header}")?;
        for i in 0..self.len() {
            let mut line = format!(
                "{},{},{},{},{}",
                self.origins[i], self.dests[i], self.commodities[i], self.years[i], self.values[i]
            );
            for f in &self.features {
                line.push(',');
                match &f.data {
                    ColumnData::Numeric(v) => {
                        if !v[i].is_nan() {
                            line.push_str(&v[i].to_string());
                        }
                    }
                    ColumnData::Categorical { codes, labels } => {
                        if let Some(c) = codes[i] {
                            line.push_str(&labels[c as usize]);
                        }
                    }
                }
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    pub fn write_csv_file(&self, path: &Path) -> Result<(), PanelError> {
        let file = std::fs::File::create(path).map_err(|source| PanelError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.write_csv(std::io::BufWriter::new(file))
            .map_err(|source| PanelError::Io {
                path: path.to_path_buf(),
                source,
            })
    }

    /// Parses a panel CSV produced by [`PanelTable::write_csv`]. Feature
    /// kinds are re-inferred per column (all cells parse as finite numbers →
    /// numeric) and categorical codes are rebuilt from sorted labels.
    pub fn read_csv(path: &Path) -> Result<PanelTable, PanelError> {
        let file = open_file(path)?;
        let mut lines = BufReader::new(file).lines();
        let header = match lines.next() {
            Some(h) => h.map_err(|source| PanelError::Io {
                path: path.to_path_buf(),
                source,
            })?,
            None => String::new(),
        };
        let header = header.trim_end_matches('\r');
        let cols: Vec<&str> = header.split(',').collect();
        let expected_keys: Vec<&str> = PANEL_KEY_HEADER.split(',').collect();
        if cols.len() < expected_keys.len() || cols[..expected_keys.len()] != expected_keys[..] {
            return Err(PanelError::HeaderMismatch {
                expected: format!("{PANEL_KEY_HEADER},<feature...>"),
                found: header.to_string(),
            });
        }
        let feature_names: Vec<String> =
            cols[expected_keys.len()..].iter().map(|s| s.to_string()).collect();

        let mut table = PanelTable::default();
        let mut cells: Vec<Vec<String>> = vec![Vec::new(); feature_names.len()];
        for (lineno, line) in lines.enumerate() {
            let line = line.map_err(|source| PanelError::Io {
                path: path.to_path_buf(),
                source,
            })?;
            let line = line.trim_end_matches('\r');
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            let row_err = |reason: String| PanelError::RowError {
                line: lineno + 2,
                reason,
            };
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
            table.origins.push(origin);
            table.dests.push(dest);
            table.commodities.push(commodity);
            table.years.push(year);
            table.values.push(value);
            for (k, cell) in fields[expected_keys.len()..].iter().enumerate() {
                cells[k].push(cell.to_string());
            }
        }
        table.features = feature_names
            .into_iter()
            .zip(cells)
            .map(|(name, col)| FeatureColumn {
                name,
                data: infer_column(&col),
            })
            .collect();
        check_unique_keys(&table)?;
        Ok(table)
    }
}

/// Infers a column's kind from raw cell text: numeric iff every non-empty
/// cell parses as a finite number. A column with no non-empty cells is
/// numeric (all missing).
pub(crate) fn infer_column(cells: &[String]) -> ColumnData {
    let numeric = cells
        .iter()
        .filter(|c| !c.is_empty())
        .all(|c| c.parse::<f64>().map(|v| v.is_finite()).unwrap_or(false));
    if numeric {
        ColumnData::Numeric(
            cells
                .iter()
                .map(|c| {
                    if c.is_empty() {
                        f64::NAN
                    } else {
                        c.parse().unwrap()
                    }
                })
                .collect(),
        )
    } else {
        let labels: Vec<String> = cells
            .iter()
            .filter(|c| !c.is_empty())
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let codes = cells
            .iter()
            .map(|c| {
                if c.is_empty() {
                    None
                } else {
                    Some(labels.binary_search(c).unwrap() as u32)
                }
            })
            .collect();
        ColumnData::Categorical { codes, labels }
    }
}

pub(crate) fn check_unique_keys(table: &PanelTable) -> Result<(), PanelError> {
    let mut keys: Vec<(Commodity, &str, &str, i32)> = (0..table.len())
        .map(|i| {
            (
                table.commodities[i],
                table.origins[i].as_str(),
                table.dests[i].as_str(),
                table.years[i],
            )
        })
        .collect();
    keys.sort_unstable();
    for w in keys.windows(2) {
        if w[0] == w[1] {
            return Err(PanelError::DuplicatePanelKey {
                origin: w[0].1.to_string(),
                dest: w[0].2.to_string(),
                commodity: w[0].0,
                year: w[0].3,
            });
        }
    }
    Ok(())
}

pub(crate) fn open_file(path: &Path) -> Result<std::fs::File, PanelError> {
    std::fs::File::open(path).map_err(|source| {
        if source.kind() == std::io::ErrorKind::NotFound {
            PanelError::MissingFile(path.to_path_buf())
        } else {
            PanelError::Io {
                path: path.to_path_buf(),
                source,
            }
        }
    })
}
