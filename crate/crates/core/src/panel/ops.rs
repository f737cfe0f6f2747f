//! Join, filter, ranking and time-split operations.

use std::collections::{BTreeMap, HashMap};

use super::table::{check_unique_keys, ColumnData, FeatureColumn};
use super::{Commodity, EconRecord, FeatureValue, PanelError, PanelTable, TradeRecord};

/// Inner-joins trade flows with covariates on `(origin, dest, year)`.
///
/// The result holds exactly the trade rows whose key exists in `econ`, with
/// that record's features copied in, sorted by `(commodity, origin, dest,
/// year)`. Commodity stays on the trade side of the join: covariates are
/// pair-year facts. An empty result is legal.
pub fn inner_join(trade: &[TradeRecord], econ: &[EconRecord]) -> Result<PanelTable, PanelError> {
    if let Some(first) = econ.first() {
        let layout: Vec<&str> = first.features.iter().map(|(n, _)| n.as_str()).collect();
        for rec in econ {
            if rec.features.len() != layout.len()
                || rec.features.iter().zip(&layout).any(|((n, _), l)| n != l)
            {
                return Err(PanelError::FeatureMismatch);
            }
        }
    }

    let econ_by_key: HashMap<(&str, &str, i32), &EconRecord> = econ
        .iter()
        .map(|r| ((r.origin.as_str(), r.dest.as_str(), r.year), r))
        .collect();

    let mut matched: Vec<(&TradeRecord, &EconRecord)> = trade
        .iter()
        .filter_map(|t| {
            econ_by_key
                .get(&(t.origin.as_str(), t.dest.as_str(), t.year))
                .map(|e| (t, *e))
        })
        .collect();
    matched.sort_by(|(a, _), (b, _)| {
        (a.commodity, &a.origin, &a.dest, a.year).cmp(&(b.commodity, &b.origin, &b.dest, b.year))
    });

    let mut table = PanelTable::default();
    for (t, _) in &matched {
        table.origins.push(t.origin.clone());
        table.dests.push(t.dest.clone());
        table.commodities.push(t.commodity);
        table.years.push(t.year);
        table.values.push(t.value);
    }

    let n_features = econ.first().map_or(0, |r| r.features.len());
    for k in 0..n_features {
        let name = econ[0].features[k].0.clone();
        let column: Vec<&FeatureValue> = matched.iter().map(|(_, e)| &e.features[k].1).collect();
        table.features.push(FeatureColumn {
            name,
            data: build_column(&column),
        });
    }

    check_unique_keys(&table)?;
    Ok(table)
}

/// Materializes one joined feature column. A column with no observed labels
/// carries no categorical information and is stored as all-missing numeric,
/// which is also how a CSV round trip would re-infer it.
fn build_column(cells: &[&FeatureValue]) -> ColumnData {
    let has_label = cells.iter().any(|v| matches!(v, FeatureValue::Label(_)));
    if has_label {
        let labels: Vec<String> = cells
            .iter()
            .filter_map(|v| match v {
                FeatureValue::Label(s) => Some(s.clone()),
                _ => None,
            })
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        let codes = cells
            .iter()
            .map(|v| match v {
                FeatureValue::Label(s) => Some(labels.binary_search(s).unwrap() as u32),
                // A numeric cell cannot appear in a label column: kinds are
                // assigned per column upstream. Treat one as missing.
                _ => None,
            })
            .collect();
        ColumnData::Categorical { codes, labels }
    } else {
        ColumnData::Numeric(
            cells
                .iter()
                .map(|v| match v {
                    FeatureValue::Number(x) => *x,
                    _ => f64::NAN,
                })
                .collect(),
        )
    }
}

impl PanelTable {
    /// Rows with the given commodity only; schema unchanged.
    pub fn filter_commodity(&self, commodity: Commodity) -> PanelTable {
        self.retain_rows(|i| self.commodities[i] == commodity)
    }

    /// Countries ranked by total export value of `commodity` over all years
    /// and destinations, descending, ties broken by ascending ISO3 code.
    /// At most `n` entries.
    pub fn top_exporters(&self, commodity: Commodity, n: usize) -> Vec<(String, f64)> {
        let mut totals: BTreeMap<&str, f64> = BTreeMap::new();
        for i in 0..self.len() {
            if self.commodities[i] == commodity {
                *totals.entry(self.origins[i].as_str()).or_insert(0.0) += self.values[i];
            }
        }
        let mut ranked: Vec<(String, f64)> = totals
            .into_iter()
            .map(|(c, v)| (c.to_string(), v))
            .collect();
        ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
        ranked.truncate(n);
        ranked
    }

    /// Splits by year: `valid` holds the rows in the last `holdout_years`
    /// distinct years, `train` the remainder.
    pub fn time_split(&self, holdout_years: usize) -> Result<(PanelTable, PanelTable), PanelError> {
        let years = self.distinct_years();
        if years.len() <= holdout_years {
            return Err(PanelError::InsufficientYears {
                distinct: years.len(),
                holdout: holdout_years,
            });
        }
        let cutoff = years[years.len() - holdout_years];
        let train = self.retain_rows(|i| self.years[i] < cutoff);
        let valid = self.retain_rows(|i| self.years[i] >= cutoff);
        Ok((train, valid))
    }
}
