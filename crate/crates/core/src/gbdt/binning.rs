//! Histogram bin construction and panel binning.

use crate::panel::{ColumnData, FeatureColumn, PanelTable};

use super::GbdtError;

/// Bin layout for one feature. Value bins are `0..n_value_bins`; the
/// dedicated missing bin follows them.
#[derive(Debug, Clone, PartialEq)]
pub enum FeatureBins {
    /// Ascending upper bounds; a value lands in the first bin whose cut is
    /// ≥ the value, values above every cut land in the last bin.
    Numeric { cuts: Vec<f64> },
    /// Sorted training labels; bin index = label rank. Unseen labels at
    /// prediction time map to the missing bin.
    Categorical { labels: Vec<String> },
}

impl FeatureBins {
    pub fn n_value_bins(&self) -> usize {
        match self {
            FeatureBins::Numeric { cuts } => cuts.len() + 1,
            FeatureBins::Categorical { labels } => labels.len().max(1),
        }
    }

    pub fn missing_bin(&self) -> u16 {
        self.n_value_bins() as u16
    }

    fn bin_numeric(&self, value: f64) -> u16 {
        match self {
            FeatureBins::Numeric { cuts } => {
                if value.is_nan() {
                    self.missing_bin()
                } else {
                    cuts.partition_point(|&c| c < value) as u16
                }
            }
            FeatureBins::Categorical { .. } => unreachable!("numeric lookup on categorical bins"),
        }
    }

    fn bin_label(&self, label: Option<&str>) -> u16 {
        match self {
            FeatureBins::Categorical { labels } => match label {
                Some(l) => match labels.binary_search_by(|probe| probe.as_str().cmp(l)) {
                    Ok(idx) => idx as u16,
                    Err(_) => self.missing_bin(),
                },
                None => self.missing_bin(),
            },
            FeatureBins::Numeric { .. } => unreachable!("label lookup on numeric bins"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinnedFeature {
    pub name: String,
    pub bins: FeatureBins,
}

/// Per-feature bin layout learned from the training panel.
#[derive(Debug, Clone, PartialEq)]
pub struct BinMapper {
    pub features: Vec<BinnedFeature>,
}

impl BinMapper {
    pub fn missing_bins(&self) -> Vec<u16> {
        self.features.iter().map(|f| f.bins.missing_bin()).collect()
    }
}

/// Builds bin boundaries from training feature columns.
///
/// Numeric features with at most `max_bins` distinct values get one bin per
/// value; denser features get equal-frequency quantile boundaries,
/// deduplicated. Categorical features keep one bin per observed label.
pub fn build_bins(features: &[FeatureColumn], max_bins: usize) -> BinMapper {
    let features = features
        .iter()
        .map(|col| BinnedFeature {
            name: col.name.clone(),
            bins: match &col.data {
                ColumnData::Numeric(values) => FeatureBins::Numeric {
                    cuts: numeric_cuts(values, max_bins),
                },
                ColumnData::Categorical { labels, .. } => FeatureBins::Categorical {
                    labels: labels.clone(),
                },
            },
        })
        .collect();
    BinMapper { features }
}

fn numeric_cuts(values: &[f64], max_bins: usize) -> Vec<f64> {
    let mut sorted: Vec<f64> = values.iter().copied().filter(|v| !v.is_nan()).collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if sorted.is_empty() {
        return Vec::new();
    }
    let mut distinct: Vec<f64> = Vec::new();
    for &v in &sorted {
        if distinct.last() != Some(&v) {
            distinct.push(v);
        }
    }
    if distinct.len() <= max_bins {
        distinct.pop();
        return distinct;
    }
    // Equal-frequency boundaries at positions k·n/B, taking the value on the
    // left side of each boundary as the bin's inclusive upper bound.
    let n = sorted.len();
    let max = *sorted.last().unwrap();
    let mut cuts = Vec::with_capacity(max_bins - 1);
    for k in 1..max_bins {
        let pos = k * n / max_bins;
        let cut = sorted[pos.saturating_sub(1)];
        if cut < max && cuts.last() != Some(&cut) {
            cuts.push(cut);
        }
    }
    cuts
}

/// Maps panel columns through the bin layout; the result is column-major
/// (`bins[feature][row]`). The panel must carry every mapper feature with
/// the same kind; categorical cells are matched by label, so the panel's
/// own code dictionary does not need to match the training one.
pub fn bin_panel(mapper: &BinMapper, panel: &PanelTable) -> Result<Vec<Vec<u16>>, GbdtError> {
    mapper
        .features
        .iter()
        .map(|feat| {
            let col = panel.feature(&feat.name).ok_or_else(|| {
                GbdtError::SchemaMismatch(format!("missing feature column `{}`", feat.name))
            })?;
            match (&feat.bins, &col.data) {
                (bins @ FeatureBins::Numeric { .. }, ColumnData::Numeric(values)) => {
                    Ok(values.iter().map(|&v| bins.bin_numeric(v)).collect())
                }
                (bins @ FeatureBins::Categorical { .. }, ColumnData::Categorical { codes, labels }) => Ok(codes
                    .iter()
                    .map(|c| bins.bin_label(c.map(|c| labels[c as usize].as_str())))
                    .collect()),
                _ => Err(GbdtError::SchemaMismatch(format!(
                    "feature `{}` changed kind between training and prediction",
                    feat.name
                ))),
            }
        })
        .collect()
}
