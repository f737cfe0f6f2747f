//! Split-count and total-gain feature importance.

use std::io::Write;

use super::{GbdtModel, Node};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImportanceKind {
    Split,
    Gain,
}

impl std::str::FromStr for ImportanceKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "split" => Ok(ImportanceKind::Split),
            "gain" => Ok(ImportanceKind::Gain),
            other => Err(format!("unknown importance kind `{other}` (expected split or gain)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImportanceEntry {
    pub name: String,
    pub split_count: u64,
    pub total_gain: f64,
    /// Fraction of the ensemble's total gain (0 when no gain anywhere).
    pub gain_share: f64,
}

/// Importance report sorted by the requested kind, descending, ties broken
/// by feature name.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureImportance {
    pub kind: ImportanceKind,
    pub entries: Vec<ImportanceEntry>,
}

/// Counts splits and accumulates gains per feature over the early-stopping
/// prefix (`trees[0..best_round]`).
pub fn feature_importance(model: &GbdtModel, kind: ImportanceKind) -> FeatureImportance {
    let names = model.feature_names();
    let mut split_counts = vec![0u64; names.len()];
    let mut gains = vec![0.0f64; names.len()];
    for tree in &model.trees[..model.best_round.min(model.trees.len())] {
        for node in &tree.nodes {
            if let Node::Split { feature, gain, .. } = node {
                split_counts[*feature] += 1;
                gains[*feature] += gain;
            }
        }
    }
    let total_gain: f64 = gains.iter().sum();
    let mut entries: Vec<ImportanceEntry> = names
        .iter()
        .enumerate()
        .map(|(i, name)| ImportanceEntry {
            name: name.to_string(),
            split_count: split_counts[i],
            total_gain: gains[i],
            gain_share: if total_gain > 0.0 { gains[i] / total_gain } else { 0.0 },
        })
        .collect();
    entries.sort_by(|a, b| match kind {
        ImportanceKind::Split => b
            .split_count
            .cmp(&a.split_count)
            .then_with(|| a.name.cmp(&b.name)),
        ImportanceKind::Gain => b
            .total_gain
            .partial_cmp(&a.total_gain)
            .unwrap()
            .then_with(|| a.name.cmp(&b.name)),
    });
    FeatureImportance { kind, entries }
}

impl FeatureImportance {
    /// One line per feature in `name: split, gain` form.
    pub fn render_lines(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&format!("{}: {}, {:.2}\n", e.name, e.split_count, e.total_gain));
        }
        out
    }

    /// CSV variant with full-precision gains and the gain share.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "feature,split,gain,gain_share")?;
        for e in &self.entries {
            writeln!(
                w,
                "{},{},{},{:.6}",
                e.name, e.split_count, e.total_gain, e.gain_share
            )?;
        }
        Ok(())
    }
}
