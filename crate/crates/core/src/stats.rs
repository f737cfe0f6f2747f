//! Pearson correlation, the pairwise correlation matrix, simple ordinary
//! least squares with straight-line extrapolation, and the R² metric.
//!
//! Missing values are NaN; every operation drops incomplete pairs before
//! computing (pairwise-complete deletion). The matrix records the pair count
//! it used per cell so the deletion is auditable.

use std::io::Write;

use thiserror::Error;

use crate::panel::PanelTable;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("series is constant, variance is zero")]
    ZeroVariance,
    #[error("fewer than 2 complete pairs")]
    TooFewPairs,
    #[error("series lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("unknown column: {0}")]
    UnknownColumn(String),
}

impl StatsError {
    pub fn code(&self) -> &'static str {
        match self {
            StatsError::ZeroVariance => "ZeroVariance",
            StatsError::TooFewPairs => "TooFewPairs",
            StatsError::LengthMismatch(..) => "LengthMismatch",
            StatsError::UnknownColumn(_) => "UnknownColumn",
        }
    }
}

/// Pearson correlation coefficient over complete pairs.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    let pairs: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| !a.is_nan() && !b.is_nan())
        .map(|(&a, &b)| (a, b))
        .collect();
    if pairs.len() < 2 {
        return Err(StatsError::TooFewPairs);
    }
    let n = pairs.len() as f64;
    let mean_x = pairs.iter().map(|(a, _)| a).sum::<f64>() / n;
    let mean_y = pairs.iter().map(|(_, b)| b).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (a, b) in &pairs {
        let dx = a - mean_x;
        let dy = b - mean_y;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    // Identical (or exactly negated) series short-circuit keeps the matrix
    // diagonal at exactly 1.
    if sxy == sxx && sxx == syy {
        return Ok(1.0);
    }
    if -sxy == sxx && sxx == syy {
        return Ok(-1.0);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Number of complete pairs between two series of equal length.
fn complete_pairs(x: &[f64], y: &[f64]) -> usize {
    x.iter()
        .zip(y)
        .filter(|(a, b)| !a.is_nan() && !b.is_nan())
        .count()
}

/// Why a correlation cell could not be computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellSkip {
    ZeroVariance,
    TooFewPairs,
}

/// Pairwise-complete Pearson correlations between named numeric columns.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub names: Vec<String>,
    /// `values[i][j]` is `None` when the cell failed pearson preconditions.
    pub values: Vec<Vec<Option<f64>>>,
    pub pair_counts: Vec<Vec<usize>>,
    /// Skipped cells with the reason, `(row, col, reason)`, row ≤ col.
    pub skipped: Vec<(usize, usize, CellSkip)>,
}

impl CorrelationMatrix {
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.values[i][j]
    }

    /// CSV export: header row and column of names, empty cells for skipped
    /// entries. Values use the shortest round-trip float form.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let mut header = String::new();
        for name in &self.names {
            header.push(',');
            header.push_str(name);
        }
        writeln!(w, "{header}")?;
        for (i, name) in self.names.iter().enumerate() {
            let mut line = name.clone();
            for j in 0..self.names.len() {
                line.push(',');
                if let Some(v) = self.values[i][j] {
                    line.push_str(&v.to_string());
                }
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }
}

/// Computes the correlation matrix of the named panel columns.
///
/// Cells that fail pearson preconditions (constant column over the complete
/// pairs, or fewer than two pairs) are recorded as missing with the reason
/// rather than poisoning the matrix.
pub fn correlation_matrix(
    panel: &PanelTable,
    columns: &[String],
) -> Result<CorrelationMatrix, StatsError> {
    let series: Vec<Vec<f64>> = columns
        .iter()
        .map(|name| {
            panel
                .numeric_column(name)
                .ok_or_else(|| StatsError::UnknownColumn(name.clone()))
        })
        .collect::<Result<_, _>>()?;

    let k = columns.len();
    let mut values = vec![vec![None; k]; k];
    let mut pair_counts = vec![vec![0usize; k]; k];
    let mut skipped = Vec::new();
    for i in 0..k {
        for j in i..k {
            let count = complete_pairs(&series[i], &series[j]);
            pair_counts[i][j] = count;
            pair_counts[j][i] = count;
            match pearson(&series[i], &series[j]) {
                Ok(r) => {
                    values[i][j] = Some(r);
                    values[j][i] = Some(r);
                }
                Err(StatsError::ZeroVariance) => skipped.push((i, j, CellSkip::ZeroVariance)),
                Err(StatsError::TooFewPairs) => skipped.push((i, j, CellSkip::TooFewPairs)),
                Err(e) => return Err(e),
            }
        }
    }
    Ok(CorrelationMatrix {
        names: columns.to_vec(),
        values,
        pair_counts,
        skipped,
    })
}

/// Fitted simple linear regression `y = slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OlsModel {
    pub slope: f64,
    pub intercept: f64,
    pub n: usize,
    pub r_squared: f64,
}

impl OlsModel {
    pub fn predict(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }
}

/// Least-squares line through complete `(x, y)` pairs.
pub fn ols_fit(x: &[f64], y: &[f64]) -> Result<OlsModel, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    let pairs: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| !a.is_nan() && !b.is_nan())
        .map(|(&a, &b)| (a, b))
        .collect();
    if pairs.len() < 2 {
        return Err(StatsError::TooFewPairs);
    }
    let n = pairs.len() as f64;
    let mean_x = pairs.iter().map(|(a, _)| a).sum::<f64>() / n;
    let mean_y = pairs.iter().map(|(_, b)| b).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (a, b) in &pairs {
        sxx += (a - mean_x) * (a - mean_x);
        sxy += (a - mean_x) * (b - mean_y);
    }
    if sxx == 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;

    let xs: Vec<f64> = pairs.iter().map(|(a, _)| *a).collect();
    let ys: Vec<f64> = pairs.iter().map(|(_, b)| *b).collect();
    let fitted: Vec<f64> = xs.iter().map(|&a| intercept + slope * a).collect();
    // In-sample fit quality; 0 when y is constant (the flat line leaves no
    // variance to explain, so report 0 rather than erroring).
    let r_squared = r_squared(&ys, &fitted).unwrap_or(0.0);
    Ok(OlsModel {
        slope,
        intercept,
        n: pairs.len(),
        r_squared,
    })
}

/// Extrapolates the fitted line over the requested years.
pub fn ols_forecast(model: &OlsModel, years: &[i32]) -> Vec<(i32, f64)> {
    years.iter().map(|&y| (y, model.predict(y as f64))).collect()
}

/// 1 − SSE/SST. Negative for predictions worse than the actual mean.
pub fn r_squared(actual: &[f64], predicted: &[f64]) -> Result<f64, StatsError> {
    if actual.len() != predicted.len() {
        return Err(StatsError::LengthMismatch(actual.len(), predicted.len()));
    }
    if actual.len() < 2 {
        return Err(StatsError::TooFewPairs);
    }
    let n = actual.len() as f64;
    let mean = actual.iter().sum::<f64>() / n;
    let sst: f64 = actual.iter().map(|a| (a - mean) * (a - mean)).sum();
    if sst == 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    let sse: f64 = actual
        .iter()
        .zip(predicted)
        .map(|(a, p)| (a - p) * (a - p))
        .sum();
    Ok(1.0 - sse / sst)
}
