//! Univariate ARIMA(p,d,q)-with-drift fitting and multi-horizon forecasting
//! with 80%/95% prediction intervals.
//!
//! Estimation is conditional sum of squares on the differenced series:
//! Hannan–Rissanen initialization (long-AR residual proxy) followed by
//! coordinate-wise Gauss–Newton refinement. Intervals are Gaussian with the
//! forecast variance built from the psi-weights of the integrated process.

mod estimate;
mod forecast;
mod select;

pub use estimate::arima_fit;
pub use forecast::forecast_intervals;
pub use select::select_order;

use std::fmt;
use std::io::Write;

use thiserror::Error;

/// 90th percentile of the standard normal (80% two-sided interval).
pub const Z80: f64 = 1.281552;
/// 97.5th percentile of the standard normal (95% two-sided interval).
pub const Z95: f64 = 1.959964;

pub const MAX_P: usize = 5;
pub const MAX_D: usize = 2;
pub const MAX_Q: usize = 5;

#[derive(Debug, Error, PartialEq)]
pub enum ArimaError {
    #[error("series too short: {len} observations, need at least {needed}")]
    TooShort { len: usize, needed: usize },
    #[error("AR polynomial has roots inside the unit circle (min modulus {min_modulus})")]
    NonStationary { min_modulus: f64 },
    #[error("design matrix is singular, parameters are unidentifiable")]
    SingularDesign,
    #[error("invalid model order: {0}")]
    InvalidSpec(String),
    #[error("no candidate order could be fitted")]
    NoFeasibleModel,
}

impl ArimaError {
    pub fn code(&self) -> &'static str {
        match self {
            ArimaError::TooShort { .. } => "TooShort",
            ArimaError::NonStationary { .. } => "NonStationary",
            ArimaError::SingularDesign => "SingularDesign",
            ArimaError::InvalidSpec(_) => "InvalidSpec",
            ArimaError::NoFeasibleModel => "NoFeasibleModel",
        }
    }
}

/// Model order: AR order `p`, differencing order `d`, MA order `q`, and
/// whether a drift term (mean of the differenced series) is included.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArimaSpec {
    pub p: usize,
    pub d: usize,
    pub q: usize,
    pub drift: bool,
}

impl ArimaSpec {
    pub fn new(p: usize, d: usize, q: usize, drift: bool) -> Result<Self, ArimaError> {
        if p > MAX_P || d > MAX_D || q > MAX_Q {
            return Err(ArimaError::InvalidSpec(format!(
                "orders ({p},{d},{q}) exceed bounds ({MAX_P},{MAX_D},{MAX_Q})"
            )));
        }
        if drift && d == 0 {
            return Err(ArimaError::InvalidSpec(
                "drift requires differencing order d >= 1".to_string(),
            ));
        }
        Ok(ArimaSpec { p, d, q, drift })
    }

    /// Estimated coefficients excluding the innovation variance.
    pub fn n_params(&self) -> usize {
        self.p + self.q + usize::from(self.drift)
    }

    /// Smallest series length that leaves at least one residual degree of
    /// freedom for the variance estimate.
    pub fn min_series_len(&self) -> usize {
        self.d + 2 * self.p + self.q + usize::from(self.drift) + 1
    }
}

impl fmt::Display for ArimaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ARIMA({},{},{})", self.p, self.d, self.q)?;
        if self.drift {
            write!(f, "+drift")?;
        }
        Ok(())
    }
}

/// Fitted model: coefficients plus the tail state needed for forecasting.
#[derive(Debug, Clone, PartialEq)]
pub struct ArimaFit {
    pub spec: ArimaSpec,
    pub phi: Vec<f64>,
    pub theta: Vec<f64>,
    /// Mean of the differenced series when `spec.drift`, 0 otherwise.
    pub mu: f64,
    /// Innovation variance, SSE / (effective sample − parameter count).
    pub sigma2: f64,
    /// Last `p + d` observations on the original scale.
    pub tail_obs: Vec<f64>,
    /// Last `q` residuals of the fitted recursion.
    pub tail_resid: Vec<f64>,
    pub n_obs: usize,
}

/// One forecast row; `actual` is absent past the end of observed data.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastRow {
    pub year: i32,
    pub actual: Option<f64>,
    pub forecast: f64,
    pub lo80: f64,
    pub hi80: f64,
    pub lo95: f64,
    pub hi95: f64,
}

/// Per-horizon forecasts with nested 80%/95% interval bounds.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ForecastTable {
    pub rows: Vec<ForecastRow>,
}

impl ForecastTable {
    /// CSV export, header `year,actual,forecast,lo80,hi80,lo95,hi95`;
    /// absent actuals are empty cells.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "year,actual,forecast,lo80,hi80,lo95,hi95")?;
        for r in &self.rows {
            let actual = r.actual.map(|a| a.to_string()).unwrap_or_default();
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                r.year, actual, r.forecast, r.lo80, r.hi80, r.lo95, r.hi95
            )?;
        }
        Ok(())
    }

    /// Aligned console table; absent actuals render as `X`.
    pub fn render_console(&self) -> String {
        let headers = ["Year", "Actual", "Forecast", "Low 80", "High 80", "Low 95", "High 95"];
        let mut grid: Vec<Vec<String>> = vec![headers.iter().map(|s| s.to_string()).collect()];
        for r in &self.rows {
            grid.push(vec![
                r.year.to_string(),
                r.actual.map(|a| a.to_string()).unwrap_or_else(|| "X".to_string()),
                r.forecast.to_string(),
                r.lo80.to_string(),
                r.hi80.to_string(),
                r.lo95.to_string(),
                r.hi95.to_string(),
            ]);
        }
        let widths: Vec<usize> = (0..headers.len())
            .map(|c| grid.iter().map(|row| row[c].len()).max().unwrap())
            .collect();
        let mut out = String::new();
        for row in &grid {
            let mut pieces = Vec::with_capacity(row.len());
            for (cell, &w) in row.iter().zip(&widths) {
                pieces.push(format!("{cell:>w$}"));
            }
            out.push_str(pieces.join("  ").trim_end());
            out.push('\n');
        }
        out
    }
}

/// `d`-th order forward differences; the result is shorter by `d`.
pub fn difference(series: &[f64], d: usize) -> Result<Vec<f64>, ArimaError> {
    if series.len() <= d {
        return Err(ArimaError::TooShort {
            len: series.len(),
            needed: d + 1,
        });
    }
    let mut out = series.to_vec();
    for _ in 0..d {
        out = out.windows(2).map(|w| w[1] - w[0]).collect();
    }
    Ok(out)
}

/// Inverse of [`difference`]: rebuilds the original series from the
/// `d`-times differenced series and the retained initial values
/// `[y_0, (Δy)_0, …, (Δ^{d-1}y)_0]`.
pub fn undifference(initials: &[f64], diffed: &[f64]) -> Vec<f64> {
    let mut current = diffed.to_vec();
    for &init in initials.iter().rev() {
        let mut rebuilt = Vec::with_capacity(current.len() + 1);
        rebuilt.push(init);
        for v in current {
            rebuilt.push(rebuilt.last().unwrap() + v);
        }
        current = rebuilt;
    }
    current
}
