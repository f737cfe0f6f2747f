//! Order selection by corrected AIC over a candidate grid.

use super::{arima_fit, ArimaError, ArimaSpec};

/// Grid-searches (p, q, d) candidates and returns the order minimizing
/// AICc = n·ln(σ²) + 2kn/(n − k − 1) with k = p + q + drift + 1 and n the
/// effective residual count. Drift is included whenever d ≥ 1. Candidates
/// that cannot be fitted (too short, singular, non-stationary) are skipped;
/// ties prefer fewer parameters, then lower p.
pub fn select_order(
    series: &[f64],
    max_p: usize,
    max_q: usize,
    d_candidates: &[usize],
) -> Result<ArimaSpec, ArimaError> {
    let mut best: Option<(f64, usize, usize, usize, usize)> = None;
    for &d in d_candidates {
        for p in 0..=max_p {
            for q in 0..=max_q {
                let spec = match ArimaSpec::new(p, d, q, d >= 1) {
                    Ok(s) => s,
                    Err(_) => continue,
                };
                let fit = match arima_fit(series, spec) {
                    Ok(f) => f,
                    Err(_) => continue,
                };
                let n = (series.len() - d - p) as f64;
                let k = (spec.n_params() + 1) as f64;
                if n - k - 1.0 <= 0.0 {
                    continue;
                }
                let aicc = n * fit.sigma2.ln() + 2.0 * k * n / (n - k - 1.0);
                if aicc.is_nan() {
                    continue;
                }
                let key = (aicc, spec.n_params(), p, q, d);
                let better = match &best {
                    None => true,
                    Some(b) => {
                        (key.0, key.1, key.2, key.3, key.4)
                            .partial_cmp(&(b.0, b.1, b.2, b.3, b.4))
                            .unwrap()
                            == std::cmp::Ordering::Less
                    }
                };
                if better {
                    best = Some(key);
                }
            }
        }
    }
    match best {
        Some((_, _, p, q, d)) => Ok(ArimaSpec::new(p, d, q, d >= 1).unwrap()),
        None => Err(ArimaError::NoFeasibleModel),
    }
}
