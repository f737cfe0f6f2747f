//! Multi-horizon point forecasts and Gaussian prediction intervals.

use super::{ArimaFit, ForecastRow, ForecastTable, Z80, Z95};

/// Psi-weights (infinite moving-average coefficients) of the integrated
/// process, i.e. of Θ(B)/(Φ(B)(1−B)^d), up to `horizon − 1`. The forecast
/// variance at horizon h is sigma² · Σ_{j<h} ψ_j².
pub(crate) fn psi_weights(phi: &[f64], theta: &[f64], d: usize, horizon: usize) -> Vec<f64> {
    // Expand Φ(B)(1−B)^d = 1 − a₁B − … − a_{p+d}B^{p+d}.
    let mut poly: Vec<f64> = Vec::with_capacity(phi.len() + d + 1);
    poly.push(1.0);
    poly.extend(phi.iter().map(|&c| -c));
    for _ in 0..d {
        let mut next = vec![0.0; poly.len() + 1];
        for (i, &c) in poly.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= c;
        }
        poly = next;
    }
    let a: Vec<f64> = poly[1..].iter().map(|&c| -c).collect();

    let mut psi = Vec::with_capacity(horizon);
    psi.push(1.0);
    for j in 1..horizon {
        let mut v = if j <= theta.len() { theta[j - 1] } else { 0.0 };
        for (i, &ai) in a.iter().enumerate().take(j) {
            v += ai * psi[j - 1 - i];
        }
        psi.push(v);
    }
    psi
}

/// Forecasts `horizon` steps ahead of the fitted series and wraps them in a
/// table of rows labeled `start_year`, `start_year + 1`, …. Known actuals
/// for the leading horizons may be supplied positionally; anything beyond
/// `actuals` is marked absent.
pub fn forecast_intervals(
    fit: &ArimaFit,
    horizon: usize,
    start_year: i32,
    actuals: &[Option<f64>],
) -> ForecastTable {
    let spec = fit.spec;
    let mu = fit.mu;

    // Last d levels for re-integration and last p differenced values for the
    // AR recursion, both rebuilt from the stored observation tail.
    let mut levels = Vec::with_capacity(spec.d);
    let mut cur = fit.tail_obs.clone();
    for _ in 0..spec.d {
        levels.push(*cur.last().expect("tail holds at least d observations"));
        cur = cur.windows(2).map(|w| w[1] - w[0]).collect();
    }
    let mut z: Vec<f64> = cur.iter().map(|v| v - mu).collect();
    let mut resid = fit.tail_resid.clone();

    let psi = psi_weights(&fit.phi, &fit.theta, spec.d, horizon);
    let sigma = fit.sigma2.max(0.0).sqrt();

    let mut rows = Vec::with_capacity(horizon);
    let mut psi_sq_sum = 0.0;
    for h in 1..=horizon {
        let mut z_next = 0.0;
        for (i, &ph) in fit.phi.iter().enumerate() {
            z_next += ph * z[z.len() - 1 - i];
        }
        for (j, &th) in fit.theta.iter().enumerate() {
            if resid.len() > j {
                z_next += th * resid[resid.len() - 1 - j];
            }
        }
        z.push(z_next);
        resid.push(0.0);

        let w_next = z_next + mu;
        let forecast = if spec.d == 0 {
            w_next
        } else {
            let mut acc = w_next;
            for j in (0..spec.d).rev() {
                levels[j] += acc;
                acc = levels[j];
            }
            levels[0]
        };

        psi_sq_sum += psi[h - 1] * psi[h - 1];
        let stddev = sigma * psi_sq_sum.sqrt();
        rows.push(ForecastRow {
            year: start_year + (h as i32 - 1),
            actual: actuals.get(h - 1).copied().flatten(),
            forecast,
            lo80: forecast - Z80 * stddev,
            hi80: forecast + Z80 * stddev,
            lo95: forecast - Z95 * stddev,
            hi95: forecast + Z95 * stddev,
        });
    }
    ForecastTable { rows }
}
