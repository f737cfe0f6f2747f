//! Conditional-sum-of-squares estimation.

use num_complex::Complex64;

use super::{difference, ArimaError, ArimaFit, ArimaSpec};

const GN_MAX_CYCLES: usize = 500;
const GN_TOL: f64 = 1e-10;
const STATIONARITY_TOL: f64 = 1e-6;

/// Fits an ARIMA model by conditional sum of squares on the differenced
/// series. The drift term is the sample mean of the differenced series; AR
/// and MA coefficients start from a Hannan–Rissanen regression and are
/// refined by coordinate-wise Gauss–Newton steps until the relative SSE
/// change drops below 1e-10 (or 500 cycles).
pub fn arima_fit(series: &[f64], spec: ArimaSpec) -> Result<ArimaFit, ArimaError> {
    // Re-validate so hand-built specs go through the same gate.
    let spec = ArimaSpec::new(spec.p, spec.d, spec.q, spec.drift)?;
    let needed = spec.min_series_len();
    if series.len() < needed {
        return Err(ArimaError::TooShort {
            len: series.len(),
            needed,
        });
    }

    let w = difference(series, spec.d)?;
    let mu = if spec.drift {
        w.iter().sum::<f64>() / w.len() as f64
    } else {
        0.0
    };
    let z: Vec<f64> = w.iter().map(|v| v - mu).collect();

    let (phi, theta) = if spec.p + spec.q == 0 {
        (Vec::new(), Vec::new())
    } else {
        let init = hannan_rissanen(&z, spec.p, spec.q)?;
        gauss_newton(&z, spec.p, spec.q, init)?
    };

    if !ar_is_stationary(&phi) {
        let min_modulus = min_ar_root_modulus(&phi);
        return Err(ArimaError::NonStationary { min_modulus });
    }

    let resid = residuals(&z, &phi, &theta);
    let n_eff = z.len() - spec.p;
    let dof = n_eff - spec.n_params();
    let sse: f64 = resid.iter().skip(spec.p).map(|e| e * e).sum();
    let sigma2 = sse / dof as f64;

    let tail_len = spec.p + spec.d;
    let tail_obs = series[series.len() - tail_len..].to_vec();
    let tail_resid = if spec.q > 0 {
        resid[resid.len() - spec.q..].to_vec()
    } else {
        Vec::new()
    };

    Ok(ArimaFit {
        spec,
        phi,
        theta,
        mu,
        sigma2,
        tail_obs,
        tail_resid,
        n_obs: series.len(),
    })
}

/// Residual recursion e_t = z_t − Σ φ_i z_{t−i} − Σ θ_j e_{t−j}, conditioned
/// on e_t = 0 for t < p. Returns the full-length residual vector.
fn residuals(z: &[f64], phi: &[f64], theta: &[f64]) -> Vec<f64> {
    let p = phi.len();
    let mut e = vec![0.0; z.len()];
    for t in p..z.len() {
        let mut v = z[t];
        for (i, &ph) in phi.iter().enumerate() {
            v -= ph * z[t - 1 - i];
        }
        for (j, &th) in theta.iter().enumerate() {
            if t > j {
                v -= th * e[t - 1 - j];
            }
        }
        e[t] = v;
    }
    e
}

fn sse_of(z: &[f64], phi: &[f64], theta: &[f64]) -> f64 {
    let p = phi.len();
    residuals(z, phi, theta).iter().skip(p).map(|e| e * e).sum()
}

/// Residual derivative w.r.t. one coefficient. `is_phi` selects the family;
/// `k` is the 0-based lag index. The MA recursion feeds back into both.
fn residual_derivs(z: &[f64], phi: &[f64], theta: &[f64], is_phi: bool, k: usize) -> Vec<f64> {
    let p = phi.len();
    let e = residuals(z, phi, theta);
    let mut de = vec![0.0; z.len()];
    for t in p..z.len() {
        let mut v = if is_phi {
            if t > k {
                -z[t - 1 - k]
            } else {
                0.0
            }
        } else if t > k {
            -e[t - 1 - k]
        } else {
            0.0
        };
        for (j, &th) in theta.iter().enumerate() {
            if t > j {
                v -= th * de[t - 1 - j];
            }
        }
        de[t] = v;
    }
    de
}

/// One pass of coordinate-wise Gauss–Newton with step halving.
fn gauss_newton(
    z: &[f64],
    p: usize,
    q: usize,
    init: (Vec<f64>, Vec<f64>),
) -> Result<(Vec<f64>, Vec<f64>), ArimaError> {
    let (mut phi, mut theta) = init;
    let mut sse = sse_of(z, &phi, &theta);

    for cycle in 0..GN_MAX_CYCLES {
        let sse_before = sse;
        let mut any_identifiable = false;

        for coord in 0..(p + q) {
            let is_phi = coord < p;
            let k = if is_phi { coord } else { coord - p };
            let e = residuals(z, &phi, &theta);
            let de = residual_derivs(z, &phi, &theta, is_phi, k);
            let mut num = 0.0;
            let mut den = 0.0;
            for t in p..z.len() {
                num += de[t] * e[t];
                den += de[t] * de[t];
            }
            if den == 0.0 {
                continue;
            }
            any_identifiable = true;
            let mut step = -num / den;
            let current = if is_phi { phi[k] } else { theta[k] };
            let mut accepted = false;
            for _ in 0..30 {
                let trial = current + step;
                let trial_sse = {
                    if is_phi {
                        phi[k] = trial;
                    } else {
                        theta[k] = trial;
                    }
                    sse_of(z, &phi, &theta)
                };
                if trial_sse <= sse {
                    sse = trial_sse;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                if is_phi {
                    phi[k] = current;
                } else {
                    theta[k] = current;
                }
            }
        }

        if cycle == 0 && !any_identifiable {
            return Err(ArimaError::SingularDesign);
        }
        let denom = sse_before.max(f64::MIN_POSITIVE);
        if (sse_before - sse) / denom < GN_TOL {
            break;
        }
    }
    Ok((phi, theta))
}

/// Hannan–Rissanen start values: when q = 0 a direct least-squares AR fit;
/// otherwise a long-AR fit supplies residual proxies and both coefficient
/// families come from one joint regression. Falls back to zeros when the
/// proxy regression cannot be formed.
fn hannan_rissanen(z: &[f64], p: usize, q: usize) -> Result<(Vec<f64>, Vec<f64>), ArimaError> {
    if q == 0 {
        let phi = ar_least_squares(z, p).ok_or(ArimaError::SingularDesign)?;
        return Ok((phi, Vec::new()));
    }

    let zeros = (vec![0.0; p], vec![0.0; q]);
    let m = (p.max(q) + 8).min(z.len().saturating_sub(1) / 2);
    if m == 0 {
        return Ok(zeros);
    }
    let long_ar = match ar_least_squares(z, m) {
        Some(c) => c,
        None => return Ok(zeros),
    };
    let mut proxy = vec![0.0; z.len()];
    for t in m..z.len() {
        let mut v = z[t];
        for (i, &c) in long_ar.iter().enumerate() {
            v -= c * z[t - 1 - i];
        }
        proxy[t] = v;
    }

    // Joint regression of z_t on p lags of z and q lags of the proxy.
    let start = (m + q).max(p);
    let rows = z.len().saturating_sub(start);
    let cols = p + q;
    if rows < cols + 2 {
        return Ok(zeros);
    }
    let mut xtx = vec![vec![0.0; cols]; cols];
    let mut xty = vec![0.0; cols];
    for t in start..z.len() {
        let mut x = Vec::with_capacity(cols);
        for i in 0..p {
            x.push(z[t - 1 - i]);
        }
        for j in 0..q {
            x.push(proxy[t - 1 - j]);
        }
        for a in 0..cols {
            xty[a] += x[a] * z[t];
            for b in 0..cols {
                xtx[a][b] += x[a] * x[b];
            }
        }
    }
    match solve(xtx, xty) {
        Some(beta) => Ok((beta[..p].to_vec(), beta[p..].to_vec())),
        None => Ok(zeros),
    }
}

/// Least-squares AR(order) coefficients, or `None` if the normal equations
/// are singular.
fn ar_least_squares(z: &[f64], order: usize) -> Option<Vec<f64>> {
    if order == 0 {
        return Some(Vec::new());
    }
    if z.len() < order + 1 {
        return None;
    }
    let mut xtx = vec![vec![0.0; order]; order];
    let mut xty = vec![0.0; order];
    for t in order..z.len() {
        for a in 0..order {
            xty[a] += z[t - 1 - a] * z[t];
            for b in 0..order {
                xtx[a][b] += z[t - 1 - a] * z[t - 1 - b];
            }
        }
    }
    solve(xtx, xty)
}

/// Gaussian elimination with partial pivoting; `None` on singular systems.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let scale: f64 = a
        .iter()
        .flat_map(|row| row.iter().map(|v| v.abs()))
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return None;
    }
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
        if a[pivot][col].abs() <= 1e-12 * scale {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        let pivot_row = a[col].clone();
        for row in col + 1..n {
            let factor = a[row][col] / pivot_row[col];
            for (av, pv) in a[row][col..].iter_mut().zip(&pivot_row[col..]) {
                *av -= factor * pv;
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut v = b[col];
        for k in col + 1..n {
            v -= a[col][k] * x[k];
        }
        x[col] = v / a[col][col];
    }
    Some(x)
}

/// Roots of 1 − φ₁x − … − φₚxᵖ via Durand–Kerner. Lags with (near-)zero
/// trailing coefficients are dropped first; their roots sit at infinity.
fn ar_root_moduli(phi: &[f64]) -> Vec<f64> {
    let mut coeffs: Vec<f64> = Vec::with_capacity(phi.len() + 1);
    coeffs.push(1.0);
    coeffs.extend(phi.iter().map(|&c| -c));
    while coeffs.len() > 1 && coeffs.last().unwrap().abs() < 1e-12 {
        coeffs.pop();
    }
    let degree = coeffs.len() - 1;
    if degree == 0 {
        return Vec::new();
    }
    let lead = coeffs[degree];
    let monic: Vec<Complex64> = coeffs
        .iter()
        .map(|&c| Complex64::new(c / lead, 0.0))
        .collect();

    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..degree).map(|k| seed.powu(k as u32 + 1)).collect();
    for _ in 0..500 {
        let mut max_delta = 0.0f64;
        for i in 0..degree {
            let mut value = Complex64::new(0.0, 0.0);
            for &c in monic.iter().rev() {
                value = value * roots[i] + c;
            }
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..degree {
                if j != i {
                    denom *= roots[i] - roots[j];
                }
            }
            if denom.norm() == 0.0 {
                continue;
            }
            let delta = value / denom;
            roots[i] -= delta;
            max_delta = max_delta.max(delta.norm());
        }
        if max_delta < 1e-12 {
            break;
        }
    }
    roots.iter().map(|r| r.norm()).collect()
}

fn min_ar_root_modulus(phi: &[f64]) -> f64 {
    ar_root_moduli(phi).into_iter().fold(f64::INFINITY, f64::min)
}

fn ar_is_stationary(phi: &[f64]) -> bool {
    min_ar_root_modulus(phi) > 1.0 - STATIONARITY_TOL
}
