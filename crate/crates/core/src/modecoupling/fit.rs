use serde::Serialize;

use crate::error::{Error, Result};

/// Fitted Lorentzian parameters and the residual norm of the fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LorentzianFit {
    pub omega_nu: f64,
    pub gamma_nu: f64,
    pub peak: f64,
    pub residual_norm: f64,
    pub iterations: usize,
}

const MAX_ITERATIONS: usize = 500;
const STEP_TOL: f64 = 1e-10;

fn fit_error(msg: impl Into<String>, iterations: usize, residual: f64) -> Error {
    Error::Fit {
        msg: msg.into(),
        iterations,
        residual,
    }
}

/// Half-maximum width around the sample maximum, by linear interpolation.
fn half_max_width(xs: &[f64], ys: &[f64], imax: usize) -> Option<f64> {
    let half = 0.5 * ys[imax];
    let crossing = |i: usize, j: usize| xs[i] + (half - ys[i]) * (xs[j] - xs[i]) / (ys[j] - ys[i]);
    let right = (imax + 1..xs.len())
        .find(|&j| ys[j] <= half)
        .map(|j| crossing(j - 1, j));
    let left = (0..imax).rev().find(|&j| ys[j] <= half).map(|j| crossing(j + 1, j));
    match (left, right) {
        (Some(l), Some(r)) => Some(r - l),
        (Some(l), None) => Some(2.0 * (xs[imax] - l)),
        (None, Some(r)) => Some(2.0 * (r - xs[imax])),
        (None, None) => None,
    }
    .filter(|w| *w > 0.0)
}

struct Projected {
    cost: f64,
    peak: f64,
    residual: Vec<f64>,
    jacobian: Vec<[f64; 2]>,
}

/// Residual and exact Jacobian of `y − P(c, g)·φ(c, g)` with the peak
/// `P` eliminated by its linear least-squares value.
fn project(xs: &[f64], ys: &[f64], c: f64, g: f64) -> Option<Projected> {
    let h = 0.25 * g * g;
    let n = xs.len();
    let mut phi = Vec::with_capacity(n);
    let mut dphi = Vec::with_capacity(n);
    for &x in xs {
        let u = x - c;
        let den = u * u + h;
        phi.push(h / den);
        dphi.push([2.0 * h * u / (den * den), 0.5 * g * u * u / (den * den)]);
    }
    let pp: f64 = phi.iter().map(|p| p * p).sum();
    if !(pp > 0.0) || !pp.is_finite() {
        return None;
    }
    let peak = phi.iter().zip(ys).map(|(p, y)| p * y).sum::<f64>() / pp;
    let mut dpeak = [0.0; 2];
    for k in 0..2 {
        let ydp: f64 = ys.iter().zip(&dphi).map(|(y, d)| y * d[k]).sum();
        let pdp: f64 = phi.iter().zip(&dphi).map(|(p, d)| p * d[k]).sum();
        dpeak[k] = (ydp - 2.0 * peak * pdp) / pp;
    }
    let residual: Vec<f64> = ys.iter().zip(&phi).map(|(y, p)| y - peak * p).collect();
    let jacobian = phi
        .iter()
        .zip(&dphi)
        .map(|(p, d)| [-peak * d[0] - p * dpeak[0], -peak * d[1] - p * dpeak[1]])
        .collect();
    let cost = residual.iter().map(|r| r * r).sum();
    Some(Projected {
        cost,
        peak,
        residual,
        jacobian,
    })
}

/// Least-squares fit of `peak·(γ²/4)/((ω − ω_ν)² + γ²/4)` to `samples`.
///
/// The peak enters linearly and is eliminated; Levenberg-Marquardt runs
/// on centre and width in coordinates scaled to the half-maximum width
/// around the largest sample.
pub fn fit_lorentzian(samples: &[(f64, f64)]) -> Result<LorentzianFit> {
    if samples.len() < 5 {
        return Err(fit_error(
            format!("need at least 5 samples, got {}", samples.len()),
            0,
            f64::NAN,
        ));
    }
    if samples.iter().any(|(w, v)| !w.is_finite() || !v.is_finite()) {
        return Err(fit_error("non-finite sample", 0, f64::NAN));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (imax, &(w_max, y_max)) = sorted
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .expect("non-empty");
    let y_min = sorted.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    if !(y_max > 0.0) || y_max - y_min <= 1e-14 * y_max.abs().max(y_min.abs()) {
        return Err(fit_error("samples are constant or have no positive peak", 0, f64::NAN));
    }

    let raw_x: Vec<f64> = sorted.iter().map(|s| s.0).collect();
    let raw_y: Vec<f64> = sorted.iter().map(|s| s.1).collect();
    let span = raw_x[raw_x.len() - 1] - raw_x[0];
    let scale = half_max_width(&raw_x, &raw_y, imax).unwrap_or(0.25 * span);
    let xs: Vec<f64> = raw_x.iter().map(|x| (x - w_max) / scale).collect();
    let ys: Vec<f64> = raw_y.iter().map(|y| y / y_max).collect();

    let (mut c, mut g) = (0.0f64, 1.0f64);
    let mut current = project(&xs, &ys, c, g).ok_or_else(|| fit_error("degenerate initial guess", 0, f64::NAN))?;
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let mut jtj = [[0.0; 2]; 2];
        let mut jtr = [0.0; 2];
        for (row, r) in current.jacobian.iter().zip(&current.residual) {
            for a in 0..2 {
                jtr[a] += row[a] * r;
                for b in 0..2 {
                    jtj[a][b] += row[a] * row[b];
                }
            }
        }
        let mut accepted = false;
        while lambda < 1e16 {
            let a00 = jtj[0][0] * (1.0 + lambda);
            let a11 = jtj[1][1] * (1.0 + lambda);
            let a01 = jtj[0][1];
            let det = a00 * a11 - a01 * a01;
            if !(det.abs() > 0.0) {
                lambda *= 10.0;
                continue;
            }
            let dc = -(a11 * jtr[0] - a01 * jtr[1]) / det;
            let dg = -(a00 * jtr[1] - a01 * jtr[0]) / det;
            let step = dc.hypot(dg);
            let small = step <= STEP_TOL * (1.0 + c.hypot(g));
            if let Some(trial) = project(&xs, &ys, c + dc, g + dg) {
                if trial.cost <= current.cost {
                    c += dc;
                    g += dg;
                    current = trial;
                    lambda = (lambda * 0.1).max(1e-12);
                    accepted = true;
                    if small {
                        converged = true;
                    }
                    break;
                }
            }
            if small {
                // No descent left at step resolution.
                converged = true;
                break;
            }
            lambda *= 10.0;
        }
        if converged || current.cost == 0.0 {
            converged = true;
            break;
        }
        if !accepted {
            break;
        }
    }

    let residual_norm = current.cost.sqrt() * y_max;
    if !converged {
        return Err(fit_error(
            "Levenberg-Marquardt did not converge",
            iterations,
            residual_norm,
        ));
    }
    if !(g > 0.0) {
        return Err(fit_error(
            format!("fitted width is not positive ({:e})", g * scale),
            iterations,
            residual_norm,
        ));
    }
    Ok(LorentzianFit {
        omega_nu: w_max + c * scale,
        gamma_nu: g * scale,
        peak: current.peak * y_max,
        residual_norm,
        iterations,
    })
}
