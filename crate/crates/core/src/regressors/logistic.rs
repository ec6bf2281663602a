//! Logistic regression fitted by iteratively reweighted least squares,
//! with Wald tests on the coefficients.

use crate::error::{Error, Result};
use crate::numcore::{Cholesky, Matrix};

const MAX_ITERATIONS: usize = 50;
const DEVIANCE_TOL: f64 = 1e-8;
/// |linear predictor| beyond which fitted probabilities sit within ~1e-8
/// of 0 or 1; reaching it marks quasi-separation.
const SEPARATION_ETA: f64 = 18.0;
const WEIGHT_FLOOR: f64 = 1e-10;

/// Fitted logistic model. Coefficients carry the intercept first.
#[derive(Debug, Clone)]
pub struct LogisticModel {
    pub coefficients: Vec<f64>,
    pub standard_errors: Vec<f64>,
    pub converged: bool,
    pub separation: bool,
    pub iterations: usize,
    pub deviance: f64,
}

fn sigmoid(eta: f64) -> f64 {
    if eta >= 0.0 {
        1.0 / (1.0 + (-eta).exp())
    } else {
        let e = eta.exp();
        e / (1.0 + e)
    }
}

fn deviance_of(labels: &[u8], eta: &[f64]) -> f64 {
    // -2 log-likelihood, written against the linear predictor to stay
    // finite near saturation
    let mut dev = 0.0;
    for (&y, &e) in labels.iter().zip(eta) {
        // log(1 + exp(e)) - y*e, stabilized
        let log1p_exp = if e > 0.0 { e + (-e).exp().ln_1p() } else { e.exp().ln_1p() };
        dev += 2.0 * (log1p_exp - f64::from(y) * e);
    }
    dev
}

/// Fit by IRLS on rows x labels. Quasi-separation caps the coefficients at
/// the last finite iterate and clears `converged` instead of failing.
pub fn fit_logistic(rows: &Matrix, labels: &[u8]) -> Result<LogisticModel> {
    let n = rows.rows();
    let p = rows.cols();
    assert_eq!(n, labels.len(), "rows and labels differ in length");
    if n <= p + 1 {
        return Err(Error::TooFewRows { needed: p + 2, got: n });
    }
    let k = p + 1; // intercept plus features

    let design_row = |i: usize, buf: &mut Vec<f64>| {
        buf.clear();
        buf.push(1.0);
        buf.extend_from_slice(rows.row(i));
    };

    let mut beta = vec![0.0; k];
    let mut eta = vec![0.0; n];
    let mut deviance = deviance_of(labels, &eta);
    let mut iterations = 0;
    let mut converged = false;
    let mut separation = false;
    let mut last_info: Option<Cholesky> = None;

    let mut xrow = Vec::with_capacity(k);
    for iter in 1..=MAX_ITERATIONS {
        iterations = iter;
        // weighted normal equations: (X^T W X) delta_target = X^T W z
        let mut xtwx = Matrix::zeros(k, k);
        let mut xtwz = vec![0.0; k];
        for i in 0..n {
            design_row(i, &mut xrow);
            let mu = sigmoid(eta[i]);
            let w = (mu * (1.0 - mu)).max(WEIGHT_FLOOR);
            let z = eta[i] + (f64::from(labels[i]) - mu) / w;
            for a in 0..k {
                let wxa = w * xrow[a];
                xtwz[a] += wxa * z;
                for b in a..k {
                    xtwx[(a, b)] += wxa * xrow[b];
                }
            }
        }
        for a in 0..k {
            for b in 0..a {
                xtwx[(a, b)] = xtwx[(b, a)];
            }
        }
        let chol = match Cholesky::new(&xtwx) {
            Ok(c) => c,
            Err(Error::NotPositiveDefinite { .. }) => {
                if iter == 1 {
                    return Err(Error::RankDeficient);
                }
                // curvature collapsed mid-run: treat as separation
                separation = true;
                break;
            }
            Err(e) => return Err(e),
        };
        let new_beta = chol.solve(&xtwz);
        if new_beta.iter().any(|b| !b.is_finite()) {
            separation = true;
            break;
        }

        let mut new_eta = vec![0.0; n];
        for i in 0..n {
            design_row(i, &mut xrow);
            new_eta[i] = xrow.iter().zip(&new_beta).map(|(x, b)| x * b).sum();
        }
        let new_deviance = deviance_of(labels, &new_eta);
        beta = new_beta;
        eta = new_eta;
        last_info = Some(chol);

        let delta = (deviance - new_deviance).abs();
        deviance = new_deviance;
        if eta.iter().any(|e| e.abs() > SEPARATION_ETA) {
            separation = true;
            break;
        }
        if delta < DEVIANCE_TOL {
            converged = true;
            break;
        }
    }

    // standard errors from the inverse Fisher information at the optimum
    let mut standard_errors = vec![f64::NAN; k];
    if let Some(chol) = last_info {
        let inv = chol.solve_matrix(&Matrix::identity(k));
        for j in 0..k {
            let v = inv[(j, j)];
            standard_errors[j] = if v > 0.0 { v.sqrt() } else { f64::NAN };
        }
    }

    Ok(LogisticModel {
        coefficients: beta,
        standard_errors,
        converged: converged && !separation,
        separation,
        iterations,
        deviance,
    })
}

impl LogisticModel {
    /// P(y = 1 | x) under the fitted coefficients.
    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        let eta = self.coefficients[0]
            + self.coefficients[1..]
                .iter()
                .zip(x)
                .map(|(b, v)| b * v)
                .sum::<f64>();
        sigmoid(eta)
    }
}

/// Per-coefficient two-sided Wald flags at level `alpha`.
#[derive(Debug, Clone)]
pub struct WaldFlags {
    pub significant: Vec<bool>,
    /// False when the model did not converge; flags are then unreliable.
    pub reliable: bool,
}

pub fn wald_significance(model: &LogisticModel, alpha: f64) -> WaldFlags {
    let crit = standard_normal_quantile(1.0 - alpha / 2.0);
    let significant = model
        .coefficients
        .iter()
        .zip(&model.standard_errors)
        .map(|(b, se)| se.is_finite() && *se > 0.0 && (b / se).abs() > crit)
        .collect();
    WaldFlags {
        significant,
        reliable: model.converged,
    }
}

/// Inverse standard-normal CDF (Acklam's rational approximation,
/// |relative error| < 1.15e-9 over (0,1)).
pub fn standard_normal_quantile(prob: f64) -> f64 {
    assert!(prob > 0.0 && prob < 1.0, "quantile needs p in (0,1)");
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    if prob < P_LOW {
        let q = (-2.0 * prob.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if prob <= 1.0 - P_LOW {
        let q = prob - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -standard_normal_quantile(1.0 - prob)
    }
}
