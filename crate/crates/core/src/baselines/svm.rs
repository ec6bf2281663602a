//! Soft-margin RBF support vector machine trained by sequential minimal
//! optimization with maximal-violating-pair working sets.
//!
//! Features are standardized internally using training statistics. The
//! dual is solved to a KKT gap below `KKT_TOL` or an iteration cap,
//! whichever comes first; hitting the cap returns the best iterate with
//! `converged = false` rather than failing.

use crate::error::{Error, Result};
use crate::numcore::{Matrix, Standardizer};

pub const KKT_TOL: f64 = 1e-3;
const ALPHA_KEEP: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
pub struct SvmConfig {
    pub c_penalty: f64,
    /// None: gamma = 1 / (p * mean feature variance) on standardized data.
    pub gamma: Option<f64>,
}

impl Default for SvmConfig {
    fn default() -> Self {
        SvmConfig {
            c_penalty: 1.0,
            gamma: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SvmModel {
    /// Standardized support vectors.
    support: Matrix,
    /// y_i * alpha_i per support vector.
    dual_signed: Vec<f64>,
    pub bias: f64,
    pub gamma: f64,
    pub c_penalty: f64,
    pub converged: bool,
    pub iterations: usize,
    transform: Standardizer,
}

fn rbf(a: &[f64], b: &[f64], gamma: f64) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (-gamma * d2).exp()
}

/// Train on rows x binary labels (1 = positive).
pub fn fit_svm(rows: &Matrix, labels: &[u8], config: SvmConfig) -> Result<SvmModel> {
    let n = rows.rows();
    assert_eq!(n, labels.len());
    if labels.iter().all(|&l| l == labels[0]) {
        return Err(Error::SingleClass);
    }
    let transform = Standardizer::fit(rows)?;
    let std_rows = transform.apply(rows);

    let gamma = match config.gamma {
        Some(g) => g,
        None => {
            let mc = crate::numcore::mean_cov(&std_rows)?;
            let mean_var =
                (0..std_rows.cols()).map(|j| mc.cov[(j, j)]).sum::<f64>() / std_rows.cols() as f64;
            1.0 / (std_rows.cols() as f64 * mean_var)
        }
    };
    let c = config.c_penalty;
    let y: Vec<f64> = labels.iter().map(|&l| if l == 1 { 1.0 } else { -1.0 }).collect();

    // full kernel matrix in f32; n stays in the low thousands here
    let mut kernel = vec![0.0f32; n * n];
    for i in 0..n {
        kernel[i * n + i] = 1.0;
        for j in i + 1..n {
            let k = rbf(std_rows.row(i), std_rows.row(j), gamma) as f32;
            kernel[i * n + j] = k;
            kernel[j * n + i] = k;
        }
    }

    let mut alpha = vec![0.0f64; n];
    // margin without bias: f~(x_t) = sum_s alpha_s y_s K_ts; zero at start
    let mut margin = vec![0.0f64; n];
    let max_iterations = (50 * n).max(20_000);
    let mut iterations = 0;
    let mut converged = false;
    let mut final_gap = f64::INFINITY;

    while iterations < max_iterations {
        // maximal violating pair over v_t = y_t - f~_t
        let mut i_up: Option<(usize, f64)> = None;
        let mut i_low: Option<(usize, f64)> = None;
        for t in 0..n {
            let v = y[t] - margin[t];
            let in_up = (y[t] > 0.0 && alpha[t] < c) || (y[t] < 0.0 && alpha[t] > 0.0);
            let in_low = (y[t] < 0.0 && alpha[t] < c) || (y[t] > 0.0 && alpha[t] > 0.0);
            if in_up && i_up.is_none_or(|(_, best)| v > best) {
                i_up = Some((t, v));
            }
            if in_low && i_low.is_none_or(|(_, best)| v < best) {
                i_low = Some((t, v));
            }
        }
        let (Some((i, m_up)), Some((j, m_low))) = (i_up, i_low) else {
            break;
        };
        final_gap = m_up - m_low;
        if final_gap < KKT_TOL {
            converged = true;
            break;
        }
        iterations += 1;

        let (ki, kj) = (&kernel[i * n..(i + 1) * n], &kernel[j * n..(j + 1) * n]);
        let eta = (f64::from(ki[i]) + f64::from(kj[j]) - 2.0 * f64::from(ki[j])).max(1e-12);

        // two-variable subproblem in Platt form with errors e_t = f~_t - y_t
        let (e_i, e_j) = (-m_up, -m_low);
        let s = y[i] * y[j];
        let (low, high) = if s < 0.0 {
            ((alpha[j] - alpha[i]).max(0.0), (c + alpha[j] - alpha[i]).min(c))
        } else {
            ((alpha[i] + alpha[j] - c).max(0.0), (alpha[i] + alpha[j]).min(c))
        };
        if low >= high {
            // numerically stuck pair; nudge out by treating as converged
            break;
        }
        let mut new_j = alpha[j] + y[j] * (e_i - e_j) / eta;
        new_j = new_j.clamp(low, high);
        let new_i = alpha[i] + s * (alpha[j] - new_j);

        let (delta_i, delta_j) = (new_i - alpha[i], new_j - alpha[j]);
        if delta_j.abs() < 1e-14 {
            break;
        }
        alpha[i] = new_i;
        alpha[j] = new_j;
        let (wi, wj) = (delta_i * y[i], delta_j * y[j]);
        for t in 0..n {
            margin[t] += wi * f64::from(ki[t]) + wj * f64::from(kj[t]);
        }
    }

    if !converged && final_gap < KKT_TOL {
        converged = true;
    }

    // bias from the KKT box: midpoint of the feasible interval
    let mut m_up = f64::NEG_INFINITY;
    let mut m_low = f64::INFINITY;
    for t in 0..n {
        let v = y[t] - margin[t];
        let in_up = (y[t] > 0.0 && alpha[t] < c) || (y[t] < 0.0 && alpha[t] > 0.0);
        let in_low = (y[t] < 0.0 && alpha[t] < c) || (y[t] > 0.0 && alpha[t] > 0.0);
        if in_up {
            m_up = m_up.max(v);
        }
        if in_low {
            m_low = m_low.min(v);
        }
    }
    let bias = if m_up.is_finite() && m_low.is_finite() {
        0.5 * (m_up + m_low)
    } else {
        0.0
    };

    let keep: Vec<usize> = (0..n).filter(|&t| alpha[t] > ALPHA_KEEP).collect();
    let support_rows: Vec<Vec<f64>> = keep.iter().map(|&t| std_rows.row(t).to_vec()).collect();
    let dual_signed: Vec<f64> = keep.iter().map(|&t| alpha[t] * y[t]).collect();

    Ok(SvmModel {
        support: Matrix::from_rows(&support_rows),
        dual_signed,
        bias,
        gamma,
        c_penalty: c,
        converged,
        iterations,
        transform,
    })
}

impl SvmModel {
    pub fn n_support(&self) -> usize {
        self.dual_signed.len()
    }

    /// Signed margin; positive side is the positive class.
    pub fn decision_value(&self, x: &[f64]) -> f64 {
        let z = self.transform.apply_row(x);
        let mut f = self.bias;
        for (t, w) in self.dual_signed.iter().enumerate() {
            f += w * rbf(self.support.row(t), &z, self.gamma);
        }
        f
    }

    /// Positive iff the margin is strictly positive; a tie is negative.
    pub fn classify(&self, x: &[f64]) -> u8 {
        u8::from(self.decision_value(x) > 0.0)
    }

    /// |alpha_i| per support vector (for feasibility checks).
    pub fn dual_magnitudes(&self) -> Vec<f64> {
        self.dual_signed.iter().map(|w| w.abs()).collect()
    }

    /// sum alpha_i y_i, zero at dual feasibility.
    pub fn dual_balance(&self) -> f64 {
        self.dual_signed.iter().sum()
    }
}
