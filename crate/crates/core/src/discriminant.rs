//! Gaussian maximum log-likelihood discriminants (LD, QD) and their
//! double-scoring combinations (DDS1, DDS2).
//!
//! Scores are log-likelihood differences, group 1 minus group 2, with no
//! class priors: the linear score shares a pooled covariance between the
//! groups, the quadratic score keeps per-group covariances and their
//! log-determinants. DDS1 votes positive when either discriminant does,
//! DDS2 only when both do. A score of exactly zero classifies negative.

use crate::error::{Error, Result};
use crate::numcore::{mean_cov, pooled_cov, Cholesky, Matrix, MeanCov};

/// Ridge escalation ladder for near-degenerate covariance resamples:
/// eps * (trace/p) * I with eps from 1e-8 up to 1e-4.
const RIDGE_START: f64 = 1e-8;
const RIDGE_MAX: f64 = 1e-4;

/// Per-group Gaussian estimates with cached factorizations.
#[derive(Debug, Clone)]
pub struct GaussianGroupModel {
    pub mu1: Vec<f64>,
    pub mu2: Vec<f64>,
    chol1: Cholesky,
    chol2: Cholesky,
    chol_pooled: Cholesky,
    /// Ridge epsilons actually applied to (sigma1, sigma2, pooled), if any.
    pub ridge: [Option<f64>; 3],
    p: usize,
}

/// Scores and the four class labels for one tested vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscriminantDecision {
    pub ld_score: f64,
    pub qd_score: f64,
    pub ld_class: u8,
    pub qd_class: u8,
    pub dds1_class: u8,
    pub dds2_class: u8,
}

fn factorize_with_ridge(cov: &Matrix, slot: &mut Option<f64>) -> Result<Cholesky> {
    match Cholesky::new(cov) {
        Ok(c) => Ok(c),
        Err(Error::NotPositiveDefinite { .. }) => {
            let scale = cov.trace() / cov.rows() as f64;
            let mut eps = RIDGE_START;
            loop {
                match Cholesky::new(&cov.add_ridge(eps * scale)) {
                    Ok(c) => {
                        *slot = Some(eps);
                        return Ok(c);
                    }
                    Err(Error::NotPositiveDefinite { pivot }) if eps < RIDGE_MAX => {
                        let _ = pivot;
                        eps *= 10.0;
                    }
                    Err(e) => return Err(e),
                }
            }
        }
        Err(e) => Err(e),
    }
}

/// Fit per-group means and covariances from the two training matrices.
pub fn fit_gaussian(train_g1: &Matrix, train_g2: &Matrix) -> Result<GaussianGroupModel> {
    let p = train_g1.cols();
    assert_eq!(p, train_g2.cols(), "group feature dimension mismatch");
    for (group, rows) in [(1u8, train_g1.rows()), (2, train_g2.rows())] {
        if rows < p + 1 {
            return Err(Error::GroupTooSmall {
                group,
                needed: p + 1,
                got: rows,
                p,
            });
        }
    }
    let g1 = mean_cov(train_g1)?;
    let g2 = mean_cov(train_g2)?;
    let pooled = pooled_cov(&g1, &g2)?;

    let mut ridge = [None; 3];
    let chol1 = factorize_with_ridge(&g1.cov, &mut ridge[0])?;
    let chol2 = factorize_with_ridge(&g2.cov, &mut ridge[1])?;
    let chol_pooled = factorize_with_ridge(&pooled, &mut ridge[2])?;

    Ok(GaussianGroupModel {
        mu1: g1.mean,
        mu2: g2.mean,
        chol1,
        chol2,
        chol_pooled,
        ridge,
        p,
    })
}

/// Fit from precomputed group summaries (used by tests and callers that
/// already hold `MeanCov` values).
pub fn fit_from_summaries(g1: &MeanCov, g2: &MeanCov) -> Result<GaussianGroupModel> {
    let pooled = pooled_cov(g1, g2)?;
    let mut ridge = [None; 3];
    let chol1 = factorize_with_ridge(&g1.cov, &mut ridge[0])?;
    let chol2 = factorize_with_ridge(&g2.cov, &mut ridge[1])?;
    let chol_pooled = factorize_with_ridge(&pooled, &mut ridge[2])?;
    Ok(GaussianGroupModel {
        mu1: g1.mean.clone(),
        mu2: g2.mean.clone(),
        chol1,
        chol2,
        chol_pooled,
        ridge,
        p: g1.mean.len(),
    })
}

fn centered(x: &[f64], mu: &[f64]) -> Vec<f64> {
    x.iter().zip(mu).map(|(a, b)| a - b).collect()
}

impl GaussianGroupModel {
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn was_regularized(&self) -> bool {
        self.ridge.iter().any(Option::is_some)
    }

    /// Linear score: pooled-covariance log-likelihood difference. The
    /// shared log-determinants cancel, leaving the two quadratic forms.
    pub fn ld_score(&self, x: &[f64]) -> f64 {
        let d1 = self.chol_pooled.quad_form(&centered(x, &self.mu1));
        let d2 = self.chol_pooled.quad_form(&centered(x, &self.mu2));
        0.5 * (d2 - d1)
    }

    /// Quadratic score: per-group covariances, log-determinants included.
    pub fn qd_score(&self, x: &[f64]) -> f64 {
        let d1 = self.chol1.quad_form(&centered(x, &self.mu1));
        let d2 = self.chol2.quad_form(&centered(x, &self.mu2));
        0.5 * ((self.chol2.logdet() + d2) - (self.chol1.logdet() + d1))
    }

    /// Scores and the four class labels for one vector.
    pub fn decide(&self, x: &[f64]) -> DiscriminantDecision {
        let ld_score = self.ld_score(x);
        let qd_score = self.qd_score(x);
        let ld_class = u8::from(ld_score > 0.0);
        let qd_class = u8::from(qd_score > 0.0);
        DiscriminantDecision {
            ld_score,
            qd_score,
            ld_class,
            qd_class,
            dds1_class: ld_class | qd_class,
            dds2_class: ld_class & qd_class,
        }
    }

    /// Label vectors (LD, QD, DDS1, DDS2) for a batch of rows.
    pub fn classify_batch(&self, rows: &Matrix) -> BatchLabels {
        let n = rows.rows();
        let mut out = BatchLabels {
            ld: Vec::with_capacity(n),
            qd: Vec::with_capacity(n),
            dds1: Vec::with_capacity(n),
            dds2: Vec::with_capacity(n),
        };
        for i in 0..n {
            let d = self.decide(rows.row(i));
            out.ld.push(d.ld_class);
            out.qd.push(d.qd_class);
            out.dds1.push(d.dds1_class);
            out.dds2.push(d.dds2_class);
        }
        out
    }
}

/// The four label vectors produced by one fitted model over one batch.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchLabels {
    pub ld: Vec<u8>,
    pub qd: Vec<u8>,
    pub dds1: Vec<u8>,
    pub dds2: Vec<u8>,
}
