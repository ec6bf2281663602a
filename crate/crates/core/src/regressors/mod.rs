//! Probability-output models (logistic regression, random forest) and the
//! cutoff rule that turns them into binary classifiers.

mod forest;
mod logistic;

pub use forest::{default_mtry, fit_forest, ForestModel, DEFAULT_TREES, MIN_NODE_SIZE};
pub use logistic::{
    fit_logistic, standard_normal_quantile, wald_significance, LogisticModel, WaldFlags,
};

use crate::error::Result;
use crate::splitter::ScenarioSplit;

/// Anything that maps a feature row to P(positive).
pub trait ProbModel {
    fn predict_proba(&self, x: &[f64]) -> f64;
}

impl ProbModel for LogisticModel {
    fn predict_proba(&self, x: &[f64]) -> f64 {
        LogisticModel::predict_proba(self, x)
    }
}

impl ProbModel for ForestModel {
    fn predict_proba(&self, x: &[f64]) -> f64 {
        ForestModel::predict_proba(self, x)
    }
}

/// A probability model plus a cutoff: predict positive when
/// P(positive) >= cutoff.
pub struct CutoffClassifier<M> {
    pub model: M,
    pub cutoff: f64,
}

impl<M: ProbModel> CutoffClassifier<M> {
    pub fn classify(&self, x: &[f64]) -> u8 {
        u8::from(self.model.predict_proba(x) >= self.cutoff)
    }
}

/// Attach the equilibrium cutoff, the training prevalence of the split.
pub fn as_classifier<M: ProbModel>(model: M, split: &ScenarioSplit) -> Result<CutoffClassifier<M>> {
    let cutoff = split.training_prevalence()?;
    Ok(CutoffClassifier { model, cutoff })
}
