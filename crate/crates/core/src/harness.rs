//! Paired-design Monte-Carlo runner.
//!
//! Simulation k draws one split from `(master seed, k)`; every requested
//! algorithm fits and predicts on that identical split, so differences
//! between algorithms are never split noise. Simulations run in parallel;
//! aggregation is order-independent, so results match a serial run.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{fit_boost, fit_svm, BoostConfig, SvmConfig};
use crate::dataset::{Dataset, Sex};
use crate::discriminant::fit_gaussian;
use crate::error::{Error, Result};
use crate::metrics::{aggregate, confusion, performance, MeanPerformance, PerformanceMatrix};
use crate::regressors::{
    default_mtry, fit_forest, fit_logistic, wald_significance, ProbModel, DEFAULT_TREES,
};
use crate::rng::{stream, Purpose};
use crate::splitter::{make_split, Scenario, ScenarioSplit};

/// The eight classification algorithms under comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Xgb,
    Svm,
    Rf,
    Logit,
    Ld,
    Qd,
    Dds1,
    Dds2,
}

impl Algorithm {
    pub const ALL: [Algorithm; 8] = [
        Algorithm::Xgb,
        Algorithm::Svm,
        Algorithm::Rf,
        Algorithm::Logit,
        Algorithm::Ld,
        Algorithm::Qd,
        Algorithm::Dds1,
        Algorithm::Dds2,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Xgb => "xgb",
            Algorithm::Svm => "svm",
            Algorithm::Rf => "rf",
            Algorithm::Logit => "logit",
            Algorithm::Ld => "ld",
            Algorithm::Qd => "qd",
            Algorithm::Dds1 => "dds1",
            Algorithm::Dds2 => "dds2",
        }
    }

    fn uses_gaussian(&self) -> bool {
        matches!(
            self,
            Algorithm::Ld | Algorithm::Qd | Algorithm::Dds1 | Algorithm::Dds2
        )
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "xgb" => Ok(Algorithm::Xgb),
            "svm" => Ok(Algorithm::Svm),
            "rf" => Ok(Algorithm::Rf),
            "logit" => Ok(Algorithm::Logit),
            "ld" => Ok(Algorithm::Ld),
            "qd" => Ok(Algorithm::Qd),
            "dds1" => Ok(Algorithm::Dds1),
            "dds2" => Ok(Algorithm::Dds2),
            other => Err(format!("unknown algorithm {other:?}")),
        }
    }
}

/// Which rows of the dataset an experiment sees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SexFilter {
    #[default]
    All,
    Male,
    Female,
}

impl SexFilter {
    pub fn apply(&self, d: &Dataset) -> Dataset {
        match self {
            SexFilter::All => d.clone(),
            SexFilter::Male => d.filter_by_sex(Sex::Male),
            SexFilter::Female => d.filter_by_sex(Sex::Female),
        }
    }
}

impl std::str::FromStr for SexFilter {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "all" => Ok(SexFilter::All),
            "male" | "m" => Ok(SexFilter::Male),
            "female" | "f" => Ok(SexFilter::Female),
            other => Err(format!("unknown sex filter {other:?}")),
        }
    }
}

/// A complete experiment description; with the dataset it determines every
/// number in the result.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub sex: SexFilter,
    pub scenario: Scenario,
    pub tau: f64,
    pub algorithms: Vec<Algorithm>,
    /// 1-based variable subset; None keeps every column.
    pub vars: Option<Vec<usize>>,
    pub n_sims: usize,
    pub master_seed: u64,
}

impl ExperimentSpec {
    fn validate(&self) -> Result<()> {
        if self.n_sims < 1 {
            return Err(Error::BadSpec {
                reason: "n_sims must be at least 1".into(),
            });
        }
        if self.algorithms.is_empty() {
            return Err(Error::BadSpec {
                reason: "algorithm list is empty".into(),
            });
        }
        Ok(())
    }
}

/// Aggregated output of one experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub means: BTreeMap<Algorithm, MeanPerformance>,
    /// Per-algorithm failed simulations with messages.
    pub failures: BTreeMap<Algorithm, Vec<(usize, String)>>,
    pub dataset_fingerprint: String,
    pub spec: ExperimentSpec,
}

/// Labels predicted by every requested algorithm on one split.
fn classify_split(
    d: &Dataset,
    split: &ScenarioSplit,
    algorithms: &[Algorithm],
    master_seed: u64,
    sim: u64,
) -> BTreeMap<Algorithm, std::result::Result<Vec<u8>, String>> {
    let mut out = BTreeMap::new();
    let train_all = split.train();
    let train_rows = d.matrix_of(&train_all);
    let train_labels = d.labels_of(&train_all);
    let test_rows = d.matrix_of(&split.test);

    if algorithms.iter().any(Algorithm::uses_gaussian) {
        let g1 = d.matrix_of(&split.train_g1);
        let g2 = d.matrix_of(&split.train_g2);
        match fit_gaussian(&g1, &g2) {
            Ok(model) => {
                let labels = model.classify_batch(&test_rows);
                for algo in algorithms.iter().filter(|a| a.uses_gaussian()) {
                    let picked = match algo {
                        Algorithm::Ld => labels.ld.clone(),
                        Algorithm::Qd => labels.qd.clone(),
                        Algorithm::Dds1 => labels.dds1.clone(),
                        Algorithm::Dds2 => labels.dds2.clone(),
                        _ => unreachable!(),
                    };
                    out.insert(*algo, Ok(picked));
                }
            }
            Err(e) => {
                for algo in algorithms.iter().filter(|a| a.uses_gaussian()) {
                    out.insert(*algo, Err(e.to_string()));
                }
            }
        }
    }

    let cutoff_predict = |model: &dyn ProbModel| -> std::result::Result<Vec<u8>, String> {
        let cutoff = split.training_prevalence().map_err(|e| e.to_string())?;
        Ok((0..test_rows.rows())
            .map(|i| u8::from(model.predict_proba(test_rows.row(i)) >= cutoff))
            .collect())
    };

    for algo in algorithms {
        match algo {
            Algorithm::Logit => {
                let labels = fit_logistic(&train_rows, &train_labels)
                    .map_err(|e| e.to_string())
                    .and_then(|m| cutoff_predict(&m));
                out.insert(*algo, labels);
            }
            Algorithm::Rf => {
                let mut rng = stream(master_seed, Purpose::Forest, sim);
                let labels = fit_forest(
                    &train_rows,
                    &train_labels,
                    DEFAULT_TREES,
                    default_mtry(train_rows.cols()),
                    &mut rng,
                )
                .map_err(|e| e.to_string())
                .and_then(|m| cutoff_predict(&m));
                out.insert(*algo, labels);
            }
            Algorithm::Xgb => {
                let labels = fit_boost(&train_rows, &train_labels, BoostConfig::default())
                    .map_err(|e| e.to_string())
                    .map(|m| {
                        (0..test_rows.rows())
                            .map(|i| m.classify(test_rows.row(i)))
                            .collect()
                    });
                out.insert(*algo, labels);
            }
            Algorithm::Svm => {
                let labels = fit_svm(&train_rows, &train_labels, SvmConfig::default())
                    .map_err(|e| e.to_string())
                    .map(|m| {
                        (0..test_rows.rows())
                            .map(|i| m.classify(test_rows.row(i)))
                            .collect()
                    });
                out.insert(*algo, labels);
            }
            _ => {} // gaussian family handled above
        }
    }
    out
}

/// Run the experiment: identical splits per simulation across algorithms,
/// means aggregated per algorithm.
pub fn run(d: &Dataset, spec: &ExperimentSpec) -> Result<ExperimentResult> {
    spec.validate()?;
    let data = spec.sex.apply(d);
    let data = match &spec.vars {
        Some(vars) => data.project(vars)?,
        None => data,
    };
    let fingerprint = data.fingerprint();

    type SimOutcome = BTreeMap<Algorithm, std::result::Result<PerformanceMatrix, String>>;
    let per_sim: Vec<(usize, std::result::Result<SimOutcome, String>)> = (0..spec.n_sims)
        .into_par_iter()
        .map(|k| {
            let mut split_rng = stream(spec.master_seed, Purpose::Split, k as u64);
            let split = match make_split(&data, spec.scenario, spec.tau, &mut split_rng) {
                Ok(s) => s,
                Err(e) => return (k, Err(e.to_string())),
            };
            let predictions =
                classify_split(&data, &split, &spec.algorithms, spec.master_seed, k as u64);
            let actual = data.labels_of(&split.test);
            let matrices: SimOutcome = predictions
                .into_iter()
                .map(|(algo, r)| {
                    let m = r.and_then(|predicted| {
                        confusion(&actual, &predicted)
                            .and_then(performance)
                            .map_err(|e| e.to_string())
                    });
                    (algo, m)
                })
                .collect();
            (k, Ok(matrices))
        })
        .collect();

    let mut collected: BTreeMap<Algorithm, Vec<PerformanceMatrix>> = BTreeMap::new();
    let mut failures: BTreeMap<Algorithm, Vec<(usize, String)>> = BTreeMap::new();
    for algo in &spec.algorithms {
        collected.insert(*algo, Vec::new());
        failures.insert(*algo, Vec::new());
    }
    for (k, sim) in per_sim {
        match sim {
            Ok(per_algo) => {
                for (algo, matrix) in per_algo {
                    match matrix {
                        Ok(m) => collected.get_mut(&algo).unwrap().push(m),
                        Err(e) => failures.get_mut(&algo).unwrap().push((k, e)),
                    }
                }
            }
            Err(e) => {
                // the split itself failed: every algorithm loses this sim
                for algo in &spec.algorithms {
                    failures.get_mut(algo).unwrap().push((k, e.clone()));
                }
            }
        }
    }

    let ceiling = spec.n_sims / 10;
    let mut means = BTreeMap::new();
    for algo in &spec.algorithms {
        let lost = failures[algo].len();
        if lost > ceiling {
            return Err(Error::TooManyFailures {
                algorithm: algo.name().into(),
                failed: lost,
                total: spec.n_sims,
            });
        }
        means.insert(*algo, aggregate(&collected[algo])?);
    }

    Ok(ExperimentResult {
        means,
        failures,
        dataset_fingerprint: fingerprint,
        spec: spec.clone(),
    })
}

/// One row of the training-ratio study.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RatioPoint {
    pub algorithm: Algorithm,
    pub scenario: Scenario,
    pub tau: f64,
    pub mean: MeanPerformance,
}

/// Re-run the experiment across a list of training ratios.
pub fn ratio_study(d: &Dataset, spec: &ExperimentSpec, taus: &[f64]) -> Result<Vec<RatioPoint>> {
    let mut out = Vec::new();
    for &tau in taus {
        let point_spec = ExperimentSpec { tau, ..spec.clone() };
        let result = run(d, &point_spec)?;
        for (algorithm, mean) in result.means {
            out.push(RatioPoint {
                algorithm,
                scenario: spec.scenario,
                tau,
                mean,
            });
        }
    }
    Ok(out)
}

/// Wald significance counts over simulations: `counts[alpha][coef]` is how
/// often that coefficient (intercept first) was flagged.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SignificanceTable {
    pub alphas: Vec<f64>,
    pub counts: Vec<Vec<usize>>,
    pub unconverged: usize,
    pub n_sims: usize,
}

pub fn significance_study(
    d: &Dataset,
    scenario: Scenario,
    tau: f64,
    alphas: &[f64],
    n_sims: usize,
    master_seed: u64,
) -> Result<SignificanceTable> {
    let p = d.p();
    let sims: Vec<std::result::Result<Vec<Vec<bool>>, String>> = (0..n_sims)
        .into_par_iter()
        .map(|k| {
            let mut split_rng = stream(master_seed, Purpose::Split, k as u64);
            let split =
                make_split(d, scenario, tau, &mut split_rng).map_err(|e| e.to_string())?;
            let train = split.train();
            let model = fit_logistic(&d.matrix_of(&train), &d.labels_of(&train))
                .map_err(|e| e.to_string())?;
            if !model.converged {
                return Err("unconverged".into());
            }
            Ok(alphas
                .iter()
                .map(|&a| wald_significance(&model, a).significant)
                .collect())
        })
        .collect();

    let mut counts = vec![vec![0usize; p + 1]; alphas.len()];
    let mut unconverged = 0;
    for sim in sims {
        match sim {
            Ok(flag_sets) => {
                for (row, flags) in counts.iter_mut().zip(flag_sets) {
                    for (slot, hit) in row.iter_mut().zip(flags) {
                        *slot += usize::from(hit);
                    }
                }
            }
            Err(_) => unconverged += 1,
        }
    }
    Ok(SignificanceTable {
        alphas: alphas.to_vec(),
        counts,
        unconverged,
        n_sims,
    })
}

/// Mean true-positive counts for logistic classifiers over several
/// variable subsets, paired on identical splits.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VariantStudy {
    pub variable_sets: Vec<Vec<usize>>,
    pub mean_true_pos: Vec<f64>,
    pub n_sims: usize,
    pub failures: usize,
}

/// The study's three logistic variants: all seven variables, (1,3,7), and
/// (1,2,3,7).
pub const LOGISTIC_VARIANTS: [&[usize]; 3] =
    [&[1, 2, 3, 4, 5, 6, 7], &[1, 3, 7], &[1, 2, 3, 7]];

pub fn logistic_variants_study(
    d: &Dataset,
    scenario: Scenario,
    tau: f64,
    variable_sets: &[Vec<usize>],
    n_sims: usize,
    master_seed: u64,
) -> Result<VariantStudy> {
    let projections: Vec<Dataset> = variable_sets
        .iter()
        .map(|vars| d.project(vars))
        .collect::<Result<_>>()?;

    let sims: Vec<std::result::Result<Vec<f64>, String>> = (0..n_sims)
        .into_par_iter()
        .map(|k| {
            // identical split across the variants: split depends only on
            // labels and the stream, not on feature columns
            let mut split_rng = stream(master_seed, Purpose::Split, k as u64);
            let split =
                make_split(d, scenario, tau, &mut split_rng).map_err(|e| e.to_string())?;
            let cutoff = split.training_prevalence().map_err(|e| e.to_string())?;
            let train = split.train();
            let mut tps = Vec::with_capacity(projections.len());
            for proj in &projections {
                let model = fit_logistic(&proj.matrix_of(&train), &proj.labels_of(&train))
                    .map_err(|e| e.to_string())?;
                let tp = split
                    .test
                    .iter()
                    .filter(|&&i| {
                        proj.label(i) == 1 && model.predict_proba(proj.feature_row(i)) >= cutoff
                    })
                    .count();
                tps.push(tp as f64);
            }
            Ok(tps)
        })
        .collect();

    let mut sums = vec![0.0; variable_sets.len()];
    let mut ok = 0usize;
    let mut failures = 0usize;
    for sim in sims {
        match sim {
            Ok(tps) => {
                ok += 1;
                for (s, tp) in sums.iter_mut().zip(tps) {
                    *s += tp;
                }
            }
            Err(_) => failures += 1,
        }
    }
    if ok == 0 {
        return Err(Error::EmptyAggregate);
    }
    Ok(VariantStudy {
        variable_sets: variable_sets.to_vec(),
        mean_true_pos: sums.into_iter().map(|s| s / ok as f64).collect(),
        n_sims,
        failures,
    })
}
