//! Optimal variable-hierarchy search.
//!
//! Exhaustive mode scores every nonempty variable subset (2^p - 1 runs);
//! greedy mode exploits the nesting observed in this data: keep the best
//! singleton, then repeatedly try every one-variable extension of the
//! current prefix and extend only on strict improvement, for at most
//! p(p+1)/2 scored subsets. Every subset reuses the same master seed, so
//! all scores are paired on identical split sequences.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::harness::{run, Algorithm, ExperimentSpec, SexFilter};
use crate::splitter::Scenario;

const MAX_EXHAUSTIVE_P: usize = 15;

/// Performance metric a search optimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Tpr,
    Tnr,
    Acc,
    PPrec,
}

impl Metric {
    pub fn name(&self) -> &'static str {
        match self {
            Metric::Tpr => "tpr",
            Metric::Tnr => "tnr",
            Metric::Acc => "acc",
            Metric::PPrec => "pprec",
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "tpr" => Ok(Metric::Tpr),
            "tnr" => Ok(Metric::Tnr),
            "acc" => Ok(Metric::Acc),
            "pprec" => Ok(Metric::PPrec),
            other => Err(format!("unknown metric {other:?}")),
        }
    }
}

/// Mean metric of one variable subset under paired simulation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubsetScore {
    /// Ascending 1-based variable indices.
    pub vars: Vec<usize>,
    pub mean_metric: f64,
    pub n_sims: usize,
}

/// Search parameters shared by both modes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchConfig {
    pub sex: SexFilter,
    pub scenario: Scenario,
    pub tau: f64,
    pub algorithm: Algorithm,
    pub metric: Metric,
    pub n_sims: usize,
    pub master_seed: u64,
}

/// Score one subset: project, run the paired harness, take the mean
/// metric. The same master seed is used for every subset, so scores are
/// comparable sim by sim.
pub fn score_subset(d: &Dataset, vars: &[usize], config: &SearchConfig) -> Result<SubsetScore> {
    let spec = ExperimentSpec {
        sex: config.sex,
        scenario: config.scenario,
        tau: config.tau,
        algorithms: vec![config.algorithm],
        vars: Some(vars.to_vec()),
        n_sims: config.n_sims,
        master_seed: config.master_seed,
    };
    let result = run(d, &spec)?;
    let mean = &result.means[&config.algorithm];
    let value = mean.mean.metric(config.metric.name()).ok_or(Error::BadSpec {
        reason: format!("metric {} undefined for subset {vars:?}", config.metric.name()),
    })?;
    let mut sorted = vars.to_vec();
    sorted.sort_unstable();
    Ok(SubsetScore {
        vars: sorted,
        mean_metric: value,
        n_sims: config.n_sims,
    })
}

/// Score all 2^p - 1 subsets, descending by mean metric; ties prefer the
/// smaller subset, then lexicographic order.
pub fn exhaustive_search(d: &Dataset, config: &SearchConfig) -> Result<Vec<SubsetScore>> {
    let base = config.sex.apply(d);
    let p = base.p();
    if p > MAX_EXHAUSTIVE_P {
        return Err(Error::SubsetSpaceTooLarge {
            p,
            max: MAX_EXHAUSTIVE_P,
        });
    }
    let all_vars = base.var_indices().to_vec();
    let mut scores = Vec::with_capacity((1usize << p) - 1);
    for mask in 1u32..(1 << p) {
        let vars: Vec<usize> = (0..p)
            .filter(|&b| mask & (1 << b) != 0)
            .map(|b| all_vars[b])
            .collect();
        scores.push(score_subset(d, &vars, config)?);
    }
    scores.sort_by(|a, b| {
        b.mean_metric
            .total_cmp(&a.mean_metric)
            .then(a.vars.len().cmp(&b.vars.len()))
            .then(a.vars.cmp(&b.vars))
    });
    Ok(scores)
}

/// Why a greedy search ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    NoImprovement,
    AllVariables,
}

/// Result of a greedy search: the joining order, the score after each
/// join, and how many subsets were evaluated.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HierarchyTrace {
    pub order: Vec<usize>,
    pub prefix_scores: Vec<f64>,
    pub evaluations: usize,
    pub stopped_because: StopReason,
    pub metric: Metric,
}

impl HierarchyTrace {
    /// Final variable set, ascending.
    pub fn final_set(&self) -> Vec<usize> {
        let mut v = self.order.clone();
        v.sort_unstable();
        v
    }
}

/// Greedy forward search with strict-improvement extension. Ties between
/// equal extensions resolve to the lowest variable index, and a tie with
/// the current score stops the search.
pub fn greedy_search(d: &Dataset, config: &SearchConfig) -> Result<HierarchyTrace> {
    let base = config.sex.apply(d);
    let all_vars = base.var_indices().to_vec();
    let p = all_vars.len();
    if p == 0 {
        return Err(Error::EmptySubset);
    }

    let mut order: Vec<usize> = Vec::new();
    let mut prefix_scores: Vec<f64> = Vec::new();
    let mut evaluations = 0usize;
    let mut remaining: Vec<usize> = all_vars;
    let mut current = f64::NEG_INFINITY;

    loop {
        let mut best: Option<(usize, f64)> = None;
        for &candidate in &remaining {
            let mut vars = order.clone();
            vars.push(candidate);
            let score = score_subset(d, &vars, config)?;
            evaluations += 1;
            let better = match best {
                None => true,
                // strict: equal extension scores keep the earlier (lower
                // index) candidate, since `remaining` is ascending
                Some((_, best_score)) => score.mean_metric > best_score,
            };
            if better {
                best = Some((candidate, score.mean_metric));
            }
        }
        let Some((variable, score)) = best else {
            return Ok(HierarchyTrace {
                order,
                prefix_scores,
                evaluations,
                stopped_because: StopReason::AllVariables,
                metric: config.metric,
            });
        };
        if score <= current {
            return Ok(HierarchyTrace {
                order,
                prefix_scores,
                evaluations,
                stopped_because: StopReason::NoImprovement,
                metric: config.metric,
            });
        }
        current = score;
        order.push(variable);
        prefix_scores.push(score);
        remaining.retain(|&v| v != variable);
        if remaining.is_empty() {
            return Ok(HierarchyTrace {
                order,
                prefix_scores,
                evaluations,
                stopped_because: StopReason::AllVariables,
                metric: config.metric,
            });
        }
    }
}

/// Greedy search on the true negative rate.
pub fn tnr_hierarchy(d: &Dataset, config: &SearchConfig) -> Result<HierarchyTrace> {
    let config = SearchConfig {
        metric: Metric::Tnr,
        ..config.clone()
    };
    greedy_search(d, &config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Dataset;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    /// p=3 dataset where only the first variable separates the groups.
    fn one_informative(seed: u64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut normal = move || -> f64 { StandardNormal.sample(&mut rng) };
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for i in 0..240 {
            let positive = i < 80;
            let signal = if positive { 2.2 } else { 0.0 };
            features.push(vec![signal + normal(), normal(), normal()]);
            labels.push(u8::from(positive));
        }
        Dataset::from_parts(features, labels, vec![None; 240], vec![1, 2, 3])
    }

    fn config(n_sims: usize, metric: Metric) -> SearchConfig {
        SearchConfig {
            sex: SexFilter::All,
            scenario: Scenario::EQ_EQ,
            tau: 0.7,
            algorithm: Algorithm::Dds1,
            metric,
            n_sims,
            master_seed: 31,
        }
    }

    #[test]
    fn informative_variable_tops_every_good_subset() {
        let d = one_informative(2);
        let ranked = exhaustive_search(&d, &config(20, Metric::Tpr)).unwrap();
        assert_eq!(ranked.len(), 7);
        // every subset containing variable 1 must outrank every subset
        // without it
        let worst_with: f64 = ranked
            .iter()
            .filter(|s| s.vars.contains(&1))
            .map(|s| s.mean_metric)
            .fold(f64::INFINITY, f64::min);
        let best_without: f64 = ranked
            .iter()
            .filter(|s| !s.vars.contains(&1))
            .map(|s| s.mean_metric)
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(worst_with > best_without);
        assert!(ranked[0].vars.contains(&1));
    }

    #[test]
    fn single_variable_dataset_searches_trivially() {
        let d = one_informative(3).project(&[1]).unwrap();
        let trace = greedy_search(&d, &config(10, Metric::Tpr)).unwrap();
        assert_eq!(trace.order, vec![1]);
        assert_eq!(trace.evaluations, 1);
        assert_eq!(trace.stopped_because, StopReason::AllVariables);
        let ranked = exhaustive_search(&d, &config(10, Metric::Tpr)).unwrap();
        assert_eq!(ranked.len(), 1);
    }

    #[test]
    fn greedy_trace_invariants() {
        let d = one_informative(5);
        let trace = greedy_search(&d, &config(20, Metric::Tpr)).unwrap();
        assert!(trace.evaluations <= 3 * (3 + 1) / 2);
        for w in trace.prefix_scores.windows(2) {
            assert!(w[1] > w[0], "prefix scores must strictly increase");
        }
        assert_eq!(trace.order[0], 1, "signal variable joins first");
        // rerun reproduces the identical trace
        let again = greedy_search(&d, &config(20, Metric::Tpr)).unwrap();
        assert_eq!(trace.order, again.order);
        assert_eq!(trace.prefix_scores, again.prefix_scores);
    }

    // Oracle: on paired seeds, each greedy prefix of length k maximizes the
    // metric among subsets of size k containing the previous prefix.
    #[test]
    fn greedy_prefix_matches_exhaustive_oracle() {
        let d = one_informative(7);
        let cfg = config(20, Metric::Tpr);
        let trace = greedy_search(&d, &cfg).unwrap();
        let ranked = exhaustive_search(&d, &cfg).unwrap();
        let score_of = |vars: &[usize]| -> f64 {
            let mut sorted = vars.to_vec();
            sorted.sort_unstable();
            ranked
                .iter()
                .find(|s| s.vars == sorted)
                .expect("subset missing from exhaustive ranking")
                .mean_metric
        };
        for k in 1..=trace.order.len() {
            let prefix = &trace.order[..k];
            let prev: Vec<usize> = trace.order[..k - 1].to_vec();
            let best_extension = ranked
                .iter()
                .filter(|s| s.vars.len() == k && prev.iter().all(|v| s.vars.contains(v)))
                .map(|s| s.mean_metric)
                .fold(f64::NEG_INFINITY, f64::max);
            assert!(
                score_of(prefix) >= best_extension - 1e-12,
                "prefix of length {k} is not the best extension"
            );
        }
    }

    #[test]
    fn tnr_route_is_greedy_with_tnr() {
        let d = one_informative(9);
        let via_helper = tnr_hierarchy(&d, &config(10, Metric::Tpr)).unwrap();
        let direct = greedy_search(&d, &config(10, Metric::Tnr)).unwrap();
        assert_eq!(via_helper.order, direct.order);
        assert_eq!(via_helper.metric, Metric::Tnr);
    }

    #[test]
    fn exhaustive_guards_subset_explosion() {
        let mut features = Vec::new();
        for i in 0..40 {
            features.push(vec![i as f64; 16]);
        }
        let labels: Vec<u8> = (0..40).map(|i| u8::from(i % 2 == 0)).collect();
        let d = Dataset::from_parts(features, labels, vec![None; 40], (1..=16).collect());
        assert!(matches!(
            exhaustive_search(&d, &config(2, Metric::Tpr)),
            Err(Error::SubsetSpaceTooLarge { p: 16, .. })
        ));
    }
}
