//! Classifier-cutoff sweeps and the equilibrium cutoff estimate.
//!
//! Sweeping the cutoff over a 1% grid yields four count curves (TP, FP,
//! FN, TN). The equilibrium cutoff is the x-coordinate of the centroid of
//! the four curve-pair intersections TN-TP, TP-FN, FN-FP and TN-FP,
//! located by linear interpolation between grid points. Sampling over many
//! simulations averages the per-simulation intersection points first and
//! takes the centroid of those averages.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::regressors::{self, ProbModel};
use crate::rng::{stream, Purpose};
use crate::splitter::{make_split, Scenario};

/// Grid resolution: 0.00, 0.01, ..., 1.00.
pub const GRID_STEPS: usize = 101;

/// The four count curves over the cutoff grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CutoffCurves {
    pub grid: Vec<f64>,
    pub tp: Vec<f64>,
    pub fp: Vec<f64>,
    pub fn_: Vec<f64>,
    pub tn: Vec<f64>,
}

/// Which probability model the sweep drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Logistic,
    Forest,
}

impl std::str::FromStr for ModelKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "logistic" | "logit" => Ok(ModelKind::Logistic),
            "forest" | "rf" => Ok(ModelKind::Forest),
            other => Err(format!("unknown model {other:?} (expected logistic or forest)")),
        }
    }
}

/// Sweep the cutoff over the grid; at cutoff c a case is positive when its
/// predicted probability is >= c.
pub fn sweep<M: ProbModel>(model: &M, test_rows: &[&[f64]], test_labels: &[u8]) -> CutoffCurves {
    let mut pos_probs: Vec<f64> = Vec::new();
    let mut neg_probs: Vec<f64> = Vec::new();
    for (x, &y) in test_rows.iter().zip(test_labels) {
        let p = model.predict_proba(x);
        if y == 1 {
            pos_probs.push(p);
        } else {
            neg_probs.push(p);
        }
    }
    pos_probs.sort_by(f64::total_cmp);
    neg_probs.sort_by(f64::total_cmp);
    let count_ge = |sorted: &[f64], c: f64| -> f64 {
        let at = sorted.partition_point(|&p| p < c);
        (sorted.len() - at) as f64
    };

    let mut curves = CutoffCurves {
        grid: Vec::with_capacity(GRID_STEPS),
        tp: Vec::with_capacity(GRID_STEPS),
        fp: Vec::with_capacity(GRID_STEPS),
        fn_: Vec::with_capacity(GRID_STEPS),
        tn: Vec::with_capacity(GRID_STEPS),
    };
    let (n_pos, n_neg) = (pos_probs.len() as f64, neg_probs.len() as f64);
    for step in 0..GRID_STEPS {
        let c = step as f64 / 100.0;
        let tp = count_ge(&pos_probs, c);
        let fp = count_ge(&neg_probs, c);
        curves.grid.push(c);
        curves.tp.push(tp);
        curves.fp.push(fp);
        curves.fn_.push(n_pos - tp);
        curves.tn.push(n_neg - fp);
    }
    curves
}

/// The four curve pairs whose crossings are averaged, in report order.
pub const CURVE_PAIRS: [(&str, &str); 4] =
    [("tn", "tp"), ("tp", "fn"), ("fn", "fp"), ("tn", "fp")];

/// Intersection estimate for one simulation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EquilibriumEstimate {
    /// Interpolated (x, y) per curve pair; None when the curves never cross.
    pub pair_points: [Option<(f64, f64)>; 4],
    pub centroid: (f64, f64),
    /// x-coordinate of the centroid.
    pub equilibrium_cutoff: f64,
}

fn curve_of<'c>(curves: &'c CutoffCurves, name: &str) -> &'c [f64] {
    match name {
        "tp" => &curves.tp,
        "fp" => &curves.fp,
        "fn" => &curves.fn_,
        "tn" => &curves.tn,
        _ => unreachable!("unknown curve {name}"),
    }
}

/// Crossings of (a - b) over the grid, linearly interpolated. Multiple
/// crossings reduce to the median x.
fn pair_intersection(grid: &[f64], a: &[f64], b: &[f64]) -> Option<(f64, f64)> {
    let mut crossings: Vec<(f64, f64)> = Vec::new();
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    for w in 0..grid.len() - 1 {
        let (d0, d1) = (diff[w], diff[w + 1]);
        if d0 == 0.0 {
            crossings.push((grid[w], a[w]));
        } else if d0 * d1 < 0.0 {
            let t = d0 / (d0 - d1);
            let x = grid[w] + t * (grid[w + 1] - grid[w]);
            let y = a[w] + t * (a[w + 1] - a[w]);
            crossings.push((x, y));
        }
    }
    if diff[grid.len() - 1] == 0.0 {
        crossings.push((grid[grid.len() - 1], a[grid.len() - 1]));
    }
    if crossings.is_empty() {
        return None;
    }
    crossings.sort_by(|p, q| p.0.total_cmp(&q.0));
    Some(crossings[crossings.len() / 2])
}

/// Locate the four pair intersections and their centroid.
pub fn intersections(curves: &CutoffCurves) -> Result<EquilibriumEstimate> {
    let mut pair_points = [None; 4];
    for (slot, (a, b)) in pair_points.iter_mut().zip(CURVE_PAIRS) {
        *slot = pair_intersection(&curves.grid, curve_of(curves, a), curve_of(curves, b));
    }
    let found: Vec<(f64, f64)> = pair_points.iter().flatten().copied().collect();
    if found.is_empty() {
        return Err(Error::NoIntersections);
    }
    let centroid = (
        found.iter().map(|p| p.0).sum::<f64>() / found.len() as f64,
        found.iter().map(|p| p.1).sum::<f64>() / found.len() as f64,
    );
    Ok(EquilibriumEstimate {
        pair_points,
        centroid,
        equilibrium_cutoff: centroid.0,
    })
}

/// Sampling-distribution estimate over many simulations.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EquilibriumSampling {
    /// Mean of the per-simulation intersection points, per pair (the
    /// figure's yellow dots).
    pub mean_pair_points: [Option<(f64, f64)>; 4],
    /// Centroid of the mean pair points (the black dot).
    pub centroid: (f64, f64),
    pub equilibrium_cutoff: f64,
    pub per_sim: Vec<EquilibriumEstimate>,
    /// Simulation indices that failed, with the failure text.
    pub failures: Vec<(usize, String)>,
}

/// Per-simulation record kept for curve export.
#[derive(Debug, Clone)]
pub struct SimCurves {
    pub sim: usize,
    pub curves: CutoffCurves,
}

/// Split, fit, sweep and intersect `n_sims` times.
///
/// Returns the sampling estimate and, when `keep_curves` is set, every
/// simulation's curves for export.
pub fn equilibrium_sampling(
    d: &Dataset,
    scenario: Scenario,
    tau: f64,
    kind: ModelKind,
    n_sims: usize,
    master_seed: u64,
    keep_curves: bool,
) -> Result<(EquilibriumSampling, Vec<SimCurves>)> {
    let sims: Vec<(usize, Result<(EquilibriumEstimate, Option<CutoffCurves>)>)> = (0..n_sims)
        .into_par_iter()
        .map(|k| {
            let run = || {
                let mut split_rng = stream(master_seed, Purpose::Split, k as u64);
                let split = make_split(d, scenario, tau, &mut split_rng)?;
                let train = split.train();
                let train_rows = d.matrix_of(&train);
                let train_labels = d.labels_of(&train);
                let test_rows: Vec<&[f64]> =
                    split.test.iter().map(|&i| d.feature_row(i)).collect();
                let test_labels = d.labels_of(&split.test);

                let curves = match kind {
                    ModelKind::Logistic => {
                        let model = regressors::fit_logistic(&train_rows, &train_labels)?;
                        sweep(&model, &test_rows, &test_labels)
                    }
                    ModelKind::Forest => {
                        let mut rng = stream(master_seed, Purpose::Forest, k as u64);
                        let model = regressors::fit_forest(
                            &train_rows,
                            &train_labels,
                            regressors::DEFAULT_TREES,
                            regressors::default_mtry(train_rows.cols()),
                            &mut rng,
                        )?;
                        sweep(&model, &test_rows, &test_labels)
                    }
                };
                let estimate = intersections(&curves)?;
                Ok((estimate, keep_curves.then_some(curves)))
            };
            (k, run())
        })
        .collect();

    let mut per_sim = Vec::new();
    let mut failures = Vec::new();
    let mut kept = Vec::new();
    for (k, outcome) in sims {
        match outcome {
            Ok((estimate, curves)) => {
                if let Some(c) = curves {
                    kept.push(SimCurves { sim: k, curves: c });
                }
                per_sim.push(estimate);
            }
            Err(e) => failures.push((k, e.to_string())),
        }
    }
    if per_sim.is_empty() {
        return Err(Error::NoIntersections);
    }

    let mut mean_pair_points = [None; 4];
    for (idx, slot) in mean_pair_points.iter_mut().enumerate() {
        let points: Vec<(f64, f64)> =
            per_sim.iter().filter_map(|e| e.pair_points[idx]).collect();
        if !points.is_empty() {
            *slot = Some((
                points.iter().map(|p| p.0).sum::<f64>() / points.len() as f64,
                points.iter().map(|p| p.1).sum::<f64>() / points.len() as f64,
            ));
        }
    }
    let found: Vec<(f64, f64)> = mean_pair_points.iter().flatten().copied().collect();
    let centroid = (
        found.iter().map(|p| p.0).sum::<f64>() / found.len() as f64,
        found.iter().map(|p| p.1).sum::<f64>() / found.len() as f64,
    );

    Ok((
        EquilibriumSampling {
            mean_pair_points,
            centroid,
            equilibrium_cutoff: centroid.0,
            per_sim,
            failures,
        },
        kept,
    ))
}
