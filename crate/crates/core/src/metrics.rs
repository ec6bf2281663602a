//! The Classification Performance Matrix: confusion counts plus the seven
//! derived rates, and their aggregation over simulations.
//!
//! Rates with a zero denominator are `None`, never a silent zero. Counts are
//! stored as `f64` so that per-simulation integer counts and across-simulation
//! means share one representation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub true_pos: f64,
    pub false_pos: f64,
    pub false_neg: f64,
    pub true_neg: f64,
}

impl ConfusionCounts {
    pub fn total(&self) -> f64 {
        self.true_pos + self.false_pos + self.false_neg + self.true_neg
    }

    /// Actual positives among the tested cases.
    pub fn positives(&self) -> f64 {
        self.true_pos + self.false_neg
    }

    /// Actual negatives among the tested cases.
    pub fn negatives(&self) -> f64 {
        self.false_pos + self.true_neg
    }
}

/// Confusion counts from paired binary label vectors.
pub fn confusion(actual: &[u8], predicted: &[u8]) -> Result<ConfusionCounts> {
    if actual.len() != predicted.len() {
        return Err(Error::LengthMismatch {
            predicted: predicted.len(),
            actual: actual.len(),
        });
    }
    if actual.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut c = ConfusionCounts {
        true_pos: 0.0,
        false_pos: 0.0,
        false_neg: 0.0,
        true_neg: 0.0,
    };
    for (&a, &p) in actual.iter().zip(predicted) {
        match (a != 0, p != 0) {
            (true, true) => c.true_pos += 1.0,
            (false, true) => c.false_pos += 1.0,
            (true, false) => c.false_neg += 1.0,
            (false, false) => c.true_neg += 1.0,
        }
    }
    Ok(c)
}

/// Confusion counts and the seven derived metrics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerformanceMatrix {
    pub counts: ConfusionCounts,
    /// (TP+TN)/total
    pub acc: Option<f64>,
    /// TP/(TP+FN), sensitivity
    pub tpr: Option<f64>,
    /// TN/(FP+TN), specificity
    pub tnr: Option<f64>,
    /// TP/(TP+FP), positive precision
    pub pprec: Option<f64>,
    /// TN/(FN+TN), negative precision
    pub nprec: Option<f64>,
    /// (TP+FN)/total, observed prevalence
    pub oprev: Option<f64>,
    /// (TP+FP)/total, expected prevalence
    pub eprev: Option<f64>,
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    (den > 0.0).then(|| num / den)
}

/// Derive the seven metrics from confusion counts.
pub fn performance(c: ConfusionCounts) -> Result<PerformanceMatrix> {
    let total = c.total();
    if total < 1.0 {
        return Err(Error::EmptyDataset);
    }
    Ok(PerformanceMatrix {
        counts: c,
        acc: ratio(c.true_pos + c.true_neg, total),
        tpr: ratio(c.true_pos, c.positives()),
        tnr: ratio(c.true_neg, c.negatives()),
        pprec: ratio(c.true_pos, c.true_pos + c.false_pos),
        nprec: ratio(c.true_neg, c.false_neg + c.true_neg),
        oprev: ratio(c.positives(), total),
        eprev: ratio(c.true_pos + c.false_pos, total),
    })
}

pub const METRIC_NAMES: [&str; 7] = ["acc", "tpr", "tnr", "pprec", "nprec", "oprev", "eprev"];

impl PerformanceMatrix {
    /// Metric by name, in `METRIC_NAMES` order.
    pub fn metric(&self, name: &str) -> Option<f64> {
        match name {
            "acc" => self.acc,
            "tpr" => self.tpr,
            "tnr" => self.tnr,
            "pprec" => self.pprec,
            "nprec" => self.nprec,
            "oprev" => self.oprev,
            "eprev" => self.eprev,
            _ => None,
        }
    }
}

/// Elementwise mean over simulations, with undefined entries excluded
/// per metric.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeanPerformance {
    pub mean: PerformanceMatrix,
    /// Number of matrices aggregated.
    pub n: usize,
    /// Per-metric count of matrices whose entry was undefined, keyed in
    /// `METRIC_NAMES` order.
    pub excluded: [usize; 7],
}

/// Average matrices from one scenario. All inputs must share the grand
/// total (a scenario fixes the test composition).
pub fn aggregate(matrices: &[PerformanceMatrix]) -> Result<MeanPerformance> {
    let first = matrices.first().ok_or(Error::EmptyAggregate)?;
    let total = first.counts.total();
    for m in matrices {
        if (m.counts.total() - total).abs() > 1e-9 {
            return Err(Error::BadSpec {
                reason: format!(
                    "aggregate saw grand totals {} and {}",
                    total,
                    m.counts.total()
                ),
            });
        }
    }
    let n = matrices.len() as f64;
    let counts = ConfusionCounts {
        true_pos: matrices.iter().map(|m| m.counts.true_pos).sum::<f64>() / n,
        false_pos: matrices.iter().map(|m| m.counts.false_pos).sum::<f64>() / n,
        false_neg: matrices.iter().map(|m| m.counts.false_neg).sum::<f64>() / n,
        true_neg: matrices.iter().map(|m| m.counts.true_neg).sum::<f64>() / n,
    };

    let mut means = [None; 7];
    let mut excluded = [0usize; 7];
    for (slot, (mean, excl)) in METRIC_NAMES
        .iter()
        .zip(means.iter_mut().zip(excluded.iter_mut()))
    {
        let defined: Vec<f64> = matrices.iter().filter_map(|m| m.metric(slot)).collect();
        *excl = matrices.len() - defined.len();
        if !defined.is_empty() {
            *mean = Some(defined.iter().sum::<f64>() / defined.len() as f64);
        }
    }

    Ok(MeanPerformance {
        mean: PerformanceMatrix {
            counts,
            acc: means[0],
            tpr: means[1],
            tnr: means[2],
            pprec: means[3],
            nprec: means[4],
            oprev: means[5],
            eprev: means[6],
        },
        n: matrices.len(),
        excluded,
    })
}

fn pct(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{:.2}", 100.0 * x),
        None => "undef".into(),
    }
}

impl PerformanceMatrix {
    /// Aligned text table mirroring the study's matrix layout: predicted
    /// columns, actual rows, total and true-rate margins, precision row.
    pub fn render_table(&self) -> String {
        let c = self.counts;
        let mut out = String::new();
        let rows = [
            ("".to_string(), "".to_string(), "Predicted".to_string(), "".to_string(), "".to_string(), "".to_string()),
            ("".into(), "".into(), "Positive".into(), "Negative".into(), "Total".into(), "True Rate %".into()),
            (
                "Actual".into(),
                "Positive".into(),
                format!("{:.2}", c.true_pos),
                format!("{:.2}", c.false_neg),
                format!("{:.2}", c.positives()),
                pct(self.tpr),
            ),
            (
                "".into(),
                "Negative".into(),
                format!("{:.2}", c.false_pos),
                format!("{:.2}", c.true_neg),
                format!("{:.2}", c.negatives()),
                pct(self.tnr),
            ),
            (
                "".into(),
                "Total".into(),
                format!("{:.2}", c.true_pos + c.false_pos),
                format!("{:.2}", c.false_neg + c.true_neg),
                format!("{:.2}", c.total()),
                pct(self.oprev),
            ),
            (
                "".into(),
                "Precision %".into(),
                pct(self.pprec),
                pct(self.nprec),
                pct(self.eprev),
                pct(self.acc),
            ),
        ];
        for (a, b, c1, c2, c3, c4) in rows {
            out.push_str(&format!(
                "{a:<8}{b:<13}{c1:>12}{c2:>12}{c3:>12}{c4:>14}\n"
            ));
        }
        out
    }

    /// CSV cells in a fixed order; `counts` first, then the seven metrics.
    pub fn csv_cells(&self) -> Vec<String> {
        let c = self.counts;
        let mut cells = vec![
            format!("{}", c.true_pos),
            format!("{}", c.false_pos),
            format!("{}", c.false_neg),
            format!("{}", c.true_neg),
        ];
        for name in METRIC_NAMES {
            cells.push(match self.metric(name) {
                Some(v) => format!("{v}"),
                None => String::new(),
            });
        }
        cells
    }

    pub fn csv_header() -> Vec<String> {
        let mut h = vec!["tp".into(), "fp".into(), "fn".into(), "tn".into()];
        h.extend(METRIC_NAMES.iter().map(|s| s.to_string()));
        h
    }
}
