//! Gradient-boosted trees with logistic loss and second-order leaf weights.
//!
//! Each round fits a depth-limited regression tree to the gradient/hessian
//! pairs of the current log-odds, with leaf weight -G/(H + lambda). The
//! positive class wins when the predicted probability exceeds one half
//! (strict; a tie classifies negative).

use crate::error::{Error, Result};
use crate::numcore::Matrix;

#[derive(Debug, Clone, Copy)]
pub struct BoostConfig {
    pub n_rounds: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
    pub lambda: f64,
    pub min_child_weight: f64,
}

impl Default for BoostConfig {
    fn default() -> Self {
        BoostConfig {
            n_rounds: 100,
            learning_rate: 0.3,
            max_depth: 3,
            lambda: 1.0,
            min_child_weight: 1.0,
        }
    }
}

#[derive(Debug, Clone)]
enum Node {
    Leaf { weight: f64 },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone)]
pub struct RegressionTree {
    nodes: Vec<Node>,
}

impl RegressionTree {
    fn output(&self, x: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { weight } => return *weight,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if x[*feature] <= *threshold { *left } else { *right },
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct BoostModel {
    pub trees: Vec<RegressionTree>,
    pub config: BoostConfig,
    /// Initial log-odds, logit of the training positive rate.
    pub base_score: f64,
    /// Training log-loss after each round, base first.
    pub train_loss: Vec<f64>,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn log_loss(labels: &[u8], log_odds: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (&y, &z) in labels.iter().zip(log_odds) {
        let log1p_exp = if z > 0.0 { z + (-z).exp().ln_1p() } else { z.exp().ln_1p() };
        acc += log1p_exp - f64::from(y) * z;
    }
    acc / labels.len() as f64
}

struct GradientTreeBuilder<'a> {
    rows: &'a Matrix,
    grad: &'a [f64],
    hess: &'a [f64],
    config: BoostConfig,
    nodes: Vec<Node>,
}

impl<'a> GradientTreeBuilder<'a> {
    fn leaf_weight(&self, g: f64, h: f64) -> f64 {
        -g / (h + self.config.lambda)
    }

    /// Gain of splitting (g, h) into the best (left, right) on one feature.
    fn best_split_on(&self, indices: &[usize], feature: usize) -> Option<(f64, f64)> {
        let lambda = self.config.lambda;
        let mut order: Vec<usize> = indices.to_vec();
        order.sort_by(|&a, &b| self.rows.row(a)[feature].total_cmp(&self.rows.row(b)[feature]));

        let total_g: f64 = indices.iter().map(|&i| self.grad[i]).sum();
        let total_h: f64 = indices.iter().map(|&i| self.hess[i]).sum();
        let parent = total_g * total_g / (total_h + lambda);

        let mut left_g = 0.0;
        let mut left_h = 0.0;
        let mut best: Option<(f64, f64)> = None;
        for w in 0..order.len() - 1 {
            left_g += self.grad[order[w]];
            left_h += self.hess[order[w]];
            let (xv, xn) = (
                self.rows.row(order[w])[feature],
                self.rows.row(order[w + 1])[feature],
            );
            if xv == xn {
                continue;
            }
            let right_g = total_g - left_g;
            let right_h = total_h - left_h;
            if left_h < self.config.min_child_weight || right_h < self.config.min_child_weight {
                continue;
            }
            let gain = 0.5
                * (left_g * left_g / (left_h + lambda) + right_g * right_g / (right_h + lambda)
                    - parent);
            if gain > 0.0 && best.is_none_or(|(_, cur)| gain > cur) {
                best = Some((0.5 * (xv + xn), gain));
            }
        }
        best
    }

    fn grow(&mut self, indices: Vec<usize>, depth: usize) -> usize {
        let g: f64 = indices.iter().map(|&i| self.grad[i]).sum();
        let h: f64 = indices.iter().map(|&i| self.hess[i]).sum();
        if depth >= self.config.max_depth || indices.len() < 2 {
            let weight = self.leaf_weight(g, h);
            self.nodes.push(Node::Leaf { weight });
            return self.nodes.len() - 1;
        }
        let mut best: Option<(usize, f64, f64)> = None;
        for feature in 0..self.rows.cols() {
            if let Some((threshold, gain)) = self.best_split_on(&indices, feature) {
                if best.is_none_or(|(_, _, cur)| gain > cur) {
                    best = Some((feature, threshold, gain));
                }
            }
        }
        let Some((feature, threshold, _)) = best else {
            let weight = self.leaf_weight(g, h);
            self.nodes.push(Node::Leaf { weight });
            return self.nodes.len() - 1;
        };
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = indices
            .into_iter()
            .partition(|&i| self.rows.row(i)[feature] <= threshold);
        let at = self.nodes.len();
        self.nodes.push(Node::Split {
            feature,
            threshold,
            left: 0,
            right: 0,
        });
        let left = self.grow(left_rows, depth + 1);
        let right = self.grow(right_rows, depth + 1);
        if let Node::Split { left: l, right: r, .. } = &mut self.nodes[at] {
            *l = left;
            *r = right;
        }
        at
    }
}

/// Fit an additive log-odds model. Deterministic: exact greedy splits, no
/// subsampling.
pub fn fit_boost(rows: &Matrix, labels: &[u8], config: BoostConfig) -> Result<BoostModel> {
    let n = rows.rows();
    assert_eq!(n, labels.len());
    let pos: f64 = labels.iter().map(|&l| f64::from(l)).sum();
    if pos == 0.0 || pos == n as f64 {
        return Err(Error::SingleClass);
    }
    let prior = pos / n as f64;
    let base_score = (prior / (1.0 - prior)).ln();

    let mut log_odds = vec![base_score; n];
    let mut trees = Vec::with_capacity(config.n_rounds);
    let mut train_loss = vec![log_loss(labels, &log_odds)];
    let mut grad = vec![0.0; n];
    let mut hess = vec![0.0; n];
    for _ in 0..config.n_rounds {
        for i in 0..n {
            let p = sigmoid(log_odds[i]);
            grad[i] = p - f64::from(labels[i]);
            hess[i] = p * (1.0 - p);
        }
        let mut builder = GradientTreeBuilder {
            rows,
            grad: &grad,
            hess: &hess,
            config,
            nodes: Vec::new(),
        };
        builder.grow((0..n).collect(), 0);
        let tree = RegressionTree {
            nodes: builder.nodes,
        };
        for i in 0..n {
            log_odds[i] += config.learning_rate * tree.output(rows.row(i));
        }
        trees.push(tree);
        train_loss.push(log_loss(labels, &log_odds));
    }

    Ok(BoostModel {
        trees,
        config,
        base_score,
        train_loss,
    })
}

impl BoostModel {
    /// (P(positive), P(negative)).
    pub fn predict_proba(&self, x: &[f64]) -> (f64, f64) {
        let z = self.base_score
            + self
                .trees
                .iter()
                .map(|t| self.config.learning_rate * t.output(x))
                .sum::<f64>();
        let p = sigmoid(z);
        (p, 1.0 - p)
    }

    /// Positive iff P(positive) strictly exceeds P(negative).
    pub fn classify(&self, x: &[f64]) -> u8 {
        let (p_pos, p_neg) = self.predict_proba(x);
        u8::from(p_pos > p_neg)
    }
}
