//! Random forest: bootstrap-aggregated CART trees with Gini splits.
//!
//! Each tree trains on a bootstrap resample, considers `mtry` randomly
//! chosen features per node, and grows until a node is pure or holds
//! fewer than `min_node_size` rows. A tree votes the strict-majority
//! class of the leaf it lands in; the forest probability is the fraction
//! of positive votes.

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::numcore::Matrix;
use crate::rng::Rng;

pub const DEFAULT_TREES: usize = 100;
pub const MIN_NODE_SIZE: usize = 5;

#[derive(Debug, Clone)]
enum Node {
    Leaf {
        /// Fraction of positive rows in the leaf.
        pos_fraction: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone)]
pub struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    fn leaf_fraction(&self, x: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { pos_fraction } => return *pos_fraction,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if x[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    /// Strict-majority vote; an evenly split leaf votes negative.
    fn vote(&self, x: &[f64]) -> u8 {
        u8::from(self.leaf_fraction(x) > 0.5)
    }
}

#[derive(Debug, Clone)]
pub struct ForestModel {
    pub trees: Vec<Tree>,
    pub mtry: usize,
    /// Set when the training data held a single class; every probability
    /// is then 0 or 1 regardless of input.
    pub single_class: bool,
}

struct TreeBuilder<'a> {
    rows: &'a Matrix,
    labels: &'a [u8],
    mtry: usize,
    nodes: Vec<Node>,
}

fn gini(pos: f64, total: f64) -> f64 {
    if total == 0.0 {
        return 0.0;
    }
    let p = pos / total;
    2.0 * p * (1.0 - p)
}

impl<'a> TreeBuilder<'a> {
    /// Best (threshold, weighted impurity) for one feature over the node's
    /// rows, or None when the feature is constant there.
    fn best_split_on(&self, indices: &[usize], feature: usize) -> Option<(f64, f64)> {
        let mut values: Vec<(f64, u8)> = indices
            .iter()
            .map(|&i| (self.rows.row(i)[feature], self.labels[i]))
            .collect();
        values.sort_by(|a, b| a.0.total_cmp(&b.0));

        let total = values.len() as f64;
        let total_pos: f64 = values.iter().map(|v| f64::from(v.1)).sum();
        let mut left_n = 0.0;
        let mut left_pos = 0.0;
        let mut best: Option<(f64, f64)> = None;
        for w in 0..values.len() - 1 {
            left_n += 1.0;
            left_pos += f64::from(values[w].1);
            if values[w].0 == values[w + 1].0 {
                continue;
            }
            let right_n = total - left_n;
            let right_pos = total_pos - left_pos;
            let impurity =
                (left_n * gini(left_pos, left_n) + right_n * gini(right_pos, right_n)) / total;
            let threshold = 0.5 * (values[w].0 + values[w + 1].0);
            if best.is_none_or(|(_, cur)| impurity < cur) {
                best = Some((threshold, impurity));
            }
        }
        best
    }

    fn grow(&mut self, indices: Vec<usize>, rng: &mut Rng) -> usize {
        let total = indices.len() as f64;
        let pos: f64 = indices.iter().map(|&i| f64::from(self.labels[i])).sum();
        let make_leaf = |nodes: &mut Vec<Node>| {
            nodes.push(Node::Leaf {
                pos_fraction: pos / total,
            });
            nodes.len() - 1
        };

        if indices.len() < MIN_NODE_SIZE || pos == 0.0 || pos == total {
            return make_leaf(&mut self.nodes);
        }

        // sample mtry distinct candidate features
        let p = self.rows.cols();
        let mut candidates: Vec<usize> = (0..p).collect();
        for k in 0..self.mtry.min(p) {
            let j = rng.random_range(k..p);
            candidates.swap(k, j);
        }
        candidates.truncate(self.mtry.min(p));

        let parent_impurity = gini(pos, total);
        let mut best: Option<(usize, f64, f64)> = None;
        for &feature in &candidates {
            if let Some((threshold, impurity)) = self.best_split_on(&indices, feature) {
                if best.is_none_or(|(_, _, cur)| impurity < cur) {
                    best = Some((feature, threshold, impurity));
                }
            }
        }
        let Some((feature, threshold, impurity)) = best else {
            return make_leaf(&mut self.nodes);
        };
        if impurity >= parent_impurity {
            return make_leaf(&mut self.nodes);
        }

        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = indices
            .into_iter()
            .partition(|&i| self.rows.row(i)[feature] <= threshold);
        if left_rows.is_empty() || right_rows.is_empty() {
            return make_leaf(&mut self.nodes);
        }

        let at = self.nodes.len();
        self.nodes.push(Node::Split {
            feature,
            threshold,
            left: 0,
            right: 0,
        });
        let left = self.grow(left_rows, rng);
        let right = self.grow(right_rows, rng);
        if let Node::Split {
            left: l, right: r, ..
        } = &mut self.nodes[at]
        {
            *l = left;
            *r = right;
        }
        at
    }
}

/// Fit `n_trees` bootstrap trees. Single-class training data yields a
/// degenerate forest, flagged rather than rejected.
pub fn fit_forest(
    rows: &Matrix,
    labels: &[u8],
    n_trees: usize,
    mtry: usize,
    rng: &mut Rng,
) -> Result<ForestModel> {
    let n = rows.rows();
    assert_eq!(n, labels.len());
    if n < 2 {
        return Err(Error::TooFewRows { needed: 2, got: n });
    }
    assert!(n_trees >= 1, "need at least one tree");
    let single_class = labels.iter().all(|&l| l == labels[0]);

    let mut trees = Vec::with_capacity(n_trees);
    for _ in 0..n_trees {
        let bootstrap: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
        let mut builder = TreeBuilder {
            rows,
            labels,
            mtry,
            nodes: Vec::new(),
        };
        builder.grow(bootstrap, rng);
        trees.push(Tree {
            nodes: builder.nodes,
        });
    }
    Ok(ForestModel {
        trees,
        mtry,
        single_class,
    })
}

/// Default feature bag size, floor(sqrt(p)).
pub fn default_mtry(p: usize) -> usize {
    ((p as f64).sqrt().floor() as usize).max(1)
}

impl ForestModel {
    /// Fraction of trees voting positive.
    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        let votes: u32 = self.trees.iter().map(|t| u32::from(t.vote(x))).sum();
        f64::from(votes) / self.trees.len() as f64
    }
}
