//! CART with Gini (classification) or squared-error (regression) splits.
//!
//! Candidate thresholds are midpoints between consecutive distinct values.
//! The split with the largest impurity decrease wins; ties go to the lowest
//! feature index, then the lowest threshold. An impure node may split with
//! zero decrease, which is what lets XOR-like targets be learned at all.

use alloc::vec::Vec;

use crate::dataset::TaskKind;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TreeConfig {
    pub max_depth: usize,
    pub min_leaf: usize,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig {
            max_depth: 8,
            min_leaf: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(tag = "node", rename_all = "snake_case")
)]
pub enum TreeNode {
    /// Class-1 fraction or mean target.
    Leaf { value: f64 },
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// Nodes in creation order; node 0 is the root.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TreeModel {
    pub n_features: usize,
    pub nodes: Vec<TreeNode>,
}

impl TreeModel {
    pub fn predict_row(&self, x: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                TreeNode::Leaf { value } => return value,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if x[feature] <= threshold { left } else { right },
            }
        }
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, TreeNode::Leaf { .. }))
            .count()
    }
}

/// Sum statistics of a node: count, sum of y and sum of y^2.
#[derive(Clone, Copy, Default)]
struct Stats {
    n: f64,
    s: f64,
    ss: f64,
}

impl Stats {
    fn add(&mut self, y: f64) {
        self.n += 1.0;
        self.s += y;
        self.ss += y * y;
    }

    fn sub(self, o: Stats) -> Stats {
        Stats {
            n: self.n - o.n,
            s: self.s - o.s,
            ss: self.ss - o.ss,
        }
    }

    /// Impurity times count: `n * gini` or the sum of squared deviations.
    fn cost(&self, task: TaskKind) -> f64 {
        if self.n == 0.0 {
            return 0.0;
        }
        match task {
            // y in {0,1}: n * 2 p (1 - p)
            TaskKind::Classification => 2.0 * self.s * (self.n - self.s) / self.n,
            TaskKind::Regression => (self.ss - self.s * self.s / self.n).max(0.0),
        }
    }
}

pub fn fit_tree(x: &Matrix, y: &[f64], task: TaskKind, config: &TreeConfig) -> Result<TreeModel> {
    if y.len() != x.rows() {
        return Err(Error::LengthMismatch {
            op: "fit_tree",
            expected: x.rows(),
            actual: y.len(),
        });
    }
    if config.min_leaf == 0 {
        return Err(Error::invalid("min_leaf must be >= 1"));
    }
    if task == TaskKind::Classification {
        crate::dataset::binary_labels(y)?;
    }
    let mut b = Builder {
        x,
        y,
        task,
        config,
        nodes: Vec::new(),
    };
    let idx: Vec<usize> = (0..x.rows()).collect();
    b.grow(idx, 0);
    Ok(TreeModel {
        n_features: x.cols(),
        nodes: b.nodes,
    })
}

struct Builder<'a> {
    x: &'a Matrix,
    y: &'a [f64],
    task: TaskKind,
    config: &'a TreeConfig,
    nodes: Vec<TreeNode>,
}

struct Best {
    gain: f64,
    feature: usize,
    threshold: f64,
}

impl Builder<'_> {
    fn grow(&mut self, idx: Vec<usize>, depth: usize) -> usize {
        let mut total = Stats::default();
        for &i in &idx {
            total.add(self.y[i]);
        }
        let at = self.nodes.len();
        self.nodes.push(TreeNode::Leaf {
            value: total.s / total.n,
        });
        let cost = total.cost(self.task);
        if depth >= self.config.max_depth || cost <= 0.0 || idx.len() < 2 * self.config.min_leaf {
            return at;
        }
        let Some(best) = self.best_split(&idx, total, cost) else {
            return at;
        };
        let (l, r): (Vec<usize>, Vec<usize>) = idx
            .iter()
            .partition(|&&i| self.x.get(i, best.feature) <= best.threshold);
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[at] = TreeNode::Split {
            feature: best.feature,
            threshold: best.threshold,
            left,
            right,
        };
        at
    }

    fn best_split(&self, idx: &[usize], total: Stats, cost: f64) -> Option<Best> {
        let min_leaf = self.config.min_leaf;
        let tol = 1e-12 * cost.max(1.0);
        let mut best: Option<Best> = None;
        let mut order: Vec<(f64, f64)> = Vec::with_capacity(idx.len());
        for f in 0..self.x.cols() {
            order.clear();
            order.extend(idx.iter().map(|&i| (self.x.get(i, f), self.y[i])));
            order.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut left = Stats::default();
            for k in 0..order.len() - 1 {
                left.add(order[k].1);
                let (v, next) = (order[k].0, order[k + 1].0);
                if v == next || k + 1 < min_leaf || order.len() - k - 1 < min_leaf {
                    continue;
                }
                let right = total.sub(left);
                let gain = cost - left.cost(self.task) - right.cost(self.task);
                let better = match &best {
                    None => gain > -tol,
                    Some(b) => gain > b.gain + tol,
                };
                if better {
                    best = Some(Best {
                        gain,
                        feature: f,
                        threshold: v + (next - v) / 2.0,
                    });
                }
            }
        }
        best
    }
}
