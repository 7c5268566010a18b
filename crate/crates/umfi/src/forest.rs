//! From-scratch random forest: greedy CART trees grown on bootstrap
//! samples, scored out-of-bag.
//!
//! Regression trees maximize variance reduction, classification trees Gini
//! impurity decrease. Each tree draws its randomness from an independent
//! seed stream indexed by tree number, so fitting trees in parallel is
//! bit-identical to fitting them serially.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::data::{Matrix, Response, TaskKind};
use crate::error::{Error, Result};
use crate::seed::SeedStream;

/// Hyperparameters for [`fit_forest`]. `None` fields resolve to
/// task-dependent defaults at fit time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForestConfig {
    pub n_trees: usize,
    /// Candidate features per split; default ⌈√p⌉ (classification) or
    /// ⌈p/3⌉ (regression), at least 1, at most p.
    pub mtry: Option<usize>,
    /// Nodes at or below this size become leaves; default 5 (regression)
    /// or 1 (classification).
    pub min_node_size: Option<usize>,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self {
            n_trees: 100,
            mtry: None,
            min_node_size: None,
        }
    }
}

impl ForestConfig {
    pub fn resolved_mtry(&self, p: usize, task: TaskKind) -> usize {
        let raw = self.mtry.unwrap_or_else(|| match task {
            TaskKind::Classification => (p as f64).sqrt().ceil() as usize,
            TaskKind::Regression => (p as f64 / 3.0).ceil() as usize,
        });
        raw.clamp(1, p.max(1))
    }

    pub fn resolved_min_node_size(&self, task: TaskKind) -> usize {
        self.min_node_size
            .unwrap_or(match task {
                TaskKind::Regression => 5,
                TaskKind::Classification => 1,
            })
            .max(1)
    }
}

#[derive(Debug, Clone)]
enum Node {
    Split {
        feature: u32,
        threshold: f64,
        left: u32,
        right: u32,
    },
    /// Mean response (regression) or majority class index (classification).
    Leaf { value: f64 },
}

#[derive(Debug, Clone)]
pub struct Tree {
    nodes: Vec<Node>,
    in_bag: Vec<bool>,
}

impl Tree {
    /// Walks the tree with an arbitrary feature accessor.
    fn predict_with(&self, feature_value: impl Fn(usize) -> f64) -> f64 {
        let mut at = 0usize;
        loop {
            match self.nodes[at] {
                Node::Leaf { value } => return value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if feature_value(feature as usize) <= threshold {
                        left as usize
                    } else {
                        right as usize
                    };
                }
            }
        }
    }

    fn predict_matrix_row(&self, x: &Matrix, i: usize) -> f64 {
        self.predict_with(|f| x.col(f)[i])
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }
}

/// An immutable fitted ensemble plus the per-tree bootstrap membership
/// needed for out-of-bag scoring.
#[derive(Debug, Clone)]
pub struct Forest {
    trees: Vec<Tree>,
    task: TaskKind,
    n_classes: usize,
    n_train_rows: usize,
}

impl Forest {
    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    pub fn task(&self) -> TaskKind {
        self.task
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    /// Ensemble prediction for one point given as a row slice. Regression
    /// returns the mean of tree predictions; classification returns the
    /// majority class index (ties to the smallest index).
    pub fn predict_point(&self, row: &[f64]) -> f64 {
        match self.task {
            TaskKind::Regression => {
                let s: f64 = self
                    .trees
                    .iter()
                    .map(|t| t.predict_with(|f| row[f]))
                    .sum();
                s / self.trees.len() as f64
            }
            TaskKind::Classification => {
                let mut votes = vec![0u32; self.n_classes];
                for t in &self.trees {
                    votes[t.predict_with(|f| row[f]) as usize] += 1;
                }
                argmax_smallest(&votes) as f64
            }
        }
    }
}

/// Index of the largest count, preferring the smallest index on ties.
fn argmax_smallest(counts: &[u32]) -> usize {
    let mut best = 0usize;
    for (i, &c) in counts.iter().enumerate().skip(1) {
        if c > counts[best] {
            best = i;
        }
    }
    best
}

/// Fits `cfg.n_trees` CART trees on bootstrap samples of (`x`, `y`).
pub fn fit_forest(x: &Matrix, y: &Response, cfg: &ForestConfig, stream: &SeedStream) -> Result<Forest> {
    let n = x.n_rows();
    let p = x.n_cols();
    if p == 0 {
        return Err(Error::EmptyFeatureSet);
    }
    if n < 2 {
        return Err(Error::TooFewRows { got: n, min: 2 });
    }
    if y.len() != n {
        return Err(Error::LengthMismatch {
            left: n,
            right: y.len(),
        });
    }
    if cfg.n_trees == 0 {
        return Err(Error::InvalidInput("n_trees must be at least 1".into()));
    }
    let task = y.task();
    let (yval, n_classes): (Vec<f64>, usize) = match y {
        Response::Regression(v) => (v.clone(), 0),
        Response::Classification { labels, classes } => {
            (labels.iter().map(|&l| l as f64).collect(), classes.len())
        }
    };
    let ctx = TreeCtx {
        x,
        yval: &yval,
        n_classes,
        mtry: cfg.resolved_mtry(p, task),
        min_node: cfg.resolved_min_node_size(task),
    };
    let trees: Vec<Tree> = (0..cfg.n_trees)
        .into_par_iter()
        .map(|t| grow_tree(&ctx, stream.child(t as u64).rng()))
        .collect();
    Ok(Forest {
        trees,
        task,
        n_classes,
        n_train_rows: n,
    })
}

/// Out-of-bag skill of a fitted forest on its own training data:
/// R² for regression, accuracy for classification. Rows that were in-bag
/// for every tree are skipped; if fewer than half the rows have an
/// out-of-bag prediction the estimate is meaningless and an error is
/// returned.
pub fn oob_score(forest: &Forest, x: &Matrix, y: &Response) -> Result<f64> {
    let n = x.n_rows();
    if n != forest.n_train_rows || y.len() != n {
        return Err(Error::LengthMismatch {
            left: forest.n_train_rows,
            right: n.min(y.len()),
        });
    }
    match y {
        Response::Regression(yv) => {
            let mut sums = vec![0.0f64; n];
            let mut counts = vec![0u32; n];
            for tree in &forest.trees {
                for i in 0..n {
                    if !tree.in_bag[i] {
                        sums[i] += tree.predict_matrix_row(x, i);
                        counts[i] += 1;
                    }
                }
            }
            let covered: Vec<usize> = (0..n).filter(|&i| counts[i] > 0).collect();
            if covered.len() * 2 < n {
                return Err(Error::NoOobRows);
            }
            let mean = covered.iter().map(|&i| yv[i]).sum::<f64>() / covered.len() as f64;
            let ss_tot: f64 = covered.iter().map(|&i| (yv[i] - mean).powi(2)).sum();
            if ss_tot == 0.0 {
                return Ok(0.0);
            }
            let ss_res: f64 = covered
                .iter()
                .map(|&i| {
                    let pred = sums[i] / counts[i] as f64;
                    (yv[i] - pred).powi(2)
                })
                .sum();
            Ok(1.0 - ss_res / ss_tot)
        }
        Response::Classification { labels, .. } => {
            let k = forest.n_classes;
            let mut votes = vec![0u32; n * k];
            let mut any = vec![false; n];
            for tree in &forest.trees {
                for i in 0..n {
                    if !tree.in_bag[i] {
                        votes[i * k + tree.predict_matrix_row(x, i) as usize] += 1;
                        any[i] = true;
                    }
                }
            }
            let covered: Vec<usize> = (0..n).filter(|&i| any[i]).collect();
            if covered.len() * 2 < n {
                return Err(Error::NoOobRows);
            }
            let correct = covered
                .iter()
                .filter(|&&i| argmax_smallest(&votes[i * k..(i + 1) * k]) == labels[i])
                .count();
            Ok(correct as f64 / covered.len() as f64)
        }
    }
}

struct TreeCtx<'a> {
    x: &'a Matrix,
    /// Target per training row: response value or class index as f64.
    yval: &'a [f64],
    /// 0 means regression.
    n_classes: usize,
    mtry: usize,
    min_node: usize,
}

struct TreeState {
    rng: ChaCha8Rng,
    nodes: Vec<Node>,
    /// (feature value, target) pairs gathered per candidate split.
    scratch: Vec<(f64, f64)>,
    counts_node: Vec<u32>,
    counts_left: Vec<u32>,
    counts_right: Vec<u32>,
}

fn grow_tree(ctx: &TreeCtx, mut rng: ChaCha8Rng) -> Tree {
    let n = ctx.x.n_rows();
    let mut rows: Vec<u32> = (0..n).map(|_| rng.random_range(0..n) as u32).collect();
    let mut in_bag = vec![false; n];
    for &r in &rows {
        in_bag[r as usize] = true;
    }
    let mut st = TreeState {
        rng,
        nodes: Vec::new(),
        scratch: Vec::with_capacity(n),
        counts_node: vec![0; ctx.n_classes],
        counts_left: vec![0; ctx.n_classes],
        counts_right: vec![0; ctx.n_classes],
    };
    build_node(ctx, &mut st, &mut rows);
    Tree {
        nodes: st.nodes,
        in_bag,
    }
}

/// Recursively grows the subtree over `rows`, returning its root index.
fn build_node(ctx: &TreeCtx, st: &mut TreeState, rows: &mut [u32]) -> u32 {
    let m = rows.len();
    debug_assert!(m > 0);
    let first = ctx.yval[rows[0] as usize];
    let pure = rows.iter().all(|&r| ctx.yval[r as usize] == first);
    if m <= ctx.min_node || pure {
        return push_leaf(ctx, st, rows);
    }
    let split = if ctx.n_classes == 0 {
        best_split_regression(ctx, st, rows)
    } else {
        best_split_classification(ctx, st, rows)
    };
    let Some((feature, threshold)) = split else {
        return push_leaf(ctx, st, rows);
    };

    // Partition in place: rows with value ≤ threshold move to the front.
    let col = ctx.x.col(feature);
    let mut mid = 0usize;
    for j in 0..m {
        if col[rows[j] as usize] <= threshold {
            rows.swap(mid, j);
            mid += 1;
        }
    }
    debug_assert!(mid > 0 && mid < m);

    let node_idx = st.nodes.len() as u32;
    st.nodes.push(Node::Leaf { value: 0.0 }); // placeholder
    let (left_rows, right_rows) = rows.split_at_mut(mid);
    let left = build_node(ctx, st, left_rows);
    let right = build_node(ctx, st, right_rows);
    st.nodes[node_idx as usize] = Node::Split {
        feature: feature as u32,
        threshold,
        left,
        right,
    };
    node_idx
}

fn push_leaf(ctx: &TreeCtx, st: &mut TreeState, rows: &[u32]) -> u32 {
    let value = if ctx.n_classes == 0 {
        rows.iter().map(|&r| ctx.yval[r as usize]).sum::<f64>() / rows.len() as f64
    } else {
        st.counts_node.fill(0);
        for &r in rows {
            st.counts_node[ctx.yval[r as usize] as usize] += 1;
        }
        argmax_smallest(&st.counts_node) as f64
    };
    st.nodes.push(Node::Leaf { value });
    (st.nodes.len() - 1) as u32
}

const MIN_GAIN: f64 = 1e-12;

/// Candidate feature order for one node: `mtry` distinct features drawn
/// without replacement.
fn draw_candidates(rng: &mut ChaCha8Rng, p: usize, mtry: usize) -> Vec<usize> {
    rand::seq::index::sample(rng, p, mtry).into_vec()
}

/// Chooses a threshold strictly between `a` and `b` (`a < b`) that sends
/// `a` left under `x <= t` routing even when their midpoint rounds up.
fn midpoint_threshold(a: f64, b: f64) -> f64 {
    let t = a + (b - a) / 2.0;
    if t < b {
        t
    } else {
        a
    }
}

/// Best variance-reduction split: maximizes Σ_left²/n_left + Σ_right²/n_right,
/// which is equivalent to minimizing the children's summed squared error.
fn best_split_regression(ctx: &TreeCtx, st: &mut TreeState, rows: &[u32]) -> Option<(usize, f64)> {
    let m = rows.len();
    let mf = m as f64;
    let sum: f64 = rows.iter().map(|&r| ctx.yval[r as usize]).sum();
    let parent_score = sum * sum / mf;
    let mut best_score = parent_score + MIN_GAIN;
    let mut best: Option<(usize, f64)> = None;

    for f in draw_candidates(&mut st.rng, ctx.x.n_cols(), ctx.mtry) {
        let col = ctx.x.col(f);
        st.scratch.clear();
        st.scratch
            .extend(rows.iter().map(|&r| (col[r as usize], ctx.yval[r as usize])));
        st.scratch.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        let mut sum_left = 0.0;
        for i in 1..m {
            sum_left += st.scratch[i - 1].1;
            if st.scratch[i].0 > st.scratch[i - 1].0 {
                let nl = i as f64;
                let nr = mf - nl;
                let sr = sum - sum_left;
                let score = sum_left * sum_left / nl + sr * sr / nr;
                if score > best_score {
                    best_score = score;
                    best = Some((f, midpoint_threshold(st.scratch[i - 1].0, st.scratch[i].0)));
                }
            }
        }
    }
    best
}

/// Best Gini split: maximizes Σ_c left_c²/n_left + Σ_c right_c²/n_right.
fn best_split_classification(
    ctx: &TreeCtx,
    st: &mut TreeState,
    rows: &[u32],
) -> Option<(usize, f64)> {
    let m = rows.len();
    let mf = m as f64;
    st.counts_node.fill(0);
    for &r in rows {
        st.counts_node[ctx.yval[r as usize] as usize] += 1;
    }
    let parent_score: f64 = st.counts_node.iter().map(|&c| (c as f64) * (c as f64)).sum::<f64>() / mf;
    let mut best_score = parent_score + MIN_GAIN;
    let mut best: Option<(usize, f64)> = None;

    for f in draw_candidates(&mut st.rng, ctx.x.n_cols(), ctx.mtry) {
        let col = ctx.x.col(f);
        st.scratch.clear();
        st.scratch
            .extend(rows.iter().map(|&r| (col[r as usize], ctx.yval[r as usize])));
        st.scratch.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        st.counts_left.fill(0);
        st.counts_right.copy_from_slice(&st.counts_node);
        // Sum of squared class counts on each side, updated in O(1) per row:
        // moving one row of class c changes Σc² by ±(2·count_c ∓ 1).
        let mut sq_left = 0.0;
        let mut sq_right: f64 = st
            .counts_node
            .iter()
            .map(|&c| (c as f64) * (c as f64))
            .sum();
        for i in 1..m {
            let c = st.scratch[i - 1].1 as usize;
            sq_left += 2.0 * st.counts_left[c] as f64 + 1.0;
            st.counts_left[c] += 1;
            sq_right -= 2.0 * st.counts_right[c] as f64 - 1.0;
            st.counts_right[c] -= 1;
            if st.scratch[i].0 > st.scratch[i - 1].0 {
                let nl = i as f64;
                let nr = mf - nl;
                let score = sq_left / nl + sq_right / nr;
                if score > best_score {
                    best_score = score;
                    best = Some((f, midpoint_threshold(st.scratch[i - 1].0, st.scratch[i].0)));
                }
            }
        }
    }
    best
}
