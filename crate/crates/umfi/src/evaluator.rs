//! The evaluation function ν: out-of-bag random-forest skill of a feature
//! matrix for predicting the response, clamped into [0, 1], with ν(∅) = 0
//! by definition (no model is fit for the empty set).
//!
//! Randomness for each fit is derived from a digest of the matrix and
//! response *content*, not from column positions or evaluation order, so
//! the same logical feature set always sees the same bootstrap draws no
//! matter where or when it is evaluated. Columns are also reordered into a
//! canonical (digest-sorted) order before fitting, which makes ν exactly
//! invariant under column permutation.

use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::data::{Matrix, Response, TaskKind};
use crate::error::{Error, Result};
use crate::forest::{fit_forest, oob_score, ForestConfig};
use crate::seed::{SeedSpec, SeedStream};

/// One evaluation of ν: the raw out-of-bag score (R² may be negative) and
/// its projection onto [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NuValue {
    pub raw: f64,
    pub clamped: f64,
}

impl NuValue {
    fn from_raw(raw: f64) -> Self {
        Self {
            raw,
            clamped: raw.clamp(0.0, 1.0),
        }
    }

    fn zero() -> Self {
        Self {
            raw: 0.0,
            clamped: 0.0,
        }
    }
}

/// ν with its forest configuration, task, seed material, and a monotone
/// counter of model fits (the unit in which training-complexity claims are
/// audited). Thread-safe: evaluations may run concurrently.
#[derive(Debug)]
pub struct EvaluationFunction {
    config: ForestConfig,
    task: TaskKind,
    seed: SeedSpec,
    base: SeedStream,
    trainings: AtomicU64,
}

impl EvaluationFunction {
    pub fn new(config: ForestConfig, task: TaskKind, seed: SeedSpec) -> Self {
        let base = seed.stream("evaluation-function");
        Self {
            config,
            task,
            seed,
            base,
            trainings: AtomicU64::new(0),
        }
    }

    pub fn config(&self) -> &ForestConfig {
        &self.config
    }

    pub fn task(&self) -> TaskKind {
        self.task
    }

    pub fn seed(&self) -> SeedSpec {
        self.seed
    }

    /// Total model fits performed so far.
    pub fn trainings(&self) -> u64 {
        self.trainings.load(Ordering::Relaxed)
    }

    /// ν(x) for predicting `y` from the columns of `x`. An empty matrix
    /// (zero columns) is the empty feature set: returns 0 without fitting.
    pub fn evaluate(&self, x: &Matrix, y: &Response) -> Result<NuValue> {
        if y.task() != self.task {
            return Err(Error::InvalidInput(format!(
                "response task {:?} does not match evaluator task {:?}",
                y.task(),
                self.task
            )));
        }
        if x.n_cols() == 0 {
            return Ok(NuValue::zero());
        }
        let canon = canonical_order(x);
        let stream = self.base.child_bytes(&content_digest(&canon, x, y));
        let fit_cols: Vec<Vec<f64>> = canon.iter().map(|&j| x.col(j).to_vec()).collect();
        let fit_matrix = Matrix::from_columns(fit_cols)?;
        let forest = fit_forest(&fit_matrix, y, &self.config, &stream)?;
        self.trainings.fetch_add(1, Ordering::Relaxed);
        let score = oob_score(&forest, &fit_matrix, y)?;
        Ok(NuValue::from_raw(score))
    }
}

fn column_digest(col: &[f64]) -> [u8; 32] {
    let mut h = Sha256::new();
    for v in col {
        h.update(v.to_le_bytes());
    }
    h.finalize().into()
}

/// Column indices of `x` sorted by content digest (ties by index), the
/// canonical order used for fitting.
fn canonical_order(x: &Matrix) -> Vec<usize> {
    let digests: Vec<[u8; 32]> = x.columns().iter().map(|c| column_digest(c)).collect();
    let mut order: Vec<usize> = (0..x.n_cols()).collect();
    order.sort_by(|&a, &b| digests[a].cmp(&digests[b]).then(a.cmp(&b)));
    order
}

/// Digest of the evaluation inputs: dimensions, canonical column digests,
/// and the response. Identical feature content ⇒ identical digest,
/// regardless of column order.
fn content_digest(canon: &[usize], x: &Matrix, y: &Response) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update((x.n_rows() as u64).to_le_bytes());
    h.update((x.n_cols() as u64).to_le_bytes());
    for &j in canon {
        h.update(column_digest(x.col(j)));
    }
    match y {
        Response::Regression(v) => {
            h.update([0u8]);
            for val in v {
                h.update(val.to_le_bytes());
            }
        }
        Response::Classification { labels, classes } => {
            h.update([1u8]);
            h.update((classes.len() as u64).to_le_bytes());
            for &l in labels {
                h.update((l as u64).to_le_bytes());
            }
        }
    }
    h.finalize().into()
}
