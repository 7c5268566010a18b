//! Runtime-scaling benchmark: times full MCI (exact enumeration) against
//! UMFI with transport removal on seeded random feature subsets of one
//! dataset, exposing the O(2^p) vs O(p) training-count gap.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::{subset_matrix, Dataset, FeatureSubset, Matrix, Response};
use crate::error::{Error, Result};
use crate::evaluator::EvaluationFunction;
use crate::forest::ForestConfig;
use crate::importance::{mci, umfi, MciConfig, UmfiConfig};
use crate::seed::SeedSpec;

/// Largest subset size for which the exact-MCI leg is timed; beyond this
/// the 2^p − 1 forest fits are impractical and only UMFI is measured.
pub const MCI_BENCHMARK_MAX_P: usize = 15;

/// Timings and fit counts for one subset size.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct BenchmarkPoint {
    pub p: usize,
    pub features: Vec<String>,
    pub wall_time_umfi_s: f64,
    pub trainings_umfi: u64,
    pub wall_time_mci_s: Option<f64>,
    pub trainings_mci: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct BenchmarkResult {
    pub seed: u64,
    pub n_rows: usize,
    pub mci_max_p: usize,
    pub points: Vec<BenchmarkPoint>,
}

impl BenchmarkResult {
    /// wall_time_mci / wall_time_umfi per subset size, where both legs ran.
    pub fn ratios(&self) -> Vec<(usize, f64)> {
        self.points
            .iter()
            .filter_map(|pt| pt.wall_time_mci_s.map(|m| (pt.p, m / pt.wall_time_umfi_s)))
            .collect()
    }
}

/// Times MCI-exact (for p ≤ 15) and UMFI-transport full reports on a
/// seeded random feature subset of each requested size. Subset choice for
/// a given size depends only on (dataset shape, size, seed).
pub fn run_benchmark(
    input: &Dataset,
    p_range: &[usize],
    forest: &ForestConfig,
    seed: SeedSpec,
) -> Result<BenchmarkResult> {
    if p_range.is_empty() {
        return Err(Error::InvalidInput("empty benchmark size range".into()));
    }
    let available = input.n_features();
    for &p in p_range {
        if p == 0 {
            return Err(Error::EmptyFeatureSet);
        }
        if p > available {
            return Err(Error::RangeExceedsFeatures {
                requested: p,
                available,
            });
        }
    }

    let stream = seed.stream("benchmark");
    let mut points = Vec::with_capacity(p_range.len());
    for &p in p_range {
        let mut rng = stream.child(p as u64).rng();
        let mut indices = rand::seq::index::sample(&mut rng, available, p).into_vec();
        indices.sort_unstable();
        let subset = FeatureSubset::new(indices.clone());
        let sub = Dataset::new(
            subset_matrix(&input.matrix, &subset)?,
            indices
                .iter()
                .map(|&j| input.feature_names[j].clone())
                .collect(),
            input.response_name.clone(),
            input.response.clone(),
        )?;

        let e_umfi = EvaluationFunction::new(forest.clone(), sub.response.task(), seed);
        let umfi_report = umfi(&sub, &e_umfi, &UmfiConfig::transport())?;

        let (wall_time_mci_s, trainings_mci) = if p <= MCI_BENCHMARK_MAX_P {
            let e_mci = EvaluationFunction::new(forest.clone(), sub.response.task(), seed);
            let mci_report = mci(&sub, &e_mci, &MciConfig::exact())?;
            (Some(mci_report.wall_time_s), Some(mci_report.trainings))
        } else {
            (None, None)
        };

        points.push(BenchmarkPoint {
            p,
            features: sub.feature_names.clone(),
            wall_time_umfi_s: umfi_report.wall_time_s,
            trainings_umfi: umfi_report.trainings,
            wall_time_mci_s,
            trainings_mci,
        });
    }

    Ok(BenchmarkResult {
        seed: seed.master(),
        n_rows: input.matrix.n_rows(),
        mci_max_p: MCI_BENCHMARK_MAX_P,
        points,
    })
}

/// Offline stand-in for a real dataset: independent standard-normal
/// features with a response driven linearly by the first three features
/// plus noise, so forests have genuine signal to fit.
pub fn synthetic_benchmark_dataset(n: usize, p: usize, seed: SeedSpec) -> Result<Dataset> {
    if p == 0 {
        return Err(Error::EmptyFeatureSet);
    }
    let mut rng = seed.stream("benchmark-synthetic").rng();
    let mut cols = vec![Vec::with_capacity(n); p];
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let mut signal = 0.0;
        for (j, col) in cols.iter_mut().enumerate() {
            let v: f64 = StandardNormal.sample(&mut rng);
            col.push(v);
            if j < 3 {
                signal += v;
            }
        }
        let noise: f64 = StandardNormal.sample(&mut rng);
        y.push(signal + 0.5 * noise);
    }
    Dataset::new(
        Matrix::from_columns(cols)?,
        (0..p).map(|j| format!("g{j}")).collect(),
        "y".into(),
        Response::Regression(y),
    )
}
