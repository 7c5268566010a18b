//! The three four-feature simulation studies and the replication harness
//! that turns importance reports into box-plot-ready share summaries.

use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Matrix, Response, TaskKind};
use crate::error::{Error, Result};
use crate::evaluator::EvaluationFunction;
use crate::forest::ForestConfig;
use crate::importance::{mci, umfi, MciConfig, UmfiConfig};
use crate::report::ImportanceReport;
use crate::seed::SeedSpec;
use crate::stats::quantile;

/// Which generative design to simulate.
///
/// All three use four features, Gaussian building blocks, and a regression
/// response:
/// * `CorrelatedInteraction` — x1=A+B, x2=B+C, x3=D+E, x4=E+G with
///   A..G ~ N(0,1); y = x1 + x2 + sign(x1·x2) + x3 + x4. Pairs (x1,x2) and
///   (x3,x4) are correlated 0.5; only x1, x2 interact.
/// * `Correlation` — x1, x2, x4 ~ N(0,1); x3 = x1 + N(0, 0.2²);
///   y = x1 + x2. x3 is a near-copy of a relevant feature, x4 pure noise.
/// * `NonlinearXor` — x1..x4 ~ N(0,1); y = sign(x1·x2)·ε with
///   ε ~ Exp(rate 1/√2). The signal is invisible to marginal correlation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SimKind {
    CorrelatedInteraction,
    Correlation,
    NonlinearXor,
}

impl SimKind {
    pub fn label(&self) -> &'static str {
        match self {
            SimKind::CorrelatedInteraction => "correlated-interaction",
            SimKind::Correlation => "correlation",
            SimKind::NonlinearXor => "nonlinear-xor",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimDesign {
    pub kind: SimKind,
    pub n: usize,
    pub replications: usize,
}

impl SimDesign {
    pub fn new(kind: SimKind) -> Self {
        Self {
            kind,
            n: 500,
            replications: 100,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n < 50 {
            return Err(Error::TooFewRows {
                got: self.n,
                min: 50,
            });
        }
        if self.replications == 0 {
            return Err(Error::InvalidInput("need at least one replication".into()));
        }
        Ok(())
    }
}

/// sign with sign(0) = 0 (f64::signum maps 0 to 1, which is wrong here).
fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn std_normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Generates one replication's dataset. The data depend only on
/// (design, replication_index, seed): inserting or dropping other
/// replications cannot change them.
pub fn generate(design: &SimDesign, replication_index: usize, seed: SeedSpec) -> Result<Dataset> {
    design.validate()?;
    let n = design.n;
    let mut rng = seed
        .stream(&format!("simulation-{}-n{}", design.kind.label(), n))
        .child(replication_index as u64)
        .rng();
    let mut cols = vec![Vec::with_capacity(n); 4];
    let mut y = Vec::with_capacity(n);
    match design.kind {
        SimKind::CorrelatedInteraction => {
            for _ in 0..n {
                let (a, b, c) = (std_normal(&mut rng), std_normal(&mut rng), std_normal(&mut rng));
                let (d, e_, g) = (std_normal(&mut rng), std_normal(&mut rng), std_normal(&mut rng));
                let x1 = a + b;
                let x2 = b + c;
                let x3 = d + e_;
                let x4 = e_ + g;
                cols[0].push(x1);
                cols[1].push(x2);
                cols[2].push(x3);
                cols[3].push(x4);
                y.push(x1 + x2 + sign(x1 * x2) + x3 + x4);
            }
        }
        SimKind::Correlation => {
            for _ in 0..n {
                let x1 = std_normal(&mut rng);
                let x2 = std_normal(&mut rng);
                let x3 = x1 + 0.2 * std_normal(&mut rng);
                let x4 = std_normal(&mut rng);
                cols[0].push(x1);
                cols[1].push(x2);
                cols[2].push(x3);
                cols[3].push(x4);
                y.push(x1 + x2);
            }
        }
        SimKind::NonlinearXor => {
            let exp = Exp::new(1.0 / 2.0_f64.sqrt()).expect("valid rate");
            for _ in 0..n {
                let x: Vec<f64> = (0..4).map(|_| std_normal(&mut rng)).collect();
                let eps: f64 = exp.sample(&mut rng);
                for (col, v) in cols.iter_mut().zip(&x) {
                    col.push(*v);
                }
                y.push(sign(x[0] * x[1]) * eps);
            }
        }
    }
    Dataset::new(
        Matrix::from_columns(cols)?,
        (1..=4).map(|j| format!("x{j}")).collect(),
        "y".into(),
        Response::Regression(y),
    )
}

/// An importance method as selected in a study run. `Mci` resolves to
/// exact enumeration when feasible and to size-3-limited search otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StudyMethod {
    Mci,
    UmfiLinear,
    UmfiTransport,
}

impl StudyMethod {
    fn run(&self, d: &Dataset, e: &EvaluationFunction) -> Result<ImportanceReport> {
        match self {
            StudyMethod::Mci => {
                let cfg = if d.n_features() <= 10 {
                    MciConfig::exact()
                } else {
                    MciConfig::size_limited(3)
                };
                mci(d, e, &cfg)
            }
            StudyMethod::UmfiLinear => umfi(d, e, &UmfiConfig::linear_regression()),
            StudyMethod::UmfiTransport => umfi(d, e, &UmfiConfig::transport()),
        }
    }
}

/// Tukey box-plot statistics of one method × feature share distribution.
/// Quartiles use linear interpolation; outliers lie beyond 1.5·IQR from
/// the quartiles.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct BoxStats {
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub outliers: Vec<f64>,
}

impl BoxStats {
    pub fn from_values(values: &[f64]) -> Self {
        let q1 = quantile(values, 0.25);
        let median = quantile(values, 0.5);
        let q3 = quantile(values, 0.75);
        let iqr = q3 - q1;
        let (lo, hi) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
        let outliers = values
            .iter()
            .copied()
            .filter(|&v| v < lo || v > hi)
            .collect();
        Self {
            median,
            q1,
            q3,
            outliers,
        }
    }
}

/// One replication's share of one feature under one method; shares are
/// fractions of the method's total importance, in [0, 1].
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SharePoint {
    pub replication: usize,
    pub method: String,
    pub feature: String,
    pub share: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MethodFeatureStats {
    pub method: String,
    pub feature: String,
    pub stats: BoxStats,
}

/// Aggregated study results: box statistics per method × feature plus the
/// underlying per-replication share points for external plotting.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ReplicationSummary {
    pub design: SimDesign,
    pub seed: u64,
    pub summaries: Vec<MethodFeatureStats>,
    pub points: Vec<SharePoint>,
}

impl ReplicationSummary {
    pub fn stats_for(&self, method: &str, feature: &str) -> Option<&BoxStats> {
        self.summaries
            .iter()
            .find(|s| s.method == method && s.feature == feature)
            .map(|s| &s.stats)
    }

    pub fn median_share(&self, method: &str, feature: &str) -> Option<f64> {
        self.stats_for(method, feature).map(|s| s.median)
    }

    pub fn methods(&self) -> Vec<String> {
        let mut out = Vec::new();
        for s in &self.summaries {
            if !out.contains(&s.method) {
                out.push(s.method.clone());
            }
        }
        out
    }
}

/// Runs every method on every replication and aggregates shares. Shares
/// are collected in replication order, so the summary is independent of
/// scheduling.
pub fn run_study(
    design: &SimDesign,
    methods: &[StudyMethod],
    forest: &ForestConfig,
    seed: SeedSpec,
) -> Result<ReplicationSummary> {
    design.validate()?;
    if methods.is_empty() {
        return Err(Error::InvalidInput("no methods selected".into()));
    }
    let per_rep: Vec<Vec<(String, Vec<(String, f64)>)>> = (0..design.replications)
        .into_par_iter()
        .map(|rep| -> Result<_> {
            let d = generate(design, rep, seed)?;
            let mut rows = Vec::with_capacity(methods.len());
            for method in methods {
                let e = EvaluationFunction::new(forest.clone(), TaskKind::Regression, seed);
                let report = method.run(&d, &e)?;
                rows.push((report.method.clone(), report.shares.0.clone()));
            }
            Ok(rows)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut points = Vec::new();
    for (rep, rows) in per_rep.iter().enumerate() {
        for (method, shares) in rows {
            for (feature, share) in shares {
                points.push(SharePoint {
                    replication: rep,
                    method: method.clone(),
                    feature: feature.clone(),
                    share: *share,
                });
            }
        }
    }

    let mut summaries = Vec::new();
    let first = &per_rep[0];
    for (method, shares) in first {
        for (feature, _) in shares {
            let values: Vec<f64> = points
                .iter()
                .filter(|p| &p.method == method && &p.feature == feature)
                .map(|p| p.share)
                .collect();
            summaries.push(MethodFeatureStats {
                method: method.clone(),
                feature: feature.clone(),
                stats: BoxStats::from_values(&values),
            });
        }
    }

    Ok(ReplicationSummary {
        design: *design,
        seed: seed.master(),
        summaries,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{pearson, sample_variance};

    fn design(kind: SimKind) -> SimDesign {
        SimDesign::new(kind)
    }

    #[test]
    fn correlated_interaction_moments_match_construction() {
        let d = generate(&design(SimKind::CorrelatedInteraction), 0, SeedSpec::new(42)).unwrap();
        let x1 = d.matrix.col(0);
        let x2 = d.matrix.col(1);
        // Var(A+B) = 2; corr(A+B, B+C) = 1/2.
        assert!((sample_variance(x1) - 2.0).abs() < 0.3);
        assert!((pearson(x1, x2) - 0.5).abs() < 0.1);
        let x3 = d.matrix.col(2);
        let x4 = d.matrix.col(3);
        assert!((pearson(x3, x4) - 0.5).abs() < 0.1);
        assert!(pearson(x1, x3).abs() < 0.1);
    }

    #[test]
    fn correlation_design_tracks_x1_with_x3() {
        let d = generate(&design(SimKind::Correlation), 0, SeedSpec::new(42)).unwrap();
        let x1 = d.matrix.col(0);
        let x3 = d.matrix.col(2);
        // Var(x3) = 1 + 0.04; corr = 1/√1.04 ≈ 0.98.
        assert!((sample_variance(x3) - 1.04).abs() < 0.15);
        assert!(pearson(x1, x3) >= 0.95);
    }

    #[test]
    fn xor_design_has_no_marginal_correlation() {
        let d = generate(&design(SimKind::NonlinearXor), 0, SeedSpec::new(42)).unwrap();
        let y = match &d.response {
            Response::Regression(y) => y.clone(),
            _ => unreachable!(),
        };
        assert!(pearson(d.matrix.col(0), &y).abs() < 0.1);
        assert!(pearson(d.matrix.col(1), &y).abs() < 0.1);
        // ε ~ Exp(rate 1/√2) has mean √2.
        let mean_abs: f64 = y.iter().map(|v| v.abs()).sum::<f64>() / y.len() as f64;
        assert!((mean_abs - 2.0_f64.sqrt()).abs() < 0.2);
    }

    #[test]
    fn xor_signal_is_detectable_from_the_full_feature_set() {
        for master in 0..10u64 {
            let d = generate(&design(SimKind::NonlinearXor), 0, SeedSpec::new(master)).unwrap();
            let e = EvaluationFunction::new(
                ForestConfig::default(),
                TaskKind::Regression,
                SeedSpec::new(master),
            );
            let v = e.evaluate(&d.matrix, &d.response).unwrap();
            assert!(v.clamped > 0.2, "seed {master}: full-set skill {}", v.clamped);
        }
    }

    #[test]
    fn generation_is_deterministic_and_replication_local() {
        let des = design(SimKind::Correlation);
        let a = generate(&des, 3, SeedSpec::new(7)).unwrap();
        let b = generate(&des, 3, SeedSpec::new(7)).unwrap();
        assert_eq!(a.matrix, b.matrix);
        assert_eq!(a.response, b.response);
        let other = generate(&des, 4, SeedSpec::new(7)).unwrap();
        assert_ne!(a.matrix, other.matrix);
    }

    #[test]
    fn sign_of_zero_is_zero() {
        assert_eq!(sign(0.0), 0.0);
        assert_eq!(sign(-0.0), 0.0);
        assert_eq!(sign(3.5), 1.0);
        assert_eq!(sign(-0.1), -1.0);
    }

    #[test]
    fn box_stats_flag_outliers_beyond_tukey_fences() {
        let mut values = vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0];
        values.push(100.0);
        let stats = BoxStats::from_values(&values);
        assert_eq!(stats.outliers, vec![100.0]);
        assert!(stats.q1 <= stats.median && stats.median <= stats.q3);
    }

    #[test]
    fn single_replication_study_equals_direct_call() {
        let des = SimDesign {
            kind: SimKind::Correlation,
            n: 120,
            replications: 1,
        };
        let forest = ForestConfig {
            n_trees: 25,
            ..ForestConfig::default()
        };
        let summary =
            run_study(&des, &[StudyMethod::UmfiTransport], &forest, SeedSpec::new(5)).unwrap();
        let d = generate(&des, 0, SeedSpec::new(5)).unwrap();
        let e = EvaluationFunction::new(forest, TaskKind::Regression, SeedSpec::new(5));
        let direct = umfi(&d, &e, &UmfiConfig::transport()).unwrap();
        for name in &d.feature_names {
            let m = summary.median_share("UMFI_OT", name).unwrap();
            assert_eq!(Some(m), direct.shares.get(name));
        }
        assert_eq!(summary.points.len(), 4);
    }

    #[test]
    fn study_records_resolved_mci_mode_and_all_points() {
        let des = SimDesign {
            kind: SimKind::Correlation,
            n: 100,
            replications: 3,
        };
        let forest = ForestConfig {
            n_trees: 10,
            ..ForestConfig::default()
        };
        let summary = run_study(
            &des,
            &[StudyMethod::Mci, StudyMethod::UmfiLinear],
            &forest,
            SeedSpec::new(6),
        )
        .unwrap();
        assert_eq!(summary.methods(), vec!["MCI_EXACT", "UMFI_LR"]);
        assert_eq!(summary.points.len(), 3 * 2 * 4);
        assert_eq!(summary.summaries.len(), 2 * 4);
        for s in &summary.summaries {
            assert!(s.stats.q1 <= s.stats.q3);
            assert!((0.0..=1.0).contains(&s.stats.median));
        }
    }
}
