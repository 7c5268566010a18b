//! Dependence-removal audit: how predictable each protected feature is
//! from the others before and after removal, and how much each transformed
//! column was distorted relative to its original.

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Matrix, Response, TaskKind};
use crate::error::{Error, Result};
use crate::evaluator::{EvaluationFunction, NuValue};
use crate::info::mic_approx;
use crate::removal::{build_s_star, RemovalBackend, RemovalKind};
use crate::report::OrderedMap;

/// Audit results for one protected feature.
///
/// Predictability is the out-of-bag R² of a forest predicting the
/// protected column from the other features — untransformed (`raw`) and
/// after each removal backend. Successful removal drives the clamped
/// value to ~0. Distortion maps every other feature to the MIC-style
/// dependence between its original and transformed column (1 = untouched).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DependenceReport {
    pub protected: String,
    pub predictability_raw: NuValue,
    pub predictability_lr: Option<NuValue>,
    pub predictability_ot: Option<NuValue>,
    pub distortion_lr: Option<OrderedMap>,
    pub distortion_ot: Option<OrderedMap>,
}

/// Runs the audit for each named feature under each backend. The forest
/// configuration and seed come from `e`; the fits are regression fits
/// (feature columns are numeric) regardless of the dataset's own task.
pub fn dependence_removal_report(
    d: &Dataset,
    features_to_audit: &[String],
    backends: &[RemovalBackend],
    e: &EvaluationFunction,
) -> Result<Vec<DependenceReport>> {
    let predictor =
        EvaluationFunction::new(e.config().clone(), TaskKind::Regression, e.seed());
    let removal_stream = e.seed().stream("diagnostics-removal");
    let mut reports = Vec::with_capacity(features_to_audit.len());

    for name in features_to_audit {
        let j = d
            .feature_names
            .iter()
            .position(|f| f == name)
            .ok_or_else(|| Error::MissingColumn(name.clone()))?;
        let z = Response::Regression(d.matrix.col(j).to_vec());
        let other_names: Vec<String> = d
            .feature_names
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != j)
            .map(|(_, n)| n.clone())
            .collect();
        let raw_matrix = Matrix::from_columns(
            (0..d.n_features())
                .filter(|&i| i != j)
                .map(|i| d.matrix.col(i).to_vec())
                .collect(),
        )?;

        let mut report = DependenceReport {
            protected: name.clone(),
            predictability_raw: predictor.evaluate(&raw_matrix, &z)?,
            predictability_lr: None,
            predictability_ot: None,
            distortion_lr: None,
            distortion_ot: None,
        };

        for backend in backends {
            let s_star = build_s_star(&d.matrix, j, backend, &removal_stream)?;
            let predictability = predictor.evaluate(&s_star, &z)?;
            let mut distortion = Vec::with_capacity(other_names.len());
            for (k, other) in other_names.iter().enumerate() {
                let mic = mic_approx(raw_matrix.col(k), s_star.col(k), None)?;
                distortion.push((other.clone(), mic));
            }
            match backend.kind {
                RemovalKind::LinearRegression => {
                    report.predictability_lr = Some(predictability);
                    report.distortion_lr = Some(OrderedMap(distortion));
                }
                RemovalKind::OptimalTransport => {
                    report.predictability_ot = Some(predictability);
                    report.distortion_ot = Some(OrderedMap(distortion));
                }
            }
        }
        reports.push(report);
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::ForestConfig;
    use crate::seed::SeedSpec;
    use rand_distr::{Distribution, StandardNormal};

    fn normal_column(rng: &mut impl rand::Rng, n: usize) -> Vec<f64> {
        (0..n).map(|_| StandardNormal.sample(rng)).collect::<Vec<f64>>()
    }

    /// x2 closely tracks x1; x3 is independent noise; y is irrelevant here.
    fn tracked_dataset(n: usize, master: u64) -> Dataset {
        let mut rng = SeedSpec::new(master).stream("diag-data").rng();
        let x1 = normal_column(&mut rng, n);
        let x2: Vec<f64> = x1
            .iter()
            .map(|&v| {
                let noise: f64 = StandardNormal.sample(&mut rng);
                v + 0.2 * noise
            })
            .collect();
        let x3 = normal_column(&mut rng, n);
        let y: Vec<f64> = x1.iter().map(|&v| v * 2.0).collect();
        Dataset::new(
            Matrix::from_columns(vec![x1, x2, x3]).unwrap(),
            vec!["x1".into(), "x2".into(), "x3".into()],
            "y".into(),
            Response::Regression(y),
        )
        .unwrap()
    }

    fn evaluator(master: u64) -> EvaluationFunction {
        EvaluationFunction::new(
            ForestConfig::default(),
            TaskKind::Regression,
            SeedSpec::new(master),
        )
    }

    #[test]
    fn removal_kills_predictability_of_a_tracked_feature() {
        let d = tracked_dataset(500, 21);
        let backends = [
            RemovalBackend::linear_regression(),
            RemovalBackend::optimal_transport(),
        ];
        let reports =
            dependence_removal_report(&d, &["x1".to_string()], &backends, &evaluator(21)).unwrap();
        assert_eq!(reports.len(), 1);
        let r = &reports[0];
        assert!(
            r.predictability_raw.clamped > 0.2,
            "raw predictability {:?}",
            r.predictability_raw
        );
        assert!(r.predictability_lr.unwrap().clamped <= 0.05);
        assert!(r.predictability_ot.unwrap().clamped <= 0.05);
    }

    #[test]
    fn distortion_is_one_for_untouched_columns_and_bounded_for_transformed() {
        let d = tracked_dataset(500, 22);
        let backends = [
            RemovalBackend::linear_regression(),
            RemovalBackend::optimal_transport(),
        ];
        let reports =
            dependence_removal_report(&d, &["x1".to_string()], &backends, &evaluator(22)).unwrap();
        let r = &reports[0];
        let lr = r.distortion_lr.as_ref().unwrap();
        // x3 is independent of x1: the regression backend leaves it alone.
        assert!(lr.get("x3").unwrap() >= 0.99);
        for map in [lr, r.distortion_ot.as_ref().unwrap()] {
            assert_eq!(map.keys().collect::<Vec<_>>(), vec!["x2", "x3"]);
            for v in map.values() {
                assert!((0.0..=1.0).contains(&v), "distortion out of range: {v}");
            }
        }
    }

    #[test]
    fn independent_features_are_unpredictable_to_begin_with() {
        let mut rng = SeedSpec::new(23).stream("indep").rng();
        let n = 400;
        let d = Dataset::new(
            Matrix::from_columns(vec![
                normal_column(&mut rng, n),
                normal_column(&mut rng, n),
            ])
            .unwrap(),
            vec!["a".into(), "b".into()],
            "y".into(),
            Response::Regression(normal_column(&mut rng, n)),
        )
        .unwrap();
        let reports = dependence_removal_report(
            &d,
            &["a".to_string()],
            &[RemovalBackend::optimal_transport()],
            &evaluator(23),
        )
        .unwrap();
        assert!(reports[0].predictability_raw.clamped <= 0.05);
    }

    #[test]
    fn unknown_audit_feature_is_reported() {
        let d = tracked_dataset(100, 24);
        let err = dependence_removal_report(&d, &["nope".to_string()], &[], &evaluator(24));
        assert!(matches!(err, Err(Error::MissingColumn(n)) if n == "nope"));
    }
}
