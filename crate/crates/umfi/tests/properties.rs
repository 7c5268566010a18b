//! Property-based checks of structural invariants that should hold for
//! arbitrary well-formed inputs, not just hand-picked fixtures.

use proptest::prelude::*;

use umfi::removal::RemovalBackend;
use umfi::report::{ImportanceReport, Method};
use umfi::stats::{ks_statistic, midranks, quantile, sample_covariance};
use umfi::{lr_remove, ot_remove, subset_matrix, DiscreteJoint, FeatureSubset, Matrix, SeedSpec};

fn finite_vec(len: impl Into<prop::collection::SizeRange>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-100.0f64..100.0, len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn subset_and_complement_partition_the_columns(
        cols in prop::collection::vec(finite_vec(6usize..=6), 2..6),
        picks in prop::collection::vec(any::<bool>(), 6),
    ) {
        let p = cols.len();
        let matrix = Matrix::from_columns(cols).unwrap();
        let chosen: Vec<usize> = (0..p).filter(|&j| picks[j]).collect();
        let subset = FeatureSubset::new(chosen);
        let complement = subset.complement(p);
        let left = subset_matrix(&matrix, &subset).unwrap();
        let right = subset_matrix(&matrix, &complement).unwrap();
        prop_assert_eq!(left.n_cols() + right.n_cols(), p);
        for (k, &j) in subset.indices().iter().enumerate() {
            prop_assert_eq!(left.col(k), matrix.col(j));
        }
        for (k, &j) in complement.indices().iter().enumerate() {
            prop_assert_eq!(right.col(k), matrix.col(j));
        }
    }

    #[test]
    fn shares_form_a_probability_vector(scores in finite_vec(1..8)) {
        let names: Vec<String> = (0..scores.len()).map(|j| format!("f{j}")).collect();
        let report =
            ImportanceReport::new(Method::UmfiTransport, &names, &scores, true, 0, 0.0, 0);
        let shares: Vec<f64> = report.shares.values().collect();
        let total: f64 = shares.iter().sum();
        prop_assert!(shares.iter().all(|&s| (0.0..=1.0 + 1e-12).contains(&s)));
        prop_assert!((total - 1.0).abs() < 1e-9 || total == 0.0);
    }

    #[test]
    fn midranks_always_sum_to_the_rank_total(xs in finite_vec(1..40)) {
        let n = xs.len() as f64;
        let total: f64 = midranks(&xs).iter().sum();
        prop_assert!((total - n * (n + 1.0) / 2.0).abs() < 1e-6);
    }

    #[test]
    fn quantile_is_monotone_in_the_probability(
        xs in finite_vec(1..30),
        qa in 0.0f64..=1.0,
        qb in 0.0f64..=1.0,
    ) {
        let (lo, hi) = if qa <= qb { (qa, qb) } else { (qb, qa) };
        prop_assert!(quantile(&xs, lo) <= quantile(&xs, hi) + 1e-12);
    }

    #[test]
    fn ks_statistic_is_a_bounded_symmetric_distance(
        a in finite_vec(1..30),
        b in finite_vec(1..30),
    ) {
        let d = ks_statistic(&a, &b);
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert_eq!(d, ks_statistic(&b, &a));
        prop_assert_eq!(ks_statistic(&a, &a), 0.0);
    }

    #[test]
    fn applied_residualization_is_orthogonal_to_the_regressor(
        z in finite_vec(10..40),
        slope in -3.0f64..3.0,
        noise in finite_vec(40usize..=40),
    ) {
        let x: Vec<f64> = z
            .iter()
            .zip(&noise)
            .map(|(&zv, &nv)| slope * zv + 0.1 * nv)
            .collect();
        let cfg = RemovalBackend::linear_regression();
        let (resid, model) = lr_remove(&x, &z, &cfg).unwrap();
        if model.applied {
            let scale = sample_covariance(&x, &x).max(1.0);
            prop_assert!(sample_covariance(&resid, &z).abs() / scale < 1e-8);
        } else {
            prop_assert_eq!(&resid, &x);
        }
    }

    #[test]
    fn transport_output_matches_input_length_and_stays_finite(
        x in finite_vec(8..60),
        z_extra in finite_vec(60usize..=60),
    ) {
        let z: Vec<f64> = x
            .iter()
            .zip(&z_extra)
            .map(|(&xv, &zv)| 0.5 * xv + zv)
            .collect();
        let cfg = RemovalBackend::optimal_transport();
        let stream = SeedSpec::new(11).stream("prop-ot");
        let out = ot_remove(&x, &z, &cfg, &stream).unwrap();
        prop_assert_eq!(out.len(), x.len());
        prop_assert!(out.iter().all(|v| v.is_finite()));
        let (lo, hi) = x
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        prop_assert!(out.iter().all(|&v| v >= lo - 1e-9 && v <= hi + 1e-9));
    }

    #[test]
    fn discrete_mutual_information_is_symmetric_and_nonnegative(
        raw in prop::collection::vec(0.01f64..1.0, 12usize..=12),
    ) {
        let total: f64 = raw.iter().sum();
        let probs: Vec<f64> = raw.iter().map(|v| v / total).collect();
        let joint = DiscreteJoint::new(vec![3, 2, 2], probs).unwrap();
        let ab = joint.mutual_information(&[0], &[1]).unwrap();
        let ba = joint.mutual_information(&[1], &[0]).unwrap();
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!(ab >= -1e-12);
        let joint_vs_parts = joint.mutual_information(&[0], &[1, 2]).unwrap();
        prop_assert!(joint_vs_parts >= ab - 1e-9);
    }
}
