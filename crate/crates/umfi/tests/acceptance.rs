//! The acceptance checklist: ten end-to-end criteria covering the theorem
//! oracle, both dependency-removal backends, the three simulation studies,
//! the training-count accounting, runtime scaling, and the conditional
//! BRCA reproduction. Each test prints one `criterion N: PASS` line
//! (visible with `cargo test --test acceptance -- --nocapture`); the BRCA
//! check prints a SKIP note unless `UMFI_BRCA_CSV` points at a local copy
//! of the dataset.

use std::time::Instant;

use rand::Rng;
use rand_distr::StandardNormal;
use umfi::{
    dependence_removal_report, load_csv, lr_remove, mci, ot_remove, run_benchmark, run_study,
    stats, synthetic_benchmark_dataset, training_count_audit, umfi, verify_supermodularity,
    EvaluationFunction, ForestConfig, MciConfig, RemovalBackend, RemovalKind, SeedSpec, SimDesign,
    SimKind, StudyMethod, TaskKind, UmfiConfig,
};

fn normal_vec(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

/// Forest settings shared by the three simulation-study criteria: default
/// depth and tree count, but mtry pinned to 1. The classical R forest
/// defaults to floor(p/3) candidate features per split for regression,
/// which is 1 for the 3- and 4-column fits these studies perform; fully
/// randomized split selection also keeps weak interaction terms visible
/// behind dominant additive signals.
fn study_forest() -> ForestConfig {
    ForestConfig {
        mtry: Some(1),
        ..ForestConfig::default()
    }
}

const STUDY_SEED: u64 = 2;

const ALL_METHODS: [StudyMethod; 3] = [
    StudyMethod::Mci,
    StudyMethod::UmfiLinear,
    StudyMethod::UmfiTransport,
];

#[test]
fn criterion_01_supermodularity_oracle() {
    let start = Instant::now();
    let stream = SeedSpec::new(1).stream("acceptance-supermodularity");
    let mut trials_run = 0usize;
    for (alphabet, trials) in [(2usize, 500usize), (3, 500)] {
        let violation_rate =
            verify_supermodularity(trials, alphabet, &stream.child(alphabet as u64)).unwrap();
        assert_eq!(
            violation_rate, 0.0,
            "alphabet {alphabet}: violation rate {violation_rate} (tolerance 1e-9)"
        );
        trials_run += trials;
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert_eq!(trials_run, 1000);
    assert!(elapsed < 30.0, "oracle took {elapsed:.1}s, budget 30s");
    println!("criterion 1: PASS (1000 trials, 0 violations, {elapsed:.1}s)");
}

#[test]
fn criterion_02_residual_orthogonality() {
    let backend = RemovalBackend::linear_regression();
    let n = 200;
    for pair in 0..100u64 {
        let mut rng = SeedSpec::new(2)
            .stream("acceptance-orthogonality")
            .child(pair)
            .rng();
        let z = normal_vec(&mut rng, n);
        let noise = normal_vec(&mut rng, n);
        // Slope 1 with noise sd 0.5 at n = 200 is significant far beyond
        // the 0.01 gate, so every pair exercises the residual path.
        let x: Vec<f64> = (0..n).map(|i| 0.3 + z[i] + 0.5 * noise[i]).collect();
        let (resid, model) = lr_remove(&x, &z, &backend).unwrap();
        assert!(model.applied, "pair {pair}: slope not significant");
        let cov = stats::sample_covariance(&resid, &z).abs();
        let mean = stats::mean(&resid).abs();
        assert!(cov < 1e-9, "pair {pair}: |cov(resid, z)| = {cov:e}");
        assert!(mean < 1e-9, "pair {pair}: |mean resid| = {mean:e}");
    }
    println!("criterion 2: PASS (100 pairs: residuals orthogonal and centered at 1e-9)");
}

/// Generates the shared setting of criteria 3 and 4: X = Z + N(0,1) with
/// n = 2000, transported with the default bin target of 100.
fn ot_run(run: u64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let n = 2000;
    let stream = SeedSpec::new(3).stream("acceptance-ot").child(run);
    let mut rng = stream.rng();
    let z = normal_vec(&mut rng, n);
    let noise = normal_vec(&mut rng, n);
    let x: Vec<f64> = (0..n).map(|i| z[i] + noise[i]).collect();
    let backend = RemovalBackend::new(RemovalKind::OptimalTransport, 100, 0.01).unwrap();
    let transported = ot_remove(&x, &z, &backend, &stream.child_label("tiebreak")).unwrap();
    (x, z, transported)
}

#[test]
fn criterion_03_ot_independence() {
    // Null oracle: the 95th percentile of |corr| between independent
    // samples of this length tells us what "uncorrelated" looks like, and
    // must sit at or below the 0.05 acceptance threshold.
    let n = 2000;
    let mut null_abs: Vec<f64> = (0..200u64)
        .map(|draw| {
            let mut rng = SeedSpec::new(3)
                .stream("acceptance-ot-null")
                .child(draw)
                .rng();
            let a = normal_vec(&mut rng, n);
            let b = normal_vec(&mut rng, n);
            stats::pearson(&a, &b).abs()
        })
        .collect();
    null_abs.sort_by(f64::total_cmp);
    let null_q95 = stats::quantile(&null_abs, 0.95);
    assert!(
        null_q95 <= 0.05,
        "null 95th percentile {null_q95:.4} exceeds the 0.05 threshold"
    );

    let passes = (0..100u64)
        .filter(|&run| {
            let (_, z, transported) = ot_run(run);
            stats::pearson(&transported, &z).abs() < 0.05
        })
        .count();
    assert!(passes >= 95, "only {passes}/100 runs under |corr| 0.05");
    println!(
        "criterion 3: PASS ({passes}/100 runs |corr| < 0.05; null q95 = {null_q95:.4})"
    );
}

#[test]
fn criterion_04_ot_marginal_preservation() {
    let passes = (0..100u64)
        .filter(|&run| {
            let (x, _, transported) = ot_run(run);
            stats::ks_statistic(&x, &transported) < 0.1
        })
        .count();
    assert!(passes >= 95, "only {passes}/100 runs with KS < 0.1");
    println!("criterion 4: PASS ({passes}/100 runs KS(X, transported X) < 0.1)");
}

#[test]
fn criterion_05_correlated_interactions_study() {
    let start = Instant::now();
    let design = SimDesign::new(SimKind::CorrelatedInteraction);
    let summary = run_study(&design, &ALL_METHODS, &study_forest(), SeedSpec::new(STUDY_SEED))
        .unwrap();
    let med = |m: &str, f: &str| summary.median_share(m, f).unwrap();

    for method in ["UMFI_LR", "UMFI_OT"] {
        let gap13 = med(method, "x1") - med(method, "x3");
        let gap24 = med(method, "x2") - med(method, "x4");
        assert!(
            gap13 > 0.03 && gap24 > 0.03,
            "{method}: median share gaps x1-x3 = {:.2} pts, x2-x4 = {:.2} pts (need > 3)",
            gap13 * 100.0,
            gap24 * 100.0
        );
    }
    let mci_meds: Vec<f64> = ["x1", "x2", "x3", "x4"]
        .iter()
        .map(|f| med("MCI_EXACT", f))
        .collect();
    let spread = mci_meds.iter().cloned().fold(f64::MIN, f64::max)
        - mci_meds.iter().cloned().fold(f64::MAX, f64::min);
    assert!(
        spread < 0.05,
        "MCI median shares spread {:.2} pts (need < 5)",
        spread * 100.0
    );
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 1800.0, "study took {elapsed:.0}s, budget 30 min");
    println!(
        "criterion 5: PASS (UMFI gaps LR {:.1}/{:.1} pts, OT {:.1}/{:.1} pts > 3; MCI spread {spread_pts:.1} pts < 5; {elapsed:.0}s)",
        (med("UMFI_LR", "x1") - med("UMFI_LR", "x3")) * 100.0,
        (med("UMFI_LR", "x2") - med("UMFI_LR", "x4")) * 100.0,
        (med("UMFI_OT", "x1") - med("UMFI_OT", "x3")) * 100.0,
        (med("UMFI_OT", "x2") - med("UMFI_OT", "x4")) * 100.0,
        spread_pts = spread * 100.0,
    );
}

#[test]
fn criterion_06_correlations_study() {
    let design = SimDesign::new(SimKind::Correlation);
    let summary = run_study(&design, &ALL_METHODS, &study_forest(), SeedSpec::new(STUDY_SEED))
        .unwrap();
    let med = |m: &str, f: &str| summary.median_share(m, f).unwrap();

    for method in ["MCI_EXACT", "UMFI_LR"] {
        let diff = (med(method, "x1") - med(method, "x2")).abs();
        assert!(
            diff < 0.05,
            "{method}: |share(x1) - share(x2)| = {:.2} pts (need < 5)",
            diff * 100.0
        );
    }
    let x4_lr = med("UMFI_LR", "x4");
    let x4_ot = med("UMFI_OT", "x4");
    let x4_mci = med("MCI_EXACT", "x4");
    assert!(
        x4_lr < 0.03 && x4_ot < 0.03,
        "UMFI x4 shares {:.2}% / {:.2}% (need < 3%)",
        x4_lr * 100.0,
        x4_ot * 100.0
    );
    assert!(
        x4_mci > x4_lr && x4_mci > x4_ot,
        "MCI x4 share {:.2}% must exceed both UMFI x4 shares",
        x4_mci * 100.0
    );
    println!(
        "criterion 6: PASS (x4 medians: MCI {:.1}% > UMFI {:.1}%/{:.1}%; |x1-x2| within 5 pts)",
        x4_mci * 100.0,
        x4_lr * 100.0,
        x4_ot * 100.0
    );
}

#[test]
fn criterion_07_xor_study() {
    let design = SimDesign::new(SimKind::NonlinearXor);
    let summary = run_study(&design, &ALL_METHODS, &study_forest(), SeedSpec::new(STUDY_SEED))
        .unwrap();
    for method in ["MCI_EXACT", "UMFI_LR", "UMFI_OT"] {
        for f in ["x1", "x2"] {
            let share = summary.median_share(method, f).unwrap();
            assert!(
                share > 0.35,
                "{method}: median share({f}) = {:.1}% (need > 35%)",
                share * 100.0
            );
        }
        for f in ["x3", "x4"] {
            let share = summary.median_share(method, f).unwrap();
            assert!(
                share < 0.05,
                "{method}: median share({f}) = {:.1}% (need < 5%)",
                share * 100.0
            );
        }
    }
    println!("criterion 7: PASS (all methods: x1, x2 > 35%; x3, x4 < 5%)");
}

#[test]
fn criterion_08_training_count_audit() {
    // Counts are independent of forest size, so a small forest on a small
    // synthetic table keeps the 2^15 - 1 exact enumeration affordable.
    let forest = ForestConfig {
        n_trees: 6,
        ..ForestConfig::default()
    };
    for p in [4usize, 5, 10, 15] {
        let d = synthetic_benchmark_dataset(40, p, SeedSpec::new(7)).unwrap();

        let e = EvaluationFunction::new(forest.clone(), TaskKind::Regression, SeedSpec::new(7));
        let r = umfi(&d, &e, &UmfiConfig::transport()).unwrap();
        assert_eq!(r.trainings, 2 * p as u64, "UMFI fit count at p = {p}");
        assert!(training_count_audit(&r, p));

        let e = EvaluationFunction::new(forest.clone(), TaskKind::Regression, SeedSpec::new(7));
        let r = mci(&d, &e, &MciConfig::exact()).unwrap();
        assert_eq!(r.trainings, (1u64 << p) - 1, "MCI exact fit count at p = {p}");
        assert!(training_count_audit(&r, p));

        let e = EvaluationFunction::new(forest.clone(), TaskKind::Regression, SeedSpec::new(7));
        let r = mci(&d, &e, &MciConfig::size_limited(3)).unwrap();
        let choose = |k: u64| stats::binomial(p as u64, k);
        assert_eq!(
            r.trainings,
            choose(1) + choose(2) + choose(3),
            "MCI size-limited fit count at p = {p}"
        );
        assert!(training_count_audit(&r, p));
    }
    println!("criterion 8: PASS (UMFI 2p; MCI exact 2^p - 1; size-limited C(p,1)+C(p,2)+C(p,3) at p = 4, 5, 10, 15)");
}

#[test]
fn criterion_09_runtime_scaling() {
    // Part 1: the MCI/UMFI wall-time ratio must rise monotonically with p
    // once the exponential fit count dominates (p >= 8). A small forest on
    // synthetic data keeps the total under a few minutes while the 2^p fit
    // count still swamps any per-fit jitter.
    let sizes: Vec<usize> = (5..=15).collect();
    let d = synthetic_benchmark_dataset(140, 15, SeedSpec::new(11)).unwrap();
    let forest = ForestConfig {
        n_trees: 10,
        ..ForestConfig::default()
    };
    let result = run_benchmark(&d, &sizes, &forest, SeedSpec::new(11)).unwrap();
    let ratios: Vec<(usize, f64)> = result
        .ratios()
        .into_iter()
        .filter(|(p, _)| *p >= 8)
        .collect();
    assert_eq!(ratios.first().map(|r| r.0), Some(8));
    assert_eq!(ratios.last().map(|r| r.0), Some(15));
    for pair in ratios.windows(2) {
        assert!(
            pair[1].1 > pair[0].1,
            "ratio fell from {:.1} (p = {}) to {:.1} (p = {})",
            pair[0].1,
            pair[0].0,
            pair[1].1,
            pair[1].0
        );
    }

    // Part 2: one UMFI-OT report at p = 50, n = 571 with the default
    // forest must complete within the two-minute budget.
    let wide = synthetic_benchmark_dataset(571, 50, SeedSpec::new(13)).unwrap();
    let e = EvaluationFunction::new(ForestConfig::default(), TaskKind::Regression, SeedSpec::new(13));
    let start = Instant::now();
    let report = umfi(&wide, &e, &UmfiConfig::transport()).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    assert_eq!(report.trainings, 100);
    assert!(elapsed < 120.0, "UMFI-OT at p = 50 took {elapsed:.0}s, budget 120s");
    println!(
        "criterion 9: PASS (ratio rises {:.1} -> {:.1} over p = 8..15; UMFI-OT p = 50 in {elapsed:.0}s)",
        ratios.first().unwrap().1,
        ratios.last().unwrap().1
    );
}

#[test]
fn criterion_10_brca_reproduction() {
    let Ok(csv_path) = std::env::var("UMFI_BRCA_CSV") else {
        println!(
            "criterion 10: SKIP (set UMFI_BRCA_CSV to a local copy of the BRCA gene-expression CSV, \
             UMFI_BRCA_RESPONSE to its label column, and UMFI_BRCA_KNOWN_GENES to the comma-separated \
             known-gene columns to run this check)"
        );
        return;
    };
    let response = std::env::var("UMFI_BRCA_RESPONSE").unwrap_or_else(|_| "BRCA".to_owned());
    let known: Vec<String> = std::env::var("UMFI_BRCA_KNOWN_GENES")
        .expect("UMFI_BRCA_KNOWN_GENES must list the known-gene columns when UMFI_BRCA_CSV is set")
        .split(',')
        .map(|s| s.trim().to_owned())
        .filter(|s| !s.is_empty())
        .collect();
    let d = load_csv(&csv_path, &response, TaskKind::Classification).unwrap();
    let non_known: Vec<String> = d
        .feature_names
        .iter()
        .filter(|n| !known.contains(n))
        .cloned()
        .collect();
    assert_eq!(known.len(), 10, "expected the 10 known genes");
    assert_eq!(non_known.len(), 40, "expected 40 remaining genes");

    // Dependence-removal audit over 15 features: the known genes plus the
    // first five others, mirroring the 15-feature diagnostic subset.
    let mut audited = known.clone();
    audited.extend(non_known.iter().take(5).cloned());
    let seed = SeedSpec::new(42);
    let e = EvaluationFunction::new(ForestConfig::default(), TaskKind::Classification, seed);
    let backends = [RemovalBackend::optimal_transport()];
    let reports = dependence_removal_report(&d, &audited, &backends, &e).unwrap();
    let mut raw_above = 0;
    for r in &reports {
        let ot = r.predictability_ot.unwrap();
        assert!(
            ot.clamped <= 0.05,
            "{}: predictability after transport = {:.3}",
            r.protected,
            ot.clamped
        );
        if r.predictability_raw.clamped > 0.2 {
            raw_above += 1;
        }
    }
    assert!(
        raw_above * 2 > reports.len(),
        "raw predictability > 0.2 for only {raw_above}/{} audited features",
        reports.len()
    );

    // Importance: both UMFI backends zero out at least five of the 40
    // non-known genes, size-limited MCI zeroes none, and BCL11A leads
    // every ranking.
    let zero_count = |scores: &umfi::report::OrderedMap| {
        non_known
            .iter()
            .filter(|g| scores.get(g).unwrap_or(0.0) <= 0.0)
            .count()
    };
    let top_feature = |scores: &umfi::report::OrderedMap| {
        scores
            .0
            .iter()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(k, _)| k.clone())
            .unwrap()
    };

    let e = EvaluationFunction::new(ForestConfig::default(), TaskKind::Classification, seed);
    let lr = umfi(&d, &e, &UmfiConfig::linear_regression()).unwrap();
    let e = EvaluationFunction::new(ForestConfig::default(), TaskKind::Classification, seed);
    let ot = umfi(&d, &e, &UmfiConfig::transport()).unwrap();
    let e = EvaluationFunction::new(ForestConfig::default(), TaskKind::Classification, seed);
    let k3 = mci(&d, &e, &MciConfig::size_limited(3)).unwrap();

    assert!(
        zero_count(&lr.scores) >= 5,
        "UMFI-LR zeroed only {} of 40",
        zero_count(&lr.scores)
    );
    assert!(
        zero_count(&ot.scores) >= 5,
        "UMFI-OT zeroed only {} of 40",
        zero_count(&ot.scores)
    );
    assert_eq!(zero_count(&k3.scores), 0, "MCI K3 must score every gene");
    for (label, report) in [("UMFI_LR", &lr), ("UMFI_OT", &ot), ("MCI_K3", &k3)] {
        assert_eq!(
            top_feature(&report.scores),
            "BCL11A",
            "{label}: BCL11A must rank first"
        );
    }
    println!("criterion 10: PASS (transport audit clean; UMFI sparsity and BCL11A ranking confirmed)");
}
