//! Subcommand handlers. Flag validation happens before any file or
//! model work; validation problems exit 1, data problems exit 2.

use std::path::Path;

use umfi::data::{load_matrix_csv, write_matrix_csv};
use umfi::removal::{RemovalBackend, RemovalKind};
use umfi::simgen::{SimDesign, SimKind, StudyMethod};
use umfi::{
    build_s_star, dependence_removal_report, load_csv, mci, run_benchmark, run_study,
    synthetic_benchmark_dataset, umfi as umfi_scores, Dataset, EvaluationFunction, ForestConfig,
    Matrix, MciConfig, Response, SeedSpec, TaskKind, UmfiConfig,
};

use crate::cli::{
    BenchmarkArgs, Cli, Command, DesignArg, DiagnoseArgs, ForestArgs, MciArgs, MciModeArg,
    RemovalArg, RemovalKnobs, RemoveDepsArgs, SimulateArgs, StudyMethodArg, TaskArg, UmfiArgs,
};
use crate::output::{emit_json, write_atomic};

#[derive(Debug)]
pub enum Failure {
    /// Bad flags or flag combinations; exit code 1.
    Usage(String),
    /// Bad data, missing files, or failed computation; exit code 2.
    Data(String),
}

impl From<umfi::Error> for Failure {
    fn from(e: umfi::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

pub fn dispatch(cli: &Cli) -> Result<(), Failure> {
    let seed = SeedSpec::new(cli.seed);
    match &cli.command {
        Command::Umfi(args) => cmd_umfi(args, seed, cli.verbose),
        Command::Mci(args) => cmd_mci(args, seed, cli.verbose),
        Command::RemoveDeps(args) => cmd_remove_deps(args, seed, cli.verbose),
        Command::Diagnose(args) => cmd_diagnose(args, seed, cli.verbose),
        Command::Simulate(args) => cmd_simulate(args, seed, cli.verbose),
        Command::Benchmark(args) => cmd_benchmark(args, seed, cli.verbose),
    }
}

fn forest_config(args: &ForestArgs) -> Result<ForestConfig, Failure> {
    if args.trees == 0 {
        return Err(Failure::Usage("--trees must be at least 1".into()));
    }
    if args.mtry == Some(0) {
        return Err(Failure::Usage("--mtry must be at least 1".into()));
    }
    if args.min_node_size == Some(0) {
        return Err(Failure::Usage("--min-node-size must be at least 1".into()));
    }
    Ok(ForestConfig {
        n_trees: args.trees,
        mtry: args.mtry,
        min_node_size: args.min_node_size,
    })
}

fn removal_backend(method: RemovalArg, knobs: &RemovalKnobs) -> Result<RemovalBackend, Failure> {
    let kind = match method {
        RemovalArg::Ot => RemovalKind::OptimalTransport,
        RemovalArg::Lr => RemovalKind::LinearRegression,
    };
    RemovalBackend::new(kind, knobs.bin_size, knobs.alpha)
        .map_err(|e| Failure::Usage(format!("invalid removal settings: {e}")))
}

fn task_kind(task: TaskArg) -> TaskKind {
    match task {
        TaskArg::Reg => TaskKind::Regression,
        TaskArg::Cls => TaskKind::Classification,
    }
}

fn load_dataset(
    path: &Path,
    response: &str,
    task: TaskArg,
    verbose: bool,
) -> Result<Dataset, Failure> {
    let dataset = load_csv(path, response, task_kind(task))
        .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
    if verbose {
        eprintln!(
            "loaded {}: {} rows, {} features, response '{}'",
            path.display(),
            dataset.n_rows(),
            dataset.n_features(),
            response
        );
    }
    Ok(dataset)
}

fn load_matrix(path: &Path, verbose: bool) -> Result<(Matrix, Vec<String>), Failure> {
    let (matrix, names) =
        load_matrix_csv(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
    if verbose {
        eprintln!(
            "loaded {}: {} rows, {} columns",
            path.display(),
            matrix.n_rows(),
            matrix.n_cols()
        );
    }
    Ok((matrix, names))
}

/// Wraps a bare feature matrix in a `Dataset` for operations that only use
/// the feature columns; the placeholder response never participates.
fn matrix_dataset(matrix: Matrix, names: Vec<String>) -> Result<Dataset, Failure> {
    let n = matrix.n_rows();
    let mut response_name = String::from("_audit_response");
    while names.contains(&response_name) {
        response_name.push('_');
    }
    Ok(Dataset::new(
        matrix,
        names,
        response_name,
        Response::Regression(vec![0.0; n]),
    )?)
}

fn cmd_umfi(args: &UmfiArgs, seed: SeedSpec, verbose: bool) -> Result<(), Failure> {
    let forest = forest_config(&args.forest)?;
    let backend = removal_backend(args.method, &args.removal)?;
    let dataset = load_dataset(&args.input, &args.response, args.task, verbose)?;
    let e = EvaluationFunction::new(forest, dataset.task(), seed);
    let config = UmfiConfig {
        backend,
        clamp_negative: true,
    };
    let report = umfi_scores(&dataset, &e, &config)?;
    emit_json(&report, args.json.as_deref())
}

fn cmd_mci(args: &MciArgs, seed: SeedSpec, verbose: bool) -> Result<(), Failure> {
    let forest = forest_config(&args.forest)?;
    let config = match args.mode {
        MciModeArg::Exact => MciConfig::exact(),
        MciModeArg::K3 => MciConfig::size_limited(3),
    };
    let dataset = load_dataset(&args.input, &args.response, args.task, verbose)?;
    let e = EvaluationFunction::new(forest, dataset.task(), seed);
    let report = mci(&dataset, &e, &config)?;
    emit_json(&report, args.json.as_deref())
}

fn cmd_remove_deps(args: &RemoveDepsArgs, seed: SeedSpec, verbose: bool) -> Result<(), Failure> {
    let backend = removal_backend(args.method, &args.removal)?;
    let (matrix, names) = load_matrix(&args.input, verbose)?;
    let protected = names
        .iter()
        .position(|n| n == &args.protected)
        .ok_or_else(|| Failure::Data(format!("column '{}' not found", args.protected)))?;
    let stream = seed.stream("remove-deps");
    let transformed = build_s_star(&matrix, protected, &backend, &stream)?;
    let kept: Vec<String> = names
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != protected)
        .map(|(_, n)| n.clone())
        .collect();
    write_matrix_atomic(&args.output, &transformed, &kept)?;
    if verbose {
        eprintln!(
            "wrote {}: {} rows, {} columns",
            args.output.display(),
            transformed.n_rows(),
            transformed.n_cols()
        );
    }
    Ok(())
}

fn cmd_diagnose(args: &DiagnoseArgs, seed: SeedSpec, verbose: bool) -> Result<(), Failure> {
    let forest = forest_config(&args.forest)?;
    let mut backends = Vec::new();
    for method in &args.methods {
        let backend = removal_backend(*method, &args.removal)?;
        if !backends.contains(&backend) {
            backends.push(backend);
        }
    }
    let (matrix, names) = load_matrix(&args.input, verbose)?;
    let dataset = matrix_dataset(matrix, names)?;
    let e = EvaluationFunction::new(forest, TaskKind::Regression, seed);
    let reports = dependence_removal_report(&dataset, &args.features, &backends, &e)?;
    emit_json(&reports, args.json.as_deref())
}

fn cmd_simulate(args: &SimulateArgs, seed: SeedSpec, verbose: bool) -> Result<(), Failure> {
    let forest = forest_config(&args.forest)?;
    let kind = match args.design {
        DesignArg::CorrInt => SimKind::CorrelatedInteraction,
        DesignArg::Corr => SimKind::Correlation,
        DesignArg::Xor => SimKind::NonlinearXor,
    };
    let design = SimDesign {
        kind,
        n: args.n,
        replications: args.reps,
    };
    let mut methods: Vec<StudyMethod> = Vec::new();
    for m in &args.methods {
        let mapped = match m {
            StudyMethodArg::Mci => StudyMethod::Mci,
            StudyMethodArg::UmfiLr => StudyMethod::UmfiLinear,
            StudyMethodArg::UmfiOt => StudyMethod::UmfiTransport,
        };
        if !methods.contains(&mapped) {
            methods.push(mapped);
        }
    }
    if verbose {
        eprintln!(
            "simulating '{}': {} replications of {} rows, {} methods",
            kind.label(),
            design.replications,
            design.n,
            methods.len()
        );
    }
    let summary = run_study(&design, &methods, &forest, seed)?;
    if let Some(csv) = &args.csv_points {
        let mut text = String::from("replication,method,feature,share\n");
        for p in &summary.points {
            text.push_str(&format!(
                "{},{},{},{}\n",
                p.replication, p.method, p.feature, p.share
            ));
        }
        write_atomic(csv, text.as_bytes())
            .map_err(|e| Failure::Data(format!("writing {}: {e}", csv.display())))?;
    }
    emit_json(&summary, args.json.as_deref())
}

fn cmd_benchmark(args: &BenchmarkArgs, seed: SeedSpec, verbose: bool) -> Result<(), Failure> {
    let forest = forest_config(&args.forest)?;
    if args.sizes.is_empty() {
        return Err(Failure::Usage("--sizes must name at least one size".into()));
    }
    let dataset = match &args.input {
        Some(path) => {
            let response = args
                .response
                .as_deref()
                .ok_or_else(|| Failure::Usage("--response is required with --input".into()))?;
            load_dataset(path, response, args.task, verbose)?
        }
        None => {
            let features = args
                .synthetic_features
                .unwrap_or_else(|| *args.sizes.iter().max().expect("non-empty sizes"));
            let data = synthetic_benchmark_dataset(args.synthetic_rows, features, seed)?;
            if verbose {
                eprintln!(
                    "synthetic dataset: {} rows, {} features",
                    data.n_rows(),
                    data.n_features()
                );
            }
            data
        }
    };
    if verbose {
        eprintln!("timing subset sizes {:?}", args.sizes);
    }
    let result = run_benchmark(&dataset, &args.sizes, &forest, seed)?;
    emit_json(&result, args.json.as_deref())
}

fn write_matrix_atomic(path: &Path, matrix: &Matrix, names: &[String]) -> Result<(), Failure> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let tmp = tempfile::NamedTempFile::new_in(dir)
        .map_err(|e| Failure::Data(format!("creating temporary file: {e}")))?;
    write_matrix_csv(matrix, names, tmp.path())?;
    tmp.persist(path)
        .map_err(|e| Failure::Data(format!("writing {}: {e}", path.display())))?;
    Ok(())
}
