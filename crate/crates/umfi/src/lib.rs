//! Ultra-marginal feature importance.
//!
//! Feature importance by preprocessing: for each feature f, the remaining
//! features are transformed to remove their dependence on f (by pairwise
//! optimal transport or linear-regression residualization), and f's
//! importance is the gain in out-of-bag random-forest skill from adding f
//! back to the transformed set. This costs two model fits per feature,
//! against the exponential subset enumeration of the marginal-contribution
//! baseline that is also implemented here for comparison.

pub mod benchmark;
pub mod data;
pub mod error;
pub mod evaluator;
pub mod forest;
pub mod importance;
pub mod info;
pub mod removal;
pub mod report;
pub mod seed;
pub mod simgen;
pub mod stats;

pub use benchmark::{run_benchmark, synthetic_benchmark_dataset, BenchmarkResult};
pub use data::{load_csv, subset_matrix, Dataset, FeatureSubset, Matrix, Response, TaskKind};
pub use error::{Error, Result};
pub use evaluator::{EvaluationFunction, NuValue};
pub use forest::{fit_forest, oob_score, Forest, ForestConfig};
pub use importance::{mci, training_count_audit, umfi, MciConfig, MciMode, UmfiConfig};
pub use info::{
    dependence_removal_report, mic_approx, verify_supermodularity, DependenceReport, DiscreteJoint,
};
pub use removal::{build_s_star, lr_remove, ot_remove, RemovalBackend, RemovalKind};
pub use report::{ImportanceReport, Method};
pub use seed::{SeedSpec, SeedStream};
pub use simgen::{generate, run_study, ReplicationSummary, SimDesign, SimKind, StudyMethod};
