//! Information-theoretic oracles and diagnostics: exact computations on
//! small discrete joint distributions (used to verify the theory the
//! importance scores rest on), a maximal-information-coefficient
//! approximation, and the dependence-removal audit report.

mod diagnostics;
mod joint;
mod mic;

pub use diagnostics::{dependence_removal_report, DependenceReport};
pub use joint::{verify_supermodularity, DiscreteJoint};
pub use mic::mic_approx;
