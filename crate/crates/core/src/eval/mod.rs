//! Evaluation: AUROC, cross-validation, significance tests and diagnostics.

pub mod auroc;
pub mod cv;
pub mod diagnostic;
pub mod results;
pub mod stats;

pub use auroc::auroc;
pub use cv::{
    evaluate_holdout, fit_fold, make_folds, run_cv, run_sweep, CvOptions, Detector, ExperimentResult, Fold,
    FoldFit, FoldPlan, SweepCell, DEFAULT_FOLDS,
};
pub use diagnostic::{directionality_diagnostic, AttributeDiagnostic};
pub use stats::{holm_bonferroni, wilcoxon_one_sided, WilcoxonMethod, WilcoxonResult};
