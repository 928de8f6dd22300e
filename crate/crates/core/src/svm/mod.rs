//! Soft-margin SVM on precomputed kernels.
//!
//! [`train_binary`] solves the dual problem by sequential minimal
//! optimisation; [`train_ovr`] and [`predict_ovr`] extend it to several
//! classes one-vs-rest; [`cross_validate`] runs a stratified k-fold grid
//! search over kernel parameters and box bounds.

mod cv;
mod ovr;
mod scores;
mod smo;

pub use cv::{
    cross_validate, default_zetas, evaluate_split, stratified_folds, stratified_split, CvConfig,
    CvReport, GridResult, SplitOutcome,
};
pub use ovr::{predict_ovr, train_ovr, OneVsRestSvm};
pub use scores::{scores, F1Average, Scores};
pub use smo::{train_binary, TrainedBinarySvm, ITERATIONS_PER_SAMPLE, KKT_TOLERANCE};
