//! Downstream classifiers, UAR metrics, experiment drivers and reports.

mod classifier;
mod experiments;
mod metrics;
mod report;

pub use classifier::{train_classifier, train_classifier_tuned, Classifier, ClassifierConfig, ClassifierFit};
pub use experiments::{
    cross_corpus_run, cross_corpus_split, encoded_fold, run_cross_corpus, run_encoded, run_within_corpus, stream,
    within_corpus_fold, EncodedOptions, ExperimentConfig, FoldOutcome, ParamDigest, Reducer, SettingClassifiers,
    SettingOutcome, SyntheticTest,
};
pub use metrics::{confusion, mean_std, uar, ConfusionMatrix};
pub use report::{
    reference_annotation, EvalReport, ExperimentKind, ExperimentReport, FeatureSource, FoldResult, SeedResult,
};
