//! Linear soft-margin SVMs trained by stochastic first- and quasi-second-order
//! methods, with an optional adaptive sample-weighting loop that down-weights
//! points far from the current hyperplane and drops points that sit on the
//! wrong side of it relative to every classmate.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the bottom fix the common choice.
//!
//! ```
//! use awwsvm::{synth_two_gaussians, train, OptimizerKind, TrainConfig};
//!
//! let data = synth_two_gaussians::<f64>(100, 100, 4.0, 0.0, 7).unwrap();
//! let (tr, te) = data.split(0.25, 7).unwrap();
//! let out = train(&tr, &te, &TrainConfig::new(OptimizerKind::Onaq, true)).unwrap();
//! assert!(out.history.last().unwrap().eval.accuracy > 0.9);
//! ```

pub mod dataset;
pub mod error;
pub mod metrics;
pub mod model;
pub mod objective;
pub mod optimizers;
pub mod presets;
pub mod scalar;
pub mod stats;
pub mod trainer;
pub mod weighting;

pub use dataset::{
    parse_libsvm, parse_libsvm_with, synth_two_gaussians, synth_two_gaussians_with_truth, Dataset, Label, LabelMap,
    MinMaxScaler, MinibatchSampler, Sample, SynthData,
};
pub use error::{Error, Result};
pub use metrics::{confusion, evaluate, ConfusionMatrix, EvalReport};
pub use model::LinearModel;
pub use objective::{loss, subgradient, ObjectiveConfig, WeightMode, WeightedSample};
pub use optimizers::{minimize, Optimizer, OptimizerKind, OptimizerParams, ScheduleKind, StepSchedule};
pub use presets::{preset, Preset};
pub use scalar::Scalar;
pub use stats::{friedman, nemenyi_cd, rank_rows, FriedmanResult, RankTable};
pub use trainer::{
    run_experiment, train, train_with_observer, ExperimentDataset, ExperimentResults, Method, TrainConfig,
    TrainEvent, TrainHistory, TrainOutcome,
};
pub use weighting::{aw_value, detect_noise, NoiseMode, WeightState};

pub type Dataset64 = Dataset<f64>;
pub type Dataset32 = Dataset<f32>;
pub type Sample64 = Sample<f64>;
pub type Sample32 = Sample<f32>;
pub type LinearModel64 = LinearModel<f64>;
pub type LinearModel32 = LinearModel<f32>;
pub type TrainConfig64 = TrainConfig<f64>;
pub type TrainConfig32 = TrainConfig<f32>;
pub type TrainOutcome64 = TrainOutcome<f64>;
pub type TrainOutcome32 = TrainOutcome<f32>;
