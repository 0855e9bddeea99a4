//! Per-dataset hyperparameters for the benchmark collection.

use crate::optimizers::{OptimizerKind, OptimizerParams, StepSchedule};
use crate::scalar::Scalar;
use crate::trainer::TrainConfig;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preset {
    /// SGD step size.
    pub sgd_rate: f64,
    pub sgd_iters: usize,
    pub sgd_batch: usize,
    pub qn_iters: usize,
    pub qn_batch: usize,
    pub tau: f64,
    pub mu: f64,
    pub damping: f64,
}

const fn row(sgd_rate: f64, sgd_iters: usize, sgd_batch: usize, qn_iters: usize, qn_batch: usize) -> Preset {
    Preset {
        sgd_rate,
        sgd_iters,
        sgd_batch,
        qn_iters,
        qn_batch,
        tau: 10.0,
        mu: 0.1,
        damping: 0.2,
    }
}

pub const PRESETS: [(&str, Preset); 12] = [
    ("a7a", row(0.1, 50, 256, 100, 128)),
    ("a8a", row(0.1, 100, 32, 100, 128)),
    ("a9a", row(0.1, 50, 256, 100, 128)),
    ("mushroom", row(0.1, 50, 256, 100, 64)),
    ("yeast", row(0.3, 50, 128, 50, 64)),
    ("ijcnn1", row(0.5, 50, 64, 50, 64)),
    ("w1a", row(0.5, 50, 64, 50, 64)),
    ("w2a", row(0.5, 50, 64, 50, 64)),
    ("w3a", row(0.5, 50, 64, 50, 64)),
    ("w4a", row(0.5, 50, 64, 50, 64)),
    ("w5a", row(0.5, 50, 64, 50, 64)),
    ("w6a", row(0.5, 50, 64, 50, 64)),
];

/// Case-insensitive lookup by dataset name.
pub fn preset(dataset: &str) -> Option<Preset> {
    let key = dataset.to_ascii_lowercase();
    PRESETS.iter().find(|(name, _)| *name == key).map(|&(_, p)| p)
}

impl Preset {
    /// `(total steps, batch size)` for `kind`.
    pub fn budget(&self, kind: OptimizerKind) -> (usize, usize) {
        match kind {
            OptimizerKind::Sgd => (self.sgd_iters, self.sgd_batch),
            OptimizerKind::Obfgs | OptimizerKind::Onaq => (self.qn_iters, self.qn_batch),
        }
    }

    /// A training configuration with ten outer rounds sharing the step budget.
    pub fn config<T: Scalar>(&self, kind: OptimizerKind, adaptive: bool) -> TrainConfig<T> {
        let mut cfg = TrainConfig::new(kind, adaptive);
        let (iters, batch) = self.budget(kind);
        cfg.batch_size = batch;
        let mut params = OptimizerParams::<T>::defaults(kind);
        params.lambda = T::lit(self.damping);
        params.mu = T::lit(self.mu);
        params.schedule = match kind {
            OptimizerKind::Sgd => StepSchedule::constant(T::lit(self.sgd_rate)),
            OptimizerKind::Obfgs => StepSchedule::tau_decay(T::one(), T::lit(self.tau)),
            OptimizerKind::Onaq => StepSchedule::sqrt_decay(T::one()),
        };
        cfg.params = params;
        cfg.with_total_iters(iters)
    }
}
