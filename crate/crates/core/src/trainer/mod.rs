//! The adaptive-weight training loop.
//!
//! Starting from `w = 0` and uniform weights `2/l`, each outer iteration
//! runs `inner_iters` optimizer steps on the active samples, measures every
//! active sample's signed distance to the resulting hyperplane, removes
//! samples the noise screen flags and recomputes the weights from the
//! unsigned distances. With `adaptive = false` only the optimizer steps run.

mod experiment;

pub use experiment::{
    method_name, run_experiment, CellResult, ExperimentDataset, ExperimentResults, Method, SummaryRow,
    RESULTS_CSV_HEADER,
};

use crate::dataset::{Dataset, Label, MinibatchSampler};
use crate::error::{Error, Result};
use crate::metrics::{evaluate, EvalReport};
use crate::model::LinearModel;
use crate::objective::{loss, ObjectiveConfig, WeightMode, WeightedSample};
use crate::optimizers::{Optimizer, OptimizerKind, OptimizerParams};
use crate::scalar::Scalar;
use crate::weighting::{detect_noise, NoiseMode, WeightState, WeightStats};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig<T> {
    pub optimizer: OptimizerKind,
    pub adaptive: bool,
    pub outer_iters: usize,
    pub inner_iters: usize,
    pub batch_size: usize,
    pub objective: ObjectiveConfig<T>,
    pub sigma: T,
    pub noise_mode: NoiseMode,
    pub params: OptimizerParams<T>,
    pub seed: u64,
}

impl<T: Scalar> TrainConfig<T> {
    /// Ten outer rounds of ten steps, batch 64, σ = 1, C = 1, λ = 0.2.
    pub fn new(optimizer: OptimizerKind, adaptive: bool) -> Self {
        Self {
            optimizer,
            adaptive,
            outer_iters: 10,
            inner_iters: 10,
            batch_size: 64,
            objective: ObjectiveConfig::default(),
            sigma: T::one(),
            noise_mode: NoiseMode::default(),
            params: OptimizerParams::defaults(optimizer),
            seed: 0,
        }
    }

    /// Splits a total step budget into `outer_iters` rounds of
    /// `max(1, total / outer_iters)` steps.
    pub fn with_total_iters(mut self, total: usize) -> Self {
        self.inner_iters = (total / self.outer_iters.max(1)).max(1);
        self
    }

    pub fn method_name(&self) -> String {
        method_name(self.optimizer, self.adaptive)
    }

    pub fn validate(&self) -> Result<()> {
        if self.outer_iters == 0 || self.inner_iters == 0 || self.batch_size == 0 {
            return Err(Error::InvalidParameter(
                "outer_iters, inner_iters and batch_size must be positive".into(),
            ));
        }
        if !(self.sigma > T::zero()) {
            return Err(Error::InvalidParameter(format!("sigma must be positive, got {}", self.sigma)));
        }
        self.objective.validate()?;
        self.params.validate(self.optimizer)
    }
}

/// One outer iteration's log entry.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord<T> {
    /// 1-based.
    pub outer_iter: usize,
    pub eval: EvalReport,
    pub train_loss: T,
    /// Samples eliminated so far (cumulative).
    pub n_noise: usize,
    pub alpha: Option<WeightStats<T>>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainHistory<T> {
    pub records: Vec<IterationRecord<T>>,
}

impl<T: Scalar> TrainHistory<T> {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&IterationRecord<T>> {
        self.records.last()
    }

    /// CSV with the results-file columns (`dataset`, `method`, `seed` filled
    /// from the arguments) and no `final` row.
    pub fn to_csv(&self, dataset: &str, method: &str, seed: u64) -> String {
        let mut out = String::from(RESULTS_CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            out.push_str(&experiment::csv_row(dataset, method, seed, &r.outer_iter.to_string(), r));
        }
        out
    }

    /// Per-iteration weight trace: `outer_iter,alpha_min,alpha_mean,alpha_max,n_noise`.
    pub fn weight_trace_csv(&self) -> String {
        let mut out = String::from("outer_iter,alpha_min,alpha_mean,alpha_max,n_noise\n");
        for r in &self.records {
            let (lo, mean, hi) = r
                .alpha
                .map(|s| (s.min.to_string(), s.mean.to_string(), s.max.to_string()))
                .unwrap_or_default();
            out.push_str(&format!("{},{lo},{mean},{hi},{}\n", r.outer_iter, r.n_noise));
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome<T> {
    pub model: LinearModel<T>,
    pub history: TrainHistory<T>,
    pub weights: WeightState<T>,
}

/// Observer events emitted during training.
#[derive(Debug)]
pub enum TrainEvent<'a, T> {
    /// After each optimizer step: global 1-based step index and parameters.
    Step { step: usize, params: &'a [T] },
    /// After each outer iteration.
    Outer { record: &'a IterationRecord<T>, weights: &'a WeightState<T> },
}

pub fn train<T: Scalar>(train_ds: &Dataset<T>, eval_ds: &Dataset<T>, cfg: &TrainConfig<T>) -> Result<TrainOutcome<T>> {
    train_with_observer(train_ds, eval_ds, cfg, |_| {})
}

/// [`train`] with a callback that sees every step and every outer iteration.
pub fn train_with_observer<T, F>(
    train_ds: &Dataset<T>,
    eval_ds: &Dataset<T>,
    cfg: &TrainConfig<T>,
    mut observer: F,
) -> Result<TrainOutcome<T>>
where
    T: Scalar,
    F: FnMut(TrainEvent<'_, T>),
{
    cfg.validate()?;
    if train_ds.n_pos() == 0 {
        return Err(Error::Insufficient("training set has no +1 samples".into()));
    }
    if train_ds.n_neg() == 0 {
        return Err(Error::Insufficient("training set has no -1 samples".into()));
    }

    let samples = train_ds.samples();
    let n_params = train_ds.dim() + usize::from(cfg.objective.fit_bias);
    let mut w = vec![T::zero(); n_params];
    let mut weights = WeightState::init(train_ds.len(), cfg.sigma)?;
    let mut opt = Optimizer::new(cfg.optimizer, cfg.params, n_params)?;
    let mut sampler = MinibatchSampler::new(cfg.batch_size, cfg.seed);
    let mut active = weights.active_indices();
    let mut history = TrainHistory::default();
    let mut step = 0usize;

    for outer in 1..=cfg.outer_iters {
        for _ in 0..cfg.inner_iters {
            let idx = sampler.next_batch(&active);
            let batch: Vec<WeightedSample<'_, T>> = idx
                .iter()
                .map(|&i| WeightedSample {
                    sample: &samples[i],
                    alpha: weights.alpha(i),
                })
                .collect();
            opt.step(&mut w, &batch, &cfg.objective)?;
            step += 1;
            observer(TrainEvent::Step { step, params: &w });
        }

        let model = to_model(&w, cfg.objective.fit_bias, train_ds);
        if cfg.adaptive {
            adapt_weights(&model, samples, &mut weights, cfg.noise_mode)?;
            active = weights.active_indices();
        }

        let record = IterationRecord {
            outer_iter: outer,
            eval: evaluate(&model, eval_ds),
            train_loss: active_loss(&w, samples, &weights, &active, &cfg.objective)?,
            n_noise: weights.n_eliminated(),
            alpha: weights.stats(),
        };
        observer(TrainEvent::Outer {
            record: &record,
            weights: &weights,
        });
        history.records.push(record);
    }

    Ok(TrainOutcome {
        model: to_model(&w, cfg.objective.fit_bias, train_ds),
        history,
        weights,
    })
}

fn to_model<T: Scalar>(w: &[T], fit_bias: bool, ds: &Dataset<T>) -> LinearModel<T> {
    let model = if fit_bias {
        LinearModel::from_augmented(w)
    } else {
        LinearModel::new(w.to_vec(), T::zero())
    };
    model.with_label_map(ds.label_map())
}

/// Noise screen followed by the weight refresh. A zero-norm hyperplane has
/// no defined distances, so the round leaves the weights untouched.
fn adapt_weights<T: Scalar>(
    model: &LinearModel<T>,
    samples: &[crate::dataset::Sample<T>],
    weights: &mut WeightState<T>,
    noise_mode: NoiseMode,
) -> Result<()> {
    let norm = model.weight_norm();
    if norm.is_zero() || !norm.is_finite() {
        return Ok(());
    }
    let distances: Vec<T> = samples
        .iter()
        .enumerate()
        .map(|(i, s)| {
            if weights.is_active(i) {
                model.decision_value(s) / norm
            } else {
                T::zero()
            }
        })
        .collect();

    let flagged = detect_noise(samples, &distances, weights.active_mask(), noise_mode);
    weights.eliminate(&flagged);
    for class in [Label::Pos, Label::Neg] {
        let left = (0..samples.len()).any(|i| weights.is_active(i) && samples[i].label == class);
        if !left {
            return Err(Error::ClassEliminated(if class == Label::Pos { "+1" } else { "-1" }));
        }
    }
    weights.update(&distances)
}

fn active_loss<T: Scalar>(
    w: &[T],
    samples: &[crate::dataset::Sample<T>],
    weights: &WeightState<T>,
    active: &[usize],
    obj: &ObjectiveConfig<T>,
) -> Result<T> {
    let batch: Vec<WeightedSample<'_, T>> = active
        .iter()
        .map(|&i| WeightedSample {
            sample: &samples[i],
            alpha: weights.alpha(i),
        })
        .collect();
    loss(w, &batch, obj)
}

/// Human-readable one-line description of the settings that matter when
/// comparing runs.
pub fn describe<T: Scalar>(cfg: &TrainConfig<T>) -> String {
    let mode = match cfg.objective.weight_mode {
        WeightMode::Regularizer => "regularizer",
        WeightMode::Hinge => "hinge",
    };
    format!(
        "method={} weight_mode={mode} noise_mode={} C={} sigma={} damping={} mu={} schedule={}(alpha0={}, tau={}) outer={} inner={} batch={} seed={}",
        cfg.method_name(),
        cfg.noise_mode,
        cfg.objective.c,
        cfg.sigma,
        cfg.params.lambda,
        cfg.params.mu,
        cfg.params.schedule.kind,
        cfg.params.schedule.alpha0,
        cfg.params.schedule.tau,
        cfg.outer_iters,
        cfg.inner_iters,
        cfg.batch_size,
        cfg.seed,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::synth_two_gaussians;
    use crate::optimizers::minimize;

    fn data() -> (Dataset<f64>, Dataset<f64>) {
        synth_two_gaussians::<f64>(120, 60, 3.0, 0.0, 4).unwrap().split(0.25, 1).unwrap()
    }

    #[test]
    fn baseline_matches_bare_optimizer_bitwise() {
        let (tr, te) = data();
        for kind in OptimizerKind::ALL {
            let mut cfg = TrainConfig::<f64>::new(kind, false);
            cfg.outer_iters = 3;
            cfg.inner_iters = 7;
            cfg.batch_size = 16;
            cfg.seed = 99;
            let mut trace_a = Vec::new();
            let out = train_with_observer(&tr, &te, &cfg, |e| {
                if let TrainEvent::Step { params, .. } = e {
                    trace_a.push(params.to_vec());
                }
            })
            .unwrap();
            let mut trace_b = Vec::new();
            minimize(&tr, kind, cfg.params, &cfg.objective, 16, 21, 99, |_, w| trace_b.push(w.to_vec())).unwrap();
            assert_eq!(trace_a, trace_b, "{kind}");
            assert_eq!(out.weights.n_active(), tr.len());
            assert!(out.weights.raw_alpha().iter().all(|&a| a == 2.0 / tr.len() as f64));
        }
    }

    #[test]
    fn one_outer_iteration() {
        let (tr, te) = data();
        let mut cfg = TrainConfig::<f64>::new(OptimizerKind::Sgd, true);
        cfg.outer_iters = 1;
        let out = train(&tr, &te, &cfg).unwrap();
        assert_eq!(out.history.len(), 1);
    }

    #[test]
    fn history_bounds_and_monotone_active_set() {
        let (tr, te) = synth_two_gaussians::<f64>(150, 50, 2.0, 0.1, 8).unwrap().split(0.2, 2).unwrap();
        for kind in OptimizerKind::ALL {
            let mut cfg = TrainConfig::<f64>::new(kind, true);
            cfg.batch_size = 32;
            let out = train(&tr, &te, &cfg).unwrap();
            assert_eq!(out.history.len(), cfg.outer_iters);
            let mut prev = 0;
            for r in &out.history.records {
                assert!((0.0..=1.0).contains(&r.eval.accuracy));
                assert!(r.n_noise >= prev);
                prev = r.n_noise;
                assert!(r.train_loss >= 0.0);
            }
        }
    }

    #[test]
    fn rejects_single_class_training_set() {
        let ds = synth_two_gaussians::<f64>(10, 10, 2.0, 0.0, 0).unwrap();
        let pos: Vec<usize> = (0..10).collect();
        let only_pos = ds.subset(&pos).unwrap();
        let cfg = TrainConfig::<f64>::new(OptimizerKind::Sgd, true);
        assert!(matches!(train(&only_pos, &ds, &cfg), Err(Error::Insufficient(_))));
    }

    #[test]
    fn deterministic_under_seed() {
        let (tr, te) = data();
        let mut cfg = TrainConfig::<f64>::new(OptimizerKind::Onaq, true);
        cfg.seed = 5;
        let a = train(&tr, &te, &cfg).unwrap();
        let b = train(&tr, &te, &cfg).unwrap();
        assert_eq!(a.model, b.model);
        assert_eq!(a.history, b.history);
    }

    #[test]
    fn runs_in_single_precision() {
        let (tr, te) = synth_two_gaussians::<f32>(80, 40, 4.0, 0.0, 3).unwrap().split(0.25, 0).unwrap();
        let cfg = TrainConfig::<f32>::new(OptimizerKind::Obfgs, true);
        let out = train(&tr, &te, &cfg).unwrap();
        assert!(out.history.last().unwrap().eval.accuracy > 0.8);
    }

    #[test]
    fn total_iteration_split() {
        let cfg = TrainConfig::<f64>::new(OptimizerKind::Sgd, true).with_total_iters(50);
        assert_eq!((cfg.outer_iters, cfg.inner_iters), (10, 5));
        let cfg = TrainConfig::<f64>::new(OptimizerKind::Sgd, true).with_total_iters(3);
        assert_eq!(cfg.inner_iters, 1);
    }
}
