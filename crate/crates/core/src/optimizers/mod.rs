//! Stochastic update rules: plain SGD, online BFGS (oBFGS) and online
//! Nesterov-accelerated quasi-Newton (oNAQ).
//!
//! The quasi-Newton steps are written against a gradient oracle
//! `grad(w, out)` so they can be exercised on analytic fixtures; the
//! `*_batch` helpers bind the oracle to a weighted minibatch.

mod bfgs;
mod schedule;

use std::fmt;
use std::str::FromStr;

pub use bfgs::{bfgs_inverse_update, bfgs_inverse_update_in_place, curvature_ok, DenseMatrix, CURVATURE_FLOOR};
pub use schedule::{ScheduleKind, StepSchedule};

use crate::dataset::{Dataset, MinibatchSampler};
use crate::error::{Error, Result};
use crate::objective::{subgradient_into, ObjectiveConfig, WeightedSample};
use crate::scalar::{self, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OptimizerKind {
    Sgd,
    Obfgs,
    Onaq,
}

impl OptimizerKind {
    pub const ALL: [OptimizerKind; 3] = [OptimizerKind::Sgd, OptimizerKind::Obfgs, OptimizerKind::Onaq];

    pub fn name(self) -> &'static str {
        match self {
            OptimizerKind::Sgd => "sgd",
            OptimizerKind::Obfgs => "obfgs",
            OptimizerKind::Onaq => "onaq",
        }
    }

    /// Schedule used when none is configured explicitly.
    pub fn default_schedule(self) -> ScheduleKind {
        match self {
            OptimizerKind::Sgd => ScheduleKind::Constant,
            OptimizerKind::Obfgs => ScheduleKind::TauDecay,
            OptimizerKind::Onaq => ScheduleKind::SqrtDecay,
        }
    }
}

impl fmt::Display for OptimizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OptimizerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sgd" => Ok(OptimizerKind::Sgd),
            "obfgs" => Ok(OptimizerKind::Obfgs),
            "onaq" => Ok(OptimizerKind::Onaq),
            _ => Err(Error::InvalidParameter(format!("unknown optimizer `{s}`"))),
        }
    }
}

/// Hyperparameters shared by the three methods. Unused fields are ignored
/// (SGD ignores `mu`, `lambda`, `eps_h`; oBFGS ignores `mu`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerParams<T> {
    pub schedule: StepSchedule<T>,
    /// Momentum coefficient, `0 < mu < 1` for oNAQ.
    pub mu: T,
    /// Damping added to the gradient difference: `y = ∇F₂ − ∇F₁ + λ s`.
    pub lambda: T,
    /// Initial inverse-Hessian scale, `H₀ = eps_h · I`.
    pub eps_h: T,
}

impl<T: Scalar> OptimizerParams<T> {
    /// Defaults for `kind`: SGD constant 0.1; oBFGS τ-decay with α₀=1, τ=10;
    /// oNAQ √k-decay with α₀=1, μ=0.1; λ=0.2 and H₀=I for both.
    pub fn defaults(kind: OptimizerKind) -> Self {
        let schedule = match kind {
            OptimizerKind::Sgd => StepSchedule::constant(T::lit(0.1)),
            OptimizerKind::Obfgs => StepSchedule::tau_decay(T::one(), T::lit(10.0)),
            OptimizerKind::Onaq => StepSchedule::sqrt_decay(T::one()),
        };
        Self {
            schedule,
            mu: T::lit(0.1),
            lambda: T::lit(0.2),
            eps_h: T::one(),
        }
    }

    pub fn validate(&self, kind: OptimizerKind) -> Result<()> {
        self.schedule.validate()?;
        if kind == OptimizerKind::Onaq && !(self.mu > T::zero() && self.mu < T::one()) {
            return Err(Error::InvalidParameter(format!("mu must lie in (0, 1), got {}", self.mu)));
        }
        if !(self.lambda >= T::zero()) {
            return Err(Error::InvalidParameter(format!("lambda must be >= 0, got {}", self.lambda)));
        }
        if !(self.eps_h > T::zero()) {
            return Err(Error::InvalidParameter(format!("eps_h must be positive, got {}", self.eps_h)));
        }
        Ok(())
    }
}

/// Mutable state of a quasi-Newton run.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiNewtonState<T> {
    pub h: DenseMatrix<T>,
    pub v: Vec<T>,
    /// 1-based iteration counter.
    pub k: usize,
    pub lambda: T,
    pub mu: T,
    /// Curvature pairs rejected by the guard so far.
    pub skipped_updates: usize,
}

impl<T: Scalar> QuasiNewtonState<T> {
    pub fn new(n: usize, eps_h: T, lambda: T, mu: T) -> Self {
        Self {
            h: DenseMatrix::scaled_identity(n, eps_h),
            v: vec![T::zero(); n],
            k: 1,
            lambda,
            mu,
            skipped_updates: 0,
        }
    }
}

/// What a single step did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    Moved { curvature_updated: bool },
    /// The search direction vanished; nothing changed except the counter.
    ZeroDirection,
}

/// `w ← w − ε ∇F(w)`.
pub fn sgd_step<T: Scalar>(w: &mut [T], grad: &[T], rate: T) {
    scalar::axpy(-rate, grad, w);
}

/// One oBFGS iteration with gradient oracle `grad`.
pub fn obfgs_step<T, G>(
    w: &mut [T],
    state: &mut QuasiNewtonState<T>,
    schedule: &StepSchedule<T>,
    mut grad: G,
) -> Result<StepOutcome>
where
    T: Scalar,
    G: FnMut(&[T], &mut [T]) -> Result<()>,
{
    let n = w.len();
    let mut g1 = vec![T::zero(); n];
    grad(w, &mut g1)?;
    let k = state.k;
    state.k += 1;

    let Some(dir) = normalized_direction(&state.h, &g1) else {
        return Ok(StepOutcome::ZeroDirection);
    };
    let rate = schedule.rate(k);
    for (vi, &di) in state.v.iter_mut().zip(&dir) {
        *vi = rate * di;
    }
    let w_old = w.to_vec();
    scalar::axpy(T::one(), &state.v, w);

    let mut g2 = vec![T::zero(); n];
    grad(w, &mut g2)?;
    let s: Vec<T> = w.iter().zip(&w_old).map(|(&a, &b)| a - b).collect();
    let updated = curvature_update(state, &s, &g1, &g2)?;
    Ok(StepOutcome::Moved { curvature_updated: updated })
}

/// One oNAQ iteration with gradient oracle `grad`; gradients are taken at
/// the look-ahead point `w + μ v`.
pub fn onaq_step<T, G>(
    w: &mut [T],
    state: &mut QuasiNewtonState<T>,
    schedule: &StepSchedule<T>,
    mut grad: G,
) -> Result<StepOutcome>
where
    T: Scalar,
    G: FnMut(&[T], &mut [T]) -> Result<()>,
{
    let n = w.len();
    let mu = state.mu;
    let lookahead: Vec<T> = w.iter().zip(&state.v).map(|(&wi, &vi)| wi + mu * vi).collect();
    let mut g1 = vec![T::zero(); n];
    grad(&lookahead, &mut g1)?;
    let k = state.k;
    state.k += 1;

    let Some(dir) = normalized_direction(&state.h, &g1) else {
        return Ok(StepOutcome::ZeroDirection);
    };
    let rate = schedule.rate(k);
    for (vi, &di) in state.v.iter_mut().zip(&dir) {
        *vi = mu * *vi + rate * di;
    }
    scalar::axpy(T::one(), &state.v, w);

    let mut g2 = vec![T::zero(); n];
    grad(w, &mut g2)?;
    let p: Vec<T> = w.iter().zip(&lookahead).map(|(&a, &b)| a - b).collect();
    let updated = curvature_update(state, &p, &g1, &g2)?;
    Ok(StepOutcome::Moved { curvature_updated: updated })
}

/// `−H g / ‖H g‖`, or `None` when that norm is zero or not finite.
fn normalized_direction<T: Scalar>(h: &DenseMatrix<T>, g: &[T]) -> Option<Vec<T>> {
    let mut d = h.mul_vec(g);
    let norm = scalar::norm2(&d);
    if norm.is_zero() || !norm.is_finite() {
        return None;
    }
    d.iter_mut().for_each(|x| *x = -*x / norm);
    Some(d)
}

fn curvature_update<T: Scalar>(state: &mut QuasiNewtonState<T>, s: &[T], g1: &[T], g2: &[T]) -> Result<bool> {
    let y: Vec<T> = g2
        .iter()
        .zip(g1)
        .zip(s)
        .map(|((&b, &a), &si)| b - a + state.lambda * si)
        .collect();
    if !curvature_ok(s, &y) {
        state.skipped_updates += 1;
        return Ok(false);
    }
    bfgs_inverse_update_in_place(&mut state.h, s, &y)?;
    Ok(true)
}

/// A configured optimizer with its running state.
#[derive(Debug, Clone)]
pub struct Optimizer<T> {
    kind: OptimizerKind,
    params: OptimizerParams<T>,
    sgd_k: usize,
    qn: Option<QuasiNewtonState<T>>,
    grad_buf: Vec<T>,
}

impl<T: Scalar> Optimizer<T> {
    /// `n` is the length of the (augmented) parameter vector.
    pub fn new(kind: OptimizerKind, params: OptimizerParams<T>, n: usize) -> Result<Self> {
        params.validate(kind)?;
        let qn = match kind {
            OptimizerKind::Sgd => None,
            _ => Some(QuasiNewtonState::new(n, params.eps_h, params.lambda, params.mu)),
        };
        Ok(Self {
            kind,
            params,
            sgd_k: 1,
            qn,
            grad_buf: vec![T::zero(); n],
        })
    }

    pub fn kind(&self) -> OptimizerKind {
        self.kind
    }

    pub fn params(&self) -> &OptimizerParams<T> {
        &self.params
    }

    /// Steps taken so far.
    pub fn steps(&self) -> usize {
        match &self.qn {
            Some(s) => s.k - 1,
            None => self.sgd_k - 1,
        }
    }

    pub fn quasi_newton_state(&self) -> Option<&QuasiNewtonState<T>> {
        self.qn.as_ref()
    }

    /// One update of `w` on the given weighted minibatch.
    pub fn step(&mut self, w: &mut [T], batch: &[WeightedSample<'_, T>], obj: &ObjectiveConfig<T>) -> Result<StepOutcome> {
        let grad = |x: &[T], out: &mut [T]| subgradient_into(x, batch, obj, out);
        match self.kind {
            OptimizerKind::Sgd => {
                let mut g = std::mem::take(&mut self.grad_buf);
                grad(w, &mut g)?;
                sgd_step(w, &g, self.params.schedule.rate(self.sgd_k));
                self.grad_buf = g;
                self.sgd_k += 1;
                Ok(StepOutcome::Moved { curvature_updated: false })
            }
            OptimizerKind::Obfgs => {
                let state = self.qn.as_mut().expect("quasi-Newton state");
                obfgs_step(w, state, &self.params.schedule, grad)
            }
            OptimizerKind::Onaq => {
                let state = self.qn.as_mut().expect("quasi-Newton state");
                onaq_step(w, state, &self.params.schedule, grad)
            }
        }
    }
}

/// Plain optimizer run with uniform weights `min(1, 2/l)`: `w₀ = 0`
/// (augmented with a bias slot), `steps` minibatch updates drawn from a
/// sampler seeded with `seed`. `observer` sees the 1-based step index and
/// the parameters after each step.
pub fn minimize<T, F>(
    train: &Dataset<T>,
    kind: OptimizerKind,
    params: OptimizerParams<T>,
    obj: &ObjectiveConfig<T>,
    batch_size: usize,
    steps: usize,
    seed: u64,
    mut observer: F,
) -> Result<Vec<T>>
where
    T: Scalar,
    F: FnMut(usize, &[T]),
{
    obj.validate()?;
    if train.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if batch_size == 0 {
        return Err(Error::InvalidParameter("batch size must be positive".into()));
    }
    let n = train.dim() + usize::from(obj.fit_bias);
    let mut w = vec![T::zero(); n];
    let mut opt = Optimizer::new(kind, params, n)?;
    let mut sampler = MinibatchSampler::new(batch_size, seed);
    let alpha = (T::lit(2.0) / T::from_usize_lossy(train.len())).min(T::one());
    let all: Vec<usize> = (0..train.len()).collect();
    for step in 1..=steps {
        let idx = sampler.next_batch(&all);
        let batch: Vec<WeightedSample<'_, T>> = idx
            .iter()
            .map(|&i| WeightedSample {
                sample: &train.samples()[i],
                alpha,
            })
            .collect();
        opt.step(&mut w, &batch, obj)?;
        observer(step, &w);
    }
    Ok(w)
}
