//! Weighted soft-margin objective over a minibatch and its subgradient.
//!
//! Two placements of the per-sample weight `α_i` are supported:
//!
//! * [`WeightMode::Regularizer`] (default): `mean_i[ α_i·C/2·‖w‖² + max(0, 1 − y_i w·x_i) ]`
//! * [`WeightMode::Hinge`]: `mean_i[ C/2·‖w‖² + α_i·max(0, 1 − y_i w·x_i) ]`
//!
//! With `fit_bias` the last component of `w` is the bias and every sample
//! contributes an implicit constant feature 1 to it.

use std::fmt;
use std::str::FromStr;

use crate::dataset::Sample;
use crate::error::{Error, Result};
use crate::scalar::{self, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightMode {
    #[default]
    Regularizer,
    Hinge,
}

impl fmt::Display for WeightMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeightMode::Regularizer => "regularizer",
            WeightMode::Hinge => "hinge",
        })
    }
}

impl FromStr for WeightMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "regularizer" => Ok(WeightMode::Regularizer),
            "hinge" => Ok(WeightMode::Hinge),
            _ => Err(Error::InvalidParameter(format!("unknown weight mode `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveConfig<T> {
    pub c: T,
    pub weight_mode: WeightMode,
    pub fit_bias: bool,
}

impl<T: Scalar> Default for ObjectiveConfig<T> {
    fn default() -> Self {
        Self {
            c: T::one(),
            weight_mode: WeightMode::Regularizer,
            fit_bias: true,
        }
    }
}

impl<T: Scalar> ObjectiveConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > T::zero()) || !self.c.is_finite() {
            return Err(Error::InvalidParameter(format!("C must be positive, got {}", self.c)));
        }
        Ok(())
    }

    /// `y (w·x̃)`, where `x̃` is `x` augmented with 1 when fitting a bias.
    pub fn margin(&self, w: &[T], x: &Sample<T>) -> T {
        x.label.sign::<T>() * self.score(w, x)
    }

    pub fn score(&self, w: &[T], x: &Sample<T>) -> T {
        if self.fit_bias {
            let (b, feat) = w.split_last().expect("bias slot");
            x.dot_dense(feat) + *b
        } else {
            x.dot_dense(w)
        }
    }
}

/// A sample paired with its current weight.
#[derive(Debug, Clone, Copy)]
pub struct WeightedSample<'a, T> {
    pub sample: &'a Sample<T>,
    pub alpha: T,
}

fn check_batch<T: Scalar>(batch: &[WeightedSample<'_, T>]) -> Result<()> {
    if batch.is_empty() {
        return Err(Error::EmptyBatch);
    }
    if let Some(bad) = batch.iter().find(|b| !(b.alpha >= T::zero() && b.alpha <= T::one())) {
        return Err(Error::InvalidParameter(format!(
            "sample weight {} outside [0, 1]",
            bad.alpha
        )));
    }
    Ok(())
}

/// Mean weighted objective over the batch.
pub fn loss<T: Scalar>(w: &[T], batch: &[WeightedSample<'_, T>], cfg: &ObjectiveConfig<T>) -> Result<T> {
    check_batch(batch)?;
    let half_c_sq = cfg.c * scalar::dot(w, w) / T::lit(2.0);
    let mut total = T::zero();
    for item in batch {
        let hinge = (T::one() - cfg.margin(w, item.sample)).max(T::zero());
        total += match cfg.weight_mode {
            WeightMode::Regularizer => item.alpha * half_c_sq + hinge,
            WeightMode::Hinge => half_c_sq + item.alpha * hinge,
        };
    }
    Ok(total / T::from_usize_lossy(batch.len()))
}

/// Mean subgradient over the batch. At margin exactly 1 the hinge
/// contributes 0.
pub fn subgradient<T: Scalar>(
    w: &[T],
    batch: &[WeightedSample<'_, T>],
    cfg: &ObjectiveConfig<T>,
) -> Result<Vec<T>> {
    let mut g = vec![T::zero(); w.len()];
    subgradient_into(w, batch, cfg, &mut g)?;
    Ok(g)
}

/// [`subgradient`] writing into a caller-provided buffer of length `w.len()`.
pub fn subgradient_into<T: Scalar>(
    w: &[T],
    batch: &[WeightedSample<'_, T>],
    cfg: &ObjectiveConfig<T>,
    out: &mut [T],
) -> Result<()> {
    check_batch(batch)?;
    if out.len() != w.len() {
        return Err(Error::DimensionMismatch {
            expected: w.len(),
            got: out.len(),
        });
    }
    out.iter_mut().for_each(|o| *o = T::zero());

    let mut reg_coef = T::zero();
    for item in batch {
        let x = item.sample;
        let active_hinge = cfg.margin(w, x) < T::one();
        let hinge_scale = match cfg.weight_mode {
            WeightMode::Regularizer => {
                reg_coef += item.alpha;
                T::one()
            }
            WeightMode::Hinge => {
                reg_coef += T::one();
                item.alpha
            }
        };
        if active_hinge {
            let a = -hinge_scale * x.label.sign::<T>();
            if cfg.fit_bias {
                let last = out.len() - 1;
                x.axpy_into(a, &mut out[..last]);
                out[last] += a;
            } else {
                x.axpy_into(a, out);
            }
        }
    }
    scalar::axpy(reg_coef * cfg.c, w, out);
    let inv_n = T::one() / T::from_usize_lossy(batch.len());
    out.iter_mut().for_each(|o| *o *= inv_n);
    Ok(())
}
