use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleKind {
    /// `α_k = α₀`
    Constant,
    /// `α_k = τ/(τ + k) · α₀`
    TauDecay,
    /// `α_k = α₀ / √k`
    SqrtDecay,
}

impl fmt::Display for ScheduleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScheduleKind::Constant => "constant",
            ScheduleKind::TauDecay => "tau-decay",
            ScheduleKind::SqrtDecay => "sqrt-decay",
        })
    }
}

impl FromStr for ScheduleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "constant" => Ok(ScheduleKind::Constant),
            "tau-decay" | "tau" => Ok(ScheduleKind::TauDecay),
            "sqrt-decay" | "sqrt" => Ok(ScheduleKind::SqrtDecay),
            _ => Err(Error::InvalidParameter(format!("unknown step schedule `{s}`"))),
        }
    }
}

/// Step-length schedule indexed by the 1-based iteration counter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepSchedule<T> {
    pub kind: ScheduleKind,
    pub alpha0: T,
    pub tau: T,
}

impl<T: Scalar> StepSchedule<T> {
    pub fn constant(alpha0: T) -> Self {
        Self {
            kind: ScheduleKind::Constant,
            alpha0,
            tau: T::lit(10.0),
        }
    }

    pub fn tau_decay(alpha0: T, tau: T) -> Self {
        Self {
            kind: ScheduleKind::TauDecay,
            alpha0,
            tau,
        }
    }

    pub fn sqrt_decay(alpha0: T) -> Self {
        Self {
            kind: ScheduleKind::SqrtDecay,
            alpha0,
            tau: T::lit(10.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha0 >= T::zero()) || !self.alpha0.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "step size must be non-negative, got {}",
                self.alpha0
            )));
        }
        if self.kind == ScheduleKind::TauDecay && !(self.tau > T::zero()) {
            return Err(Error::InvalidParameter(format!("tau must be positive, got {}", self.tau)));
        }
        Ok(())
    }

    pub fn rate(&self, k: usize) -> T {
        let k = T::from_usize_lossy(k.max(1));
        match self.kind {
            ScheduleKind::Constant => self.alpha0,
            ScheduleKind::TauDecay => self.tau / (self.tau + k) * self.alpha0,
            ScheduleKind::SqrtDecay => self.alpha0 / k.sqrt(),
        }
    }
}
