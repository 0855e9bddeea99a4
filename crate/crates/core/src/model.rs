//! Linear decision hyperplane `w·x + b = 0`.
//!
//! Training works on the augmented vector `[w_1, …, w_dim, b]`: every sample
//! carries an implicit constant feature 1 in the last slot, so the bias is
//! regularized with the weights. Geometric distances divide by the norm of
//! the non-bias part only.

use std::fmt::Write as _;

use crate::dataset::{Label, LabelMap, Sample};
use crate::error::{Error, Result};
use crate::scalar::{self, Scalar};

const MAGIC: &str = "awwsvm-linear-model 1";
const BIAS_CONVENTION: &str = "augmented-last";

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel<T> {
    weights: Vec<T>,
    bias: T,
    label_map: LabelMap,
}

impl<T: Scalar> LinearModel<T> {
    pub fn new(weights: Vec<T>, bias: T) -> Self {
        Self {
            weights,
            bias,
            label_map: LabelMap::STANDARD,
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::new(vec![T::zero(); dim], T::zero())
    }

    /// Splits an augmented parameter vector `[w.., b]`.
    pub fn from_augmented(params: &[T]) -> Self {
        let (b, w) = params.split_last().expect("augmented vector has a bias slot");
        Self::new(w.to_vec(), *b)
    }

    pub fn with_label_map(mut self, map: LabelMap) -> Self {
        self.label_map = map;
        self
    }

    pub fn augmented(&self) -> Vec<T> {
        let mut v = self.weights.clone();
        v.push(self.bias);
        v
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn bias(&self) -> T {
        self.bias
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn label_map(&self) -> LabelMap {
        self.label_map
    }

    /// `w·x + b`.
    pub fn decision_value(&self, x: &Sample<T>) -> T {
        x.dot_dense(&self.weights) + self.bias
    }

    /// Sign of the decision value; exactly 0 maps to `+1`.
    pub fn decide(&self, x: &Sample<T>) -> Label {
        Label::from_sign(self.decision_value(x) >= T::zero())
    }

    pub fn weight_norm(&self) -> T {
        scalar::norm2(&self.weights)
    }

    /// `(w·x + b) / ‖w‖`. Its absolute value is the geometric distance.
    pub fn signed_distance(&self, x: &Sample<T>) -> Result<T> {
        let norm = self.weight_norm();
        if norm.is_zero() || !norm.is_finite() {
            return Err(Error::DegenerateModel);
        }
        Ok(self.decision_value(x) / norm)
    }

    /// `y (w·x + b)`.
    pub fn margin(&self, x: &Sample<T>, y: Label) -> T {
        y.sign::<T>() * self.decision_value(x)
    }

    pub fn scaled(&self, c: T) -> Self {
        Self {
            weights: self.weights.iter().map(|&w| w * c).collect(),
            bias: self.bias * c,
            label_map: self.label_map,
        }
    }

    /// Text form: a header (dimension, bias convention, label mapping)
    /// followed by the `dim` weights and then the bias, one per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{MAGIC}");
        let _ = writeln!(out, "dim {}", self.weights.len());
        let _ = writeln!(out, "bias {BIAS_CONVENTION}");
        let _ = writeln!(
            out,
            "labels {} {}",
            self.label_map.negative, self.label_map.positive
        );
        for w in self.weights.iter().chain(std::iter::once(&self.bias)) {
            let _ = writeln!(out, "{w}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |m: &str| Error::ModelFormat(m.to_string());
        let mut lines = text.lines();
        if lines.next() != Some(MAGIC) {
            return Err(bad("missing header line"));
        }
        let dim: usize = lines
            .next()
            .and_then(|l| l.strip_prefix("dim "))
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| bad("expected `dim <n>`"))?;
        match lines.next().and_then(|l| l.strip_prefix("bias ")) {
            Some(c) if c.trim() == BIAS_CONVENTION => {}
            _ => return Err(bad("expected `bias augmented-last`")),
        }
        let labels: Vec<f64> = lines
            .next()
            .and_then(|l| l.strip_prefix("labels "))
            .map(|l| l.split_whitespace().filter_map(|t| t.parse().ok()).collect())
            .unwrap_or_default();
        let [negative, positive] = labels[..] else {
            return Err(bad("expected `labels <negative> <positive>`"));
        };
        let values = lines
            .filter(|l| !l.trim().is_empty())
            .map(|l| l.trim().parse::<T>().map_err(|_| bad(&format!("bad value `{l}`"))))
            .collect::<Result<Vec<T>>>()?;
        if values.len() != dim + 1 {
            return Err(Error::DimensionMismatch {
                expected: dim + 1,
                got: values.len(),
            });
        }
        Ok(Self::from_augmented(&values).with_label_map(LabelMap { negative, positive }))
    }
}
