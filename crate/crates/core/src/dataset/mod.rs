//! Labeled sparse samples, LIBSVM ingestion, stratified splitting and
//! reproducible minibatch sampling.

mod libsvm;
mod sampler;
mod synth;

use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use libsvm::{parse_libsvm, parse_libsvm_with};
pub use sampler::MinibatchSampler;
pub use synth::{synth_two_gaussians, synth_two_gaussians_with_truth, SynthData};

/// Binary class label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Neg,
    Pos,
}

impl Label {
    pub fn from_sign(positive: bool) -> Self {
        if positive {
            Label::Pos
        } else {
            Label::Neg
        }
    }

    /// `+1` or `-1` in the scalar type.
    pub fn sign<T: Scalar>(self) -> T {
        match self {
            Label::Pos => T::one(),
            Label::Neg => -T::one(),
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Label::Pos => Label::Neg,
            Label::Neg => Label::Pos,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Label::Pos => 1,
            Label::Neg => -1,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Pos => f.write_str("+1"),
            Label::Neg => f.write_str("-1"),
        }
    }
}

/// Which source-file labels were mapped onto `-1` and `+1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabelMap {
    pub negative: f64,
    pub positive: f64,
}

impl LabelMap {
    pub const STANDARD: LabelMap = LabelMap {
        negative: -1.0,
        positive: 1.0,
    };

    pub fn map(&self, raw: f64) -> Option<Label> {
        if raw == self.positive {
            Some(Label::Pos)
        } else if raw == self.negative {
            Some(Label::Neg)
        } else {
            None
        }
    }

    pub fn source(&self, label: Label) -> f64 {
        match label {
            Label::Pos => self.positive,
            Label::Neg => self.negative,
        }
    }
}

impl Default for LabelMap {
    fn default() -> Self {
        Self::STANDARD
    }
}

impl fmt::Display for LabelMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->-1,{}->+1", self.negative, self.positive)
    }
}

/// One labeled sparse sample. Feature indices are 1-based and strictly ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample<T> {
    features: Vec<(u32, T)>,
    pub label: Label,
}

impl<T: Scalar> Sample<T> {
    pub fn new(features: Vec<(u32, T)>, label: Label) -> Result<Self> {
        let mut prev = 0u32;
        for &(idx, _) in &features {
            if idx <= prev {
                return Err(Error::InvalidParameter(format!(
                    "feature indices must be >= 1 and strictly ascending (got {idx} after {prev})"
                )));
            }
            prev = idx;
        }
        Ok(Self { features, label })
    }

    /// Builds a sample from a dense slice; `dense[0]` becomes feature 1.
    /// Zero entries are skipped.
    pub fn from_dense(dense: &[T], label: Label) -> Self {
        let features = dense
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, &v)| (i as u32 + 1, v))
            .collect();
        Self { features, label }
    }

    pub fn features(&self) -> &[(u32, T)] {
        &self.features
    }

    pub fn max_index(&self) -> u32 {
        self.features.last().map_or(0, |&(i, _)| i)
    }

    /// Inner product with a dense vector where `w[i - 1]` pairs with feature `i`.
    /// Features beyond `w.len()` contribute nothing.
    pub fn dot_dense(&self, w: &[T]) -> T {
        let mut acc = T::zero();
        for &(idx, v) in &self.features {
            match w.get(idx as usize - 1) {
                Some(&wi) => acc += wi * v,
                None => break,
            }
        }
        acc
    }

    /// `out += a * x`, ignoring features beyond `out.len()`.
    pub fn axpy_into(&self, a: T, out: &mut [T]) {
        for &(idx, v) in &self.features {
            match out.get_mut(idx as usize - 1) {
                Some(o) => *o += a * v,
                None => break,
            }
        }
    }

    /// Sparse-sparse inner product.
    pub fn dot_sparse(&self, other: &Sample<T>) -> T {
        let (a, b) = (&self.features, &other.features);
        let (mut i, mut j) = (0, 0);
        let mut acc = T::zero();
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += a[i].1 * b[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    pub fn to_dense(&self, dim: usize) -> Vec<T> {
        let mut out = vec![T::zero(); dim];
        self.axpy_into(T::one(), &mut out);
        out
    }
}

/// An immutable collection of labeled samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    samples: Vec<Sample<T>>,
    dim: usize,
    n_pos: usize,
    n_neg: usize,
    label_map: LabelMap,
}

impl<T: Scalar> Dataset<T> {
    /// `dim` is the maximum feature index over all samples.
    pub fn new(samples: Vec<Sample<T>>, label_map: LabelMap) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let dim = samples.iter().map(|s| s.max_index() as usize).max().unwrap_or(0);
        let n_pos = samples.iter().filter(|s| s.label == Label::Pos).count();
        let n_neg = samples.len() - n_pos;
        Ok(Self {
            samples,
            dim,
            n_pos,
            n_neg,
            label_map,
        })
    }

    /// Raises the declared dimension, e.g. to align a test file with its
    /// training file. Lowering below the maximum feature index is an error.
    pub fn with_dim(mut self, dim: usize) -> Result<Self> {
        let needed = self.samples.iter().map(|s| s.max_index() as usize).max().unwrap_or(0);
        if dim < needed {
            return Err(Error::DimensionMismatch {
                expected: needed,
                got: dim,
            });
        }
        self.dim = dim;
        Ok(self)
    }

    pub fn samples(&self) -> &[Sample<T>] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_pos(&self) -> usize {
        self.n_pos
    }

    pub fn n_neg(&self) -> usize {
        self.n_neg
    }

    pub fn label_map(&self) -> LabelMap {
        self.label_map
    }

    /// `max(n_pos, n_neg) / min(n_pos, n_neg)`.
    pub fn imbalance_ratio(&self) -> Result<f64> {
        if self.n_pos == 0 {
            return Err(Error::UndefinedImbalance("+1"));
        }
        if self.n_neg == 0 {
            return Err(Error::UndefinedImbalance("-1"));
        }
        let (hi, lo) = (self.n_pos.max(self.n_neg), self.n_pos.min(self.n_neg));
        Ok(hi as f64 / lo as f64)
    }

    /// New dataset made of the given sample indices (in that order), keeping
    /// this dataset's dimension and label mapping.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let samples = indices.iter().map(|&i| self.samples[i].clone()).collect();
        let mut ds = Self::new(samples, self.label_map)?;
        ds.dim = self.dim;
        Ok(ds)
    }

    /// Stratified index split: each class is shuffled under `seed` and its
    /// first `round(n_class * test_fraction)` members (clamped to keep at
    /// least one sample per side) go to the test part. Indices come back
    /// sorted.
    pub fn split_indices(&self, test_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
        if !(test_fraction > 0.0 && test_fraction < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "test fraction must lie in (0, 1), got {test_fraction}"
            )));
        }
        if self.n_pos < 2 || self.n_neg < 2 {
            return Err(Error::Insufficient(format!(
                "stratified split needs >= 2 samples per class (have {} positive, {} negative)",
                self.n_pos, self.n_neg
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut train = Vec::new();
        let mut test = Vec::new();
        for class in [Label::Pos, Label::Neg] {
            let mut idx: Vec<usize> = (0..self.len())
                .filter(|&i| self.samples[i].label == class)
                .collect();
            idx.shuffle(&mut rng);
            let n = idx.len();
            let n_test = ((n as f64 * test_fraction).round() as usize).clamp(1, n - 1);
            test.extend_from_slice(&idx[..n_test]);
            train.extend_from_slice(&idx[n_test..]);
        }
        train.sort_unstable();
        test.sort_unstable();
        Ok((train, test))
    }

    /// Stratified `(train, test)` split; see [`Dataset::split_indices`].
    pub fn split(&self, test_fraction: f64, seed: u64) -> Result<(Self, Self)> {
        let (train, test) = self.split_indices(test_fraction, seed)?;
        Ok((self.subset(&train)?, self.subset(&test)?))
    }

    /// LIBSVM text using the original source labels, so that reparsing
    /// reproduces this dataset exactly.
    pub fn to_libsvm(&self) -> String {
        let mut out = String::new();
        for s in &self.samples {
            out.push_str(&self.label_map.source(s.label).to_string());
            for &(i, v) in s.features() {
                out.push(' ');
                out.push_str(&i.to_string());
                out.push(':');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }
}

/// Per-feature min-max scaling onto `[0, 1]`. Not applied unless requested.
#[derive(Debug, Clone, PartialEq)]
pub struct MinMaxScaler<T> {
    min: Vec<T>,
    max: Vec<T>,
}

impl<T: Scalar> MinMaxScaler<T> {
    /// Implicit zeros count toward the range, as they would in dense form.
    pub fn fit(ds: &Dataset<T>) -> Self {
        let mut min = vec![T::zero(); ds.dim()];
        let mut max = vec![T::zero(); ds.dim()];
        for s in ds.samples() {
            for &(i, v) in s.features() {
                let k = i as usize - 1;
                min[k] = min[k].min(v);
                max[k] = max[k].max(v);
            }
        }
        Self { min, max }
    }

    /// Scales features present in the sample; constant features map to 0.
    /// Explicit entries only: zeros that were not stored stay implicit, so
    /// the result is exact only for features whose minimum is 0.
    pub fn transform(&self, ds: &Dataset<T>) -> Result<Dataset<T>> {
        let samples = ds
            .samples()
            .iter()
            .map(|s| {
                let feats = s
                    .features()
                    .iter()
                    .map(|&(i, v)| {
                        let k = i as usize - 1;
                        match (self.min.get(k), self.max.get(k)) {
                            (Some(&lo), Some(&hi)) if hi > lo => (i, (v - lo) / (hi - lo)),
                            (Some(_), Some(_)) => (i, T::zero()),
                            _ => (i, v),
                        }
                    })
                    .collect();
                Sample::new(feats, s.label)
            })
            .collect::<Result<Vec<_>>>()?;
        let out = Dataset::new(samples, ds.label_map())?;
        out.with_dim(ds.dim())
    }
}
