//! Adaptive per-sample weights driven by distance to the current hyperplane,
//! plus the wrong-side noise screen.
//!
//! The weight of a sample at unsigned distance `d` is
//!
//! ```text
//! α(d) = 2/(√(2π)·σ) · exp(−d²/(2σ²)) + 1/(M−m) · exp(−d/(M−m))
//! ```
//!
//! clamped into `[0, 1]`, where `M` and `m` are the largest and smallest
//! distances over the active samples. Each term integrates to 1 over
//! `[0, ∞)`.

use std::fmt;
use std::str::FromStr;

use crate::dataset::{Label, Sample};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Unclamped adaptive weight. `spread = M − m`; a non-positive spread drops
/// the exponential term.
pub fn aw_raw<T: Scalar>(d: T, sigma: T, spread: T) -> T {
    let two = T::lit(2.0);
    let gauss = two / ((two * T::PI()).sqrt() * sigma) * (-(d * d) / (two * sigma * sigma)).exp();
    if spread > T::zero() {
        gauss + (-d / spread).exp() / spread
    } else {
        gauss
    }
}

/// Adaptive weight clamped into `[0, 1]`. Requires `max_dist > min_dist`.
pub fn aw_value<T: Scalar>(d: T, sigma: T, max_dist: T, min_dist: T) -> T {
    debug_assert!(max_dist > min_dist, "aw_value needs a positive distance spread");
    clamp_unit(aw_raw(d, sigma, max_dist - min_dist))
}

fn clamp_unit<T: Scalar>(v: T) -> T {
    v.max(T::zero()).min(T::one())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseMode {
    /// Flag a sample lying on the opposite side of the hyperplane from every
    /// other active sample of its class.
    #[default]
    SignedSide,
    /// Flag a sample whose feature inner product with every other active
    /// sample of its class is `<= 0`.
    RawDot,
}

impl fmt::Display for NoiseMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NoiseMode::SignedSide => "signed-side",
            NoiseMode::RawDot => "raw-dot",
        })
    }
}

impl FromStr for NoiseMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "signed-side" => Ok(NoiseMode::SignedSide),
            "raw-dot" => Ok(NoiseMode::RawDot),
            _ => Err(Error::InvalidParameter(format!("unknown noise mode `{s}`"))),
        }
    }
}

/// Summary of the active weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightStats<T> {
    pub min: T,
    pub mean: T,
    pub max: T,
}

/// Per-training-sample weights and the active (not yet eliminated) mask.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightState<T> {
    alpha: Vec<T>,
    active: Vec<bool>,
    sigma: T,
    max_dist: T,
    min_dist: T,
}

impl<T: Scalar> WeightState<T> {
    /// Uniform start `α_i = 2/l`, every sample active. For `l = 1` the stored
    /// value 2 is clamped to 1 by [`WeightState::alpha`].
    pub fn init(l: usize, sigma: T) -> Result<Self> {
        if l == 0 {
            return Err(Error::EmptyDataset);
        }
        if !(sigma > T::zero()) {
            return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
        }
        let a0 = T::lit(2.0) / T::from_usize_lossy(l);
        Ok(Self {
            alpha: vec![a0; l],
            active: vec![true; l],
            sigma,
            max_dist: T::zero(),
            min_dist: T::zero(),
        })
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    /// Effective weight in `[0, 1]`; 0 for eliminated samples.
    pub fn alpha(&self, i: usize) -> T {
        if self.active[i] {
            clamp_unit(self.alpha[i])
        } else {
            T::zero()
        }
    }

    /// Stored weights, unclamped for the uniform start.
    pub fn raw_alpha(&self) -> &[T] {
        &self.alpha
    }

    pub fn is_active(&self, i: usize) -> bool {
        self.active[i]
    }

    pub fn active_mask(&self) -> &[bool] {
        &self.active
    }

    pub fn active_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.active[i]).collect()
    }

    pub fn n_active(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    pub fn n_eliminated(&self) -> usize {
        self.len() - self.n_active()
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    /// `(M, m)` from the most recent update.
    pub fn distance_range(&self) -> (T, T) {
        (self.max_dist, self.min_dist)
    }

    /// Permanently removes the given samples from training.
    pub fn eliminate(&mut self, indices: &[usize]) {
        for &i in indices {
            self.active[i] = false;
            self.alpha[i] = T::zero();
        }
    }

    /// Recomputes every active weight from `signed_distances` (indexed like
    /// the training set; entries of inactive samples are ignored).
    pub fn update(&mut self, signed_distances: &[T]) -> Result<()> {
        if signed_distances.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: signed_distances.len(),
            });
        }
        let mut hi = T::neg_infinity();
        let mut lo = T::infinity();
        for (i, d) in signed_distances.iter().enumerate() {
            if self.active[i] {
                let d = d.abs();
                hi = hi.max(d);
                lo = lo.min(d);
            }
        }
        if hi < lo {
            return Ok(());
        }
        self.max_dist = hi;
        self.min_dist = lo;
        let spread = hi - lo;
        for (i, d) in signed_distances.iter().enumerate() {
            self.alpha[i] = if self.active[i] {
                clamp_unit(aw_raw(d.abs(), self.sigma, spread))
            } else {
                T::zero()
            };
        }
        Ok(())
    }

    /// Min, mean and max effective weight over active samples.
    pub fn stats(&self) -> Option<WeightStats<T>> {
        let vals: Vec<T> = (0..self.len()).filter(|&i| self.active[i]).map(|i| self.alpha(i)).collect();
        if vals.is_empty() {
            return None;
        }
        let min = vals.iter().copied().fold(T::infinity(), T::min);
        let max = vals.iter().copied().fold(T::neg_infinity(), T::max);
        let mean = vals.iter().copied().sum::<T>() / T::from_usize_lossy(vals.len());
        Some(WeightStats { min, mean, max })
    }
}

/// Indices (ascending) of active samples the screen flags as noise. A class
/// with fewer than two active samples is never screened.
pub fn detect_noise<T: Scalar>(
    samples: &[Sample<T>],
    signed_distances: &[T],
    active: &[bool],
    mode: NoiseMode,
) -> Vec<usize> {
    let mut flagged = Vec::new();
    for class in [Label::Pos, Label::Neg] {
        let members: Vec<usize> = (0..samples.len())
            .filter(|&i| active[i] && samples[i].label == class)
            .collect();
        if members.len() < 2 {
            continue;
        }
        match mode {
            NoiseMode::SignedSide => {
                let above = members.iter().filter(|&&i| signed_distances[i] > T::zero()).count();
                let below = members.iter().filter(|&&i| signed_distances[i] < T::zero()).count();
                for &i in &members {
                    let d = signed_distances[i];
                    // every other classmate j must satisfy d_i * d_j <= 0
                    let lonely = if d > T::zero() {
                        above == 1
                    } else if d < T::zero() {
                        below == 1
                    } else {
                        true
                    };
                    if lonely {
                        flagged.push(i);
                    }
                }
            }
            NoiseMode::RawDot => {
                for &i in &members {
                    let isolated = members
                        .iter()
                        .filter(|&&j| j != i)
                        .all(|&j| samples[i].dot_sparse(&samples[j]) <= T::zero());
                    if isolated {
                        flagged.push(i);
                    }
                }
            }
        }
    }
    flagged.sort_unstable();
    flagged
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn uniform_initial_weights() {
        let s = WeightState::<f64>::init(4, 1.0).unwrap();
        assert!((0..4).all(|i| s.alpha(i) == 0.5));
        assert_eq!(s.raw_alpha().iter().sum::<f64>(), 2.0);
        let s = WeightState::<f64>::init(2000, 1.0).unwrap();
        assert_relative_eq!(s.alpha(7), 0.001);
        let s = WeightState::<f64>::init(1, 1.0).unwrap();
        assert_eq!(s.raw_alpha()[0], 2.0);
        assert_eq!(s.alpha(0), 1.0);
        assert_eq!(WeightState::<f64>::init(0, 1.0), Err(Error::EmptyDataset));
    }

    #[test]
    fn aw_at_zero_saturates() {
        // 2/sqrt(2π) + 1 ≈ 1.7979
        assert_relative_eq!(aw_raw(0.0, 1.0, 1.0), 1.797_884_560_802_865_4, epsilon = 1e-12);
        assert_eq!(aw_value(0.0, 1.0, 1.0, 0.0), 1.0);
        assert!(aw_value(1e3, 1.0, 1.0, 0.0) < 1e-300);
    }

    #[test]
    fn update_hand_evaluated() {
        let mut s = WeightState::<f64>::init(3, 1.0).unwrap();
        s.update(&[0.0, -1.0, 2.0]).unwrap();
        // α(1) = 2/sqrt(2π)·e^-0.5 + e^-0.5/2
        let expected = 2.0 / (2.0 * std::f64::consts::PI).sqrt() * (-0.5f64).exp() + 0.5 * (-0.5f64).exp();
        assert_relative_eq!(s.alpha(1), expected, epsilon = 1e-15);
        assert_relative_eq!(s.alpha(1), 0.7872, epsilon = 1e-4);
        assert_eq!(s.alpha(0), 1.0);
        assert_eq!(s.distance_range(), (2.0, 0.0));
    }

    #[test]
    fn equal_distances_fall_back_to_gaussian_term() {
        let mut s = WeightState::<f64>::init(3, 1.0).unwrap();
        s.update(&[1.5, -1.5, 1.5]).unwrap();
        let g = 2.0 / (2.0 * std::f64::consts::PI).sqrt() * (-1.125f64).exp();
        for i in 0..3 {
            assert_relative_eq!(s.alpha(i), g, epsilon = 1e-15);
        }
    }

    #[test]
    fn far_samples_get_less_weight() {
        let mut s = WeightState::<f64>::init(2, 1.0).unwrap();
        s.update(&[0.0, 10.0]).unwrap();
        assert!(s.alpha(0) > s.alpha(1));
    }

    #[test]
    fn eliminated_samples_stay_at_zero() {
        let mut s = WeightState::<f64>::init(4, 1.0).unwrap();
        s.eliminate(&[2]);
        s.update(&[0.1, 0.2, 0.0, 0.3]).unwrap();
        assert_eq!(s.alpha(2), 0.0);
        assert!(!s.is_active(2));
        assert_eq!(s.active_indices(), vec![0, 1, 3]);
        // the eliminated sample's distance does not enter (M, m)
        assert_eq!(s.distance_range(), (0.3, 0.1));
    }

    fn pts(v: &[(f64, f64)], label: Label) -> Vec<Sample<f64>> {
        v.iter().map(|&(a, b)| Sample::from_dense(&[a, b], label)).collect()
    }

    #[test]
    fn signed_side_flags_the_lone_wrong_side_sample() {
        let samples = pts(&[(1.0, 0.0), (1.0, 0.0), (1.0, 0.0)], Label::Pos);
        let flags = detect_noise(&samples, &[1.0, 0.8, -0.3], &[true; 3], NoiseMode::SignedSide);
        assert_eq!(flags, vec![2]);
        let none = detect_noise(&samples, &[1.0, 0.8, 0.3], &[true; 3], NoiseMode::SignedSide);
        assert!(none.is_empty());
    }

    #[test]
    fn raw_dot_flags_opposed_sample() {
        let samples = pts(&[(1.0, 0.0), (0.9, 0.1), (-1.0, -0.5)], Label::Pos);
        let flags = detect_noise(&samples, &[0.0; 3], &[true; 3], NoiseMode::RawDot);
        assert_eq!(flags, vec![2]);
    }

    #[test]
    fn small_classes_are_not_screened() {
        let mut samples = pts(&[(1.0, 0.0)], Label::Pos);
        samples.extend(pts(&[(1.0, 0.0), (2.0, 0.0), (3.0, 0.0)], Label::Neg));
        let d = [-5.0, -1.0, -1.0, -1.0];
        assert!(detect_noise(&samples, &d, &[true; 4], NoiseMode::SignedSide).is_empty());
        // inactive classmates do not count
        // two active classmates on opposite sides each pass the rule
        let flags = detect_noise(&samples, &[-5.0, 1.0, -1.0, -1.0], &[true, true, true, false], NoiseMode::SignedSide);
        assert_eq!(flags, vec![1, 2]);
        let flags = detect_noise(&samples, &[-5.0, 1.0, -1.0, -1.0], &[true; 4], NoiseMode::SignedSide);
        assert_eq!(flags, vec![1]);
    }

    #[test]
    fn noise_mode_parsing() {
        assert_eq!("signed-side".parse::<NoiseMode>().unwrap(), NoiseMode::SignedSide);
        assert_eq!("RAW_DOT".parse::<NoiseMode>().unwrap(), NoiseMode::RawDot);
        assert!("other".parse::<NoiseMode>().is_err());
    }

    proptest! {
        #[test]
        fn aw_strictly_decreasing(sigma in 0.2f64..3.0, spread in 0.05f64..50.0, d in 0.0f64..5.0, step in 1e-3f64..2.0) {
            prop_assert!(aw_raw(d + step, sigma, spread) < aw_raw(d, sigma, spread));
        }

        #[test]
        fn max_weight_sits_at_min_distance(ds in prop::collection::vec(-20.0f64..20.0, 2..40), sigma in 0.3f64..2.0) {
            let mut s = WeightState::init(ds.len(), sigma).unwrap();
            s.update(&ds).unwrap();
            let argmin = (0..ds.len()).min_by(|&a, &b| ds[a].abs().total_cmp(&ds[b].abs())).unwrap();
            let max = (0..ds.len()).map(|i| s.alpha(i)).fold(f64::NEG_INFINITY, f64::max);
            prop_assert_eq!(max, s.alpha(argmin));
            for i in 0..ds.len() {
                prop_assert!((0.0..=1.0).contains(&s.alpha(i)));
            }
        }

        #[test]
        fn signed_side_respects_agreeing_classmates(ds in prop::collection::vec(-3.0f64..3.0, 2..30)) {
            let samples: Vec<_> = (0..ds.len()).map(|i| Sample::from_dense(&[1.0], if i % 2 == 0 { Label::Pos } else { Label::Neg })).collect();
            let active = vec![true; ds.len()];
            for i in detect_noise(&samples, &ds, &active, NoiseMode::SignedSide) {
                let agrees = (0..ds.len()).any(|j| j != i && samples[j].label == samples[i].label && ds[i] * ds[j] > 0.0);
                prop_assert!(!agrees);
            }
        }
    }
}
