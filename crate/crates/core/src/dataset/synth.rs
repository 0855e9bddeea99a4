use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dataset::{Dataset, Label, LabelMap, Sample};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Output of [`synth_two_gaussians_with_truth`].
#[derive(Debug, Clone)]
pub struct SynthData<T> {
    /// Points with `flipped` labels inverted.
    pub dataset: Dataset<T>,
    /// The same points with their generating labels.
    pub clean: Dataset<T>,
    /// Indices whose label was inverted, ascending.
    pub flipped: Vec<usize>,
}

/// Two unit-variance 2-D Gaussian clouds centred at `(+separation/2, 0)`
/// (positives, listed first) and `(-separation/2, 0)` (negatives), with
/// `round(flip_fraction * n)` randomly chosen labels inverted.
pub fn synth_two_gaussians<T: Scalar>(
    n_pos: usize,
    n_neg: usize,
    separation: f64,
    flip_fraction: f64,
    seed: u64,
) -> Result<Dataset<T>> {
    synth_two_gaussians_with_truth(n_pos, n_neg, separation, flip_fraction, seed).map(|d| d.dataset)
}

/// Like [`synth_two_gaussians`] but also returns the clean labels. The point
/// cloud depends only on the counts, separation and seed, so runs that
/// differ only in `flip_fraction` share coordinates.
pub fn synth_two_gaussians_with_truth<T: Scalar>(
    n_pos: usize,
    n_neg: usize,
    separation: f64,
    flip_fraction: f64,
    seed: u64,
) -> Result<SynthData<T>> {
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::InvalidParameter(format!(
            "class counts must be positive (got {n_pos} positive, {n_neg} negative)"
        )));
    }
    if !(0.0..0.5).contains(&flip_fraction) {
        return Err(Error::InvalidParameter(format!(
            "flip fraction must lie in [0, 0.5), got {flip_fraction}"
        )));
    }
    if !separation.is_finite() {
        return Err(Error::InvalidParameter("separation must be finite".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = separation / 2.0;
    let mut clean = Vec::with_capacity(n_pos + n_neg);
    for (count, centre, label) in [(n_pos, half, Label::Pos), (n_neg, -half, Label::Neg)] {
        for _ in 0..count {
            let x: f64 = StandardNormal.sample(&mut rng);
            let y: f64 = StandardNormal.sample(&mut rng);
            let feats = vec![(1u32, T::lit(centre + x)), (2u32, T::lit(y))];
            clean.push(Sample { features: feats, label });
        }
    }

    let n = clean.len();
    let n_flip = (flip_fraction * n as f64).round() as usize;
    let mut flip_rng = ChaCha8Rng::seed_from_u64(seed);
    flip_rng.set_stream(1);
    let mut flipped = sample(&mut flip_rng, n, n_flip).into_vec();
    flipped.sort_unstable();

    let mut noisy = clean.clone();
    for &i in &flipped {
        noisy[i].label = noisy[i].label.flipped();
    }

    Ok(SynthData {
        dataset: Dataset::new(noisy, LabelMap::STANDARD)?.with_dim(2)?,
        clean: Dataset::new(clean, LabelMap::STANDARD)?.with_dim(2)?,
        flipped,
    })
}
