use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Deterministic minibatch stream over a (possibly shrinking) active set.
///
/// Each epoch is a fresh shuffle of the active indices cut into consecutive
/// slices of `batch_size`; the final short slice is served, not dropped. A
/// change of active set starts a new epoch on the next call.
#[derive(Debug, Clone)]
pub struct MinibatchSampler {
    batch_size: usize,
    seed: u64,
    rng: ChaCha8Rng,
    perm: Vec<usize>,
    pos: usize,
    source: Vec<usize>,
    epoch: usize,
}

impl MinibatchSampler {
    pub fn new(batch_size: usize, seed: u64) -> Self {
        assert!(batch_size > 0, "batch size must be positive");
        Self {
            batch_size,
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
            perm: Vec::new(),
            pos: 0,
            source: Vec::new(),
            epoch: 0,
        }
    }

    pub fn batch_size(&self) -> usize {
        self.batch_size
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of epochs started so far.
    pub fn epoch(&self) -> usize {
        self.epoch
    }

    /// Next slice of the current permutation of `active`.
    pub fn next_batch(&mut self, active: &[usize]) -> Vec<usize> {
        if active.is_empty() {
            return Vec::new();
        }
        if self.pos >= self.perm.len() || self.source != active {
            self.source.clear();
            self.source.extend_from_slice(active);
            self.perm.clear();
            self.perm.extend_from_slice(active);
            self.perm.shuffle(&mut self.rng);
            self.pos = 0;
            self.epoch += 1;
        }
        let end = (self.pos + self.batch_size).min(self.perm.len());
        let batch = self.perm[self.pos..end].to_vec();
        self.pos = end;
        batch
    }
}
