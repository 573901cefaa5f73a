use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seeded per-epoch shuffling into fixed-size batches of indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BatchPlan {
    pub len: usize,
    pub batch_size: usize,
    pub seed: u64,
    /// Drop the trailing short batch of each epoch.
    pub drop_last: bool,
}

impl BatchPlan {
    pub fn new(len: usize, batch_size: usize, seed: u64) -> Self {
        assert!(batch_size >= 1, "batch size must be positive");
        BatchPlan { len, batch_size, seed, drop_last: true }
    }

    pub fn batches_per_epoch(&self) -> usize {
        if self.drop_last {
            self.len / self.batch_size
        } else {
            self.len.div_ceil(self.batch_size)
        }
    }

    /// Permutation of `0..len` for `epoch`; depends only on `(seed, epoch)`.
    pub fn permutation(&self, epoch: u64) -> Vec<usize> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(epoch);
        let mut idx: Vec<usize> = (0..self.len).collect();
        idx.shuffle(&mut rng);
        idx
    }

    pub fn epoch(&self, epoch: u64) -> Vec<Vec<usize>> {
        let perm = self.permutation(epoch);
        perm.chunks(self.batch_size)
            .filter(|c| !self.drop_last || c.len() == self.batch_size)
            .map(<[usize]>::to_vec)
            .collect()
    }
}

/// Batches of borrowed items for one epoch.
pub fn batches<T>(items: &[T], batch_size: usize, seed: u64, epoch: u64) -> impl Iterator<Item = Vec<&T>> {
    BatchPlan::new(items.len(), batch_size, seed)
        .epoch(epoch)
        .into_iter()
        .map(move |b| b.into_iter().map(|i| &items[i]).collect())
}
