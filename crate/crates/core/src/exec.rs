//! Shard layout, per-shard RNG substreams, and the parallel/sequential switch.
//!
//! A workload of `n` independent units (trials, samples, restarts) is cut into
//! `shards` contiguous blocks. Shard `i` draws from the ChaCha stream
//! `(seed, i)`, and per-shard results are merged in shard order. The output is
//! therefore a function of `(seed, shards, n)` only, whichever [`Execution`]
//! runs it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub type ShardRng = ChaCha8Rng;

/// How shard closures are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    Sequential,
    /// Runs on the rayon pool when the `parallel` feature is enabled,
    /// sequentially otherwise.
    #[default]
    Parallel,
}

impl Execution {
    pub fn is_parallel_available() -> bool {
        cfg!(feature = "parallel")
    }
}

/// Seed and shard count of a Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sharding {
    pub seed: u64,
    pub shards: usize,
}

impl Sharding {
    pub fn new(seed: u64, shards: usize) -> Self {
        Self {
            seed,
            shards: shards.max(1),
        }
    }

    /// Single shard; handy for small deterministic runs.
    pub fn single(seed: u64) -> Self {
        Self::new(seed, 1)
    }

    /// Shard count from the available execution units.
    pub fn available(seed: u64) -> Self {
        Self::new(seed, default_shards())
    }

    pub fn rng(&self, shard: usize) -> ShardRng {
        shard_rng(self.seed, shard)
    }

    /// Sizes of the contiguous blocks that `total` units are cut into.
    /// The first `total % shards` blocks get one extra unit.
    pub fn split(&self, total: usize) -> Vec<usize> {
        let base = total / self.shards;
        let extra = total % self.shards;
        (0..self.shards)
            .map(|i| base + usize::from(i < extra))
            .collect()
    }

    /// Runs `work(shard_index, shard_size, rng)` for every shard and returns
    /// the results in shard order.
    pub fn run<T, F>(&self, total: usize, exec: Execution, work: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize, usize, &mut ShardRng) -> T + Sync + Send,
    {
        let sizes = self.split(total);
        map_indexed(self.shards, exec, |i| {
            let mut rng = self.rng(i);
            work(i, sizes[i], &mut rng)
        })
    }
}

pub fn default_shards() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

/// Independent ChaCha substream for `(seed, shard)`.
pub fn shard_rng(seed: u64, shard: usize) -> ShardRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shard as u64);
    rng
}

/// `(0..n).map(f)`, on the rayon pool when requested and available.
pub fn map_indexed<T, F>(n: usize, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}
