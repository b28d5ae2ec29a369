//! Seeded random streams and the deterministic Monte Carlo driver.
//!
//! Work is cut into fixed-size chunks; chunk `i` always draws from stream
//! `(seed, base + i)` and chunk results are merged pairwise in chunk order, so
//! the output does not depend on how many worker threads ran the chunks.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Samples per chunk. Part of the reproducibility contract: changing it
/// changes every Monte Carlo number the crate produces.
pub const CHUNK_SIZE: usize = 8192;

/// A reproducible random substream identified by `(seed, stream_id)`.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        RngStream {
            seed,
            stream_id,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform draw on the open interval `(0, 1)`.
    pub fn open01(&mut self) -> f64 {
        loop {
            // 53 random mantissa bits, offset by half an ulp so 0 is never hit.
            let u = ((self.inner.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64);
            if u < 1.0 {
                return u;
            }
        }
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Running mean and centred second moment (Welford / Chan merge).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub n: u64,
    pub mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&self, other: &Moments) -> Moments {
        if self.n == 0 {
            return *other;
        }
        if other.n == 0 {
            return *self;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        let w = other.n as f64 / n as f64;
        Moments {
            n,
            mean: self.mean + d * w,
            m2: self.m2 + other.m2 + d * d * self.n as f64 * w,
        }
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn estimate(&self) -> Estimate {
        Estimate {
            mean: self.mean,
            stderr: (self.variance() / self.n.max(1) as f64).sqrt(),
            n: self.n,
        }
    }
}

/// Sample count and stream placement for one Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McSettings {
    pub samples: usize,
    pub seed: u64,
    pub stream: u32,
}

impl McSettings {
    pub fn new(samples: usize, seed: u64, stream: u32) -> Self {
        McSettings { samples, seed, stream }
    }

    /// Rejects runs smaller than `min` samples.
    pub fn require(&self, min: usize) -> crate::Result<()> {
        if self.samples < min {
            Err(crate::Error::TooFewSamples {
                got: self.samples,
                min,
            })
        } else {
            Ok(())
        }
    }

    pub fn with_stream(&self, stream: u32) -> Self {
        McSettings { stream, ..*self }
    }
}

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: u64,
}

impl Estimate {
    /// `|mean - target| <= k * stderr`, with a floor for zero-variance estimates.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.stderr + 1e-12 * target.abs().max(1.0)
    }

    /// Standard error of the difference of two independent estimates.
    pub fn joint_stderr(&self, other: &Estimate) -> f64 {
        self.stderr.hypot(other.stderr)
    }
}

/// Tree reduction in index order; the shape depends only on `items.len()`.
pub fn pairwise_reduce<T: Clone>(items: &[T], merge: &impl Fn(&T, &T) -> T) -> Option<T> {
    match items.len() {
        0 => None,
        1 => Some(items[0].clone()),
        len => {
            let (a, b) = items.split_at(len / 2);
            let left = pairwise_reduce(a, merge)?;
            let right = pairwise_reduce(b, merge)?;
            Some(merge(&left, &right))
        }
    }
}

/// Pairwise floating-point sum, independent of evaluation order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Runs `n` independent samples of `sample`, each producing `K` outputs, and
/// returns the per-output moments.
///
/// Stream ids are `(stream_base << 32) | chunk_index`, so distinct callers
/// should use distinct `stream_base` values. Runs on the current rayon pool.
pub fn monte_carlo<const K: usize, F>(n: usize, seed: u64, stream_base: u32, sample: F) -> [Moments; K]
where
    F: Fn(&mut RngStream) -> [f64; K] + Sync,
{
    let chunks = n.div_ceil(CHUNK_SIZE);
    let partial: Vec<[Moments; K]> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = RngStream::new(seed, (u64::from(stream_base) << 32) | chunk as u64);
            let len = CHUNK_SIZE.min(n - chunk * CHUNK_SIZE);
            let mut acc = [Moments::default(); K];
            for _ in 0..len {
                let out = sample(&mut rng);
                for (a, x) in acc.iter_mut().zip(out) {
                    a.push(x);
                }
            }
            acc
        })
        .collect();
    pairwise_reduce(&partial, &|a: &[Moments; K], b: &[Moments; K]| {
        std::array::from_fn(|k| a[k].merge(&b[k]))
    })
    .unwrap_or([Moments::default(); K])
}

/// Draws `n` values with the same chunked stream layout as [`monte_carlo`] and
/// returns them in a deterministic order.
pub fn draw_many<F>(n: usize, seed: u64, stream_base: u32, sample: F) -> Vec<f64>
where
    F: Fn(&mut RngStream) -> f64 + Sync,
{
    let chunks = n.div_ceil(CHUNK_SIZE);
    (0..chunks)
        .into_par_iter()
        .flat_map_iter(|chunk| {
            let mut rng = RngStream::new(seed, (u64::from(stream_base) << 32) | chunk as u64);
            let len = CHUNK_SIZE.min(n - chunk * CHUNK_SIZE);
            (0..len).map(|_| sample(&mut rng)).collect::<Vec<_>>()
        })
        .collect()
}
