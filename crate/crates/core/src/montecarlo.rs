//! Chunked Monte-Carlo averaging.
//!
//! Work is cut into fixed-size chunks, chunk k draws from
//! `RngStream::split(root, k)`, and chunk statistics are merged in chunk
//! order. Results therefore depend on the seed only, not on how many
//! threads rayon happens to use.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::rng::RngStream;

pub const CHUNK: usize = 4096;

/// Running count, mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// Pooled statistics of two disjoint samples.
    pub fn merge(self, other: Moments) -> Moments {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let n = self.count + other.count;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.count as f64 / n as f64;
        let m2 = self.m2
            + other.m2
            + delta * delta * (self.count as f64 * other.count as f64) / n as f64;
        Moments { count: n, mean, m2 }
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        self.m2 / (self.count - 1) as f64
    }

    pub fn estimate(&self) -> Estimate {
        Estimate {
            mean: self.mean,
            stderr: (self.variance() / self.count.max(1) as f64).sqrt(),
            samples: self.count,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
}

impl Estimate {
    /// |mean − target| in units of the standard error.
    pub fn z_score(&self, target: f64) -> f64 {
        (self.mean - target).abs() / self.stderr.max(f64::MIN_POSITIVE)
    }

    pub fn within_sigmas(&self, target: f64, sigmas: f64) -> bool {
        (self.mean - target).abs() <= sigmas * self.stderr
    }
}

/// Mean of `samples` draws of `f`, chunked over split streams of `root`.
pub fn parallel_moments<F>(samples: usize, root: u64, f: F) -> Moments
where
    F: Fn(&mut RngStream) -> f64 + Sync,
{
    let chunks = samples.div_ceil(CHUNK);
    let parts: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = RngStream::split(root, k as u64);
            let len = CHUNK.min(samples - k * CHUNK);
            let mut m = Moments::default();
            for _ in 0..len {
                m.push(f(&mut rng));
            }
            m
        })
        .collect();
    parts.into_iter().fold(Moments::default(), Moments::merge)
}

pub fn parallel_mean<F>(samples: usize, root: u64, f: F) -> Estimate
where
    F: Fn(&mut RngStream) -> f64 + Sync,
{
    parallel_moments(samples, root, f).estimate()
}
