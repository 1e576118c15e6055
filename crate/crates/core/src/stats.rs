//! Streaming mean and error estimates for complex observables.

use serde::{Deserialize, Serialize};

use crate::sun_algebra::C64;

/// Number of batches used for the batch-means error estimate.
pub const DEFAULT_BATCHES: usize = 20;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
struct Welford {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn variance(&self) -> f64 {
        if self.count < 2 {
            f64::NAN
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    fn stderr(&self) -> f64 {
        (self.variance() / self.count as f64).sqrt()
    }
}

/// Accumulates a complex sample stream without storing it.
///
/// Besides the naive standard error (which ignores autocorrelation) this
/// keeps means of consecutive batches, whose spread gives an error bar that
/// stays honest for correlated Markov-chain samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexAccumulator {
    re: Welford,
    im: Welford,
    batch_size: u64,
    batch_sum: C64,
    batch_fill: u64,
    batch_re: Welford,
    batch_im: Welford,
}

impl ComplexAccumulator {
    /// `expected` is the planned sample count, used to size the batches.
    pub fn new(expected: usize) -> Self {
        Self::with_batches(expected, DEFAULT_BATCHES)
    }

    pub fn with_batches(expected: usize, batches: usize) -> Self {
        let batch_size = (expected / batches.max(1)).max(1) as u64;
        Self {
            re: Welford::default(),
            im: Welford::default(),
            batch_size,
            batch_sum: C64::new(0.0, 0.0),
            batch_fill: 0,
            batch_re: Welford::default(),
            batch_im: Welford::default(),
        }
    }

    pub fn push(&mut self, z: C64) {
        self.re.push(z.re);
        self.im.push(z.im);
        self.batch_sum += z;
        self.batch_fill += 1;
        if self.batch_fill == self.batch_size {
            let m = self.batch_sum / self.batch_size as f64;
            self.batch_re.push(m.re);
            self.batch_im.push(m.im);
            self.batch_sum = C64::new(0.0, 0.0);
            self.batch_fill = 0;
        }
    }

    pub fn count(&self) -> u64 {
        self.re.count
    }

    pub fn mean(&self) -> C64 {
        C64::new(self.re.mean, self.im.mean)
    }

    /// Componentwise standard error assuming independent samples.
    pub fn naive_stderr(&self) -> C64 {
        C64::new(self.re.stderr(), self.im.stderr())
    }

    /// Componentwise batch-means standard error; falls back to the naive
    /// estimate with fewer than two complete batches.
    pub fn stderr(&self) -> C64 {
        if self.batch_re.count < 2 {
            self.naive_stderr()
        } else {
            C64::new(self.batch_re.stderr(), self.batch_im.stderr())
        }
    }
}
