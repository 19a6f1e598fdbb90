//! Counter-based random streams and the block-parallel Monte-Carlo driver.
//!
//! Sample `i` of a run always draws from stream `i` of the ChaCha key derived
//! from the run seed, and samples are reduced in fixed blocks that are
//! combined in block order. Results are therefore bit-identical for any
//! number of workers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Samples per reduction block.
pub const BLOCK_SIZE: u64 = 1024;

/// Default cap on resampling attempts for a single sample index.
pub const DEFAULT_MAX_RESAMPLE: u32 = 64;

/// Mixes a master seed with an index (splitmix64 finalizer on both).
pub fn derive_seed(master: u64, index: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    mix(mix(master) ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

/// A seeded family of independent random streams indexed by sample number.
#[derive(Clone, Debug)]
pub struct SampleStream {
    key: <ChaCha8Rng as SeedableRng>::Seed,
}

impl SampleStream {
    pub fn new(seed: u64) -> Self {
        Self {
            key: ChaCha8Rng::seed_from_u64(seed).get_seed(),
        }
    }

    /// The generator for sample `index`.
    pub fn rng(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(index);
        rng
    }
}

/// Running mean and second central moment for several components at once.
#[derive(Clone, Debug, PartialEq)]
pub struct Moments {
    count: u64,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl Moments {
    pub fn new(components: usize) -> Self {
        Self {
            count: 0,
            mean: vec![0.0; components],
            m2: vec![0.0; components],
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn components(&self) -> usize {
        self.mean.len()
    }

    pub fn push(&mut self, x: &[f64]) {
        debug_assert_eq!(x.len(), self.mean.len());
        self.count += 1;
        let n = self.count as f64;
        for ((m, s), &v) in self.mean.iter_mut().zip(&mut self.m2).zip(x) {
            let delta = v - *m;
            *m += delta / n;
            *s += delta * (v - *m);
        }
    }

    /// Chan et al. pairwise combination.
    pub fn merge(&mut self, other: &Moments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = other.clone();
            return;
        }
        let na = self.count as f64;
        let nb = other.count as f64;
        let n = na + nb;
        for i in 0..self.mean.len() {
            let delta = other.mean[i] - self.mean[i];
            self.mean[i] += delta * nb / n;
            self.m2[i] += other.m2[i] + delta * delta * na * nb / n;
        }
        self.count += other.count;
    }

    pub fn mean(&self, i: usize) -> f64 {
        self.mean[i]
    }

    pub fn means(&self) -> &[f64] {
        &self.mean
    }

    /// Unbiased sample variance of component `i`.
    pub fn variance(&self, i: usize) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2[i] / (self.count - 1) as f64).max(0.0)
        }
    }

    /// Standard error of the mean of component `i`.
    pub fn std_error(&self, i: usize) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance(i) / self.count as f64).sqrt()
        }
    }
}

/// Run-level sampling parameters shared by every estimator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SamplingOptions {
    pub n_samples: u64,
    pub seed: u64,
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
    pub max_resample: u32,
}

impl SamplingOptions {
    pub fn new(n_samples: u64, seed: u64) -> Self {
        Self {
            n_samples,
            seed,
            workers: None,
            max_resample: DEFAULT_MAX_RESAMPLE,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }
}

/// What one sample index produced.
pub enum Draw {
    /// Values written to the output buffer.
    Accepted,
    /// Landed on a degenerate set; the driver redraws from the same stream.
    Degenerate,
}

/// Aggregated output of [`run_blocks`].
#[derive(Clone, Debug)]
pub struct RunSummary {
    pub moments: Moments,
    pub n_rejected: u64,
}

/// Evaluates `sample` for indices `0..n_samples` and reduces the outputs.
///
/// `sample` receives the per-index generator and a zeroed buffer of
/// `components` values. A [`Draw::Degenerate`] return discards the buffer and
/// calls `sample` again with the same generator, up to `max_resample` times.
pub fn run_blocks<F>(options: &SamplingOptions, components: usize, sample: F) -> Result<RunSummary>
where
    F: Fn(&mut ChaCha8Rng, &mut [f64]) -> Result<Draw> + Sync,
{
    if options.n_samples == 0 {
        return Err(Error::Configuration("n_samples must be positive".into()));
    }
    if options.workers == Some(0) {
        return Err(Error::Configuration("workers must be positive".into()));
    }
    let stream = SampleStream::new(options.seed);
    let n_blocks = options.n_samples.div_ceil(BLOCK_SIZE);

    let block = |b: u64| -> Result<(Moments, u64)> {
        let mut moments = Moments::new(components);
        let mut rejected = 0u64;
        let mut buf = vec![0.0; components];
        let end = ((b + 1) * BLOCK_SIZE).min(options.n_samples);
        for index in b * BLOCK_SIZE..end {
            let mut rng = stream.rng(index);
            let mut attempts = 0u32;
            loop {
                buf.iter_mut().for_each(|v| *v = 0.0);
                match sample(&mut rng, &mut buf)? {
                    Draw::Accepted => break,
                    Draw::Degenerate => {
                        rejected += 1;
                        attempts += 1;
                        if attempts > options.max_resample {
                            return Err(Error::Degenerate(format!(
                                "sample {index} stayed degenerate after {attempts} redraws"
                            )));
                        }
                    }
                }
            }
            moments.push(&buf);
        }
        Ok((moments, rejected))
    };

    let run =
        || -> Result<Vec<(Moments, u64)>> { (0..n_blocks).into_par_iter().map(block).collect() };
    let blocks = match options.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::Configuration(format!("thread pool: {e}")))?
            .install(run)?,
        None => run()?,
    };

    let mut moments = Moments::new(components);
    let mut n_rejected = 0;
    for (m, r) in &blocks {
        moments.merge(m);
        n_rejected += r;
    }
    Ok(RunSummary {
        moments,
        n_rejected,
    })
}

/// Uniform draw in the open interval (0, 1).
pub(crate) fn open01<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        if u > 0.0 {
            return u;
        }
    }
}
