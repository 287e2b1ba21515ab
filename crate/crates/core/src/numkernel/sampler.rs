use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Rejection predicate: returns `true` for points that must be skipped.
pub type Exclusion = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

const MAX_ATTEMPTS: usize = 10_000;

/// Seeded uniform sampler over a coordinate box with excluded loci.
///
/// Each worker owns its own instance; equal seeds yield equal streams.
pub struct SeededSampler {
    seed: u64,
    rng: ChaCha8Rng,
    boxes: Vec<(f64, f64)>,
    exclusions: Vec<Exclusion>,
    rejected: usize,
}

impl SeededSampler {
    pub fn new(seed: u64, boxes: Vec<(f64, f64)>) -> Self {
        Self {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
            boxes,
            exclusions: Vec::new(),
            rejected: 0,
        }
    }

    /// Same box `[lo, hi]` in every one of `n` coordinates.
    pub fn cube(seed: u64, n: usize, lo: f64, hi: f64) -> Self {
        Self::new(seed, vec![(lo, hi); n])
    }

    pub fn exclude(mut self, pred: impl Fn(&[f64]) -> bool + Send + Sync + 'static) -> Self {
        self.exclusions.push(Arc::new(pred));
        self
    }

    /// Rejects points whose coordinate `index` is within `margin` of zero.
    pub fn exclude_near_zero(self, index: usize, margin: f64) -> Self {
        self.exclude(move |p| p[index].abs() <= margin)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dim(&self) -> usize {
        self.boxes.len()
    }

    /// Number of candidate points rejected so far.
    pub fn rejected(&self) -> usize {
        self.rejected
    }

    pub fn sample(&mut self) -> Result<Vec<f64>> {
        for _ in 0..MAX_ATTEMPTS {
            let p: Vec<f64> = self
                .boxes
                .iter()
                .map(|&(lo, hi)| self.rng.gen_range(lo..=hi))
                .collect();
            if self.exclusions.iter().any(|ex| ex(&p)) {
                self.rejected += 1;
                continue;
            }
            return Ok(p);
        }
        Err(Error::SamplerExhausted(MAX_ATTEMPTS))
    }

    pub fn samples(&mut self, count: usize) -> Result<Vec<Vec<f64>>> {
        (0..count).map(|_| self.sample()).collect()
    }

    /// Uniform scalar in `[lo, hi]` drawn from the same stream.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..=hi)
    }

    pub fn uniform_vec(&mut self, n: usize, lo: f64, hi: f64) -> Vec<f64> {
        (0..n).map(|_| self.uniform(lo, hi)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn excluded_locus_is_avoided() {
        let mut s = SeededSampler::cube(7, 2, -1.0, 1.0).exclude_near_zero(1, 0.5);
        for p in s.samples(200).unwrap() {
            assert!(p[1].abs() > 0.5);
            assert!(p[0].abs() <= 1.0);
        }
        assert!(s.rejected() > 0);
    }

    #[test]
    fn impossible_box_exhausts() {
        let mut s = SeededSampler::cube(1, 1, -0.1, 0.1).exclude_near_zero(0, 1.0);
        assert!(matches!(s.sample(), Err(Error::SamplerExhausted(_))));
    }
}
