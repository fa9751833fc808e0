//! Seedable test-vector generation for the sampled certificates.
//!
//! At each level `t` the sampler yields the constant vector `t𝟙` first, then
//! cycles through k-sparse spikes (`k ∈ {1, n/10, n/2}`) and uniform vectors
//! rescaled to sup-norm `t`.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cone::PlusVector;

pub const DEFAULT_SEED: u64 = 0x5e_ed0f_dec4;

#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    fn spike(&mut self, n: usize, k: usize, t: f64) -> Vec<f64> {
        let mut v = vec![0.0; n];
        for idx in sample(&mut self.rng, n, k.clamp(1, n)) {
            v[idx] = t;
        }
        v
    }

    fn uniform(&mut self, n: usize, t: f64) -> Vec<f64> {
        let mut v: Vec<f64> = (0..n).map(|_| self.rng.random::<f64>()).collect();
        let peak = v.iter().copied().fold(0.0, f64::max);
        if peak == 0.0 {
            let i = self.rng.random_range(0..n);
            v[i] = 1.0;
        } else {
            // the peak entry becomes exactly 1
            v.iter_mut().for_each(|x| *x /= peak);
        }
        v.iter_mut().for_each(|x| *x *= t);
        v
    }

    /// `count` vectors with sup-norm exactly `t` (for `n ≥ 1`).
    pub fn level(&mut self, n: usize, t: f64, count: usize) -> Vec<PlusVector> {
        let spikes = [1, (n / 10).max(1), (n / 2).max(1)];
        (0..count)
            .map(|idx| {
                let v = match idx {
                    0 => vec![t; n],
                    _ => match (idx - 1) % 4 {
                        0 => self.spike(n, spikes[0], t),
                        1 => self.spike(n, spikes[1], t),
                        2 => self.spike(n, spikes[2], t),
                        _ => self.uniform(n, t),
                    },
                };
                PlusVector::from_vec(v)
            })
            .collect()
    }

    /// Uniform vector in the box `[lo, hi]ⁿ`.
    pub fn in_box(&mut self, n: usize, lo: f64, hi: f64) -> Vec<f64> {
        (0..n).map(|_| lo + (hi - lo) * self.rng.random::<f64>()).collect()
    }

    pub fn unit(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }
}

/// `count` log-spaced points between `lo` and `hi`, both included.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi >= lo && count >= 1);
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|k| {
            if k == 0 {
                lo
            } else if k + 1 == count {
                hi
            } else {
                (a + (b - a) * k as f64 / (count - 1) as f64).exp()
            }
        })
        .collect()
}

/// Default path grid density: 17 log-spaced points per decade.
pub fn points_per_decade(lo: f64, hi: f64, per_decade: usize) -> usize {
    let decades = (hi / lo).log10();
    ((decades * per_decade as f64).round() as usize).max(1) + 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_vectors_have_exact_norm() {
        let mut s = Sampler::new(7);
        for n in [1, 2, 13, 40] {
            for v in s.level(n, 2.5, 12) {
                assert_eq!(v.sup_norm(), 2.5);
                assert_eq!(v.len(), n);
            }
        }
    }

    #[test]
    fn first_sample_is_constant() {
        let v = Sampler::new(1).level(5, 3.0, 1);
        assert_eq!(v[0], PlusVector::constant(5, 3.0));
    }

    #[test]
    fn reproducible() {
        let a = Sampler::new(42).level(10, 1.0, 20);
        let b = Sampler::new(42).level(10, 1.0, 20);
        assert_eq!(a, b);
    }

    #[test]
    fn grids() {
        let g = log_grid(0.5, 4.0, 4);
        assert_eq!(g[0], 0.5);
        assert_eq!(g[3], 4.0);
        assert!((g[1] - 1.0).abs() < 1e-12 && (g[2] - 2.0).abs() < 1e-12);
        assert_eq!(points_per_decade(0.1, 10.0, 17), 35);
    }
}
