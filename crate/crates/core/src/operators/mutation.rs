use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genome::{Bounds, Modulation};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MutationSpec {
    /// Per-gene probability of a Gaussian perturbation.
    pub rate: f64,
    /// Initial standard deviation as a fraction of each gene's range.
    pub sigma0: f64,
    /// Multiplicative sigma factor per generation.
    pub decay: f64,
    /// Per-offspring probability of one swap (permutations).
    pub swap_rate: f64,
    /// Per-entry probability of a modulation flip (wireless).
    pub flip_rate: f64,
}

impl MutationSpec {
    /// Decay that shrinks sigma to a tenth of `sigma0` after `generations` steps.
    pub fn decay_over(generations: usize) -> f64 {
        if generations == 0 {
            1.0
        } else {
            0.1f64.powf(1.0 / generations as f64)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let prob = |name: &str, p: f64| {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(Error::config(format!("mutation {name} must lie in [0, 1], got {p}")))
            }
        };
        prob("rate", self.rate)?;
        prob("swap_rate", self.swap_rate)?;
        prob("flip_rate", self.flip_rate)?;
        if !(self.sigma0 > 0.0 && self.sigma0.is_finite()) {
            return Err(Error::config(format!("mutation sigma0 must be > 0, got {}", self.sigma0)));
        }
        if !(self.decay > 0.0 && self.decay <= 1.0) {
            return Err(Error::config(format!("mutation decay must lie in (0, 1], got {}", self.decay)));
        }
        Ok(())
    }
}

/// `sigma0 · decay^generation`.
pub fn sigma_at(spec: &MutationSpec, generation: usize) -> f64 {
    spec.sigma0 * spec.decay.powi(generation as i32)
}

/// Gaussian mutation with per-gene probability `spec.rate`, then projection
/// onto the bounds. Genes with an unbounded range use sigma as an absolute scale.
pub fn mutate_real<R: Rng + ?Sized>(
    genes: &[f64],
    spec: &MutationSpec,
    generation: usize,
    bounds: &[Bounds],
    rng: &mut R,
) -> Result<Vec<f64>> {
    if genes.len() != bounds.len() {
        return Err(Error::arity(format!(
            "{} genes for {} bounds",
            genes.len(),
            bounds.len()
        )));
    }
    let sigma = sigma_at(spec, generation);
    Ok(genes
        .iter()
        .zip(bounds)
        .map(|(&x, b)| {
            if spec.rate > 0.0 && rng.gen::<f64>() < spec.rate {
                let range = if b.range().is_finite() { b.range() } else { 1.0 };
                let z: f64 = rng.sample(StandardNormal);
                b.clamp(x + sigma * range * z)
            } else {
                x
            }
        })
        .collect())
}

/// With probability `swap_rate`, exchanges two distinct uniformly chosen positions.
pub fn mutate_swap<R: Rng + ?Sized>(perm: &[usize], swap_rate: f64, rng: &mut R) -> Vec<usize> {
    let mut out = perm.to_vec();
    let n = out.len();
    if n >= 2 && swap_rate > 0.0 && rng.gen::<f64>() < swap_rate {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        out.swap(i, j);
    }
    out
}

/// Replaces each entry, with probability `flip_rate`, by a different modulation.
pub fn mutate_modulation<R: Rng + ?Sized>(
    mods: &[Modulation],
    flip_rate: f64,
    rng: &mut R,
) -> Vec<Modulation> {
    mods.iter()
        .map(|&m| {
            if flip_rate > 0.0 && rng.gen::<f64>() < flip_rate {
                let others: Vec<Modulation> =
                    Modulation::ALL.iter().copied().filter(|&o| o != m).collect();
                others[rng.gen_range(0..others.len())]
            } else {
                m
            }
        })
        .collect()
}

/// Independent bit flips with probability `rate`.
pub fn mutate_bits<R: Rng + ?Sized>(bits: &[bool], rate: f64, rng: &mut R) -> Vec<bool> {
    bits.iter()
        .map(|&b| if rate > 0.0 && rng.gen::<f64>() < rate { !b } else { b })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn spec(rate: f64, decay: f64) -> MutationSpec {
        MutationSpec {
            rate,
            sigma0: 0.1,
            decay,
            swap_rate: 0.25,
            flip_rate: 0.1,
        }
    }

    #[test]
    fn zero_rate_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let b = vec![Bounds::new(-1.0, 1.0).unwrap(); 3];
        let g = [0.1, -0.5, 0.9];
        assert_eq!(mutate_real(&g, &spec(0.0, 0.9), 4, &b, &mut rng).unwrap(), g);
        assert_eq!(mutate_swap(&[2, 0, 1], 0.0, &mut rng), vec![2, 0, 1]);
        let mods = [Modulation::Bpsk, Modulation::Qam64];
        assert_eq!(mutate_modulation(&mods, 0.0, &mut rng), mods);
        assert_eq!(mutate_bits(&[true, false], 0.0, &mut rng), vec![true, false]);
    }

    #[test]
    fn sigma_schedule() {
        let s = spec(1.0, 1.0);
        assert_eq!(sigma_at(&s, 0), sigma_at(&s, 50));
        let s = MutationSpec {
            decay: MutationSpec::decay_over(80),
            ..s
        };
        assert!((sigma_at(&s, 80) - 0.01).abs() < 1e-12);
        assert_eq!(MutationSpec::decay_over(0), 1.0);
    }

    #[test]
    fn output_respects_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let b = [Bounds::new(0.0, 10.0).unwrap(), Bounds::new(0.0, 5.0).unwrap()];
        let wild = MutationSpec {
            sigma0: 5.0,
            ..spec(1.0, 1.0)
        };
        for _ in 0..100_000 {
            let out = mutate_real(&[9.9, 0.1], &wild, 0, &b, &mut rng).unwrap();
            assert!(b[0].contains(out[0]) && b[1].contains(out[1]));
        }
    }

    #[test]
    fn swap_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert_eq!(mutate_swap(&[0, 1], 1.0, &mut rng), vec![1, 0]);
        assert_eq!(mutate_swap(&[0], 1.0, &mut rng), vec![0]);
        for _ in 0..1000 {
            let mut out = mutate_swap(&[4, 2, 0, 3, 1], 0.5, &mut rng);
            out.sort_unstable();
            assert_eq!(out, vec![0, 1, 2, 3, 4]);
        }
    }

    #[test]
    fn modulation_flip_count() {
        // Binomial(8 · 10^5, 0.1): mean 80000, sd ≈ 268, so 2% (1600) is ~6 sd.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = vec![Modulation::Qpsk; 8];
        let mut flips = 0usize;
        for _ in 0..100_000 {
            let out = mutate_modulation(&g, 0.1, &mut rng);
            flips += out.iter().filter(|&&m| m != Modulation::Qpsk).count();
            assert!(out.iter().all(|m| Modulation::ALL.contains(m)));
        }
        let expected = 0.1 * 8.0 * 100_000.0;
        assert!(((flips as f64) - expected).abs() / expected < 0.02, "flips = {flips}");
    }

    #[test]
    fn validation() {
        assert!(spec(0.2, 0.9).validate().is_ok());
        assert!(spec(1.2, 0.9).validate().is_err());
        assert!(spec(0.2, 0.0).validate().is_err());
        assert!(spec(0.2, 1.1).validate().is_err());
        let s = MutationSpec { sigma0: 0.0, ..spec(0.2, 0.9) };
        assert!(s.validate().is_err());
    }
}
