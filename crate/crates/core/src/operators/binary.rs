use rand::Rng;

use super::{check_parents, shuffled_slots};
use crate::error::Result;
use crate::pascal::WeightVector;

/// Probability assigned to a hard allele before taking its logit:
/// allele 1 maps to `1 − ε`, allele 0 to `ε`.
pub const LOGIT_EPSILON: f64 = 0.01;

pub fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Per-gene offspring probabilities `σ(Σ wᵢ ℓᵢ)` with parents already in slot order.
pub fn logit_mix_probabilities(
    parents: &[&[bool]],
    weights: &WeightVector,
    epsilon: f64,
) -> Result<Vec<f64>> {
    let len = check_parents(parents, weights)?;
    let hi = logit(1.0 - epsilon);
    let lo = logit(epsilon);
    Ok((0..len)
        .map(|g| {
            let l: f64 = parents
                .iter()
                .zip(weights.weights())
                .map(|(p, w)| w * if p[g] { hi } else { lo })
                .sum();
            sigmoid(l)
        })
        .collect())
}

/// Logit-space PWR for bit strings: shuffle slots, mix logits, sample Bernoulli.
pub fn pwr_logit<R: Rng + ?Sized>(
    parents: &[&[bool]],
    weights: &WeightVector,
    rng: &mut R,
) -> Result<Vec<bool>> {
    check_parents(parents, weights)?;
    let order = shuffled_slots(weights.m(), rng);
    let ordered: Vec<&[bool]> = order.iter().map(|&i| parents[i]).collect();
    let probs = logit_mix_probabilities(&ordered, weights, LOGIT_EPSILON)?;
    Ok(probs.into_iter().map(|p| rng.gen::<f64>() < p).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pascal::pascal_weights;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unanimous_parents_hit_clamped_probability() {
        let w = pascal_weights(3).unwrap();
        let ones = [true; 4];
        let zeros = [false; 4];
        let p1 = logit_mix_probabilities(&[&ones, &ones, &ones], &w, LOGIT_EPSILON).unwrap();
        let p0 = logit_mix_probabilities(&[&zeros, &zeros, &zeros], &w, LOGIT_EPSILON).unwrap();
        for (a, b) in p1.iter().zip(&p0) {
            assert!((a - 0.99).abs() < 1e-12);
            assert!((b - 0.01).abs() < 1e-12);
        }
    }

    #[test]
    fn opposing_pair_is_a_coin_flip() {
        let w = pascal_weights(2).unwrap();
        let p = logit_mix_probabilities(&[&[true], &[false]], &w, LOGIT_EPSILON).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn three_parent_mix_by_hand() {
        // ℓ(0.99) = ln 99; slots weigh (1/4, 1/2, 1/4).
        let l = 99f64.ln();
        let w = pascal_weights(3).unwrap();
        // Zero allele on an outer slot: 0.25 l + 0.5 l − 0.25 l = 0.5 l.
        let outer = logit_mix_probabilities(&[&[true], &[true], &[false]], &w, 0.01).unwrap();
        let expect = 1.0 / (1.0 + (-0.5 * l).exp());
        assert!((outer[0] - expect).abs() < 1e-12);
        assert!((outer[0] - 0.9087).abs() < 1e-4);
        // Zero allele in the middle slot cancels exactly.
        let middle = logit_mix_probabilities(&[&[true], &[false], &[true]], &w, 0.01).unwrap();
        assert!((middle[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn sampling_frequency_of_unanimous_ones() {
        let w = pascal_weights(3).unwrap();
        let ones = vec![true; 1000];
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut count = 0usize;
        for _ in 0..100 {
            let child = pwr_logit(&[&ones, &ones, &ones], &w, &mut rng).unwrap();
            count += child.iter().filter(|&&b| b).count();
        }
        let freq = count as f64 / 100_000.0;
        assert!((freq - 0.99).abs() < 0.002, "freq = {freq}");
    }

    #[test]
    fn length_mismatch() {
        let w = pascal_weights(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(pwr_logit(&[&[true], &[true, false]], &w, &mut rng).is_err());
    }
}
