use rand::Rng;

use super::{check_pair, check_parents, shuffled_slots};
use crate::error::{Error, Result};
use crate::genome::Bounds;
use crate::pascal::WeightVector;

/// Pascal-weighted (or any convex-weighted) real recombination.
///
/// Parent order is shuffled per call, then `o = Σ wᵢ p_{π(i)}`.
pub fn pwr_real<R: Rng + ?Sized>(
    parents: &[&[f64]],
    weights: &WeightVector,
    rng: &mut R,
) -> Result<Vec<f64>> {
    check_parents(parents, weights)?;
    let order = shuffled_slots(weights.m(), rng);
    let ordered: Vec<&[f64]> = order.iter().map(|&i| parents[i]).collect();
    weighted_combination(&ordered, weights)
}

/// `Σ wᵢ pᵢ` in the given slot order, without shuffling.
///
/// Each gene is clamped to the parental `[min, max]` so floating-point
/// rounding can never leave the convex hull.
pub fn weighted_combination(parents: &[&[f64]], weights: &WeightVector) -> Result<Vec<f64>> {
    let d = check_parents(parents, weights)?;
    let w = weights.weights();
    Ok((0..d)
        .map(|g| {
            let mut acc = 0.0;
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for (p, wi) in parents.iter().zip(w) {
                let x = p[g];
                acc += wi * x;
                lo = lo.min(x);
                hi = hi.max(x);
            }
            acc.clamp(lo, hi)
        })
        .collect())
}

/// Two-parent arithmetic crossover with one λ ~ U(0, 1) per offspring.
pub fn crossover_arithmetic<R: Rng + ?Sized>(p1: &[f64], p2: &[f64], rng: &mut R) -> Result<Vec<f64>> {
    let lambda: f64 = rng.gen();
    arithmetic_with_lambda(p1, p2, lambda)
}

pub fn arithmetic_with_lambda(p1: &[f64], p2: &[f64], lambda: f64) -> Result<Vec<f64>> {
    check_pair(p1, p2)?;
    Ok(p1
        .iter()
        .zip(p2)
        .map(|(&a, &b)| {
            let x = lambda * a + (1.0 - lambda) * b;
            x.clamp(a.min(b), a.max(b))
        })
        .collect())
}

/// BLX-α: per gene, uniform in `[min − αI, max + αI]`, clamped to bounds.
pub fn crossover_blx<R: Rng + ?Sized>(
    p1: &[f64],
    p2: &[f64],
    alpha: f64,
    bounds: &[Bounds],
    rng: &mut R,
) -> Result<Vec<f64>> {
    check_pair(p1, p2)?;
    check_pair(p1, bounds)?;
    if !(alpha >= 0.0) {
        return Err(Error::domain(format!("BLX alpha must be >= 0, got {alpha}")));
    }
    Ok(p1
        .iter()
        .zip(p2)
        .zip(bounds)
        .map(|((&a, &b), bd)| {
            let (lo, hi) = (a.min(b), a.max(b));
            let spread = alpha * (hi - lo);
            let (lo, hi) = (lo - spread, hi + spread);
            let x = if hi > lo { rng.gen_range(lo..=hi) } else { lo };
            bd.clamp(x)
        })
        .collect())
}

/// Simulated binary crossover; returns both children.
pub fn crossover_sbx<R: Rng + ?Sized>(
    p1: &[f64],
    p2: &[f64],
    eta: f64,
    bounds: &[Bounds],
    rng: &mut R,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let u: Vec<f64> = (0..p1.len()).map(|_| rng.gen()).collect();
    sbx_with_u(p1, p2, eta, bounds, &u)
}

/// SBX with the per-gene uniform draws supplied by the caller.
pub fn sbx_with_u(
    p1: &[f64],
    p2: &[f64],
    eta: f64,
    bounds: &[Bounds],
    u: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_pair(p1, p2)?;
    check_pair(p1, bounds)?;
    check_pair(p1, u)?;
    if !(eta > 0.0) {
        return Err(Error::domain(format!("SBX eta must be > 0, got {eta}")));
    }
    let exponent = 1.0 / (eta + 1.0);
    let mut c1 = Vec::with_capacity(p1.len());
    let mut c2 = Vec::with_capacity(p1.len());
    for (((&a, &b), bd), &u) in p1.iter().zip(p2).zip(bounds).zip(u) {
        let beta = if u <= 0.5 {
            (2.0 * u).powf(exponent)
        } else {
            (1.0 / (2.0 * (1.0 - u))).powf(exponent)
        };
        c1.push(bd.clamp(0.5 * ((1.0 + beta) * a + (1.0 - beta) * b)));
        c2.push(bd.clamp(0.5 * ((1.0 - beta) * a + (1.0 + beta) * b)));
    }
    Ok((c1, c2))
}

/// `o = p1 + F (p2 − p3)`, clamped to bounds.
pub fn de_style_step(
    p1: &[f64],
    p2: &[f64],
    p3: &[f64],
    f: f64,
    bounds: &[Bounds],
) -> Result<Vec<f64>> {
    check_pair(p1, p2)?;
    check_pair(p1, p3)?;
    check_pair(p1, bounds)?;
    Ok(p1
        .iter()
        .zip(p2)
        .zip(p3)
        .zip(bounds)
        .map(|(((&a, &b), &c), bd)| bd.clamp(a + f * (b - c)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pascal::pascal_weights;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn free(d: usize) -> Vec<Bounds> {
        vec![Bounds::unbounded(); d]
    }

    #[test]
    fn pwr_two_parents_is_midpoint() {
        let w = pascal_weights(2).unwrap();
        for s in 0..20 {
            let o = pwr_real(&[&[0.0, 0.0], &[1.0, 1.0]], &w, &mut rng(s)).unwrap();
            assert_eq!(o, vec![0.5, 0.5]);
        }
    }

    #[test]
    fn pwr_fixed_point() {
        let v = [0.1, -3.7, 1e6, 0.3];
        for m in 2..=9 {
            let w = pascal_weights(m).unwrap();
            let parents = vec![&v[..]; m];
            assert_eq!(pwr_real(&parents, &w, &mut rng(m as u64)).unwrap(), v);
        }
    }

    #[test]
    fn pwr_three_parents_enumerated() {
        // Oracle: every assignment of {0, 1, 2} to the slots of (1/4, 1/2, 1/4).
        let mut oracle = Vec::new();
        for perm in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
            let v = 0.25 * perm[0] as f64 + 0.5 * perm[1] as f64 + 0.25 * perm[2] as f64;
            oracle.push(v);
        }
        oracle.sort_by(f64::total_cmp);
        oracle.dedup();
        assert_eq!(oracle, vec![0.75, 1.0, 1.25]);

        let w = pascal_weights(3).unwrap();
        let parents: [&[f64]; 3] = [&[0.0], &[1.0], &[2.0]];
        let mut seen = std::collections::BTreeSet::new();
        for s in 0..200 {
            let o = pwr_real(&parents, &w, &mut rng(s)).unwrap();
            assert!(oracle.contains(&o[0]));
            seen.insert((o[0] * 4.0) as i64);
            let again = pwr_real(&parents, &w, &mut rng(s)).unwrap();
            assert_eq!(o, again);
        }
        assert_eq!(seen.len(), 3);
    }

    #[test]
    fn pwr_arity_errors() {
        let w = pascal_weights(3).unwrap();
        let mut r = rng(0);
        assert!(matches!(
            pwr_real(&[], &w, &mut r),
            Err(Error::Arity(_))
        ));
        assert!(pwr_real(&[&[0.0], &[1.0]], &w, &mut r).is_err());
        assert!(pwr_real(&[&[0.0], &[1.0, 2.0], &[1.0]], &w, &mut r).is_err());
    }

    #[test]
    fn arithmetic_cases() {
        assert_eq!(arithmetic_with_lambda(&[0.0], &[2.0], 0.5).unwrap(), vec![1.0]);
        let v = [1.5, -2.0];
        assert_eq!(crossover_arithmetic(&v, &v, &mut rng(1)).unwrap(), v);
        let mut r = rng(2);
        for _ in 0..1000 {
            let o = crossover_arithmetic(&[-1.0, 3.0], &[2.0, 3.5], &mut r).unwrap();
            assert!((-1.0..=2.0).contains(&o[0]));
            assert!((3.0..=3.5).contains(&o[1]));
        }
        assert!(arithmetic_with_lambda(&[0.0], &[1.0, 2.0], 0.5).is_err());
    }

    #[test]
    fn blx_cases() {
        let v = [0.25, 0.75];
        assert_eq!(crossover_blx(&v, &v, 0.3, &free(2), &mut rng(0)).unwrap(), v);

        let mut r = rng(5);
        for _ in 0..1000 {
            let o = crossover_blx(&[0.0], &[1.0], 0.0, &free(1), &mut r).unwrap();
            assert!((0.0..=1.0).contains(&o[0]));
        }

        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for _ in 0..100_000 {
            let o = crossover_blx(&[0.0], &[1.0], 0.3, &free(1), &mut r).unwrap();
            lo = lo.min(o[0]);
            hi = hi.max(o[0]);
        }
        assert!((-0.3..-0.3 + 0.016).contains(&lo), "lo = {lo}");
        assert!(hi <= 1.3 && hi > 1.3 - 0.016, "hi = {hi}");

        let clamp = [Bounds::new(0.0, 1.0).unwrap()];
        for _ in 0..1000 {
            let o = crossover_blx(&[0.0], &[1.0], 0.3, &clamp, &mut r).unwrap();
            assert!((0.0..=1.0).contains(&o[0]));
        }
    }

    #[test]
    fn sbx_cases() {
        let v = [0.3, -0.2];
        let (a, b) = crossover_sbx(&v, &v, 15.0, &free(2), &mut rng(0)).unwrap();
        assert_eq!(a, v);
        assert_eq!(b, v);

        let (a, b) = sbx_with_u(&[1.0, 4.0], &[3.0, -2.0], 15.0, &free(2), &[0.5, 0.5]).unwrap();
        assert_eq!(a, vec![1.0, 4.0]);
        assert_eq!(b, vec![3.0, -2.0]);
        assert!(sbx_with_u(&[1.0], &[2.0], 0.0, &free(1), &[0.5]).is_err());
    }

    #[test]
    fn de_cases() {
        let b = free(1);
        assert_eq!(de_style_step(&[0.7], &[0.2], &[0.2], 0.5, &b).unwrap(), vec![0.7]);
        assert_eq!(de_style_step(&[0.0], &[2.0], &[0.0], 0.5, &b).unwrap(), vec![1.0]);
        let nonneg = [Bounds::new(0.0, 10.0).unwrap()];
        assert_eq!(de_style_step(&[1.0], &[0.0], &[2.0], 0.5, &nonneg).unwrap(), vec![0.0]);
        assert_eq!(de_style_step(&[1.0], &[0.0], &[4.0], 0.5, &nonneg).unwrap(), vec![0.0]);
        assert!(de_style_step(&[1.0], &[0.0, 1.0], &[4.0], 0.5, &nonneg).is_err());
    }

    proptest! {
        #[test]
        fn sbx_preserves_parent_mean(
            a in -100.0f64..100.0, b in -100.0f64..100.0,
            u in 0.0f64..1.0, eta in 0.1f64..50.0,
        ) {
            let (c1, c2) = sbx_with_u(&[a], &[b], eta, &free(1), &[u]).unwrap();
            let tol = 1e-9 * (1.0 + a.abs() + b.abs()) * (1.0 + (c1[0] - c2[0]).abs());
            prop_assert!(((c1[0] + c2[0]) - (a + b)).abs() <= tol);
        }

        #[test]
        fn pwr_stays_in_hull(
            seed in any::<u64>(),
            m in 2usize..8,
            genes in prop::collection::vec(-1e3f64..1e3, 2 * 8 * 4),
        ) {
            let d = 4;
            let parents: Vec<&[f64]> = (0..m).map(|i| &genes[i * d..(i + 1) * d]).collect();
            let w = pascal_weights(m).unwrap();
            let o = pwr_real(&parents, &w, &mut rng(seed)).unwrap();
            for g in 0..d {
                let lo = parents.iter().map(|p| p[g]).fold(f64::INFINITY, f64::min);
                let hi = parents.iter().map(|p| p[g]).fold(f64::NEG_INFINITY, f64::max);
                prop_assert!(o[g] >= lo && o[g] <= hi);
            }
        }
    }
}
