//! Closed-form combinatorics behind Pascal-weighted recombination.
//!
//! Binomial coefficients are built with the additive Pascal-row recurrence in
//! `u128`, so every row up to degree 126 is exact. Weights are normalized once
//! by a power of two, which keeps symmetric entries bit-identical.

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported parent count.
pub const MAX_PARENTS: usize = 64;

/// Largest supported Bernstein degree.
pub const MAX_BERNSTEIN_DEGREE: usize = 63;

/// Largest `n` accepted by [`fibonacci_diagonal`].
pub const MAX_FIBONACCI_N: u32 = 90;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightShape {
    Pascal,
    Equal,
    #[serde(rename = "dirichlet")]
    DirichletRandom,
}

impl WeightShape {
    pub fn name(self) -> &'static str {
        match self {
            WeightShape::Pascal => "pascal",
            WeightShape::Equal => "equal",
            WeightShape::DirichletRandom => "dirichlet",
        }
    }
}

/// Convex recombination weights over `m` parent slots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    weights: Vec<f64>,
    shape: WeightShape,
}

impl WeightVector {
    /// Normalized row `m - 1` of Pascal's triangle.
    pub fn pascal(m: usize) -> Result<Self> {
        check_parent_count(m)?;
        let row = binomial_row(m - 1);
        let scale = pow2(m - 1);
        let weights = row.iter().map(|&c| c as f64 / scale).collect();
        Ok(WeightVector {
            weights,
            shape: WeightShape::Pascal,
        })
    }

    pub fn equal(m: usize) -> Result<Self> {
        check_parent_count(m)?;
        Ok(WeightVector {
            weights: vec![1.0 / m as f64; m],
            shape: WeightShape::Equal,
        })
    }

    /// Flat Dirichlet(1, ..., 1) draw.
    pub fn dirichlet<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<Self> {
        check_parent_count(m)?;
        let mut weights: Vec<f64> = (0..m)
            .map(|_| {
                let x: f64 = rng.sample(Exp1);
                x.max(f64::MIN_POSITIVE)
            })
            .collect();
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        Ok(WeightVector {
            weights,
            shape: WeightShape::DirichletRandom,
        })
    }

    /// Builds weights of the given shape. Dirichlet shapes draw from `rng`.
    pub fn with_shape<R: Rng + ?Sized>(shape: WeightShape, m: usize, rng: &mut R) -> Result<Self> {
        match shape {
            WeightShape::Pascal => Self::pascal(m),
            WeightShape::Equal => Self::equal(m),
            WeightShape::DirichletRandom => Self::dirichlet(m, rng),
        }
    }

    /// Arbitrary user weights; must be nonnegative and sum to one within 1e-12.
    pub fn custom(weights: Vec<f64>) -> Result<Self> {
        check_parent_count(weights.len())?;
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::domain("weights must be finite and nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!("weights sum to {total}, expected 1")));
        }
        Ok(WeightVector {
            weights,
            shape: WeightShape::DirichletRandom,
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn shape(&self) -> WeightShape {
        self.shape
    }

    pub fn m(&self) -> usize {
        self.weights.len()
    }

    /// Σ wᵢ², the per-gene variance factor for i.i.d. parents.
    pub fn sum_of_squares(&self) -> f64 {
        self.weights.iter().map(|w| w * w).sum()
    }

    /// Samples a slot index from the categorical distribution the weights define.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (i, w) in self.weights.iter().enumerate() {
            acc += w;
            if u < acc {
                return i;
            }
        }
        // u landed in the rounding gap above the cumulative sum.
        self.weights
            .iter()
            .rposition(|&w| w > 0.0)
            .unwrap_or(self.weights.len() - 1)
    }
}

/// Normalized Pascal weights `C(m-1, i-1) / 2^(m-1)`.
pub fn pascal_weights(m: usize) -> Result<WeightVector> {
    WeightVector::pascal(m)
}

/// Offspring-to-parent variance factor `C(2m-2, m-1) / 4^(m-1)`.
pub fn variance_ratio(m: usize) -> Result<f64> {
    check_parent_count(m)?;
    let n = 2 * (m - 1);
    let central = binomial_row(n)[m - 1];
    Ok(central as f64 / pow2(n))
}

/// Bernstein basis `B_{i,degree}(t)` for `i = 0..=degree`.
pub fn bernstein_basis(degree: usize, t: f64) -> Result<Vec<f64>> {
    if degree > MAX_BERNSTEIN_DEGREE {
        return Err(Error::UnsupportedSize {
            got: degree,
            max: MAX_BERNSTEIN_DEGREE,
        });
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::domain(format!("t = {t} is outside [0, 1]")));
    }
    let s = 1.0 - t;
    let row = binomial_row(degree);
    Ok(row
        .iter()
        .enumerate()
        .map(|(i, &c)| c as f64 * t.powi(i as i32) * s.powi((degree - i) as i32))
        .collect())
}

/// Sum of the shallow diagonal `Σ_k C(n-k, k)`, equal to `F(n+1)`.
pub fn fibonacci_diagonal(n: u32) -> Result<u64> {
    if n > MAX_FIBONACCI_N {
        return Err(Error::UnsupportedSize {
            got: n as usize,
            max: MAX_FIBONACCI_N as usize,
        });
    }
    let n = n as usize;
    let mut total: u128 = 0;
    // C(n-k, k) for every k lives in rows n/2..=n; walk rows upward once.
    let mut row: Vec<u128> = vec![1];
    for r in 0..=n {
        if r > 0 {
            row = next_row(&row);
        }
        let k = n - r;
        if k <= r {
            total += row[k];
        }
    }
    Ok(total as u64)
}

/// Exact row `n` of Pascal's triangle. Exact for `n ≤ 127`.
pub fn binomial_row(n: usize) -> Vec<u128> {
    let mut row: Vec<u128> = vec![1];
    for _ in 0..n {
        row = next_row(&row);
    }
    row
}

fn next_row(row: &[u128]) -> Vec<u128> {
    let mut next = Vec::with_capacity(row.len() + 1);
    next.push(1);
    next.extend(row.windows(2).map(|w| w[0] + w[1]));
    next.push(1);
    next
}

fn pow2(n: usize) -> f64 {
    (2.0f64).powi(n as i32)
}

fn check_parent_count(m: usize) -> Result<()> {
    if m < 2 {
        return Err(Error::InvalidParentCount(m));
    }
    if m > MAX_PARENTS {
        return Err(Error::UnsupportedSize {
            got: m,
            max: MAX_PARENTS,
        });
    }
    Ok(())
}
