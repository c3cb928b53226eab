//! Recombination and mutation operators.
//!
//! Every operator takes its random stream explicitly, so a caller that hands
//! each offspring its own seeded stream gets reproducible, order-independent
//! results.

mod binary;
mod mutation;
mod permutation;
mod real;

pub use binary::{logit, logit_mix_probabilities, pwr_logit, sigmoid, LOGIT_EPSILON};
pub use mutation::{
    mutate_bits, mutate_modulation, mutate_real, mutate_swap, sigma_at, MutationSpec,
};
pub use permutation::{
    crossover_pmx, pmx_with_cuts, provisional_selection, pwr_permutation, repair_permutation,
    Repair,
};
pub use real::{
    arithmetic_with_lambda, crossover_arithmetic, crossover_blx, crossover_sbx, de_style_step,
    pwr_real, sbx_with_u, weighted_combination,
};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pascal::{WeightShape, WeightVector, MAX_PARENTS};

/// Default SBX distribution index.
pub const DEFAULT_SBX_ETA: f64 = 15.0;
/// Default DE differential weight.
pub const DEFAULT_DE_F: f64 = 0.5;
/// Default BLX expansion factor.
pub const DEFAULT_BLX_ALPHA: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OperatorKind {
    /// Pascal-weighted recombination.
    Pwr,
    TwoParentArithmetic,
    Blx { alpha: f64 },
    Sbx { eta: f64 },
    DeStyle { f: f64 },
    Pmx,
    EqualWeightMpr,
    DirichletMpr,
}

/// Recombination operator plus its parent count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorSpec {
    pub kind: OperatorKind,
    pub m: usize,
}

impl OperatorSpec {
    pub fn pwr(m: usize) -> Self {
        OperatorSpec {
            kind: OperatorKind::Pwr,
            m,
        }
    }

    pub fn equal_weight(m: usize) -> Self {
        OperatorSpec {
            kind: OperatorKind::EqualWeightMpr,
            m,
        }
    }

    pub fn dirichlet(m: usize) -> Self {
        OperatorSpec {
            kind: OperatorKind::DirichletMpr,
            m,
        }
    }

    pub fn arithmetic() -> Self {
        OperatorSpec {
            kind: OperatorKind::TwoParentArithmetic,
            m: 2,
        }
    }

    pub fn blx(alpha: f64) -> Self {
        OperatorSpec {
            kind: OperatorKind::Blx { alpha },
            m: 2,
        }
    }

    pub fn sbx(eta: f64) -> Self {
        OperatorSpec {
            kind: OperatorKind::Sbx { eta },
            m: 2,
        }
    }

    pub fn de_style(f: f64) -> Self {
        OperatorSpec {
            kind: OperatorKind::DeStyle { f },
            m: 3,
        }
    }

    pub fn pmx() -> Self {
        OperatorSpec {
            kind: OperatorKind::Pmx,
            m: 2,
        }
    }

    /// Weight shape for the multi-parent family, `None` for fixed-arity kinds.
    pub fn weight_shape(&self) -> Option<WeightShape> {
        match self.kind {
            OperatorKind::Pwr => Some(WeightShape::Pascal),
            OperatorKind::EqualWeightMpr => Some(WeightShape::Equal),
            OperatorKind::DirichletMpr => Some(WeightShape::DirichletRandom),
            _ => None,
        }
    }

    pub fn is_multi_parent(&self) -> bool {
        self.weight_shape().is_some()
    }

    /// Short label used in CSV output, e.g. `pwr3`, `blx`, `pmx`.
    pub fn label(&self) -> String {
        match self.kind {
            OperatorKind::Pwr => format!("pwr{}", self.m),
            OperatorKind::EqualWeightMpr => format!("equal{}", self.m),
            OperatorKind::DirichletMpr => format!("dirichlet{}", self.m),
            OperatorKind::TwoParentArithmetic => "arith".into(),
            OperatorKind::Blx { .. } => "blx".into(),
            OperatorKind::Sbx { .. } => "sbx".into(),
            OperatorKind::DeStyle { .. } => "de".into(),
            OperatorKind::Pmx => "pmx".into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fixed = |want: usize| {
            if self.m == want {
                Ok(())
            } else {
                Err(Error::config(format!(
                    "{} takes exactly {want} parents, got m = {}",
                    self.label(),
                    self.m
                )))
            }
        };
        match self.kind {
            OperatorKind::Pwr | OperatorKind::EqualWeightMpr | OperatorKind::DirichletMpr => {
                if self.m < 2 {
                    return Err(Error::InvalidParentCount(self.m));
                }
                if self.m > MAX_PARENTS {
                    return Err(Error::UnsupportedSize {
                        got: self.m,
                        max: MAX_PARENTS,
                    });
                }
                Ok(())
            }
            OperatorKind::TwoParentArithmetic | OperatorKind::Pmx => fixed(2),
            OperatorKind::Blx { alpha } => {
                if !(alpha >= 0.0 && alpha.is_finite()) {
                    return Err(Error::config(format!("BLX alpha must be >= 0, got {alpha}")));
                }
                fixed(2)
            }
            OperatorKind::Sbx { eta } => {
                if !(eta > 0.0 && eta.is_finite()) {
                    return Err(Error::config(format!("SBX eta must be > 0, got {eta}")));
                }
                fixed(2)
            }
            OperatorKind::DeStyle { f } => {
                if !(f > 0.0 && f.is_finite()) {
                    return Err(Error::config(format!("DE F must be > 0, got {f}")));
                }
                fixed(3)
            }
        }
    }

    /// Weights for one offspring. Dirichlet shapes draw fresh weights from `rng`.
    pub fn weights_for_offspring<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Option<WeightVector>> {
        self.weight_shape()
            .map(|shape| WeightVector::with_shape(shape, self.m, rng))
            .transpose()
    }
}

/// Categorical allele selection over shuffled parent slots.
///
/// Parents are assigned to weight slots by a uniform random permutation,
/// then each position copies the allele of a slot drawn from the weights.
pub fn select_alleles<T: Copy, R: Rng + ?Sized>(
    parents: &[&[T]],
    weights: &WeightVector,
    rng: &mut R,
) -> Result<Vec<T>> {
    let len = check_parents(parents, weights)?;
    let order = shuffled_slots(weights.m(), rng);
    Ok((0..len)
        .map(|k| parents[order[weights.sample_index(rng)]][k])
        .collect())
}

pub(crate) fn shuffled_slots<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Vec<usize> {
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(rng);
    order
}

/// Checks the parent set against the weights and returns the shared length.
pub(crate) fn check_parents<T>(parents: &[&[T]], weights: &WeightVector) -> Result<usize> {
    if parents.is_empty() {
        return Err(Error::arity("empty parent set"));
    }
    if parents.len() != weights.m() {
        return Err(Error::arity(format!(
            "{} parents for {} weights",
            parents.len(),
            weights.m()
        )));
    }
    let len = parents[0].len();
    if parents.iter().any(|p| p.len() != len) {
        return Err(Error::arity("parents differ in length"));
    }
    Ok(len)
}

pub(crate) fn check_pair<T, U>(a: &[T], b: &[U]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::arity(format!(
            "parent lengths differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn arity_validation() {
        assert!(OperatorSpec::pwr(3).validate().is_ok());
        assert!(OperatorSpec::pwr(1).validate().is_err());
        assert!(OperatorSpec::pwr(65).validate().is_err());
        assert!(OperatorSpec::de_style(0.5).validate().is_ok());
        let mut bad = OperatorSpec::de_style(0.5);
        bad.m = 2;
        assert!(bad.validate().is_err());
        assert!(OperatorSpec::blx(-0.1).validate().is_err());
        assert!(OperatorSpec::sbx(0.0).validate().is_err());
        assert!(OperatorSpec::de_style(0.0).validate().is_err());
        let mut pmx = OperatorSpec::pmx();
        pmx.m = 3;
        assert!(pmx.validate().is_err());
    }

    #[test]
    fn labels() {
        assert_eq!(OperatorSpec::pwr(5).label(), "pwr5");
        assert_eq!(OperatorSpec::dirichlet(3).label(), "dirichlet3");
        assert_eq!(OperatorSpec::blx(0.3).label(), "blx");
    }

    #[test]
    fn allele_selection_unanimous() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = [1u8, 2, 3];
        let w = WeightVector::pascal(3).unwrap();
        let out = select_alleles(&[&a[..], &a[..], &a[..]], &w, &mut rng).unwrap();
        assert_eq!(out, a);
        assert!(select_alleles(&[&a[..], &a[..2], &a[..]], &w, &mut rng).is_err());
        assert!(select_alleles(&[&a[..], &a[..]], &w, &mut rng).is_err());
    }
}
