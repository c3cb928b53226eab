use serde::{Deserialize, Serialize};

use super::{wrong_genome, Direction, Encoding, Problem};
use crate::error::{Error, Result};
use crate::genome::{Bounds, Genome};

/// `f(x) = Σ xᵢ²` on a box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sphere {
    bounds: Vec<Bounds>,
}

impl Sphere {
    pub fn new(dim: usize, limit: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::config("sphere dimension must be positive"));
        }
        let b = Bounds::new(-limit, limit)?;
        Ok(Sphere {
            bounds: vec![b; dim],
        })
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }
}

impl Problem for Sphere {
    fn name(&self) -> &str {
        "sphere"
    }

    fn direction(&self) -> Direction {
        Direction::Minimize
    }

    fn encoding(&self) -> Encoding<'_> {
        Encoding::Real {
            bounds: &self.bounds,
        }
    }

    fn evaluate(&self, genome: &Genome) -> Result<f64> {
        match genome {
            Genome::Real(x) if x.len() == self.dim() => Ok(x.iter().map(|v| v * v).sum()),
            Genome::Real(x) => Err(Error::arity(format!(
                "sphere expects {} genes, got {}",
                self.dim(),
                x.len()
            ))),
            other => Err(wrong_genome("sphere", "real", other)),
        }
    }
}

/// Count of set bits, maximized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneMax {
    pub len: usize,
}

impl Problem for OneMax {
    fn name(&self) -> &str {
        "onemax"
    }

    fn direction(&self) -> Direction {
        Direction::Maximize
    }

    fn encoding(&self) -> Encoding<'_> {
        Encoding::Bits { len: self.len }
    }

    fn evaluate(&self, genome: &Genome) -> Result<f64> {
        match genome {
            Genome::Bits(b) if b.len() == self.len => Ok(b.iter().filter(|&&x| x).count() as f64),
            Genome::Bits(b) => Err(Error::arity(format!(
                "onemax expects {} bits, got {}",
                self.len,
                b.len()
            ))),
            other => Err(wrong_genome("onemax", "bits", other)),
        }
    }
}
