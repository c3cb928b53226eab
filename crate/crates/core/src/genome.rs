use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed interval for one real gene.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lo: f64,
    pub hi: f64,
}

impl Bounds {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::domain(format!("invalid bounds [{lo}, {hi}]")));
        }
        Ok(Bounds { lo, hi })
    }

    pub const fn unbounded() -> Self {
        Bounds {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub fn range(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lo, self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }
}

/// Modulation order of a wireless link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Modulation {
    Bpsk,
    Qpsk,
    Qam16,
    Qam64,
}

impl Modulation {
    pub const ALL: [Modulation; 4] = [
        Modulation::Bpsk,
        Modulation::Qpsk,
        Modulation::Qam16,
        Modulation::Qam64,
    ];

    pub fn order(self) -> u32 {
        match self {
            Modulation::Bpsk => 2,
            Modulation::Qpsk => 4,
            Modulation::Qam16 => 16,
            Modulation::Qam64 => 64,
        }
    }

    pub fn from_order(order: u32) -> Result<Self> {
        match order {
            2 => Ok(Modulation::Bpsk),
            4 => Ok(Modulation::Qpsk),
            16 => Ok(Modulation::Qam16),
            64 => Ok(Modulation::Qam64),
            other => Err(Error::domain(format!(
                "modulation order {other} is not one of 2, 4, 16, 64"
            ))),
        }
    }

    /// Bits per symbol, log2(M).
    pub fn bits(self) -> f64 {
        (self.order() as f64).log2()
    }
}

impl Serialize for Modulation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u32(self.order())
    }
}

impl<'de> Deserialize<'de> for Modulation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let order = u32::deserialize(d)?;
        Modulation::from_order(order).map_err(serde::de::Error::custom)
    }
}

/// The individual under evolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "genes", rename_all = "snake_case")]
pub enum Genome {
    Real(Vec<f64>),
    Bits(Vec<bool>),
    Permutation(Vec<usize>),
    /// Paired wireless genome: transmit powers plus one modulation per link.
    PowerModulation {
        powers: Vec<f64>,
        modulations: Vec<Modulation>,
    },
}

impl Genome {
    pub fn kind(&self) -> &'static str {
        match self {
            Genome::Real(_) => "real",
            Genome::Bits(_) => "bits",
            Genome::Permutation(_) => "permutation",
            Genome::PowerModulation { .. } => "power_modulation",
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Genome::Real(v) => v.len(),
            Genome::Bits(v) => v.len(),
            Genome::Permutation(v) => v.len(),
            Genome::PowerModulation { powers, .. } => powers.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_real(&self) -> Option<&[f64]> {
        match self {
            Genome::Real(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_permutation(&self) -> Option<&[usize]> {
        match self {
            Genome::Permutation(v) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for Genome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match serde_json::to_string(self) {
            Ok(s) => f.write_str(&s),
            Err(_) => write!(f, "{self:?}"),
        }
    }
}

/// True when `perm` contains each of `0..perm.len()` exactly once.
pub fn is_permutation(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    for &x in perm {
        if x >= perm.len() || seen[x] {
            return false;
        }
        seen[x] = true;
    }
    true
}

pub fn check_permutation(perm: &[usize]) -> Result<()> {
    if is_permutation(perm) {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "not a permutation of 0..{}: {perm:?}",
            perm.len()
        )))
    }
}
