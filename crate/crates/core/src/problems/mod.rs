//! Benchmark objectives: PID/ITAE, FIR design, wireless SINR utility, TSP, plus
//! two small sanity problems.

mod fir;
mod pid;
mod sphere;
mod tsp;
mod wireless;

pub use fir::{expand_symmetric, FirParams, FirProblem, FIR_FREE_COEFFS, FIR_TAPS};
pub use pid::{PidProblem, DIVERGENCE_LIMIT, ITAE_SENTINEL};
pub use sphere::{OneMax, Sphere};
pub use tsp::{generate_tsp, tour_length, DistanceMatrix, TspInstance};
pub use wireless::{generate_wireless, LinkReport, WirelessProblem, DEFAULT_THRESHOLDS_DB};

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::genome::{Bounds, Genome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Minimize,
    Maximize,
}

impl Direction {
    /// True when `a` is strictly better than `b`.
    pub fn better(self, a: f64, b: f64) -> bool {
        match self {
            Direction::Minimize => a < b,
            Direction::Maximize => a > b,
        }
    }

    /// Orders fitness values best-first.
    pub fn cmp_best(self, a: f64, b: f64) -> Ordering {
        match self {
            Direction::Minimize => a.total_cmp(&b),
            Direction::Maximize => b.total_cmp(&a),
        }
    }
}

/// Genome layout a problem expects.
#[derive(Debug, Clone, Copy)]
pub enum Encoding<'a> {
    Real { bounds: &'a [Bounds] },
    Bits { len: usize },
    Permutation { distance: &'a DistanceMatrix },
    PowerModulation { bounds: &'a [Bounds] },
}

impl Encoding<'_> {
    pub fn name(&self) -> &'static str {
        match self {
            Encoding::Real { .. } => "real",
            Encoding::Bits { .. } => "bits",
            Encoding::Permutation { .. } => "permutation",
            Encoding::PowerModulation { .. } => "power_modulation",
        }
    }
}

/// An evaluatable objective.
pub trait Problem: Send + Sync {
    fn name(&self) -> &str;

    fn direction(&self) -> Direction;

    fn encoding(&self) -> Encoding<'_>;

    fn evaluate(&self, genome: &Genome) -> Result<f64>;

    /// Whether every constraint holds, for problems that carry constraints.
    fn feasible(&self, _genome: &Genome) -> Option<bool> {
        None
    }
}

pub(crate) fn wrong_genome(problem: &str, expected: &str, genome: &Genome) -> crate::error::Error {
    crate::error::Error::config(format!(
        "{problem} expects a {expected} genome, got {}",
        genome.kind()
    ))
}
