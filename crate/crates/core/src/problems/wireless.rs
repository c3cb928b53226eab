use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{wrong_genome, Direction, Encoding, Problem};
use crate::error::{Error, Result};
use crate::genome::{Bounds, Genome, Modulation};

/// Minimum SINR in dB for orders 2, 4, 16 and 64.
pub const DEFAULT_THRESHOLDS_DB: [f64; 4] = [5.0, 11.0, 18.0, 24.0];

const PAIR_SPACING: f64 = 0.05;
const MIN_DISTANCE: f64 = 0.05;
const PATH_LOSS_EXPONENT: i32 = 3;

/// Joint power and modulation selection for interfering links.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WirelessJson", into = "WirelessJson")]
pub struct WirelessProblem {
    /// `gains[i][j]`: linear gain from transmitter `j` to receiver `i`.
    gains: Vec<Vec<f64>>,
    noise: f64,
    power_bounds: Bounds,
    thresholds_db: [f64; 4],
    beta: f64,
    bounds: Vec<Bounds>,
}

#[derive(Serialize, Deserialize)]
struct WirelessJson {
    gains: Vec<Vec<f64>>,
    noise: f64,
    power_bounds: Bounds,
    thresholds_db: [f64; 4],
    beta: f64,
}

impl TryFrom<WirelessJson> for WirelessProblem {
    type Error = Error;

    fn try_from(j: WirelessJson) -> Result<Self> {
        WirelessProblem::new(j.gains, j.noise, j.power_bounds, j.thresholds_db, j.beta)
    }
}

impl From<WirelessProblem> for WirelessJson {
    fn from(p: WirelessProblem) -> Self {
        WirelessJson {
            gains: p.gains,
            noise: p.noise,
            power_bounds: p.power_bounds,
            thresholds_db: p.thresholds_db,
            beta: p.beta,
        }
    }
}

/// Per-link evaluation detail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinkReport {
    pub sinr_db: f64,
    pub threshold_db: f64,
    /// `max(0, Γ − SINR)` in dB.
    pub shortfall_db: f64,
}

impl WirelessProblem {
    pub fn new(
        gains: Vec<Vec<f64>>,
        noise: f64,
        power_bounds: Bounds,
        thresholds_db: [f64; 4],
        beta: f64,
    ) -> Result<Self> {
        let l = gains.len();
        if l == 0 {
            return Err(Error::config("wireless problem needs at least one link"));
        }
        if gains.iter().any(|r| r.len() != l) {
            return Err(Error::config("gain matrix must be square"));
        }
        for (i, row) in gains.iter().enumerate() {
            if row.iter().any(|g| !(g.is_finite() && *g >= 0.0)) {
                return Err(Error::config(format!("gain row {i} has negative or non-finite entries")));
            }
            if row[i] <= 0.0 {
                return Err(Error::config(format!("direct gain h[{i}][{i}] must be positive")));
            }
        }
        if !(noise > 0.0 && noise.is_finite()) {
            return Err(Error::config(format!("noise power must be > 0, got {noise}")));
        }
        if !(power_bounds.lo >= 0.0 && power_bounds.lo <= power_bounds.hi && power_bounds.hi.is_finite()) {
            return Err(Error::config("power bounds must satisfy 0 <= lo <= hi < inf"));
        }
        if thresholds_db.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::config("SINR thresholds must be monotone in modulation order"));
        }
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::config(format!("penalty beta must be >= 0, got {beta}")));
        }
        Ok(WirelessProblem {
            bounds: vec![power_bounds; l],
            gains,
            noise,
            power_bounds,
            thresholds_db,
            beta,
        })
    }

    pub fn links(&self) -> usize {
        self.gains.len()
    }

    pub fn gains(&self) -> &[Vec<f64>] {
        &self.gains
    }

    pub fn noise(&self) -> f64 {
        self.noise
    }

    pub fn power_bounds(&self) -> Bounds {
        self.power_bounds
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn with_beta(mut self, beta: f64) -> Result<Self> {
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::config(format!("penalty beta must be >= 0, got {beta}")));
        }
        self.beta = beta;
        Ok(self)
    }

    pub fn threshold_db(&self, m: Modulation) -> f64 {
        let idx = Modulation::ALL.iter().position(|&x| x == m).expect("known modulation");
        self.thresholds_db[idx]
    }

    /// Linear SINR of every link.
    pub fn sinr(&self, powers: &[f64]) -> Result<Vec<f64>> {
        self.check_powers(powers)?;
        Ok(self
            .gains
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let interference: f64 = row
                    .iter()
                    .zip(powers)
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, (h, p))| h * p)
                    .sum();
                row[i] * powers[i] / (interference + self.noise)
            })
            .collect())
    }

    pub fn link_reports(&self, powers: &[f64], mods: &[Modulation]) -> Result<Vec<LinkReport>> {
        if mods.len() != self.links() {
            return Err(Error::arity(format!(
                "{} modulations for {} links",
                mods.len(),
                self.links()
            )));
        }
        Ok(self
            .sinr(powers)?
            .into_iter()
            .zip(mods)
            .map(|(s, &m)| {
                let sinr_db = 10.0 * s.log10();
                let threshold_db = self.threshold_db(m);
                LinkReport {
                    sinr_db,
                    threshold_db,
                    shortfall_db: (threshold_db - sinr_db).max(0.0),
                }
            })
            .collect())
    }

    /// Penalized utility `Σ log2 Mᵢ − β Σ max(0, Γ(Mᵢ) − SINRᵢ)` with SINR in dB.
    pub fn utility(&self, powers: &[f64], mods: &[Modulation]) -> Result<f64> {
        let reports = self.link_reports(powers, mods)?;
        let rate: f64 = mods.iter().map(|m| m.bits()).sum();
        let shortfall: f64 = reports.iter().map(|r| r.shortfall_db).sum();
        // β = 0 drops the constraint term even for zero-power links.
        let penalty = if self.beta == 0.0 { 0.0 } else { self.beta * shortfall };
        Ok(rate - penalty)
    }

    pub fn is_feasible(&self, powers: &[f64], mods: &[Modulation]) -> Result<bool> {
        Ok(self
            .link_reports(powers, mods)?
            .iter()
            .all(|r| r.shortfall_db == 0.0))
    }

    fn check_powers(&self, powers: &[f64]) -> Result<()> {
        if powers.len() != self.links() {
            return Err(Error::arity(format!(
                "{} powers for {} links",
                powers.len(),
                self.links()
            )));
        }
        if let Some(p) = powers.iter().find(|p| !self.power_bounds.contains(**p)) {
            return Err(Error::domain(format!(
                "power {p} outside [{}, {}]",
                self.power_bounds.lo, self.power_bounds.hi
            )));
        }
        Ok(())
    }
}

/// Random layout of `l` transmitter/receiver pairs in the unit square.
///
/// Each receiver sits 0.05 from its own transmitter in a random direction.
/// Gains follow `d^-3` with distances clamped below at 0.05; noise is 1e-3 W,
/// powers are bounded to [1 mW, 1 W] and the penalty weight is 100.
pub fn generate_wireless(l: usize, seed: u64) -> Result<WirelessProblem> {
    if l == 0 {
        return Err(Error::domain("wireless layout needs at least one link"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tx: Vec<[f64; 2]> = (0..l).map(|_| [rng.gen(), rng.gen()]).collect();
    let rx: Vec<[f64; 2]> = tx
        .iter()
        .map(|t| {
            let theta = rng.gen_range(0.0..std::f64::consts::TAU);
            [t[0] + PAIR_SPACING * theta.cos(), t[1] + PAIR_SPACING * theta.sin()]
        })
        .collect();
    let gain = |d: f64| d.max(MIN_DISTANCE).powi(-PATH_LOSS_EXPONENT);
    let gains = (0..l)
        .map(|i| {
            (0..l)
                .map(|j| {
                    if i == j {
                        gain(PAIR_SPACING)
                    } else {
                        gain((rx[i][0] - tx[j][0]).hypot(rx[i][1] - tx[j][1]))
                    }
                })
                .collect()
        })
        .collect();
    WirelessProblem::new(
        gains,
        1e-3,
        Bounds { lo: 1e-3, hi: 1.0 },
        DEFAULT_THRESHOLDS_DB,
        100.0,
    )
}

impl Problem for WirelessProblem {
    fn name(&self) -> &str {
        "wireless"
    }

    fn direction(&self) -> Direction {
        Direction::Maximize
    }

    fn encoding(&self) -> Encoding<'_> {
        Encoding::PowerModulation {
            bounds: &self.bounds,
        }
    }

    fn evaluate(&self, genome: &Genome) -> Result<f64> {
        match genome {
            Genome::PowerModulation {
                powers,
                modulations,
            } => self.utility(powers, modulations),
            other => Err(wrong_genome("wireless", "power_modulation", other)),
        }
    }

    fn feasible(&self, genome: &Genome) -> Option<bool> {
        match genome {
            Genome::PowerModulation {
                powers,
                modulations,
            } => self.is_feasible(powers, modulations).ok(),
            _ => None,
        }
    }
}
