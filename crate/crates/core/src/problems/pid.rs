use serde::{Deserialize, Serialize};

use super::{wrong_genome, Direction, Encoding, Problem};
use crate::error::{Error, Result};
use crate::genome::{Bounds, Genome};

/// Returned for closed loops whose output leaves `±DIVERGENCE_LIMIT`.
pub const ITAE_SENTINEL: f64 = 1e6;
pub const DIVERGENCE_LIMIT: f64 = 1e3;

/// PID tuning of `G(s) = e^{-0.2 s} / ((s + 1)(s + 3))` against the ITAE criterion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PidProblem {
    /// Bounds for `[Kp, Ki, Kd]`.
    pub bounds: [Bounds; 3],
    /// Input delay in seconds.
    pub delay: f64,
    /// Simulation horizon `T` in seconds.
    pub horizon: f64,
    /// Integration step in seconds.
    pub dt: f64,
}

impl Default for PidProblem {
    fn default() -> Self {
        PidProblem {
            bounds: [
                Bounds { lo: 0.0, hi: 10.0 },
                Bounds { lo: 0.0, hi: 10.0 },
                Bounds { lo: 0.0, hi: 5.0 },
            ],
            delay: 0.2,
            horizon: 10.0,
            dt: 0.001,
        }
    }
}

impl PidProblem {
    pub fn new(horizon: f64, dt: f64) -> Result<Self> {
        let p = PidProblem {
            horizon,
            dt,
            ..Default::default()
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::config(format!("pid dt must be > 0, got {}", self.dt)));
        }
        let ratio = self.delay / self.dt;
        if !(self.delay >= 0.0) || (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::config(format!(
                "pid delay {} is not an integer multiple of dt {}",
                self.delay, self.dt
            )));
        }
        if !(self.horizon >= 5.0 && self.horizon.is_finite()) {
            return Err(Error::config(format!(
                "pid horizon must be at least 5 s, got {}",
                self.horizon
            )));
        }
        Ok(())
    }

    fn delay_steps(&self) -> usize {
        (self.delay / self.dt).round() as usize
    }

    fn steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }

    /// ITAE of the unit-step response for gains `[Kp, Ki, Kd]`.
    pub fn itae(&self, gains: [f64; 3]) -> f64 {
        self.simulate(gains, None)
    }

    /// Sampled plant output `(t, y)` of the unit-step response.
    pub fn step_response(&self, gains: [f64; 3]) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.steps());
        self.simulate(gains, Some(&mut out));
        out
    }

    // Plant 1/(s² + 4s + 3) in controllable canonical form, forward Euler,
    // delay as a ring buffer of past controller outputs. The cost accumulates
    // t_k |e_k| dt over each step, the same left-endpoint sampling as the state
    // update, so it converges at first order in dt.
    fn simulate(&self, [kp, ki, kd]: [f64; 3], mut trace: Option<&mut Vec<(f64, f64)>>) -> f64 {
        let dt = self.dt;
        let n = self.steps();
        let mut delay_line = vec![0.0; self.delay_steps()];
        let mut head = 0usize;
        let (mut x1, mut x2) = (0.0f64, 0.0f64);
        let mut integral = 0.0;
        let mut prev_error = 0.0;
        let mut itae = 0.0;

        for k in 0..n {
            let t = k as f64 * dt;
            let y = x1;
            if let Some(tr) = trace.as_deref_mut() {
                tr.push((t, y));
            }
            let e = 1.0 - y;
            integral += e * dt;
            let derivative = (e - prev_error) / dt;
            prev_error = e;
            let u = kp * e + ki * integral + kd * derivative;

            let u_delayed = if delay_line.is_empty() {
                u
            } else {
                let out = delay_line[head];
                delay_line[head] = u;
                head = (head + 1) % delay_line.len();
                out
            };

            itae += t * e.abs() * dt;

            let dx1 = x2;
            let dx2 = -3.0 * x1 - 4.0 * x2 + u_delayed;
            x1 += dt * dx1;
            x2 += dt * dx2;
            if !x1.is_finite() || x1.abs() > DIVERGENCE_LIMIT {
                return ITAE_SENTINEL;
            }
        }
        itae
    }
}

impl Problem for PidProblem {
    fn name(&self) -> &str {
        "pid"
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
            Genome::Real(g) if g.len() == 3 => Ok(self.itae([g[0], g[1], g[2]])),
            Genome::Real(g) => Err(Error::arity(format!("pid expects 3 gains, got {}", g.len()))),
            other => Err(wrong_genome("pid", "real", other)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_controller_is_open_loop() {
        let p = PidProblem::default();
        let itae = p.itae([0.0; 3]);
        let exact = p.horizon * p.horizon / 2.0;
        assert!((itae - exact).abs() / exact < 0.005);
        // Left-endpoint sum of t over n steps: T²/2 − T·dt/2.
        assert!((itae - (exact - p.horizon * p.dt / 2.0)).abs() < 1e-9);
    }

    #[test]
    fn first_order_convergence() {
        let coarse = PidProblem::new(10.0, 0.002).unwrap();
        let fine = PidProblem::new(10.0, 0.001).unwrap();
        let exact = 50.0;
        let e1 = (coarse.itae([0.0; 3]) - exact).abs();
        let e2 = (fine.itae([0.0; 3]) - exact).abs();
        assert!(e1 / e2 >= 1.8, "ratio {}", e1 / e2);
    }

    #[test]
    fn step_refinement_agrees() {
        let gains = [2.0, 1.0, 0.5];
        let base = PidProblem::new(10.0, 0.001).unwrap().itae(gains);
        let fine = PidProblem::new(10.0, 0.0001).unwrap().itae(gains);
        assert!(base > 0.0 && base < ITAE_SENTINEL);
        assert!((base - fine).abs() / fine < 0.01, "{base} vs {fine}");
    }

    #[test]
    fn unstable_loop_hits_sentinel() {
        // Stable everywhere inside the default box; high proportional gain
        // with the 0.2 s delay oscillates with growing amplitude.
        let p = PidProblem::default();
        assert_eq!(p.itae([60.0, 0.0, 0.0]), ITAE_SENTINEL);
        assert!(p.itae([10.0, 10.0, 0.0]) < ITAE_SENTINEL);
    }

    #[test]
    fn itae_nonnegative_on_grid() {
        let p = PidProblem {
            horizon: 5.0,
            dt: 0.002,
            ..Default::default()
        };
        for kp in [0.0, 1.0, 5.0, 10.0] {
            for ki in [0.0, 2.0, 10.0] {
                for kd in [0.0, 1.0, 5.0] {
                    assert!(p.itae([kp, ki, kd]) >= 0.0);
                }
            }
        }
    }

    #[test]
    fn response_settles_for_reasonable_gains() {
        let p = PidProblem::default();
        let resp = p.step_response([5.0, 3.0, 1.0]);
        assert_eq!(resp.len(), 10_000);
        let (_, y_end) = resp[resp.len() - 1];
        assert!((y_end - 1.0).abs() < 0.01, "y(T) = {y_end}");
        // Output stays at zero until the delayed control reaches the plant.
        assert!(resp[..=200].iter().all(|&(_, y)| y == 0.0));
    }

    #[test]
    fn validation() {
        assert!(PidProblem::new(10.0, 0.0).is_err());
        assert!(PidProblem::new(4.0, 0.001).is_err());
        assert!(PidProblem::new(10.0, 0.003).is_err());
        assert!(PidProblem::new(10.0, 0.0005).is_ok());
    }

    #[test]
    fn wrong_genome_rejected() {
        let p = PidProblem::default();
        assert!(p.evaluate(&Genome::Real(vec![1.0, 2.0])).is_err());
        assert!(p.evaluate(&Genome::Permutation(vec![0, 1, 2])).is_err());
    }
}
