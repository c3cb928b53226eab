use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::{wrong_genome, Direction, Encoding, Problem};
use crate::error::{Error, Result};
use crate::genome::{Bounds, Genome};

pub const FIR_TAPS: usize = 21;
pub const FIR_FREE_COEFFS: usize = FIR_TAPS.div_ceil(2);

/// Weighted least-squares design of a length-21 Type-I low-pass filter.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(from = "FirParams", into = "FirParams")]
pub struct FirProblem {
    params: FirParams,
    bounds: Vec<Bounds>,
    passband: Vec<bool>,
    // cos(ω_k n) and sin(ω_k n), row-major over (k, n).
    cos_table: Vec<f64>,
    sin_table: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FirParams {
    /// Cutoff in rad/sample.
    pub omega_c: f64,
    pub stopband_weight: f64,
    pub lambda: f64,
    /// Uniform grid points over `[0, π]`, both ends included.
    pub grid_size: usize,
    /// Symmetric bound on each free coefficient.
    pub coeff_limit: f64,
}

impl Default for FirParams {
    fn default() -> Self {
        FirParams {
            omega_c: 0.35 * PI,
            stopband_weight: 2.0,
            lambda: 1e-4,
            grid_size: 512,
            coeff_limit: 1.0,
        }
    }
}

impl From<FirParams> for FirProblem {
    fn from(params: FirParams) -> Self {
        let n = params.grid_size.max(2);
        let grid: Vec<f64> = (0..n).map(|k| k as f64 * PI / (n - 1) as f64).collect();
        let passband = grid.iter().map(|&w| w <= params.omega_c + 1e-12).collect();
        let mut cos_table = Vec::with_capacity(n * FIR_TAPS);
        let mut sin_table = Vec::with_capacity(n * FIR_TAPS);
        for &w in &grid {
            for t in 0..FIR_TAPS {
                let (s, c) = (w * t as f64).sin_cos();
                cos_table.push(c);
                sin_table.push(s);
            }
        }
        FirProblem {
            params,
            bounds: vec![
                Bounds {
                    lo: -params.coeff_limit,
                    hi: params.coeff_limit,
                };
                FIR_FREE_COEFFS
            ],
            passband,
            cos_table,
            sin_table,
        }
    }
}

impl From<FirProblem> for FirParams {
    fn from(p: FirProblem) -> Self {
        p.params
    }
}

impl Default for FirProblem {
    fn default() -> Self {
        FirParams::default().into()
    }
}

/// Mirrors the 11 free coefficients into the full symmetric impulse response.
pub fn expand_symmetric(x: &[f64]) -> Result<[f64; FIR_TAPS]> {
    if x.len() != FIR_FREE_COEFFS {
        return Err(Error::arity(format!(
            "expected {FIR_FREE_COEFFS} coefficients, got {}",
            x.len()
        )));
    }
    let mut h = [0.0; FIR_TAPS];
    for (n, &c) in x.iter().enumerate() {
        h[n] = c;
        h[FIR_TAPS - 1 - n] = c;
    }
    Ok(h)
}

impl FirProblem {
    pub fn new(params: FirParams) -> Result<Self> {
        if params.grid_size < 2 {
            return Err(Error::config("fir grid_size must be at least 2"));
        }
        if !(params.omega_c > 0.0 && params.omega_c < PI) {
            return Err(Error::config(format!("fir cutoff {} outside (0, π)", params.omega_c)));
        }
        if !(params.coeff_limit > 0.0) {
            return Err(Error::config("fir coeff_limit must be positive"));
        }
        Ok(params.into())
    }

    pub fn params(&self) -> &FirParams {
        &self.params
    }

    pub fn grid_size(&self) -> usize {
        self.params.grid_size
    }

    /// Grid frequencies `ω_k = kπ / (N − 1)`.
    pub fn grid(&self) -> Vec<f64> {
        let n = self.grid_size();
        (0..n).map(|k| k as f64 * PI / (n - 1) as f64).collect()
    }

    /// `|H(e^{jω_k})|` by direct DTFT summation.
    pub fn magnitude_response(&self, h: &[f64; FIR_TAPS]) -> Vec<f64> {
        self.cos_table
            .chunks_exact(FIR_TAPS)
            .zip(self.sin_table.chunks_exact(FIR_TAPS))
            .map(|(c, s)| {
                let re: f64 = h.iter().zip(c).map(|(a, b)| a * b).sum();
                let im: f64 = h.iter().zip(s).map(|(a, b)| a * b).sum();
                re.hypot(im)
            })
            .collect()
    }

    /// `|H(e^{jω_k})|` from a zero-padded FFT of length `2(N − 1)`.
    pub fn magnitude_response_fft(&self, h: &[f64; FIR_TAPS]) -> Vec<f64> {
        let n = self.grid_size();
        let len = (2 * (n - 1)).max(FIR_TAPS);
        let mut buf: Vec<Complex<f64>> = vec![Complex::new(0.0, 0.0); len];
        for (b, &c) in buf.iter_mut().zip(h.iter()) {
            b.re = c;
        }
        FftPlanner::new().plan_fft_forward(len).process(&mut buf);
        buf[..n].iter().map(|z| z.norm()).collect()
    }

    /// Objective `J` for the 11 free coefficients.
    pub fn objective(&self, x: &[f64]) -> Result<f64> {
        let h = expand_symmetric(x)?;
        let mag = self.magnitude_response(&h);
        Ok(self.objective_from_magnitude(&h, &mag))
    }

    /// Objective computed through the FFT magnitude path.
    pub fn objective_fft(&self, x: &[f64]) -> Result<f64> {
        let h = expand_symmetric(x)?;
        let mag = self.magnitude_response_fft(&h);
        Ok(self.objective_from_magnitude(&h, &mag))
    }

    fn objective_from_magnitude(&self, h: &[f64; FIR_TAPS], mag: &[f64]) -> f64 {
        let fit: f64 = mag
            .iter()
            .zip(&self.passband)
            .map(|(&m, &pass)| {
                if pass {
                    (m - 1.0).powi(2)
                } else {
                    self.params.stopband_weight * m * m
                }
            })
            .sum::<f64>()
            / mag.len() as f64;
        let energy: f64 = h.iter().map(|c| c * c).sum();
        fit + self.params.lambda * energy
    }

    /// Fraction of grid points in the passband.
    pub fn passband_fraction(&self) -> f64 {
        self.passband.iter().filter(|&&p| p).count() as f64 / self.passband.len() as f64
    }
}

impl Problem for FirProblem {
    fn name(&self) -> &str {
        "fir"
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
            Genome::Real(x) => self.objective(x),
            other => Err(wrong_genome("fir", "real", other)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_filter_costs_passband_fraction() {
        let p = FirProblem::default();
        let j = p.objective(&[0.0; 11]).unwrap();
        // k ≤ 0.35 · 511 = 178.85, so 179 of 512 points.
        assert_eq!(j, 179.0 / 512.0);
        assert_eq!(p.passband_fraction(), j);
    }

    #[test]
    fn edge_taps_lower_bound() {
        let p = FirProblem::default();
        let mut x = [0.0; 11];
        x[0] = 1.0;
        let j = p.objective(&x).unwrap();
        assert!(j.is_finite());
        assert!(j >= p.params().lambda * 2.0);
    }

    #[test]
    fn symmetric_expansion() {
        let x: Vec<f64> = (0..11).map(|i| i as f64).collect();
        let h = expand_symmetric(&x).unwrap();
        for n in 0..FIR_TAPS {
            assert_eq!(h[n], h[FIR_TAPS - 1 - n]);
        }
        assert_eq!(h[10], 10.0);
        assert!(expand_symmetric(&x[..10]).is_err());
    }

    #[test]
    fn direct_and_fft_paths_agree() {
        let p = FirProblem::default();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let x: Vec<f64> = (0..11).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let a = p.objective(&x).unwrap();
            let b = p.objective_fft(&x).unwrap();
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn grid_refinement_agrees() {
        // The endpoint-inclusive 1/N sum carries an O(1/N) bias driven by
        // |H(0)| and |H(π)|, so single draws can exceed 0.5% while the
        // typical draw sits well inside it.
        let coarse = FirProblem::default();
        let fine = FirProblem::new(FirParams {
            grid_size: 4096,
            ..FirParams::default()
        })
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rel = |x: &[f64]| {
            let b = fine.objective(x).unwrap();
            (coarse.objective(x).unwrap() - b).abs() / b
        };
        let mut errs: Vec<f64> = (0..100)
            .map(|_| {
                let x: Vec<f64> = (0..11).map(|_| rng.gen_range(-1.0..1.0)).collect();
                rel(&x)
            })
            .collect();
        errs.sort_by(f64::total_cmp);
        assert!(errs[50] < 0.005, "median {}", errs[50]);
        for _ in 0..50 {
            let x: Vec<f64> = (0..11).map(|_| rng.gen_range(-0.1..0.1)).collect();
            assert!(rel(&x) < 0.005);
        }
    }

    #[test]
    fn windowed_sinc_beats_zero_filter() {
        let p = FirProblem::default();
        let wc = 0.35;
        let x: Vec<f64> = (0..11)
            .map(|n| {
                let k = n as f64 - 10.0;
                if k == 0.0 { wc } else { (wc * PI * k).sin() / (PI * k) }
            })
            .collect();
        assert!(p.objective(&x).unwrap() < 0.05);
    }
}
