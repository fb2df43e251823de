use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::{num_complex::Complex, FftPlanner};
use serde::Serialize;

use super::{FlipProtocol, NoiseModel};
use crate::error::{invalid, Error, Result};

/// Sampled gate-voltage fluctuation δV(t) on a uniform grid starting at 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseTrajectory {
    pub dt: f64,
    pub values: Vec<f64>,
    pub seed: u64,
}

impl NoiseTrajectory {
    pub fn sample_times(&self) -> Vec<f64> {
        (0..self.values.len()).map(|k| k as f64 * self.dt).collect()
    }

    pub fn duration(&self) -> f64 {
        (self.values.len().saturating_sub(1)) as f64 * self.dt
    }

    /// Trajectory with the same grid and constant value.
    pub fn constant(value: f64, duration: f64, dt: f64) -> Self {
        let n = (duration / dt).round() as usize + 1;
        Self {
            dt,
            values: vec![value; n],
            seed: 0,
        }
    }
}

/// Draws a stationary Gaussian trajectory with two-sided spectrum S(ω) by
/// spectral synthesis on a grid of twice the duration, so the circular
/// correlation of the FFT does not wrap into the returned window.
pub fn synthesize_trajectory(
    model: &NoiseModel,
    duration: f64,
    dt: f64,
    seed: u64,
) -> Result<NoiseTrajectory> {
    model.validate()?;
    if !(duration > 0.0 && dt > 0.0) {
        return Err(invalid("duration", "duration and dt must be positive"));
    }
    let limit = 2.0 * std::f64::consts::PI / (10.0 * model.omega_max);
    if dt >= limit {
        return Err(Error::Resolution { dt, limit });
    }
    let n = (duration / dt).round() as usize + 1;
    if model.is_zero() {
        return Ok(NoiseTrajectory {
            dt,
            values: vec![0.0; n],
            seed,
        });
    }
    let m = (2 * n).next_power_of_two();
    let dw = 2.0 * std::f64::consts::PI / (m as f64 * dt);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bins: Vec<Complex<f64>> = (0..m)
        .map(|k| {
            let signed = if k <= m / 2 { k as f64 } else { k as f64 - m as f64 };
            let power = 2.0 * model.psd(signed * dw) * m as f64 / dt;
            let sigma = (power / 2.0).sqrt();
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex::new(sigma * re, sigma * im)
        })
        .collect();
    FftPlanner::new().plan_fft_inverse(m).process(&mut bins);
    let scale = 1.0 / m as f64;
    let values = bins[..n].iter().map(|z| z.re * scale).collect();
    Ok(NoiseTrajectory { dt, values, seed })
}

/// Two-sided periodogram estimate (ω_k ≥ 0, Ŝ_k) of a trajectory.
pub fn periodogram(traj: &NoiseTrajectory) -> (Vec<f64>, Vec<f64>) {
    let n = traj.values.len();
    let mut buf: Vec<Complex<f64>> = traj.values.iter().map(|&v| Complex::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let dw = 2.0 * std::f64::consts::PI / (n as f64 * traj.dt);
    let half = n / 2;
    let omega = (0..=half).map(|k| k as f64 * dw).collect();
    let psd = buf[..=half]
        .iter()
        .map(|z| z.norm_sqr() * traj.dt / n as f64)
        .collect();
    (omega, psd)
}

/// φ = λ∫₀ᵗ δV(t′)g(t′)dt′ by the trapezoidal rule on each flip interval.
/// Each interval is integrated separately and the signed partial sums are
/// combined in pairs, so a constant δV cancels exactly.
pub fn stochastic_phase(
    traj: &NoiseTrajectory,
    protocol: &FlipProtocol,
    model: &NoiseModel,
) -> Result<f64> {
    protocol.validate()?;
    let t = protocol.total_time;
    if traj.duration() < t * (1.0 - 1e-9) {
        return Err(Error::OutOfRange {
            t,
            total: traj.duration(),
        });
    }
    let intervals = protocol.n_intervals();
    let span = t / intervals as f64;
    let steps_f = span / traj.dt;
    let steps = steps_f.round() as usize;
    if steps == 0 || (steps_f - steps as f64).abs() > 1e-9 * steps_f {
        return Err(Error::Commensurability(format!(
            "flip interval / dt = {steps_f} is not an integer"
        )));
    }
    let v = &traj.values;
    let partial = |k: usize| -> f64 {
        let start = k * steps;
        let inner: f64 = v[start + 1..start + steps].iter().sum();
        traj.dt * (0.5 * (v[start] + v[start + steps]) + inner)
    };
    let mut total = 0.0;
    let mut k = 0;
    while k < intervals {
        let mut pair = protocol.sign(k) * partial(k);
        if k + 1 < intervals {
            pair += protocol.sign(k + 1) * partial(k + 1);
        }
        total += pair;
        k += 2;
    }
    Ok(model.coupling * total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn white(level: f64) -> NoiseModel {
        NoiseModel::white(level, 0.0, 1e9, 2.0).unwrap()
    }

    #[test]
    fn zero_amplitude_gives_zero_trajectory() {
        let traj = synthesize_trajectory(&white(0.0), 1e-6, 1e-10, 3).unwrap();
        assert!(traj.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn resolution_is_enforced() {
        assert!(matches!(
            synthesize_trajectory(&white(1.0), 1e-6, 1e-9, 3),
            Err(Error::Resolution { .. })
        ));
    }

    #[test]
    fn same_seed_reproduces_trajectory() {
        let a = synthesize_trajectory(&white(1.0), 1e-6, 1e-10, 11).unwrap();
        let b = synthesize_trajectory(&white(1.0), 1e-6, 1e-10, 11).unwrap();
        let c = synthesize_trajectory(&white(1.0), 1e-6, 1e-10, 12).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.values, c.values);
    }

    #[test]
    fn white_variance_matches_parseval() {
        let model = white(1e-12);
        let want = 1e-12 * 2.0 * model.omega_max / (2.0 * std::f64::consts::PI);
        let mut acc = 0.0;
        let mut count = 0usize;
        for seed in 0..1000 {
            let traj = synthesize_trajectory(&model, 2e-8, 1e-10, seed).unwrap();
            acc += traj.values.iter().map(|v| v * v).sum::<f64>();
            count += traj.values.len();
        }
        let got = acc / count as f64;
        assert!((got / want - 1.0).abs() < 0.05, "{got} vs {want}");
    }

    #[test]
    fn constant_offset_phase() {
        let model = white(1.0);
        let p = FlipProtocol::new(1e-9, 2e-8).unwrap();
        let c = NoiseTrajectory::constant(0.37, 2e-8, 1e-11);
        assert_eq!(stochastic_phase(&c, &p, &model).unwrap(), 0.0);
        let off = FlipProtocol::disabled(2e-8);
        let phi = stochastic_phase(&c, &off, &model).unwrap();
        assert!((phi - 2.0 * 0.37 * 2e-8).abs() < 1e-12 * phi);
    }

    #[test]
    fn incommensurate_grid_is_rejected() {
        let model = white(1.0);
        let p = FlipProtocol::new(1e-9, 2e-8).unwrap();
        let c = NoiseTrajectory::constant(1.0, 2e-8, 3e-11);
        assert!(matches!(
            stochastic_phase(&c, &p, &model),
            Err(Error::Commensurability(_))
        ));
        let short = NoiseTrajectory::constant(1.0, 1e-8, 1e-11);
        assert!(stochastic_phase(&short, &p, &model).is_err());
    }
}
