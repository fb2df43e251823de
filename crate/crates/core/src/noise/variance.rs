use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use super::{stochastic_phase, synthesize_trajectory, FlipProtocol, NoiseModel};
use crate::error::Result;

/// |G(ω)|² with G(ω) = ∫₀ᵗ g(t′)e^{iωt′}dt′.
fn filter(protocol: &FlipProtocol, omega: f64) -> f64 {
    if !protocol.enabled {
        let s = (omega * protocol.total_time / 2.0).sin();
        return 4.0 * s * s / (omega * omega);
    }
    let n = protocol.n_intervals() as f64;
    let x = omega * protocol.interval / 2.0;
    let (s, c) = x.sin_cos();
    if c.abs() < 1e-8 {
        return 4.0 * n * n / (omega * omega);
    }
    let ratio = s * (n * x).sin() / c;
    4.0 * ratio * ratio / (omega * omega)
}

/// Finite-time variance λ²∫ S(ω)|G(ω)|² dω/2π by Simpson quadrature in ln ω.
pub fn filter_variance(model: &NoiseModel, protocol: &FlipProtocol) -> Result<f64> {
    model.validate()?;
    protocol.validate()?;
    let t = protocol.total_time;
    let lo = model.omega_min.max(1e-6 / t);
    let hi = model.omega_max;
    if lo >= hi || model.is_zero() {
        return Ok(0.0);
    }
    let (a, b) = (lo.ln(), hi.ln());
    let du_max = 2.0 * PI / (32.0 * t * hi);
    let mut n = ((b - a) / du_max).ceil() as usize;
    n = n.clamp(2048, 20_000_000);
    if n % 2 == 1 {
        n += 1;
    }
    let du = (b - a) / n as f64;
    let integrand = |k: usize| {
        let w = (a + du * k as f64).exp();
        model.psd(w) * filter(protocol, w) * w
    };
    // Evaluated in parallel, summed in index order so the result does not
    // depend on the worker count.
    let values: Vec<f64> = (1..n)
        .into_par_iter()
        .map(|k| if k % 2 == 1 { 4.0 } else { 2.0 } * integrand(k))
        .collect();
    let interior: f64 = values.iter().sum();
    let integral = du / 3.0 * (integrand(0) + interior + integrand(n));
    // Both signs of ω contribute equally.
    Ok(model.coupling.powi(2) * integral / PI)
}

/// Σ S(nω₁)/n² over all n or odd n only, stopping once a term falls below
/// 1e-10 of the running sum or the harmonics leave the band.
fn harmonic_sum(model: &NoiseModel, w1: f64, odd_only: bool) -> f64 {
    let step = if odd_only { 2 } else { 1 };
    let mut sum = 0.0;
    let mut n = 1u64;
    loop {
        let w = n as f64 * w1;
        if w > model.omega_max {
            break;
        }
        let term = model.psd(w) / (n as f64 * n as f64);
        sum += term;
        if sum > 0.0 && model.sup_above(w) / (n as f64 * n as f64) < 1e-10 * sum {
            break;
        }
        n += step;
    }
    sum
}

/// Long-time phase variance after total time t, in rad².
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseVariance {
    pub t: f64,
    /// λ²(2/π²)Σ_{n≥1} S(ω_n)/n²·t with ω_n = nπ/τ.
    pub harmonic: f64,
    /// As `harmonic` restricted to odd n.
    pub harmonic_odd: f64,
    /// λ²(8/π²)Σ_{odd m} S(ω_m)/m²·t, the long-time limit of the filter integral.
    pub exact: f64,
    pub warnings: Vec<String>,
}

/// Harmonic-sum variance of the flip-modulated phase. Without flips there is
/// no harmonic expansion and all fields carry the filter integral.
pub fn phase_variance(model: &NoiseModel, protocol: &FlipProtocol) -> Result<PhaseVariance> {
    model.validate()?;
    protocol.validate()?;
    let t = protocol.total_time;
    if !protocol.enabled {
        let v = filter_variance(model, protocol)?;
        return Ok(PhaseVariance {
            t,
            harmonic: v,
            harmonic_odd: v,
            exact: v,
            warnings: Vec::new(),
        });
    }
    let w1 = protocol.fundamental();
    let lam2 = model.coupling.powi(2);
    let all = harmonic_sum(model, w1, false);
    let odd = harmonic_sum(model, w1, true);
    let mut warnings = Vec::new();
    if w1 * t < 10.0 {
        warnings.push(format!("omega_1 t = {} is not large; long-time form is approximate", w1 * t));
    }
    Ok(PhaseVariance {
        t,
        harmonic: lam2 * 2.0 / (PI * PI) * all * t,
        harmonic_odd: lam2 * 2.0 / (PI * PI) * odd * t,
        exact: lam2 * 8.0 / (PI * PI) * odd * t,
        warnings,
    })
}

/// Dephasing rate γ = ⟨φ²⟩/2t for a Gaussian phase, with the bound from the
/// largest spectral density on [ω₁, 100ω₁].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DephasingRate {
    pub rate: f64,
    pub rate_exact: f64,
    /// λ²S_max/3 (Σ1/n² = π²/6).
    pub bound: f64,
    /// λ²S_max/4 (Σ_odd 1/n² = π²/8).
    pub bound_odd: f64,
    pub s_max: f64,
    /// Contrast loss −N·ln(1 − ε)/t from imperfect flips.
    pub flip_loss_rate: f64,
}

pub fn decoherence_rate(model: &NoiseModel, protocol: &FlipProtocol) -> Result<DephasingRate> {
    let var = phase_variance(model, protocol)?;
    let w1 = protocol.fundamental();
    let s_max = model.max_in(w1, 100.0 * w1);
    let lam2 = model.coupling.powi(2);
    let flips = if protocol.enabled { protocol.n_intervals() } else { 0 } as f64;
    Ok(DephasingRate {
        rate: var.harmonic / (2.0 * var.t),
        rate_exact: var.exact / (2.0 * var.t),
        bound: lam2 * s_max / 3.0,
        bound_odd: lam2 * s_max / 4.0,
        s_max,
        flip_loss_rate: -flips * (1.0 - protocol.flip_infidelity).ln() / var.t,
    })
}

/// Stochastic phases for each seed, in seed order; parallel across seeds.
pub fn monte_carlo_phases(
    model: &NoiseModel,
    protocol: &FlipProtocol,
    dt: f64,
    seeds: &[u64],
) -> Result<Vec<f64>> {
    seeds
        .par_iter()
        .map(|&seed| {
            let traj = synthesize_trajectory(model, protocol.total_time, dt, seed)?;
            stochastic_phase(&traj, protocol, model)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn white_closed_forms() {
        let lam = 3.0;
        let s0 = 2e-3;
        let model = NoiseModel::white(s0, 0.0, 1e15, lam).unwrap();
        let p = FlipProtocol::new(1e-9, 2e-8).unwrap();
        let v = phase_variance(&model, &p).unwrap();
        let t = p.total_time;
        assert!((v.harmonic / (lam * lam * s0 * t / 3.0) - 1.0).abs() < 1e-4);
        assert!((v.harmonic_odd / (lam * lam * s0 * t / 4.0) - 1.0).abs() < 1e-4);
        assert!((v.exact / (lam * lam * s0 * t) - 1.0).abs() < 1e-4);
        let r = decoherence_rate(&model, &p).unwrap();
        assert!((r.rate / (lam * lam * s0 / 6.0) - 1.0).abs() < 1e-4);
        assert!(r.rate <= r.bound);
    }

    #[test]
    fn zero_noise_rate_is_zero() {
        let model = NoiseModel::one_over_f(0.0, 1.0, 1e12, 1.0).unwrap();
        let p = FlipProtocol::new(1e-9, 2e-8).unwrap();
        assert_eq!(decoherence_rate(&model, &p).unwrap().rate, 0.0);
        assert_eq!(filter_variance(&model, &p).unwrap(), 0.0);
    }

    #[test]
    fn white_filter_integral_is_parseval() {
        let model = NoiseModel::white(1.0, 0.0, 1e13, 1.0).unwrap();
        for p in [FlipProtocol::new(1e-9, 2e-8).unwrap(), FlipProtocol::disabled(2e-8)] {
            let v = filter_variance(&model, &p).unwrap();
            assert!((v / 2e-8 - 1.0).abs() < 0.01, "{v}");
        }
    }

    #[test]
    fn flips_suppress_one_over_f() {
        let model = NoiseModel::one_over_f(1.0, 2.0 * PI * 1e3, 2.0 * PI * 1e10, 1.0).unwrap();
        let on = filter_variance(&model, &FlipProtocol::new(1e-9, 2e-8).unwrap()).unwrap();
        let off = filter_variance(&model, &FlipProtocol::disabled(2e-8)).unwrap();
        assert!(off / on > 100.0, "suppression {}", off / on);
    }

    #[test]
    fn flip_loss_rate() {
        let model = NoiseModel::white(0.0, 0.0, 1.0, 1.0).unwrap();
        let mut p = FlipProtocol::new(1.0, 10.0).unwrap();
        p.flip_infidelity = 0.01;
        let r = decoherence_rate(&model, &p).unwrap();
        assert!((r.flip_loss_rate - 10.0 * -(0.99f64).ln() / 10.0).abs() < 1e-15);
    }
}
