use serde::Serialize;

use crate::error::{invalid, Error, Result};

/// Periodic charge flips every `interval` over `total_time`. Flips are
/// instantaneous; `flip_infidelity` is a contrast loss charged per flip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlipProtocol {
    pub interval: f64,
    pub total_time: f64,
    pub enabled: bool,
    pub flip_infidelity: f64,
}

impl FlipProtocol {
    pub fn new(interval: f64, total_time: f64) -> Result<Self> {
        let p = Self {
            interval,
            total_time,
            enabled: true,
            flip_infidelity: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    /// No flips: g(t) = +1 throughout.
    pub fn disabled(total_time: f64) -> Self {
        Self {
            interval: total_time,
            total_time,
            enabled: false,
            flip_infidelity: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.total_time > 0.0 && self.total_time.is_finite()) {
            return Err(invalid("total_time", format!("must be positive, got {}", self.total_time)));
        }
        if !(0.0..1.0).contains(&self.flip_infidelity) {
            return Err(invalid("flip_infidelity", "must lie in [0, 1)"));
        }
        if !self.enabled {
            return Ok(());
        }
        if !(self.interval > 0.0) {
            return Err(invalid("interval", format!("must be positive, got {}", self.interval)));
        }
        let ratio = self.total_time / self.interval;
        let n = ratio.round();
        if (ratio - n).abs() > 1e-9 * ratio || n < 2.0 || !(n as u64).is_multiple_of(2) {
            return Err(Error::Commensurability(format!(
                "total time / flip interval = {ratio} must be an even integer >= 2"
            )));
        }
        Ok(())
    }

    /// Number of flip intervals N = t/τ (1 when disabled).
    pub fn n_intervals(&self) -> usize {
        if self.enabled {
            (self.total_time / self.interval).round() as usize
        } else {
            1
        }
    }

    /// Fundamental angular frequency π/τ of the square wave (period 2τ).
    pub fn fundamental(&self) -> f64 {
        std::f64::consts::PI / self.interval
    }

    /// Sign of interval k.
    pub fn sign(&self, k: usize) -> f64 {
        if !self.enabled || k.is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }
}

/// Flip pattern: +1 on [2nτ, 2nτ+τ), −1 on [2nτ+τ, 2nτ+2τ).
pub fn g_function(protocol: &FlipProtocol, t: f64) -> Result<f64> {
    if !(0.0..protocol.total_time).contains(&t) {
        return Err(Error::OutOfRange {
            t,
            total: protocol.total_time,
        });
    }
    if !protocol.enabled {
        return Ok(1.0);
    }
    let k = (t / protocol.interval).floor() as usize;
    Ok(protocol.sign(k))
}
