use serde::Serialize;

use crate::constants::ELEMENTARY_CHARGE;
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum SpectrumKind {
    /// S(ω) = A/|ω|, A in V².
    OneOverF { amplitude: f64 },
    /// S(ω) = S₀, in V²·s.
    White { level: f64 },
    /// Log-log interpolated table (rad/s, V²·s), zero outside the table.
    Tabulated { omega: Vec<f64>, psd: Vec<f64> },
}

/// Gate-voltage noise spectrum, band-limited to [ω_min, ω_max], and its
/// coupling λ (rad/s per V) to the qubit phase.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseModel {
    pub kind: SpectrumKind,
    pub omega_min: f64,
    pub omega_max: f64,
    pub coupling: f64,
}

impl NoiseModel {
    pub fn one_over_f(amplitude: f64, omega_min: f64, omega_max: f64, coupling: f64) -> Result<Self> {
        Self::checked(SpectrumKind::OneOverF { amplitude }, omega_min, omega_max, coupling)
    }

    pub fn white(level: f64, omega_min: f64, omega_max: f64, coupling: f64) -> Result<Self> {
        Self::checked(SpectrumKind::White { level }, omega_min, omega_max, coupling)
    }

    pub fn tabulated(omega: Vec<f64>, psd: Vec<f64>, coupling: f64) -> Result<Self> {
        if omega.len() < 2 || omega.len() != psd.len() {
            return Err(invalid("spectrum", "table needs at least two rows of equal length"));
        }
        if omega.windows(2).any(|w| !(w[1] > w[0])) || omega[0] < 0.0 {
            return Err(invalid("spectrum", "frequencies must be non-negative and increasing"));
        }
        if psd.iter().any(|&s| !(s >= 0.0 && s.is_finite())) {
            return Err(invalid("spectrum", "spectral densities must be non-negative"));
        }
        let (lo, hi) = (omega[0], omega[omega.len() - 1]);
        Self::checked(SpectrumKind::Tabulated { omega, psd }, lo, hi, coupling)
    }

    /// Parses a two-column CSV table `omega_rad_s, psd_V2s`; a non-numeric
    /// first line is treated as a header, `#` starts a comment.
    pub fn tabulated_from_csv(text: &str, coupling: f64) -> Result<Self> {
        let mut omega = Vec::new();
        let mut psd = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let parsed: Option<Vec<f64>> = fields.iter().map(|f| f.parse().ok()).collect();
            match parsed {
                Some(v) if v.len() == 2 => {
                    omega.push(v[0]);
                    psd.push(v[1]);
                }
                None if omega.is_empty() => continue,
                _ => {
                    return Err(Error::Config {
                        line: k + 1,
                        message: format!("expected two numeric columns, got `{line}`"),
                    })
                }
            }
        }
        Self::tabulated(omega, psd, coupling)
    }

    fn checked(kind: SpectrumKind, omega_min: f64, omega_max: f64, coupling: f64) -> Result<Self> {
        let model = Self {
            kind,
            omega_min,
            omega_max,
            coupling,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_min >= 0.0 && self.omega_min < self.omega_max && self.omega_max.is_finite()) {
            return Err(invalid(
                "omega",
                format!("need 0 <= omega_min < omega_max, got [{}, {}]", self.omega_min, self.omega_max),
            ));
        }
        if !self.coupling.is_finite() {
            return Err(invalid("coupling", "must be finite"));
        }
        match &self.kind {
            SpectrumKind::OneOverF { amplitude } if !(*amplitude >= 0.0) => {
                Err(invalid("amplitude", format!("must be non-negative, got {amplitude}")))
            }
            SpectrumKind::OneOverF { .. } if self.omega_min == 0.0 => {
                Err(invalid("omega_min", "1/f spectrum needs a positive lower cutoff"))
            }
            SpectrumKind::White { level } if !(*level >= 0.0) => {
                Err(invalid("level", format!("must be non-negative, got {level}")))
            }
            _ => Ok(()),
        }
    }

    /// Coupling λ = E_cC_g/2e with E_c in rad/s and C_g in F.
    pub fn coupling_from(e_c: f64, c_g: f64) -> f64 {
        e_c * c_g / (2.0 * ELEMENTARY_CHARGE)
    }

    /// Two-sided spectral density S(ω) in V²·s.
    pub fn psd(&self, omega: f64) -> f64 {
        let w = omega.abs();
        if w < self.omega_min || w > self.omega_max {
            return 0.0;
        }
        match &self.kind {
            SpectrumKind::OneOverF { amplitude } => amplitude / w,
            SpectrumKind::White { level } => *level,
            SpectrumKind::Tabulated { omega, psd } => interpolate(omega, psd, w),
        }
    }

    /// Upper bound of S on [ω, ∞).
    pub fn sup_above(&self, omega: f64) -> f64 {
        let w = omega.max(self.omega_min);
        if w > self.omega_max {
            return 0.0;
        }
        match &self.kind {
            SpectrumKind::OneOverF { amplitude } => amplitude / w,
            SpectrumKind::White { level } => *level,
            SpectrumKind::Tabulated { omega: grid, psd } => grid
                .iter()
                .zip(psd)
                .filter(|(g, _)| **g >= w)
                .map(|(_, s)| *s)
                .fold(self.psd(w), f64::max),
        }
    }

    /// Largest S over [lo, hi], sampled on a log grid plus table nodes.
    pub fn max_in(&self, lo: f64, hi: f64) -> f64 {
        let mut best = 0.0f64;
        let n = 2001;
        let (a, b) = (lo.ln(), hi.ln());
        for k in 0..n {
            let w = (a + (b - a) * k as f64 / (n - 1) as f64).exp();
            best = best.max(self.psd(w));
        }
        if let SpectrumKind::Tabulated { omega, psd } = &self.kind {
            for (w, s) in omega.iter().zip(psd) {
                if *w >= lo && *w <= hi {
                    best = best.max(*s);
                }
            }
        }
        best
    }

    pub fn is_zero(&self) -> bool {
        match &self.kind {
            SpectrumKind::OneOverF { amplitude } => *amplitude == 0.0,
            SpectrumKind::White { level } => *level == 0.0,
            SpectrumKind::Tabulated { psd, .. } => psd.iter().all(|&s| s == 0.0),
        }
    }
}

fn interpolate(x: &[f64], y: &[f64], w: f64) -> f64 {
    let k = x.partition_point(|&v| v <= w);
    if k == 0 {
        return y[0];
    }
    if k >= x.len() {
        return y[x.len() - 1];
    }
    let (x0, x1, y0, y1) = (x[k - 1], x[k], y[k - 1], y[k]);
    if x0 > 0.0 && y0 > 0.0 && y1 > 0.0 {
        let s = (w / x0).ln() / (x1 / x0).ln();
        (y0.ln() + s * (y1 / y0).ln()).exp()
    } else {
        y0 + (y1 - y0) * (w - x0) / (x1 - x0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn band_limits_and_shapes() {
        let m = NoiseModel::one_over_f(2.0, 1.0, 100.0, 1.0).unwrap();
        assert_eq!(m.psd(0.5), 0.0);
        assert_eq!(m.psd(4.0), 0.5);
        assert_eq!(m.psd(-4.0), 0.5);
        assert_eq!(m.psd(200.0), 0.0);
        assert!(NoiseModel::one_over_f(1.0, 10.0, 1.0, 1.0).is_err());
        assert!(NoiseModel::white(-1.0, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn tabulated_interpolates_power_laws_exactly() {
        let omega = vec![1.0, 10.0, 100.0];
        let psd = vec![1.0, 0.1, 0.01];
        let m = NoiseModel::tabulated(omega, psd, 1.0).unwrap();
        assert!((m.psd(3.0) - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(m.sup_above(5.0), m.psd(5.0));
    }

    #[test]
    fn csv_table_with_header() {
        let text = "omega_rad_s,psd_V2s\n1.0, 2.0\n# note\n2.0, 1.0\n";
        let m = NoiseModel::tabulated_from_csv(text, 1.0).unwrap();
        assert_eq!(m.psd(1.0), 2.0);
        let bad = "1.0, 2.0\nx, y\n";
        assert!(matches!(
            NoiseModel::tabulated_from_csv(bad, 1.0),
            Err(Error::Config { line: 2, .. })
        ));
        assert!(NoiseModel::tabulated_from_csv("1.0, -2.0\n2.0, 1.0", 1.0).is_err());
    }
}
