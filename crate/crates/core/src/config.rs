//! Flat `key = value unit` configuration with strict keys and unit conversion.
//!
//! Lines are `key = value [unit]`; `#` starts a comment. Frequencies given in
//! Hz, kHz, MHz or GHz are stored as angular frequencies (rad/s); `rad/s` is
//! taken as is. Every other quantity is stored in SI units.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::circuit::{CircuitParams, SwitchParams};
use crate::constants::AMU;
use crate::dissipation::BathSpec;
use crate::error::{Error, Result};
use crate::gate::IonParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dim {
    Capacitance,
    Inductance,
    Length,
    Frequency,
    Time,
    Resistance,
    Temperature,
    Voltage,
    VoltageSquared,
    Psd,
    Mass,
    Wavenumber,
    Ratio,
    Count,
    Text,
}

impl Dim {
    fn units(self) -> &'static [(&'static str, f64)] {
        match self {
            Dim::Capacitance => &[("F", 1.0), ("pF", 1e-12), ("fF", 1e-15), ("aF", 1e-18)],
            Dim::Inductance => &[("H", 1.0), ("nH", 1e-9), ("pH", 1e-12), ("fH", 1e-15)],
            Dim::Length => &[("m", 1.0), ("mm", 1e-3), ("um", 1e-6), ("nm", 1e-9)],
            Dim::Frequency => &[
                ("rad/s", 1.0),
                ("Hz", 2.0 * PI),
                ("kHz", 2e3 * PI),
                ("MHz", 2e6 * PI),
                ("GHz", 2e9 * PI),
            ],
            Dim::Time => &[("s", 1.0), ("ms", 1e-3), ("us", 1e-6), ("ns", 1e-9), ("ps", 1e-12)],
            Dim::Resistance => &[("Ohm", 1.0), ("kOhm", 1e3), ("mOhm", 1e-3)],
            Dim::Temperature => &[("K", 1.0), ("mK", 1e-3)],
            Dim::Voltage => &[("V", 1.0), ("mV", 1e-3), ("uV", 1e-6)],
            Dim::VoltageSquared => &[("V^2", 1.0)],
            Dim::Psd => &[("V^2s", 1.0), ("V^2/Hz", 1.0)],
            Dim::Mass => &[("kg", 1.0), ("u", AMU)],
            Dim::Wavenumber => &[("1/m", 1.0), ("1/um", 1e6), ("1/nm", 1e9)],
            Dim::Ratio | Dim::Count | Dim::Text => &[],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Number(f64),
    Integer(i64),
    Text(String),
}

enum Default {
    N(f64),
    I(i64),
    T(&'static str),
}

struct KeySpec {
    name: &'static str,
    dim: Dim,
    default: Default,
}

const fn key(name: &'static str, dim: Dim, default: Default) -> KeySpec {
    KeySpec { name, dim, default }
}

use Default::{I, N, T};

const KEYS: &[KeySpec] = &[
    key("C_r", Dim::Capacitance, N(3e-15)),
    key("L_r", Dim::Inductance, N(3e-13)),
    key("C_m", Dim::Capacitance, N(1e-16)),
    key("C_J", Dim::Capacitance, N(1e-16)),
    key("C_g", Dim::Capacitance, N(1e-16)),
    key("E_J", Dim::Frequency, N(2.0 * PI * 10e9)),
    key("E_c", Dim::Frequency, N(2.0 * PI * 100e9)),
    key("d_i", Dim::Length, N(20e-6)),
    key("cavity_length", Dim::Length, N(40e-6)),
    key("C_i", Dim::Capacitance, N(2e-17)),
    key("C_i2", Dim::Capacitance, N(2e-17)),
    key("C_ib", Dim::Capacitance, N(2e-17)),
    key("ion_mass", Dim::Mass, N(9.012_183 * AMU)),
    key("trap_frequency", Dim::Frequency, N(2.0 * PI * 1e6)),
    key("photon_momentum", Dim::Wavenumber, N(1e8)),
    key("rabi_frequency", Dim::Frequency, N(0.0)),
    key("laser_detuning", Dim::Frequency, N(0.0)),
    key("kick_count", Dim::Count, I(10)),
    key("t1", Dim::Time, N(5e-9)),
    key("t2", Dim::Time, N(5e-9)),
    key("dead_time", Dim::Time, N(0.0)),
    key("gate_alpha", Dim::Ratio, N(PI / 4.0)),
    key("fock_dim", Dim::Count, I(64)),
    key("sweep_points", Dim::Count, I(10)),
    key("sweep_min", Dim::Ratio, N(1e-3)),
    key("sweep_max", Dim::Ratio, N(1e-1)),
    key("sweep_kick_strength", Dim::Ratio, N(0.024)),
    key("sweep_coupling_strength", Dim::Ratio, N(0.3)),
    key("sweep_tau1", Dim::Time, N(1e-9)),
    key("noise_spectrum", Dim::Text, T("one_over_f")),
    key("noise_amplitude", Dim::VoltageSquared, N(1e-12)),
    key("noise_white_level", Dim::Psd, N(1e-20)),
    key("noise_omega_min", Dim::Frequency, N(2.0 * PI * 1e3)),
    key("noise_omega_max", Dim::Frequency, N(2.0 * PI * 10e9)),
    key("flip_interval", Dim::Time, N(1e-9)),
    key("gate_duration", Dim::Time, N(20e-9)),
    key("noise_dt", Dim::Time, N(5e-12)),
    key("R_n", Dim::Resistance, N(3140.0)),
    key("n_ratio", Dim::Ratio, N(1e-5)),
    key("temperature", Dim::Temperature, N(0.1)),
    key("dissipation_points", Dim::Count, I(41)),
    key("flux_ratio", Dim::Ratio, N(0.0)),
    key("balance_dV", Dim::Voltage, N(1e-4)),
];

fn spec_for(name: &str) -> Option<&'static KeySpec> {
    KEYS.iter().find(|k| k.name == name)
}

/// Resolved parameter set: every known key with its SI value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Params {
    values: BTreeMap<String, Value>,
}

impl std::default::Default for Params {
    fn default() -> Self {
        let values = KEYS
            .iter()
            .map(|k| {
                let v = match &k.default {
                    N(x) => Value::Number(*x),
                    I(x) => Value::Integer(*x),
                    T(s) => Value::Text((*s).to_string()),
                };
                (k.name.to_string(), v)
            })
            .collect();
        Self { values }
    }
}

fn config_error(line: usize, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        message: message.into(),
    }
}

impl Params {
    /// Parses a configuration document on top of the defaults.
    pub fn parse_str(text: &str) -> Result<Self> {
        let mut params = Self::default();
        let mut seen = BTreeMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line_no = k + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (name, value) = line
                .split_once('=')
                .ok_or_else(|| config_error(line_no, format!("expected `key = value`, got `{line}`")))?;
            let name = name.trim();
            if let Some(prev) = seen.insert(name.to_string(), line_no) {
                return Err(config_error(line_no, format!("duplicate key `{name}` (first on line {prev})")));
            }
            params.set(name, value.trim(), line_no)?;
        }
        params.validate()?;
        Ok(params)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse_str(&text)
    }

    /// Sets one key from `value [unit]`; `line` is used in error messages
    /// (0 for command-line overrides).
    pub fn set(&mut self, name: &str, value: &str, line: usize) -> Result<()> {
        let spec = spec_for(name).ok_or_else(|| config_error(line, format!("unknown key `{name}`")))?;
        let mut parts = value.split_whitespace();
        let token = parts
            .next()
            .ok_or_else(|| config_error(line, format!("missing value for `{name}`")))?;
        let unit: Vec<&str> = parts.collect();
        let unit = unit.join(" ");
        let parsed = match spec.dim {
            Dim::Text => {
                if !unit.is_empty() {
                    return Err(config_error(line, format!("`{name}` takes no unit")));
                }
                Value::Text(token.to_string())
            }
            Dim::Count => {
                if !unit.is_empty() {
                    return Err(config_error(line, format!("`{name}` takes no unit")));
                }
                let n: i64 = token
                    .parse()
                    .map_err(|_| config_error(line, format!("`{name}` expects an integer, got `{token}`")))?;
                Value::Integer(n)
            }
            dim => {
                let x: f64 = token
                    .parse()
                    .map_err(|_| config_error(line, format!("`{name}` expects a number, got `{token}`")))?;
                if !x.is_finite() {
                    return Err(config_error(line, format!("`{name}` must be finite")));
                }
                let factor = if dim == Dim::Ratio {
                    if !unit.is_empty() {
                        return Err(config_error(line, format!("`{name}` is dimensionless, got unit `{unit}`")));
                    }
                    1.0
                } else if unit.is_empty() {
                    return Err(config_error(line, format!("`{name}` needs a unit")));
                } else {
                    dim.units()
                        .iter()
                        .find(|(u, _)| *u == unit)
                        .map(|(_, f)| *f)
                        .ok_or_else(|| {
                            let allowed: Vec<&str> = dim.units().iter().map(|(u, _)| *u).collect();
                            config_error(
                                line,
                                format!("unit `{unit}` does not fit `{name}` (allowed: {})", allowed.join(", ")),
                            )
                        })?
                };
                Value::Number(x * factor)
            }
        };
        self.values.insert(name.to_string(), parsed);
        Ok(())
    }

    /// Applies a `key=value [unit]` override.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (name, value) = assignment
            .split_once('=')
            .ok_or_else(|| config_error(0, format!("override `{assignment}` is not key=value")))?;
        self.set(name.trim(), value.trim(), 0)?;
        self.validate()
    }

    pub fn number(&self, name: &str) -> f64 {
        match self.values.get(name) {
            Some(Value::Number(x)) => *x,
            Some(Value::Integer(n)) => *n as f64,
            _ => panic!("no numeric key `{name}`"),
        }
    }

    pub fn integer(&self, name: &str) -> i64 {
        match self.values.get(name) {
            Some(Value::Integer(n)) => *n,
            _ => panic!("no integer key `{name}`"),
        }
    }

    pub fn text(&self, name: &str) -> &str {
        match self.values.get(name) {
            Some(Value::Text(s)) => s,
            _ => panic!("no text key `{name}`"),
        }
    }

    pub fn values(&self) -> &BTreeMap<String, Value> {
        &self.values
    }

    /// SHA-256 of the canonical `key=value` listing.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for (k, v) in &self.values {
            let line = match v {
                Value::Number(x) => format!("{k}={x:?}\n"),
                Value::Integer(n) => format!("{k}={n}\n"),
                Value::Text(s) => format!("{k}={s}\n"),
            };
            h.update(line.as_bytes());
        }
        hex::encode(h.finalize())
    }

    /// Checks every invariant of the derived parameter structs.
    pub fn validate(&self) -> Result<()> {
        let wrap = |e: Error| config_error(0, e.to_string());
        self.circuit().validate().map_err(wrap)?;
        self.ion().validate().map_err(wrap)?;
        self.bath().map_err(wrap)?;
        self.switch(100.0).validate().map_err(wrap)?;
        for name in ["t1", "t2", "sweep_tau1", "flip_interval", "gate_duration", "noise_dt"] {
            if !(self.number(name) > 0.0) {
                return Err(config_error(0, format!("`{name}` must be positive")));
            }
        }
        if self.number("dead_time") < 0.0 {
            return Err(config_error(0, "`dead_time` must be non-negative"));
        }
        for name in ["kick_count", "sweep_points", "dissipation_points"] {
            if self.integer(name) < 1 {
                return Err(config_error(0, format!("`{name}` must be at least 1")));
            }
        }
        if self.integer("fock_dim") < 2 {
            return Err(config_error(0, "`fock_dim` must be at least 2"));
        }
        if !(self.number("sweep_min") > 0.0 && self.number("sweep_min") < self.number("sweep_max")) {
            return Err(config_error(0, "need 0 < sweep_min < sweep_max"));
        }
        match self.text("noise_spectrum") {
            "one_over_f" | "white" => {}
            other => return Err(config_error(0, format!("unknown noise_spectrum `{other}`"))),
        }
        if !(self.number("noise_omega_min") > 0.0 && self.number("noise_omega_min") < self.number("noise_omega_max")) {
            return Err(config_error(0, "need 0 < noise_omega_min < noise_omega_max"));
        }
        if self.number("noise_amplitude") < 0.0 || self.number("noise_white_level") < 0.0 {
            return Err(config_error(0, "noise levels must be non-negative"));
        }
        Ok(())
    }

    pub fn circuit(&self) -> CircuitParams {
        CircuitParams {
            c_r: self.number("C_r"),
            l_r: self.number("L_r"),
            c_m: self.number("C_m"),
            c_j: self.number("C_J"),
            c_g: self.number("C_g"),
            e_j: self.number("E_J"),
            e_c: self.number("E_c"),
            d_i: self.number("d_i"),
            cavity_length: self.number("cavity_length"),
            c_i: self.number("C_i"),
            c_i2: self.number("C_i2"),
            c_ib: self.number("C_ib"),
        }
    }

    pub fn ion(&self) -> IonParams {
        IonParams {
            mass: self.number("ion_mass"),
            trap_frequency: self.number("trap_frequency"),
            photon_momentum: self.number("photon_momentum"),
            rabi_frequency: self.number("rabi_frequency"),
            laser_detuning: self.number("laser_detuning"),
        }
    }

    pub fn bath(&self) -> Result<BathSpec> {
        let r_r = crate::circuit::quasiparticle_resistance(self.number("R_n"), self.number("n_ratio"))?;
        BathSpec::from_circuit(&self.circuit(), r_r, self.number("temperature"))
    }

    /// Switch with junction energy `ratio`·E_J at the configured flux.
    pub fn switch(&self, ratio: f64) -> SwitchParams {
        SwitchParams {
            e_ja: ratio * self.number("E_J"),
            flux_ratio: self.number("flux_ratio"),
        }
    }
}
