//! Reproducible experiment runner behind the `hybridsim` binary.
//!
//! Each scenario turns a resolved [`Params`] set (and a seed list where it is
//! randomized) into data tables and a list of checked claims. Outputs are
//! written with a fixed column order and shortest round-trip number format,
//! so identical inputs produce byte-identical files for any worker count.
//! Wall-clock timings go to a separate `timings.json`.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;
use serde_json::json;

use crate::algebra::HilbertSpace;
use crate::circuit::{
    self, balance_residual, balance_residual_with, effective_ion_charge_coupling,
    effective_ion_charge_coupling_with, reduce_switch_coupling, secular_modes, CSigmaMode,
};
use crate::config::Params;
use crate::constants::{angular_to_hz, MASS_BE9, MASS_CA43};
use crate::dissipation::{effective_impedance, log_grid, spectral_pipeline};
use crate::error::{Error, Result};
use crate::gate::{
    analytic_phase, canonical_schedule_derived, fidelity_scaling_sweep,
    solve_gate_time, IonParams,
};
use crate::noise::{
    decoherence_rate, filter_variance, monte_carlo_phases, phase_variance, FlipProtocol, NoiseModel,
};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "HYBRIDSIM_OUT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    GateFidelity,
    GateTime,
    NoiseEcho,
    Dissipation,
    Switch,
    Balance,
    ReportAll,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::GateFidelity,
        Scenario::GateTime,
        Scenario::NoiseEcho,
        Scenario::Dissipation,
        Scenario::Switch,
        Scenario::Balance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::GateFidelity => "gate_fidelity",
            Scenario::GateTime => "gate_time",
            Scenario::NoiseEcho => "noise_echo",
            Scenario::Dissipation => "dissipation",
            Scenario::Switch => "switch",
            Scenario::Balance => "balance",
            Scenario::ReportAll => "report_all",
        }
    }

    pub fn needs_seeds(self) -> bool {
        matches!(self, Scenario::NoiseEcho | Scenario::ReportAll)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .chain([Scenario::ReportAll])
            .find(|sc| sc.name() == s)
            .ok_or_else(|| Error::Config {
                line: 0,
                message: format!("unknown scenario `{s}`"),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
    Both,
}

impl OutputFormat {
    fn csv(self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }

    fn json(self) -> bool {
        matches!(self, OutputFormat::Json | OutputFormat::Both)
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "both" => Ok(OutputFormat::Both),
            other => Err(Error::Config {
                line: 0,
                message: format!("unknown output format `{other}`"),
            }),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub params: Params,
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
    pub format: OutputFormat,
    pub workers: usize,
}

/// Loads a configuration file; defaults fill every key it does not set.
pub fn load_config(path: &Path) -> Result<Params> {
    Params::load(path)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Reported for comparison, not asserted.
    Info,
}

impl Verdict {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Info => "info",
        }
    }
}

/// One reproduced claim.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub claim: String,
    pub reproduced: f64,
    pub expected: String,
    pub tolerance: String,
    pub verdict: Verdict,
}

fn check(claim: &str, reproduced: f64, expected: &str, tolerance: &str, verdict: Verdict) -> Check {
    Check {
        claim: claim.to_string(),
        reproduced,
        expected: expected.to_string(),
        tolerance: tolerance.to_string(),
        verdict,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Num(x) => write!(f, "{x:e}"),
            Cell::Int(n) => write!(f, "{n}"),
            Cell::Text(s) => f.write_str(s),
        }
    }
}

fn num(x: f64) -> Cell {
    Cell::Num(x)
}

fn text(s: &str) -> Cell {
    Cell::Text(s.to_string())
}

fn csv_field(cell: &Cell) -> String {
    let s = cell.to_string();
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(name: &str, columns: &[&'static str]) -> Self {
        Self {
            name: name.to_string(),
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(csv_field).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Tables, checked claims and a JSON summary from one scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioOutput {
    pub scenario: Scenario,
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
    pub summary: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub scenario: Scenario,
    pub config_hash: String,
    pub seeds: Vec<u64>,
    pub files: Vec<String>,
    pub summary: Vec<Check>,
    pub all_pass: bool,
}

fn with_context(scenario: Scenario, e: Error) -> Error {
    match e {
        Error::Config { .. } => e,
        other => Error::InvalidParameter {
            name: "scenario",
            reason: format!("{scenario}: {other}"),
        },
    }
}

/// Computes one scenario without writing anything.
pub fn compute_scenario(scenario: Scenario, params: &Params, seeds: &[u64]) -> Result<Vec<ScenarioOutput>> {
    if scenario.needs_seeds() && seeds.is_empty() {
        return Err(Error::Config {
            line: 0,
            message: format!("scenario `{scenario}` is randomized and needs an explicit seed list"),
        });
    }
    let run = |sc: Scenario| -> Result<ScenarioOutput> {
        match sc {
            Scenario::GateFidelity => gate_fidelity(params),
            Scenario::GateTime => gate_time(params),
            Scenario::NoiseEcho => noise_echo(params, seeds),
            Scenario::Dissipation => dissipation(params),
            Scenario::Switch => switch(params),
            Scenario::Balance => balance(params),
            Scenario::ReportAll => unreachable!("expanded by caller"),
        }
        .map_err(|e| with_context(sc, e))
    };
    match scenario {
        Scenario::ReportAll => Scenario::ALL.into_iter().map(run).collect(),
        single => Ok(vec![run(single)?]),
    }
}

/// Runs the configured scenario on a pool of `workers` threads and writes
/// its outputs, `summary.*`, `manifest.json` and `timings.json`.
pub fn run_scenario(config: &ScenarioConfig) -> Result<RunManifest> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers.max(1))
        .build()
        .map_err(|e| Error::Io(e.to_string()))?;
    let started = Instant::now();
    let outputs = pool.install(|| compute_scenario(config.scenario, &config.params, &config.seeds))?;
    let elapsed = started.elapsed().as_secs_f64();

    std::fs::create_dir_all(&config.output_dir)?;
    let mut files = Vec::new();
    let mut write = |name: String, body: String| -> Result<()> {
        std::fs::write(config.output_dir.join(&name), body)?;
        files.push(name);
        Ok(())
    };
    let mut checks = Vec::new();
    for out in &outputs {
        for table in &out.tables {
            if config.format.csv() {
                write(format!("{}.csv", table.name), table.to_csv())?;
            }
            if config.format.json() {
                let doc = json!({
                    "scenario": out.scenario,
                    "columns": table.columns,
                    "rows": table.rows,
                });
                write(format!("{}.json", table.name), pretty(&doc))?;
            }
        }
        if config.format.json() {
            write(format!("{}_summary.json", out.scenario), pretty(&out.summary))?;
        }
        checks.extend(out.checks.iter().cloned());
    }
    let mut summary = Table::new("summary", &["claim", "reproduced", "expected", "tolerance", "verdict"]);
    for c in &checks {
        summary.push(vec![
            text(&c.claim),
            num(c.reproduced),
            text(&c.expected),
            text(&c.tolerance),
            text(c.verdict.label()),
        ]);
    }
    if config.format.csv() {
        write("summary.csv".into(), summary.to_csv())?;
    }
    if config.format.json() {
        write("summary.json".into(), pretty(&json!(checks)))?;
    }
    let manifest = RunManifest {
        tool_version: TOOL_VERSION.to_string(),
        scenario: config.scenario,
        config_hash: config.params.hash(),
        seeds: config.seeds.clone(),
        all_pass: checks.iter().all(|c| c.verdict != Verdict::Fail),
        summary: checks,
        files: files.clone(),
    };
    std::fs::write(config.output_dir.join("manifest.json"), pretty(&json!(manifest)))?;
    let timings = json!({ "scenario": config.scenario, "workers": config.workers, "wall_clock_s": elapsed });
    std::fs::write(config.output_dir.join("timings.json"), pretty(&timings))?;
    Ok(manifest)
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn within_factor(value: f64, target: f64, factor: f64) -> bool {
    value > 0.0 && value / target <= factor && target / value <= factor
}

fn gate_fidelity(p: &Params) -> Result<ScenarioOutput> {
    let ion = p.ion();
    let n = p.integer("kick_count");
    let tau1 = p.number("sweep_tau1");
    let schedule = canonical_schedule_derived(n, tau1, p.number("t1"), p.number("t2"))?;
    let x0 = ion.length_scale(ion.trap_frequency);
    let swept_ion = IonParams {
        photon_momentum: p.number("sweep_kick_strength") / x0,
        ..ion
    };
    let kappa = p.number("sweep_coupling_strength") / (x0 * tau1);
    let space = HilbertSpace::new(p.integer("fock_dim") as usize)?;
    let values = log_grid(p.number("sweep_min"), p.number("sweep_max"), p.integer("sweep_points") as usize);
    let sweep = fidelity_scaling_sweep(&swept_ion, kappa, &schedule, &values, &space)?;
    let mut table = Table::new(
        "gate_fidelity",
        &["omega_nu_T", "infidelity", "alpha_numeric", "alpha_analytic", "trace_distance"],
    );
    for k in 0..values.len() {
        table.push(vec![
            num(sweep.omega_nu_t[k]),
            num(sweep.infidelity[k]),
            num(sweep.alpha_numeric[k]),
            num(sweep.alpha_analytic[k]),
            num(sweep.trace_distance[k]),
        ]);
    }
    let checks = vec![
        check(
            "trace-distance exponent vs omega_nu T",
            sweep.trace_distance_exponent,
            "2",
            "+-0.3",
            Verdict::from_bool((sweep.trace_distance_exponent - 2.0).abs() <= 0.3),
        ),
        check(
            "infidelity exponent vs omega_nu T",
            sweep.infidelity_exponent,
            "2",
            "reported",
            Verdict::Info,
        ),
        check(
            "infidelity at smallest omega_nu T",
            sweep.infidelity[0],
            "small",
            "<1e-4",
            Verdict::from_bool(sweep.infidelity[0] < 1e-4),
        ),
    ];
    Ok(ScenarioOutput {
        scenario: Scenario::GateFidelity,
        tables: vec![table],
        checks,
        summary: json!({
            "trace_distance_exponent": sweep.trace_distance_exponent,
            "infidelity_exponent": sweep.infidelity_exponent,
            "kappa_rad_s_per_m": kappa,
            "photon_momentum_per_m": swept_ion.photon_momentum,
        }),
    })
}

fn gate_time(p: &Params) -> Result<ScenarioOutput> {
    let circuit = p.circuit();
    let coupling = effective_ion_charge_coupling(&circuit)?;
    let (t1, t2) = (p.number("t1"), p.number("t2"));
    let n = p.integer("kick_count");
    let target = p.number("gate_alpha");
    let unit_schedule = canonical_schedule_derived(n, 1.0, t1, t2)?;
    let mut table = Table::new(
        "gate_time",
        &["species", "variant", "tau1_s", "gate_time_s", "reference_gate_time_s", "ratio"],
    );
    let mut checks = Vec::new();
    let mut summary = serde_json::Map::new();
    for (species, mass, reference_t) in [("Be9", MASS_BE9, 14e-9), ("Ca43", MASS_CA43, 26e-9)] {
        let ion = IonParams { mass, ..p.ion() };
        let per_second = analytic_phase(&unit_schedule, &ion, &circuit, &coupling)?;
        for (variant, rate) in [
            ("bare", per_second.bare),
            ("with_Cm_over_Ct", per_second.exact),
            ("closed_form_prefactor", per_second.closed_form),
        ] {
            let sol = solve_gate_time(target, rate, t1, t2, p.number("dead_time"))?;
            let ratio = sol.gate_time / reference_t;
            table.push(vec![
                text(species),
                text(variant),
                num(sol.tau1),
                num(sol.gate_time),
                num(reference_t),
                num(ratio),
            ]);
            let verdict = if variant == "bare" {
                Verdict::from_bool(within_factor(sol.gate_time, reference_t, 2.5))
            } else {
                Verdict::Info
            };
            checks.push(check(
                &format!("gate time {species} ({variant})"),
                sol.gate_time,
                &format!("{reference_t:e} s"),
                "factor 2.5",
                verdict,
            ));
            summary.insert(format!("{species}_{variant}_gate_time_s"), json!(sol.gate_time));
        }
    }
    Ok(ScenarioOutput {
        scenario: Scenario::GateTime,
        tables: vec![table],
        checks,
        summary: serde_json::Value::Object(summary),
    })
}

fn noise_model(p: &Params) -> Result<NoiseModel> {
    let coupling = NoiseModel::coupling_from(p.number("E_c"), p.number("C_g"));
    let (lo, hi) = (p.number("noise_omega_min"), p.number("noise_omega_max"));
    match p.text("noise_spectrum") {
        "white" => NoiseModel::white(p.number("noise_white_level"), lo, hi, coupling),
        _ => NoiseModel::one_over_f(p.number("noise_amplitude"), lo, hi, coupling),
    }
}

fn noise_echo(p: &Params, seeds: &[u64]) -> Result<ScenarioOutput> {
    let model = noise_model(p)?;
    let t = p.number("gate_duration");
    let on = FlipProtocol::new(p.number("flip_interval"), t)?;
    let off = FlipProtocol::disabled(t);
    let dt = p.number("noise_dt");
    let phases = monte_carlo_phases(&model, &on, dt, seeds)?;
    let mut table = Table::new("noise_echo", &["seed", "phase", "t"]);
    for (seed, phi) in seeds.iter().zip(&phases) {
        table.push(vec![Cell::Int(*seed as i64), num(*phi), num(t)]);
    }
    let variance = phase_variance(&model, &on)?;
    let rate = decoherence_rate(&model, &on)?;
    let with_flips = filter_variance(&model, &on)?;
    let without = filter_variance(&model, &off)?;
    let suppression = without / with_flips;
    let mc_variance = phases.iter().map(|x| x * x).sum::<f64>() / phases.len() as f64;
    let checks = vec![
        check(
            "echo suppression of 1/f variance",
            suppression,
            ">100",
            ">=100",
            Verdict::from_bool(suppression >= 100.0),
        ),
        check(
            "dephasing rate below maximal-density bound",
            rate.rate,
            &format!("<= {:e} s^-1", rate.bound),
            "rate <= bound",
            Verdict::from_bool(rate.rate <= rate.bound),
        ),
        check(
            "long-time dephasing rate (square-wave filter)",
            rate.rate_exact,
            &format!("<= {:e} s^-1", rate.bound),
            "reported",
            Verdict::Info,
        ),
        check(
            "Monte Carlo variance / all-harmonic sum",
            mc_variance / variance.harmonic,
            "1",
            "reported",
            Verdict::Info,
        ),
    ];
    Ok(ScenarioOutput {
        scenario: Scenario::NoiseEcho,
        tables: vec![table],
        checks,
        summary: json!({
            "variance_harmonic": variance.harmonic,
            "variance_harmonic_odd": variance.harmonic_odd,
            "variance_long_time": variance.exact,
            "variance_filter_with_flips": with_flips,
            "variance_filter_without_flips": without,
            "variance_monte_carlo": mc_variance,
            "rate": rate.rate,
            "rate_long_time": rate.rate_exact,
            "bound": rate.bound,
            "bound_odd_harmonics": rate.bound_odd,
            "warnings": variance.warnings,
        }),
    })
}

fn dissipation(p: &Params) -> Result<ScenarioOutput> {
    let bath = p.bath()?;
    let w_r = bath.omega_r();
    let grid = log_grid(1e-3 * w_r, 1e-1 * w_r, p.integer("dissipation_points") as usize);
    let result = spectral_pipeline(&bath, &grid)?;
    let mut table = Table::new(
        "dissipation",
        &["omega_rad_s", "ReZ_ohm", "ImZ_ohm", "J_eff", "J_continued"],
    );
    for k in 0..grid.len() {
        table.push(vec![
            num(grid[k]),
            num(result.z_eff[k].0),
            num(result.z_eff[k].1),
            num(result.j_eff[k]),
            num(result.j_continued[k]),
        ]);
    }
    let low = effective_impedance(&bath, 1e-6 * w_r)?;
    let z_dev = if bath.r_r > 0.0 { (low.re - bath.r_r).abs() / bath.r_r } else { 0.0 };
    let gamma = result.gamma_rq;
    let residual = result.max_continuation_residual();
    let checks = vec![
        check(
            "decoherence rate equals J(0+)/R_k",
            gamma.relative_residual(),
            "0",
            "<1e-6",
            Verdict::from_bool(gamma.relative_residual() < 1e-6),
        ),
        check(
            "Z_eff at low frequency equals R_r",
            z_dev,
            "0",
            "<1%",
            Verdict::from_bool(z_dev < 0.01),
        ),
        check(
            "charge decoherence rate",
            gamma.gamma,
            "5e4 s^-1",
            "within 1%",
            Verdict::from_bool((gamma.gamma / 5e4 - 1.0).abs() < 0.01),
        ),
        check(
            "continued Matsubara J vs direct J",
            residual,
            "0",
            "<2%",
            Verdict::from_bool(residual < 0.02),
        ),
    ];
    Ok(ScenarioOutput {
        scenario: Scenario::Dissipation,
        tables: vec![table],
        checks,
        summary: json!({
            "R_r_ohm": bath.r_r,
            "omega_r_rad_s": w_r,
            "gamma_rq_s": gamma.gamma,
            "gamma_closure_s": gamma.closure,
            "closure_residual": gamma.relative_residual(),
            "continuation_residual": residual,
        }),
    })
}

fn switch(p: &Params) -> Result<ScenarioOutput> {
    let circuit = p.circuit();
    let direct = effective_ion_charge_coupling(&circuit)?;
    let mut table = Table::new(
        "switch",
        &["E_Ja_over_E_J", "flux_ratio", "kappa", "kappa_direct", "relative_difference", "C_q", "warnings"],
    );
    let mut worst_on = 0.0f64;
    let mut all_zero = true;
    let mut zero_mode_dev = 0.0f64;
    let off = p.switch(100.0).is_off();
    for ratio in [100.0, 300.0, 1000.0] {
        let s = p.switch(ratio);
        let c = reduce_switch_coupling(&circuit, &s)?;
        let rel = (c.kappa - direct.kappa).abs() / direct.kappa;
        if off {
            all_zero &= c.kappa == 0.0;
        } else {
            worst_on = worst_on.max(rel);
            let modes = secular_modes(&circuit::build_switch_circuit(&circuit, &s)?);
            let v = modes.1.column(0);
            let u = 1.0 / 3f64.sqrt();
            zero_mode_dev = zero_mode_dev.max(v.iter().map(|x| (x - u).abs()).fold(0.0, f64::max));
        }
        table.push(vec![
            num(ratio),
            num(s.flux_ratio),
            num(c.kappa),
            num(direct.kappa),
            num(rel),
            num(c.charge_qubit_capacitance_correction),
            Cell::Int(c.warnings.len() as i64),
        ]);
    }
    let x = 200e-9;
    let mut checks = Vec::new();
    if off {
        checks.push(check("kappa at half flux", 0.0, "0", "exact", Verdict::from_bool(all_zero)));
    } else {
        checks.push(check(
            "switch coupling vs direct coupling",
            worst_on,
            "equal",
            "<1e-3",
            Verdict::from_bool(worst_on < 1e-3),
        ));
        checks.push(check(
            "zero-mode eigenvector deviation from (1,1,1)/sqrt3",
            zero_mode_dev,
            "0",
            "<1e-10",
            Verdict::from_bool(zero_mode_dev < 1e-10),
        ));
    }
    checks.push(check(
        "interaction at 200 nm displacement (Hz)",
        direct.interaction_hz(x),
        "2e8 Hz",
        "reported",
        Verdict::Info,
    ));
    Ok(ScenarioOutput {
        scenario: Scenario::Switch,
        tables: vec![table],
        checks,
        summary: json!({
            "kappa_direct": direct.kappa,
            "c_sigma": direct.c_sigma,
            "interaction_200nm_rad_s": direct.interaction_angular(x),
            "interaction_200nm_hz": direct.interaction_hz(x),
            "warnings": direct.warnings,
        }),
    })
}

fn balance(p: &Params) -> Result<ScenarioOutput> {
    let c = p.circuit();
    let dv = p.number("balance_dV");
    let mut table = Table::new("balance", &["label", "V_i", "V_ib", "residual_rad_s", "residual_hz"]);
    let rows = [
        ("balanced", 1.0, -c.c_i / c.c_ib),
        ("imbalance", dv, 0.0),
        ("imbalance_double", 2.0 * dv, 0.0),
        ("imbalance_negated", -dv, 0.0),
    ];
    let mut residuals = Vec::new();
    for (label, v_i, v_ib) in rows {
        let r = balance_residual(&c, v_i, v_ib)?;
        residuals.push(r);
        table.push(vec![text(label), num(v_i), num(v_ib), num(r), num(angular_to_hz(r))]);
    }
    let hz = angular_to_hz(residuals[1]);
    let approx = angular_to_hz(balance_residual_with(&c, dv, 0.0, CSigmaMode::CavityOnly)?);
    let checks = vec![
        check("residual at balance", residuals[0], "0", "exact", Verdict::from_bool(residuals[0] == 0.0)),
        check(
            "residual at 1e-4 V imbalance (Hz)",
            hz,
            "1e8 Hz",
            "factor 2",
            Verdict::from_bool(within_factor(hz, 1e8, 2.0)),
        ),
        check(
            "residual at 1e-4 V imbalance with C_sigma = C_r (Hz)",
            approx,
            "1e8 Hz",
            "reported",
            Verdict::Info,
        ),
        check(
            "residual antisymmetric in voltage",
            residuals[1] + residuals[3],
            "0",
            "exact",
            Verdict::from_bool(residuals[1] + residuals[3] == 0.0),
        ),
    ];
    let coupling = effective_ion_charge_coupling_with(&c, CSigmaMode::Exact)?;
    Ok(ScenarioOutput {
        scenario: Scenario::Balance,
        tables: vec![table],
        checks,
        summary: json!({
            "c_sigma": coupling.c_sigma,
            "residual_hz": hz,
            "residual_hz_cavity_only": approx,
        }),
    })
}
