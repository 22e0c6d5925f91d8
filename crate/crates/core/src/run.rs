//! Config ingestion, run records and the command implementations behind the
//! `vacdetect` binary.
//!
//! Every command is a plain function returning data; [`execute`] adds file
//! handling, formatting and exit codes (0 ok, 2 config error, 3 tolerance
//! failure, 4 calibration failure).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{
    correlation_stationary, current_variance, mean_current_steady, mean_current_transient,
    quantum_efficiency,
};
use crate::cavity::{efficiency_vs_kappa, CavityConfig};
use crate::error::Error;
use crate::fit::fit_decay;
use crate::model::{validate, SystemSpec};
use crate::oracle::discretize::resolve_spec;
use crate::oracle::{CalibrationCache, ChannelCalibration, Oracle, OracleSettings};

pub const SCHEMA_VERSION: u32 = 1;

/// Tolerances of the oracle-versus-closed-form checks.
pub const MEAN_CURRENT_TOL: f64 = 0.02;
pub const VARIANCE_RATIO_TOL: f64 = 0.05;
pub const CORRELATION_DECAY_TOL: f64 = 0.05;
pub const UNITARITY_TOL: f64 = 1e-9;

/// `SystemSpec` fields at the top level plus oracle settings and an optional
/// cavity section (needed by the `kappa` sweep).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub spec: SystemSpec,
    #[serde(default)]
    pub oracle: OracleSettings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cavity: Option<CavityConfig>,
}

impl RunConfig {
    pub fn reference() -> Self {
        RunConfig {
            spec: SystemSpec::reference(),
            oracle: OracleSettings::default(),
            cavity: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, Failure> {
        serde_json::from_str(text).map_err(|e| Failure::Config(format!("malformed config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Overrides applied and every defaulted oracle setting made explicit,
    /// so the echo reproduces the run on its own.
    pub fn resolved(&self) -> Self {
        let spec = resolve_spec(&self.spec, &self.oracle);
        let mut oracle = self.oracle;
        oracle.mode_count = Some(spec.electronic.mode_count);
        oracle.bandwidth = Some(spec.electronic.bandwidth);
        oracle.dt = Some(self.oracle.step(&spec));
        oracle.horizon = Some(self.oracle.horizon(&spec));
        RunConfig {
            spec,
            oracle,
            cavity: self.cavity.clone(),
        }
    }

    /// Fails with the violation list if the spec is invalid.
    pub fn checked(&self) -> Result<Self, Failure> {
        let report = validate(&self.spec);
        if !report.is_valid() {
            return Err(Failure::Config(report.to_string().trim_end().to_string()));
        }
        Ok(self.resolved())
    }
}

/// A command outcome that maps to a non-zero exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    Config(String),
    Tolerance(String),
    Calibration(String),
    Other(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Tolerance(_) => 3,
            Failure::Calibration(_) => 4,
            Failure::Other(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "config error: {m}"),
            Failure::Tolerance(m) => write!(f, "tolerance failure: {m}"),
            Failure::Calibration(m) => write!(f, "calibration failure: {m}"),
            Failure::Other(m) => write!(f, "{m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Calibration { .. } => Failure::Calibration(e.to_string()),
            Error::UnitarityDrift { .. } => Failure::Tolerance(e.to_string()),
            Error::Io(_) => Failure::Other(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Analytic,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyRecord {
    pub mean_current: f64,
    /// `1 / (1 + ξ)²`, a property of the spec in both provenances.
    pub efficiency_factor: f64,
    pub xi: f64,
    pub detuning: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceRecord {
    pub mean_current: f64,
    pub variance: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRecord {
    pub t1: f64,
    pub tau_grid: Vec<f64>,
    pub real: Vec<f64>,
    pub imag: Vec<f64>,
    pub abs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceDelta {
    pub observable: String,
    pub coarse: f64,
    pub fine: f64,
    /// `|fine / coarse - 1|`
    pub shift: f64,
    pub limit: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub calibration: Vec<ChannelCalibration>,
    pub unitarity_drift: f64,
    #[serde(default)]
    pub convergence: Vec<ConvergenceDelta>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub schema_version: u32,
    pub provenance: Provenance,
    pub spec_echo: RunConfig,
    pub time_grid: Vec<f64>,
    pub mean_current_trace: Vec<f64>,
    pub steady_summary: SteadyRecord,
    pub variance: VarianceRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub correlation_trace: Option<CorrelationRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Diagnostics>,
}

pub const TRACE_CSV_HEADER: &str = "time,mean_current";

impl RunResult {
    pub fn trace_csv(&self) -> String {
        let mut s = String::from(TRACE_CSV_HEADER);
        s.push('\n');
        for (t, i) in self.time_grid.iter().zip(&self.mean_current_trace) {
            let _ = writeln!(s, "{t},{i}");
        }
        s
    }
}

/// Closed-form run: transient trace, steady summary and variance.
pub fn analytic_run(cfg: &RunConfig) -> Result<RunResult, Failure> {
    let cfg = cfg.checked()?;
    let spec = cfg.spec;
    let grid = cfg.oracle.time_grid(&spec);
    let trace = grid
        .iter()
        .map(|&t| mean_current_transient(&spec, t))
        .collect::<Result<Vec<_>, _>>()?;
    let steady = mean_current_steady(&spec);
    let var = current_variance(&spec);
    Ok(RunResult {
        schema_version: SCHEMA_VERSION,
        provenance: Provenance::Analytic,
        steady_summary: SteadyRecord {
            mean_current: steady.mean_current,
            efficiency_factor: steady.efficiency_factor,
            xi: spec.xi(),
            detuning: steady.detuning,
        },
        variance: VarianceRecord {
            mean_current: var.mean_current,
            variance: var.variance,
            ratio: var.fano_ratio,
        },
        spec_echo: cfg,
        time_grid: grid,
        mean_current_trace: trace,
        correlation_trace: None,
        diagnostics: None,
    })
}

/// Exact finite-mode run. The steady values are taken at the horizon.
pub fn oracle_run(cfg: &RunConfig, cache: &CalibrationCache) -> Result<RunResult, Failure> {
    let cfg = cfg.checked()?;
    let oracle = Oracle::with_cache(&cfg.spec, &cfg.oracle, cache)?;
    let obs = oracle.observer();
    let spec = oracle.sys.spec;
    let grid = oracle.propagator.time_grid.clone();
    let horizon = cfg.oracle.horizon(&spec);
    let trace = grid.iter().map(|&t| obs.flux_current(t)).collect();
    let var = obs.variance(horizon);
    Ok(RunResult {
        schema_version: SCHEMA_VERSION,
        provenance: Provenance::Oracle,
        steady_summary: SteadyRecord {
            mean_current: obs.mean_current(horizon),
            efficiency_factor: mean_current_steady(&spec).efficiency_factor,
            xi: spec.xi(),
            detuning: spec.detuning(),
        },
        variance: VarianceRecord {
            mean_current: var.mean_current,
            variance: var.variance,
            ratio: var.ratio,
        },
        diagnostics: Some(Diagnostics {
            calibration: oracle.sys.calibration.clone(),
            unitarity_drift: oracle.propagator.unitarity_drift,
            convergence: vec![],
            warnings: validate(&spec).warnings,
        }),
        spec_echo: cfg,
        time_grid: grid,
        mean_current_trace: trace,
        correlation_trace: None,
    })
}

pub fn cmd_steady(cfg: &RunConfig, oracle: bool) -> Result<RunResult, Failure> {
    if oracle {
        oracle_run(cfg, &CalibrationCache::new())
    } else {
        analytic_run(cfg)
    }
}

/// Oracle observables compared by `validate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleMeasures {
    pub mode_count: usize,
    pub mean_current: f64,
    pub variance_ratio: f64,
    /// Fitted decay rate of the smooth correlation over `[0.5, 4]/γ_ε`.
    pub correlation_rate: f64,
    /// Same fit restricted to the detector-commutator channel.
    pub detector_channel_rate: f64,
    pub unitarity_drift: f64,
    pub calibration: Vec<ChannelCalibration>,
}

/// Lags at which the correlation decay is fitted, in units of `1/γ_ε`.
pub const CORRELATION_FIT_WINDOW: (f64, f64) = (0.5, 4.0);
const CORRELATION_FIT_POINTS: usize = 71;
/// First correlation time, in units of `1/γ_ε`; transients are gone by then.
pub const CORRELATION_T1: f64 = 10.0;

pub fn measure_oracle(
    spec: &SystemSpec,
    settings: &OracleSettings,
    cache: &CalibrationCache,
) -> Result<OracleMeasures, Failure> {
    let oracle = Oracle::with_cache(spec, settings, cache)?;
    let obs = oracle.observer();
    let spec = oracle.sys.spec;
    let gamma = spec.gamma_total();
    let horizon = settings.horizon(&spec);
    let (a, b) = CORRELATION_FIT_WINDOW;
    let taus: Vec<f64> = (0..CORRELATION_FIT_POINTS)
        .map(|j| (a + (b - a) * j as f64 / (CORRELATION_FIT_POINTS - 1) as f64) / gamma)
        .collect();
    let terms = obs.correlation_trace(CORRELATION_T1 / gamma, &taus)?;
    let rate = |mags: Vec<f64>| fit_decay(&taus, &mags).map_or(f64::NAN, |(r, _)| r);
    Ok(OracleMeasures {
        mode_count: spec.electronic.mode_count,
        mean_current: obs.mean_current(horizon),
        variance_ratio: obs.variance(horizon).ratio,
        correlation_rate: rate(terms.iter().map(|c| c.smooth.norm()).collect()),
        detector_channel_rate: rate(terms.iter().map(|c| c.detector.norm()).collect()),
        unitarity_drift: oracle.propagator.unitarity_drift,
        calibration: oracle.sys.calibration.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationRow {
    pub check: String,
    pub value: f64,
    pub reference: f64,
    pub rel_error: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Informational rows do not affect the exit code.
    pub gating: bool,
}

impl ValidationRow {
    fn relative(check: &str, value: f64, reference: f64, tolerance: f64, gating: bool) -> Self {
        let rel_error = (value / reference - 1.0).abs();
        ValidationRow {
            check: check.into(),
            value,
            reference,
            rel_error,
            tolerance,
            pass: rel_error <= tolerance,
            gating,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationOutcome {
    pub rows: Vec<ValidationRow>,
    pub coarse: OracleMeasures,
    pub fine: OracleMeasures,
}

impl ValidationOutcome {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass || !r.gating)
    }

    pub fn failures(&self) -> Vec<&ValidationRow> {
        self.rows.iter().filter(|r| r.gating && !r.pass).collect()
    }
}

pub const VALIDATION_CSV_HEADER: &str = "check,value,reference,rel_error,tolerance,pass,gating";

pub fn validation_csv(outcome: &ValidationOutcome) -> String {
    let mut s = String::from(VALIDATION_CSV_HEADER);
    s.push('\n');
    for r in &outcome.rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.check, r.value, r.reference, r.rel_error, r.tolerance, r.pass, r.gating
        );
    }
    s
}

/// Oracle against closed forms, plus a convergence check against a grid of
/// `2N - 1` modes (every original mode kept, spacing halved).
pub fn cmd_validate(cfg: &RunConfig) -> Result<ValidationOutcome, Failure> {
    let cfg = cfg.checked()?;
    let spec = cfg.spec;
    let cache = CalibrationCache::new();
    let coarse = measure_oracle(&spec, &cfg.oracle, &cache)?;
    let n = spec.electronic.mode_count;
    let fine_settings = OracleSettings {
        mode_count: Some(2 * n - 1),
        ..cfg.oracle
    };
    let fine = measure_oracle(&spec, &fine_settings, &cache)?;

    let gamma = spec.gamma_total();
    let mut rows = vec![
        ValidationRow::relative(
            "mean_current",
            coarse.mean_current,
            mean_current_steady(&spec).mean_current,
            MEAN_CURRENT_TOL,
            true,
        ),
        ValidationRow::relative(
            "variance_ratio",
            coarse.variance_ratio,
            current_variance(&spec).fano_ratio,
            VARIANCE_RATIO_TOL,
            true,
        ),
        ValidationRow::relative(
            "correlation_decay",
            coarse.correlation_rate,
            gamma,
            CORRELATION_DECAY_TOL,
            true,
        ),
        ValidationRow::relative(
            "detector_channel_decay",
            coarse.detector_channel_rate,
            gamma,
            CORRELATION_DECAY_TOL,
            false,
        ),
    ];
    let drift = coarse.unitarity_drift.max(fine.unitarity_drift);
    rows.push(ValidationRow {
        check: "unitarity_drift".into(),
        value: drift,
        reference: 0.0,
        rel_error: drift,
        tolerance: UNITARITY_TOL,
        pass: drift <= UNITARITY_TOL,
        gating: true,
    });
    for (name, a, b, tol) in [
        (
            "convergence_mean_current",
            coarse.mean_current,
            fine.mean_current,
            MEAN_CURRENT_TOL,
        ),
        (
            "convergence_variance_ratio",
            coarse.variance_ratio,
            fine.variance_ratio,
            VARIANCE_RATIO_TOL,
        ),
        (
            "convergence_correlation_decay",
            coarse.correlation_rate,
            fine.correlation_rate,
            CORRELATION_DECAY_TOL,
        ),
    ] {
        rows.push(ValidationRow::relative(name, b, a, 0.5 * tol, true));
    }
    Ok(ValidationOutcome { rows, coarse, fine })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Detuning,
    Xi,
    Kappa,
    Alpha,
}

/// Column-labelled numeric table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    /// One object per row, keyed by header.
    pub fn to_json(&self) -> serde_json::Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let obj: serde_json::Map<String, serde_json::Value> = self
                    .header
                    .iter()
                    .zip(row)
                    .map(|(h, &x)| (h.clone(), serde_json::json!(x)))
                    .collect();
                serde_json::Value::Object(obj)
            })
            .collect();
        serde_json::Value::Array(rows)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }
}

/// `"a,b,c"` or `"start:stop:count"` (inclusive, count >= 2).
pub fn parse_grid(text: &str) -> Result<Vec<f64>, Failure> {
    let bad = |why: &str| Failure::Config(format!("bad grid {text:?}: {why}"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("not a number"));
    let grid = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected start:stop:count"));
        }
        let (a, b) = (num(parts[0])?, num(parts[1])?);
        let n: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| bad("count is not an integer"))?;
        if n < 2 {
            return Err(bad("count must be at least 2"));
        }
        (0..n)
            .map(|j| a + (b - a) * j as f64 / (n - 1) as f64)
            .collect()
    } else {
        text.split(',').map(num).collect::<Result<Vec<_>, _>>()?
    };
    if grid.is_empty() || grid.iter().any(|x| !x.is_finite()) {
        return Err(bad("empty or non-finite"));
    }
    Ok(grid)
}

fn point_spec(cfg: &RunConfig, axis: SweepAxis, x: f64) -> Result<SystemSpec, Failure> {
    let spec = cfg.spec;
    let g1 = spec.electronic.gamma;
    Ok(match axis {
        SweepAxis::Detuning => spec.with_detuning(x),
        SweepAxis::Xi => {
            if !(x >= 0.0) {
                return Err(Failure::Config(format!("xi must be non-negative, got {x}")));
            }
            spec.with_gammas(g1, x * g1)
        }
        SweepAxis::Alpha => spec.with_alpha(Complex64::new(x, 0.0)),
        SweepAxis::Kappa => unreachable!("kappa rows come from the cavity calculator"),
    })
}

/// One row per grid point, in grid order. With `oracle`, points run on a
/// pool of `jobs` threads and share calibrations.
pub fn cmd_sweep(
    cfg: &RunConfig,
    axis: SweepAxis,
    grid: &[f64],
    oracle: bool,
    jobs: usize,
) -> Result<Table, Failure> {
    let cfg = cfg.checked()?;
    if grid.is_empty() {
        return Err(Failure::Config("empty sweep grid".into()));
    }
    let mut header: Vec<String> = match axis {
        SweepAxis::Detuning => vec![
            "detuning",
            "mean_current",
            "efficiency_factor",
            "variance_ratio",
        ],
        SweepAxis::Xi => vec![
            "xi",
            "gamma_2",
            "mean_current",
            "efficiency",
            "variance_ratio",
        ],
        SweepAxis::Kappa => vec![
            "kappa",
            "xi",
            "efficiency",
            "shot_noise_ratio",
            "mean_current",
        ],
        SweepAxis::Alpha => vec![
            "alpha",
            "intensity",
            "mean_current",
            "variance",
            "variance_ratio",
        ],
    }
    .into_iter()
    .map(String::from)
    .collect();

    let specs: Vec<SystemSpec> = match axis {
        SweepAxis::Kappa => {
            let cav = cfg
                .cavity
                .as_ref()
                .ok_or_else(|| Failure::Config("kappa sweep needs a `cavity` section".into()))?;
            efficiency_vs_kappa(cav, grid, &cfg.spec)?
                .iter()
                .map(|r| cfg.spec.with_gammas(cav.gamma_1, r.xi * cav.gamma_1))
                .collect()
        }
        _ => grid
            .iter()
            .map(|&x| point_spec(&cfg, axis, x))
            .collect::<Result<_, _>>()?,
    };
    for s in &specs {
        let report = validate(s);
        if !report.is_valid() {
            return Err(Failure::Config(report.to_string().trim_end().to_string()));
        }
    }

    let mut rows: Vec<Vec<f64>> = match axis {
        SweepAxis::Kappa => {
            let cav = cfg.cavity.as_ref().expect("checked above");
            efficiency_vs_kappa(cav, grid, &cfg.spec)?
                .iter()
                .zip(&specs)
                .map(|(r, s)| {
                    vec![
                        r.kappa,
                        r.xi,
                        r.efficiency,
                        r.shot_noise_ratio,
                        mean_current_steady(s).mean_current,
                    ]
                })
                .collect()
        }
        _ => grid
            .iter()
            .zip(&specs)
            .map(|(&x, s)| {
                let steady = mean_current_steady(s);
                let var = current_variance(s);
                match axis {
                    SweepAxis::Detuning => vec![
                        x,
                        steady.mean_current,
                        steady.efficiency_factor,
                        var.fano_ratio,
                    ],
                    SweepAxis::Xi => vec![
                        x,
                        s.radiative.gamma,
                        steady.mean_current,
                        quantum_efficiency(x).expect("xi checked non-negative"),
                        var.fano_ratio,
                    ],
                    SweepAxis::Alpha => {
                        vec![x, x * x, steady.mean_current, var.variance, var.fano_ratio]
                    }
                    SweepAxis::Kappa => unreachable!(),
                }
            })
            .collect(),
    };

    if oracle {
        header.extend(
            [
                "oracle_mean_current",
                "oracle_rel_error",
                "oracle_variance_ratio",
            ]
            .map(String::from),
        );
        let cache = CalibrationCache::new();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build()
            .map_err(|e| Failure::Other(e.to_string()))?;
        let results: Vec<Result<(f64, f64), Failure>> = pool.install(|| {
            specs
                .par_iter()
                .map(|s| {
                    let o = Oracle::with_cache(s, &cfg.oracle, &cache)?;
                    let obs = o.observer();
                    let h = cfg.oracle.horizon(&o.sys.spec);
                    Ok((obs.mean_current(h), obs.variance(h).ratio))
                })
                .collect()
        });
        for ((row, s), res) in rows.iter_mut().zip(&specs).zip(results) {
            let (current, ratio) = res?;
            let reference = mean_current_steady(s).mean_current;
            row.extend([current, current / reference - 1.0, ratio]);
        }
    }
    Ok(Table { header, rows })
}

/// Analytic stationary correlation on `[0, tau_max]`; with `oracle`, the exact
/// smooth part and its detector-commutator channel at `t1 = 10/γ_ε`.
pub fn cmd_correlate(
    cfg: &RunConfig,
    tau_max: f64,
    points: usize,
    oracle: bool,
) -> Result<Table, Failure> {
    if !(tau_max > 0.0) {
        return Err(Failure::Config(format!(
            "tau_max must be positive, got {tau_max}"
        )));
    }
    if points < 2 {
        return Err(Failure::Config(format!(
            "need at least 2 points, got {points}"
        )));
    }
    let cfg = cfg.checked()?;
    let taus: Vec<f64> = (0..points)
        .map(|j| tau_max * j as f64 / (points - 1) as f64)
        .collect();
    let trace = correlation_stationary(&cfg.spec, &taus)?;
    let mut header: Vec<String> = ["tau", "real", "imag", "abs"].map(String::from).to_vec();
    let mut rows: Vec<Vec<f64>> = taus
        .iter()
        .zip(&trace.values)
        .map(|(&t, v)| vec![t, v.re, v.im, v.norm()])
        .collect();
    if oracle {
        header.extend(
            [
                "oracle_real",
                "oracle_imag",
                "oracle_abs",
                "oracle_detector_channel_abs",
            ]
            .map(String::from),
        );
        let o = Oracle::new(&cfg.spec, &cfg.oracle)?;
        let obs = o.observer();
        let t1 = CORRELATION_T1 / o.sys.spec.gamma_total();
        for (row, c) in rows.iter_mut().zip(obs.correlation_trace(t1, &taus)?) {
            row.extend([c.smooth.re, c.smooth.im, c.smooth.norm(), c.detector.norm()]);
        }
    }
    Ok(Table { header, rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// JSON config (spec fields plus optional `oracle` and `cavity` sections).
    /// Defaults to the built-in reference configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Add exact finite-mode results.
    #[arg(long)]
    pub oracle: bool,
    /// Worker threads for sweeps.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Reserved; every computation is deterministic.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Parser)]
#[command(
    name = "vacdetect",
    version,
    about = "Photocurrent statistics of a vacuum-coupled two-level detector"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Steady current, efficiency factor and ξ; writes the full run record.
    Steady {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Oracle against closed forms with a convergence check.
    Validate {
        #[command(flatten)]
        common: CommonArgs,
        /// Modes per reservoir.
        #[arg(long)]
        mode_count: Option<usize>,
        /// Band half-width Ω of both reservoirs.
        #[arg(long)]
        bandwidth: Option<f64>,
    },
    /// Closed-form observables along one parameter axis.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum)]
        axis: SweepAxis,
        /// `a,b,c` or `start:stop:count`.
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
    },
    /// Stationary two-time correlation on a lag grid.
    Correlate {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, allow_hyphen_values = true)]
        tau_max: f64,
        #[arg(long, default_value_t = 101)]
        points: usize,
    },
}

fn load_config(common: &CommonArgs) -> Result<RunConfig, Failure> {
    match &common.config {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::reference()),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| Failure::Other(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("records serialize");
    s.push('\n');
    s
}

fn run_command(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Steady { common } => {
            let cfg = load_config(common)?;
            let result = cmd_steady(&cfg, common.oracle)?;
            let s = &result.steady_summary;
            eprintln!("steady current    {}", s.mean_current);
            eprintln!("efficiency factor {}", s.efficiency_factor);
            eprintln!("xi                {}", s.xi);
            let text = match common.format.unwrap_or(Format::Json) {
                Format::Json => pretty(&result),
                Format::Csv => result.trace_csv(),
            };
            emit(common.out.as_deref(), &text)
        }
        Command::Validate {
            common,
            mode_count,
            bandwidth,
        } => {
            let mut cfg = load_config(common)?;
            if mode_count.is_some() {
                cfg.oracle.mode_count = *mode_count;
            }
            if bandwidth.is_some() {
                cfg.oracle.bandwidth = *bandwidth;
            }
            let outcome = cmd_validate(&cfg)?;
            let text = match common.format.unwrap_or(Format::Csv) {
                Format::Csv => validation_csv(&outcome),
                Format::Json => pretty(&outcome),
            };
            emit(common.out.as_deref(), &text)?;
            for r in &outcome.rows {
                eprintln!(
                    "{:<32} {:>14.6e} vs {:>14.6e}  err {:.3e} tol {:.1e}  {}{}",
                    r.check,
                    r.value,
                    r.reference,
                    r.rel_error,
                    r.tolerance,
                    if r.pass { "pass" } else { "FAIL" },
                    if r.gating { "" } else { " (info)" }
                );
            }
            if outcome.passed() {
                Ok(())
            } else {
                let names: Vec<&str> = outcome
                    .failures()
                    .iter()
                    .map(|r| r.check.as_str())
                    .collect();
                Err(Failure::Tolerance(names.join(", ")))
            }
        }
        Command::Sweep { common, axis, grid } => {
            let cfg = load_config(common)?;
            let grid = parse_grid(grid)?;
            let table = cmd_sweep(&cfg, *axis, &grid, common.oracle, common.jobs)?;
            let text = match common.format.unwrap_or(Format::Csv) {
                Format::Csv => table.to_csv(),
                Format::Json => pretty(&table.to_json()),
            };
            emit(common.out.as_deref(), &text)
        }
        Command::Correlate {
            common,
            tau_max,
            points,
        } => {
            let cfg = load_config(common)?;
            let table = cmd_correlate(&cfg, *tau_max, *points, common.oracle)?;
            let text = match common.format.unwrap_or(Format::Csv) {
                Format::Csv => table.to_csv(),
                Format::Json => pretty(&table.to_json()),
            };
            emit(common.out.as_deref(), &text)
        }
    }
}

/// Runs a parsed command line and maps failures to exit codes.
pub fn execute(cli: &Cli) -> ExitCode {
    match run_command(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{f}");
            ExitCode::from(f.exit_code())
        }
    }
}
