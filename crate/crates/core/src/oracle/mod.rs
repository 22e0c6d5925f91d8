//! Exact reference for the Markov closed forms.
//!
//! Both reservoirs are replaced by finite bands of explicit modes and the
//! linear (weak-excitation) equations of motion are solved without further
//! approximation. The coupling matrix is a real symmetric arrowhead, so its
//! eigendecomposition costs `O(dim²)` and the propagator is available in
//! closed spectral form at any time.

pub mod arrowhead;
pub mod discretize;
pub mod observables;
pub mod transfer;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::SystemSpec;

pub use discretize::{
    build_discretized, build_discretized_cached, calibrate_reservoir, CalibrationCache,
    CalibrationStatus, ChannelCalibration, DiscretizedSystem, ModeKind,
};
pub use observables::{
    discrete_delta_weight, oracle_correlation, oracle_mean_current, oracle_variance,
    CorrelationTerms, Observer, OracleVariance, Snapshot,
};
pub use transfer::{extract_kernels, propagate, DriveResponse, Source, TransferMatrix};

/// How the coherent drive enters the linear system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriveModel {
    /// Laser amplitude held at `α e^{-i w_L t}`; first order in `g_L`, which is
    /// the order of every closed form. Independent of `w_L` up to the source
    /// phase, so one diagonalization serves a whole detuning sweep.
    #[default]
    Undepleted,
    /// Laser as one explicit mode prepared in `|α⟩`. Depletes at a rate of
    /// order `g_L² / γ_ε`.
    SingleMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OracleSettings {
    /// Overrides the mode count of both reservoirs.
    pub mode_count: Option<usize>,
    /// Overrides the half-width of both reservoirs.
    pub bandwidth: Option<f64>,
    /// Finite-difference step of the mean current.
    pub dt: Option<f64>,
    pub horizon: Option<f64>,
    pub drive_model: DriveModel,
    pub calibrate: bool,
    /// Samples of the reported time traces, including both ends.
    pub trace_points: usize,
}

impl Default for OracleSettings {
    fn default() -> Self {
        OracleSettings {
            mode_count: None,
            bandwidth: None,
            dt: None,
            horizon: None,
            drive_model: DriveModel::Undepleted,
            calibrate: true,
            trace_points: 201,
        }
    }
}

impl OracleSettings {
    /// `min(0.05 / max|w - w_ε|, 1e-3 / γ_ε)` unless set.
    pub fn step(&self, spec: &SystemSpec) -> f64 {
        if let Some(dt) = self.dt {
            return dt;
        }
        let w = spec.detector.transition_frequency;
        let mut reach = (spec.drive.laser_frequency - w).abs();
        for r in [&spec.electronic, &spec.radiative] {
            let bw = self.bandwidth.unwrap_or(r.bandwidth);
            reach = reach.max((r.center_frequency - w).abs() + bw);
        }
        (0.05 / reach).min(1e-3 / spec.gamma_total())
    }

    /// `20 / γ_ε` unless set.
    pub fn horizon(&self, spec: &SystemSpec) -> f64 {
        self.horizon.unwrap_or(20.0 / spec.gamma_total())
    }

    pub fn time_grid(&self, spec: &SystemSpec) -> Vec<f64> {
        let h = self.horizon(spec);
        let n = self.trace_points.max(2);
        (0..n).map(|j| h * j as f64 / (n - 1) as f64).collect()
    }
}

/// A discretized, diagonalized system ready for observables.
#[derive(Debug, Clone)]
pub struct Oracle {
    pub sys: DiscretizedSystem,
    pub propagator: TransferMatrix,
    pub step: f64,
}

impl Oracle {
    pub fn new(spec: &SystemSpec, settings: &OracleSettings) -> Result<Self> {
        Self::with_cache(spec, settings, &CalibrationCache::new())
    }

    pub fn with_cache(
        spec: &SystemSpec,
        settings: &OracleSettings,
        cache: &CalibrationCache,
    ) -> Result<Self> {
        let sys = build_discretized_cached(spec, settings, cache)?;
        let grid = settings.time_grid(&sys.spec);
        let propagator = propagate(&sys, &grid)?;
        Ok(Oracle {
            step: settings.step(&sys.spec),
            sys,
            propagator,
        })
    }

    pub fn observer(&self) -> Observer<'_> {
        Observer::new(&self.sys, &self.propagator, self.step)
    }

    /// Same diagonalization, different drive. Valid for changes that leave
    /// the coupling matrix alone: `α`, `g_L`, and `w_L` in the undepleted model.
    pub fn redriven(&self, drive: crate::model::DriveSpec) -> Self {
        let mut o = self.clone();
        o.sys.spec.drive = drive;
        o
    }
}
