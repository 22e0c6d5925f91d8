//! Bad-cavity design calculator: the branching ratio `ξ = g² / (κ γ₁)` and how
//! quantum efficiency and shot noise move as the cavity linewidth is tuned.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::analytic::{current_variance, quantum_efficiency};
use crate::error::{Error, Result};
use crate::model::SystemSpec;

/// Bad-cavity limit requires `κ >= BAD_CAVITY_FACTOR · g`.
pub const BAD_CAVITY_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CavityConfig {
    /// Detector coupling to the resonant cavity mode.
    pub g_ke: f64,
    /// Cavity linewidth, the bandwidth of the vacuum reservoir.
    pub kappa: f64,
    pub gamma_1: f64,
    /// Additional loss channels `ξ_i = γ_i / γ₁`.
    #[serde(default)]
    pub other_loss_ratios: Vec<f64>,
}

impl CavityConfig {
    pub fn is_bad_cavity(&self) -> bool {
        self.kappa >= BAD_CAVITY_FACTOR * self.g_ke
    }

    pub fn with_kappa(&self, kappa: f64) -> Self {
        CavityConfig {
            kappa,
            ..self.clone()
        }
    }

    fn check(&self) -> Result<()> {
        if !(self.kappa > 0.0) {
            return Err(Error::Cavity(format!(
                "kappa must be positive, got {}",
                self.kappa
            )));
        }
        if !(self.gamma_1 > 0.0) {
            return Err(Error::Cavity(format!(
                "gamma_1 must be positive, got {}",
                self.gamma_1
            )));
        }
        if !(self.g_ke >= 0.0) {
            return Err(Error::Cavity(format!(
                "g_ke must be non-negative, got {}",
                self.g_ke
            )));
        }
        if let Some(x) = self.other_loss_ratios.iter().find(|x| !(**x >= 0.0)) {
            return Err(Error::Cavity(format!(
                "loss ratio must be non-negative, got {x}"
            )));
        }
        Ok(())
    }
}

/// Radiative contribution `g² / (κ γ₁)` alone.
pub fn xi_radiative(cfg: &CavityConfig) -> Result<f64> {
    cfg.check()?;
    Ok(cfg.g_ke * cfg.g_ke / (cfg.kappa * cfg.gamma_1))
}

/// Total branching ratio `g² / (κ γ₁) + Σ ξ_i`. Computed even outside the
/// bad-cavity regime; check [`CavityConfig::is_bad_cavity`] for validity.
pub fn xi_bad_cavity(cfg: &CavityConfig) -> Result<f64> {
    Ok(xi_radiative(cfg)? + cfg.other_loss_ratios.iter().sum::<f64>())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaRow {
    pub kappa: f64,
    pub xi: f64,
    pub efficiency: f64,
    pub shot_noise_ratio: f64,
}

/// One row per linewidth. The shot-noise ratio is the steady-state
/// variance-to-mean ratio of a detector with `γ₂ = ξ γ₁`, driven and
/// band-limited as in `base`.
pub fn efficiency_vs_kappa(
    cfg: &CavityConfig,
    kappa_grid: &[f64],
    base: &SystemSpec,
) -> Result<Vec<KappaRow>> {
    if kappa_grid.iter().any(|&k| !(k > 0.0)) || kappa_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Grid(
            "kappa grid must be positive and ascending".into(),
        ));
    }
    kappa_grid
        .iter()
        .map(|&kappa| {
            let xi = xi_bad_cavity(&cfg.with_kappa(kappa))?;
            let spec = base.with_gammas(cfg.gamma_1, xi * cfg.gamma_1);
            Ok(KappaRow {
                kappa,
                xi,
                efficiency: quantum_efficiency(xi)?,
                shot_noise_ratio: current_variance(&spec).fano_ratio,
            })
        })
        .collect()
}

pub const KAPPA_CSV_HEADER: [&str; 4] = ["kappa", "xi", "efficiency", "shot_noise_ratio"];

pub fn write_kappa_csv<W: Write>(rows: &[KappaRow], out: W) -> Result<()> {
    let mut w = csv_writer(out, &KAPPA_CSV_HEADER)?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{}",
            r.kappa, r.xi, r.efficiency, r.shot_noise_ratio
        )?;
    }
    Ok(())
}

fn csv_writer<W: Write>(mut out: W, header: &[&str]) -> Result<W> {
    writeln!(out, "{}", header.join(","))?;
    Ok(out)
}
