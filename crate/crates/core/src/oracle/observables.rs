//! Photocurrent statistics as mode sums over the propagator.
//!
//! The current operator is `i = Σ_l ṅ_l = i (S† b - b† S)` with
//! `S = Σ_l g_l c_l` over the electronic band. Under a coherent drive every
//! amplitude is `α` times a fixed linear response, so all moments reduce to
//! the drive response plus vacuum commutators `[X(t1), Y†(t2)]`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::discretize::DiscretizedSystem;
use super::transfer::{DriveResponse, TransferMatrix};
use crate::error::{Error, Result};

/// Drive-induced amplitudes at one time, per unit `α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: f64,
    /// Detector amplitude.
    pub b: Complex64,
    /// `Σ_l g_l c_l` over the electronic band.
    pub s: Complex64,
    /// `f_L(t)`, the detector response to the laser mode.
    pub f_laser: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleVariance {
    pub t: f64,
    pub mean_current: f64,
    pub variance: f64,
    /// `variance / mean_current`
    pub ratio: f64,
    /// `|α|² |Σ_l g_l p_lL|²`
    pub source_term: f64,
    /// `|α|² g_L² |f_L|² Σ_l g_l²`
    pub vacuum_term: f64,
    /// `-2 |α|⁴ g_L² Re(A²)`, `A = f_L* Σ_l g_l p_lL`
    pub cross_term: f64,
}

/// `⟨i(t1) i(t2)⟩` split by origin. `smooth` drops the coherent product and
/// the free-reservoir delta-like term, leaving the part compared with the
/// stationary closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTerms {
    pub t1: f64,
    pub t2: f64,
    /// `⟨i(t1)⟩⟨i(t2)⟩`
    pub coherent: Complex64,
    /// Source amplitude times the detector commutator.
    pub detector: Complex64,
    /// Detector amplitude times the current-source commutator.
    pub reservoir: Complex64,
    pub cross_bs: Complex64,
    pub cross_sb: Complex64,
    /// `β*(t1) β(t2) Σ_l g_l² e^{i w_l τ}`
    pub free_chi: Complex64,
    pub total: Complex64,
    pub smooth: Complex64,
}

/// Evaluates observables of one propagated system. Construction costs one
/// projection per observable direction.
#[derive(Debug, Clone)]
pub struct Observer<'a> {
    sys: &'a DiscretizedSystem,
    u: &'a TransferMatrix,
    drive: DriveResponse,
    apex: Vec<f64>,
    /// `Σ_l g_l V_ln`
    source_proj: Vec<f64>,
    coupling_sq_sum: f64,
    intensity: f64,
    step: f64,
}

impl<'a> Observer<'a> {
    /// `step` is the finite-difference step of [`Observer::mean_current`].
    pub fn new(sys: &'a DiscretizedSystem, u: &'a TransferMatrix, step: f64) -> Self {
        let g = sys.electronic_coupling_vector();
        Observer {
            sys,
            u,
            drive: DriveResponse::new(u, sys),
            apex: u.eigen().apex_components(),
            source_proj: u.project(&g),
            coupling_sq_sum: g.iter().map(|x| x * x).sum(),
            intensity: sys.spec.drive.intensity(),
            step,
        }
    }

    pub fn snapshot(&self, t: f64) -> Snapshot {
        let c = self.drive.coefficients(t);
        let dot = |w: &[f64]| -> Complex64 { c.iter().zip(w).map(|(c, &w)| c * w).sum() };
        Snapshot {
            t,
            b: dot(&self.apex),
            s: dot(&self.source_proj),
            f_laser: self.drive.laser_kernel_f(t, &self.apex),
        }
    }

    /// `Σ_l |c_l(t)|²` over the electronic band, including `|α|²`.
    pub fn electronic_population(&self, t: f64) -> f64 {
        let c = self.drive.coefficients(t);
        let amps = self.u.eigen().synthesize(&c, self.sys.electronic.clone());
        self.intensity * amps.iter().map(Complex64::norm_sqr).sum::<f64>()
    }

    /// Mean current as the time derivative of the electronic population,
    /// centered difference (second-order forward difference near `t = 0`).
    pub fn mean_current(&self, t: f64) -> f64 {
        let h = self.step;
        if t >= h {
            (self.electronic_population(t + h) - self.electronic_population(t - h)) / (2.0 * h)
        } else {
            let p = |s: f64| self.electronic_population(s);
            (-3.0 * p(t) + 4.0 * p(t + h) - p(t + 2.0 * h)) / (2.0 * h)
        }
    }

    /// Mean current from the flux form `-2 |α|² Im(S* b)`, exact and `O(dim)`.
    pub fn flux_current(&self, t: f64) -> f64 {
        let s = self.snapshot(t);
        self.flux_of(&s)
    }

    fn flux_of(&self, s: &Snapshot) -> f64 {
        -2.0 * self.intensity * (s.s.conj() * s.b).im
    }

    pub fn variance(&self, t: f64) -> OracleVariance {
        let snap = self.snapshot(t);
        let a2 = self.intensity;
        let g_l = self.sys.spec.drive.coupling;
        // Σ_l g_l p_lL = -S per unit α
        let gp = -snap.s;
        let source_term = a2 * gp.norm_sqr();
        let vacuum_term = a2 * g_l * g_l * snap.f_laser.norm_sqr() * self.coupling_sq_sum;
        let a = snap.f_laser.conj() * gp;
        let cross_term = -2.0 * a2 * a2 * g_l * g_l * (a * a).re;
        let variance = source_term + vacuum_term + cross_term;
        let mean_current = self.flux_of(&snap);
        OracleVariance {
            t,
            mean_current,
            variance,
            ratio: variance / mean_current,
            source_term,
            vacuum_term,
            cross_term,
        }
    }

    /// `K_XY(τ) = Σ_n x_n y_n e^{i λ_n τ}` in the lab frame.
    fn commutator(&self, x: &[f64], y: &[f64], tau: f64) -> Complex64 {
        let w = self.u.w_eps();
        x.iter()
            .zip(y)
            .zip(self.u.eigenvalues())
            .map(|((a, b), &l)| Complex64::from_polar(a * b, (l + w) * tau))
            .sum()
    }

    /// `Σ_l g_l² e^{i w_l τ}` of the uncoupled electronic band.
    pub fn free_chi(&self, tau: f64) -> Complex64 {
        self.sys
            .electronic
            .clone()
            .map(|l| {
                let g = self.sys.couplings[l];
                Complex64::from_polar(g * g, self.sys.frequencies[l] * tau)
            })
            .sum()
    }

    pub fn correlation(&self, t1: f64, t2: f64) -> Result<CorrelationTerms> {
        if t2 < t1 {
            return Err(Error::TimeOrder { t1, t2 });
        }
        if t1 < 0.0 {
            return Err(Error::NegativeTime(t1));
        }
        let first = self.snapshot(t1);
        Ok(self.correlation_from(&first, t2))
    }

    /// Correlations at fixed `t1` for every lag in `taus` (all `>= 0`).
    pub fn correlation_trace(&self, t1: f64, taus: &[f64]) -> Result<Vec<CorrelationTerms>> {
        if t1 < 0.0 {
            return Err(Error::NegativeTime(t1));
        }
        if let Some(&tau) = taus.iter().find(|&&tau| !(tau >= 0.0)) {
            return Err(Error::NegativeLag(tau));
        }
        let first = self.snapshot(t1);
        Ok(taus
            .iter()
            .map(|&tau| self.correlation_from(&first, t1 + tau))
            .collect())
    }

    fn correlation_from(&self, first: &Snapshot, t2: f64) -> CorrelationTerms {
        let second = self.snapshot(t2);
        let t1 = first.t;
        let tau = t2 - t1;
        let (beta1, beta2) = (
            first.b * self.sys.spec.drive.alpha,
            second.b * self.sys.spec.drive.alpha,
        );
        let (sigma1, sigma2) = (
            first.s * self.sys.spec.drive.alpha,
            second.s * self.sys.spec.drive.alpha,
        );
        let k_bb = self.commutator(&self.apex, &self.apex, tau);
        let k_ss = self.commutator(&self.source_proj, &self.source_proj, tau);
        let k_bs = self.commutator(&self.apex, &self.source_proj, tau);
        let k_sb = k_bs;
        let coherent = Complex64::from(self.flux_of(first) * self.flux_of(&second));
        let detector = sigma1.conj() * sigma2 * k_bb;
        let reservoir = beta1.conj() * beta2 * k_ss;
        let cross_bs = -sigma1.conj() * beta2 * k_bs;
        let cross_sb = -beta1.conj() * sigma2 * k_sb;
        let free_chi = beta1.conj() * beta2 * self.free_chi(tau);
        let total = coherent + detector + reservoir + cross_bs + cross_sb;
        CorrelationTerms {
            t1,
            t2,
            coherent,
            detector,
            reservoir,
            cross_bs,
            cross_sb,
            free_chi,
            total,
            smooth: total - coherent - free_chi,
        }
    }
}

/// Mean current at `t` by centered difference of the electronic population.
pub fn oracle_mean_current(u: &TransferMatrix, sys: &DiscretizedSystem, t: f64, step: f64) -> f64 {
    Observer::new(sys, u, step).mean_current(t)
}

pub fn oracle_variance(u: &TransferMatrix, sys: &DiscretizedSystem, t: f64) -> OracleVariance {
    Observer::new(sys, u, 0.0).variance(t)
}

pub fn oracle_correlation(
    u: &TransferMatrix,
    sys: &DiscretizedSystem,
    t1: f64,
    t2: f64,
) -> Result<CorrelationTerms> {
    Observer::new(sys, u, 0.0).correlation(t1, t2)
}

/// `∫_{-T}^{T} Σ_l g_l² e^{i (w_l - w_c) τ} dτ` over the electronic band, the
/// discrete stand-in for the weight of `2γ₁ δ(τ)`.
pub fn discrete_delta_weight(sys: &DiscretizedSystem, half_window: f64) -> f64 {
    let wc = sys.spec.electronic.center_frequency;
    sys.electronic
        .clone()
        .map(|l| {
            let g2 = sys.couplings[l] * sys.couplings[l];
            let d = sys.frequencies[l] - wc;
            if d == 0.0 {
                2.0 * half_window * g2
            } else {
                2.0 * g2 * (d * half_window).sin() / d
            }
        })
        .sum()
}
