//! Markov-approximation observables of the photocurrent.
//!
//! The current is the rate at which quanta accumulate in the electronic
//! reservoir. Under Markov damping the detector behaves as a driven damped
//! oscillator and every observable follows from the single kernel `f_L`
//! evaluated at the laser frequency.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{kernel_f, KernelArgs};
use crate::model::{ReservoirSpec, SystemSpec};

fn laser_args(spec: &SystemSpec, t: f64) -> KernelArgs {
    KernelArgs::single(
        spec.drive.laser_frequency,
        spec.detector.transition_frequency,
        spec.gamma_total(),
        spec.drive.coupling,
        t,
    )
}

/// `2 |α|² γ₁ g_L² |f_L(t)|²` for a detector switched on at `t = 0`.
pub fn mean_current_transient(spec: &SystemSpec, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::NegativeTime(t));
    }
    let f = kernel_f(&laser_args(spec, t));
    Ok(2.0
        * spec.drive.intensity()
        * spec.electronic.gamma
        * spec.drive.coupling.powi(2)
        * f.norm_sqr())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyStateSummary {
    pub mean_current: f64,
    /// `1 / (1 + ξ)²`
    pub efficiency_factor: f64,
    /// Current of an ideal (`ξ = 0`) detector at resonance, `2 g_L² |α|² / γ₁`.
    pub normally_ordered_current: f64,
    pub detuning: f64,
}

/// Lorentzian steady-state current `2 γ₁ g_L² |α|² / (γ_ε² + Δ²)`.
pub fn mean_current_steady(spec: &SystemSpec) -> SteadyStateSummary {
    let gamma_1 = spec.electronic.gamma;
    let drive = spec.drive.coupling.powi(2) * spec.drive.intensity();
    let detuning = spec.detuning();
    let gamma = spec.gamma_total();
    SteadyStateSummary {
        mean_current: 2.0 * gamma_1 * drive / (gamma * gamma + detuning * detuning),
        efficiency_factor: 1.0 / (1.0 + spec.xi()).powi(2),
        normally_ordered_current: 2.0 * drive / gamma_1,
        detuning,
    }
}

/// Quantum-efficiency factor `1 / (1 + ξ)²`.
pub fn quantum_efficiency(xi: f64) -> Result<f64> {
    if !(xi >= 0.0) {
        return Err(Error::NegativeXi(xi));
    }
    Ok(1.0 / (1.0 + xi).powi(2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceSummary {
    pub mean_current: f64,
    /// `(Ω/π + γ₁/2) ⟨i⟩ - ⟨i⟩²/2`
    pub variance: f64,
    /// Wide-band shot-noise limit `(Ω/π) ⟨i⟩`.
    pub shot_noise: f64,
    /// `variance / ⟨i⟩`, zero when the current vanishes.
    pub fano_ratio: f64,
}

/// Steady-state current variance with the electronic bandwidth `Ω`.
pub fn current_variance(spec: &SystemSpec) -> VarianceSummary {
    let mean = mean_current_steady(spec).mean_current;
    let omega = spec.electronic.bandwidth;
    let variance = (omega / PI + 0.5 * spec.electronic.gamma) * mean - 0.5 * mean * mean;
    VarianceSummary {
        mean_current: mean,
        variance,
        shot_noise: omega / PI * mean,
        fano_ratio: if mean > 0.0 { variance / mean } else { 0.0 },
    }
}

/// Weight of the delta-correlated electronic-reservoir term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElectronicCorrelation {
    /// `∫ χ_e(τ) dτ = 2 γ₁ Ω / π`
    pub weight: f64,
}

/// Stationary `⟨i(t) i(t+τ)⟩` to order `g_L²`.
///
/// `values` holds the smooth part; the full correlation is
/// `values(τ) + delta_coefficient · δ(τ)`. The `O(g_L⁴)` tail is truncated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTrace {
    pub tau_grid: Vec<f64>,
    pub values: Vec<Complex64>,
    pub electronic_correlation_model: ElectronicCorrelation,
    pub delta_coefficient: f64,
}

impl CorrelationTrace {
    pub fn envelope(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }
}

pub fn correlation_stationary(spec: &SystemSpec, tau_grid: &[f64]) -> Result<CorrelationTrace> {
    if let Some(&tau) = tau_grid.iter().find(|&&t| !(t >= 0.0)) {
        return Err(Error::NegativeLag(tau));
    }
    let gamma_1 = spec.electronic.gamma;
    let gamma = spec.gamma_total();
    let detuning = spec.detuning();
    let prefactor = spec.drive.coupling.powi(2) * spec.drive.intensity()
        / (gamma * gamma + detuning * detuning);
    // e^{-i w_L τ} e^{(i w_ε - γ_ε) τ}
    let values = tau_grid
        .iter()
        .map(|&tau| {
            prefactor * gamma_1 * gamma_1 * Complex64::new(-gamma * tau, -detuning * tau).exp()
        })
        .collect();
    let weight = 2.0 * gamma_1 * spec.electronic.bandwidth / PI;
    Ok(CorrelationTrace {
        tau_grid: tau_grid.to_vec(),
        values,
        electronic_correlation_model: ElectronicCorrelation { weight },
        delta_coefficient: prefactor * weight,
    })
}

/// `2γ`, the coefficient of `δ(t - t')` in `Σ_l g_l² e^{i w_l (t - t')}`.
pub fn markov_delta_weight(reservoir: &ReservoirSpec) -> f64 {
    2.0 * reservoir.gamma
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn reference() -> SystemSpec {
        SystemSpec::reference()
    }

    #[test]
    fn transient_limits() {
        let spec = reference();
        assert_eq!(mean_current_transient(&spec, 0.0).unwrap(), 0.0);
        let dark = spec.with_alpha(Complex64::new(0.0, 0.0));
        assert_eq!(mean_current_transient(&dark, 7.0).unwrap(), 0.0);
        let late = mean_current_transient(&spec, 10.0).unwrap();
        assert!((late - 0.02).abs() < 1e-8 * 0.02 + 2.0 * 0.02 * (-10.0f64).exp());
        assert!(mean_current_transient(&spec, -1.0).is_err());
    }

    #[test]
    fn steady_examples() {
        let spec = reference();
        assert_relative_eq!(
            mean_current_steady(&spec).mean_current,
            0.02,
            epsilon = 1e-15
        );
        let lossy = spec.with_gammas(1.0, 1.0);
        let s = mean_current_steady(&lossy);
        assert_relative_eq!(s.mean_current, 0.005, epsilon = 1e-15);
        assert_relative_eq!(s.efficiency_factor, 0.25);
        assert_relative_eq!(
            s.mean_current,
            s.efficiency_factor * s.normally_ordered_current,
            epsilon = 1e-15
        );
        let half = spec.with_detuning(1.0);
        assert_relative_eq!(
            mean_current_steady(&half).mean_current,
            0.01,
            epsilon = 1e-15
        );
    }

    #[test]
    fn efficiency_examples() {
        assert_eq!(quantum_efficiency(0.0).unwrap(), 1.0);
        assert_eq!(quantum_efficiency(1.0).unwrap(), 0.25);
        assert_eq!(quantum_efficiency(3.0).unwrap(), 0.0625);
        assert!(matches!(
            quantum_efficiency(-0.1),
            Err(Error::NegativeXi(_))
        ));
    }

    #[test]
    fn variance_examples() {
        let dark = reference().with_alpha(Complex64::new(0.0, 0.0));
        let v = current_variance(&dark);
        assert_eq!(v.variance, 0.0);
        assert_eq!(v.fano_ratio, 0.0);

        let spec = reference().with_bandwidth(100.0 * PI);
        let v = current_variance(&spec);
        assert_relative_eq!(v.variance, 2.0098, epsilon = 1e-12);

        let wide = reference().with_bandwidth(1000.0);
        let v = current_variance(&wide);
        let ratio = v.fano_ratio / (1000.0 / PI);
        assert!((ratio - 1.0).abs() < 0.01);
    }

    #[test]
    fn correlation_envelope() {
        let spec = reference().with_gammas(0.5, 0.5);
        let gamma = spec.gamma_total();
        let trace = correlation_stationary(&spec, &[0.0, 1.0 / gamma, 40.0]).unwrap();
        let env = trace.envelope();
        assert_relative_eq!(env[0], 0.0025, epsilon = 1e-15);
        assert_relative_eq!(env[1] / env[0], (-1.0f64).exp(), epsilon = 1e-14);
        assert!(env[2] < 1e-18);
        assert_relative_eq!(
            trace.electronic_correlation_model.weight,
            2.0 * 0.5 * 40.0 / PI
        );
        assert!(correlation_stationary(&spec, &[0.0, -0.1]).is_err());
    }

    #[test]
    fn delta_weight() {
        let spec = reference().with_gammas(1.0, 0.5);
        assert_eq!(markov_delta_weight(&spec.electronic), 2.0);
        assert_eq!(markov_delta_weight(&spec.radiative), 1.0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn spec(g2: f64, detuning: f64, alpha: f64) -> SystemSpec {
            reference()
                .with_gammas(1.0, g2)
                .with_detuning(detuning)
                .with_alpha(Complex64::new(alpha, 0.0))
        }

        proptest! {
            #[test]
            fn lorentzian_symmetry(g2 in 0.0f64..3.0, d in 0.0f64..10.0) {
                let up = mean_current_steady(&spec(g2, d, 1.0)).mean_current;
                let down = mean_current_steady(&spec(g2, -d, 1.0)).mean_current;
                prop_assert_eq!(up, down);
            }

            #[test]
            fn half_maximum_at_gamma_total(g1 in 0.1f64..5.0, g2 in 0.0f64..5.0) {
                let base = reference().with_gammas(g1, g2);
                let gamma = base.gamma_total();
                let peak = mean_current_steady(&base).mean_current;
                let half = mean_current_steady(&base.with_detuning(gamma)).mean_current;
                prop_assert!((half / peak - 0.5).abs() < 1e-12);
            }

            #[test]
            fn current_decreases_with_xi(g2 in 0.0f64..5.0, step in 1e-3f64..1.0, d in -3.0f64..3.0) {
                let a = mean_current_steady(&spec(g2, d, 1.0)).mean_current;
                let b = mean_current_steady(&spec(g2 + step, d, 1.0)).mean_current;
                prop_assert!(b < a);
            }

            #[test]
            fn intensity_scaling(alpha in 0.01f64..3.0, k in 1.1f64..4.0) {
                let lo = spec(0.5, 0.3, alpha);
                let hi = spec(0.5, 0.3, alpha * k.sqrt());
                let (m1, m2) = (mean_current_steady(&lo).mean_current, mean_current_steady(&hi).mean_current);
                prop_assert!((m2 / m1 - k).abs() < 1e-12 * k);
                // linear part scales as |α|², the -⟨i⟩²/2 correction as |α|⁴
                let (v1, v2) = (current_variance(&lo), current_variance(&hi));
                let lin = |v: &VarianceSummary| v.variance + 0.5 * v.mean_current.powi(2);
                prop_assert!((lin(&v2) / lin(&v1) - k).abs() < 1e-10 * k);
                let quad = |v: &VarianceSummary| 0.5 * v.mean_current.powi(2);
                prop_assert!((quad(&v2) / quad(&v1) - k * k).abs() < 1e-10 * k * k);
            }

            #[test]
            fn transient_approaches_steady(g2 in 0.0f64..2.0, d in -2.0f64..2.0, t in 0.0f64..30.0) {
                let s = spec(g2, d, 1.0);
                let gamma = s.gamma_total();
                let steady = mean_current_steady(&s).mean_current;
                let now = mean_current_transient(&s, t).unwrap();
                // |f|² = |1 - e^{-(γ + iΔ)t}|² / (γ² + Δ²) ⇒ deviation ≤ 3 e^{-γ t} · steady
                prop_assert!((now - steady).abs() <= 3.0 * steady * (-gamma * t).exp() + 1e-14 * steady);
            }
        }
    }

    #[test]
    fn transient_decay_rate_fit() {
        let spec = reference().with_gammas(1.0, 0.5).with_detuning(0.0);
        let gamma = spec.gamma_total();
        let steady = mean_current_steady(&spec).mean_current;
        // at resonance steady - i(t) = steady (2 e^{-γt} - e^{-2γt})
        let t: Vec<f64> = (0..40).map(|j| 4.0 + 0.25 * j as f64).collect();
        let dev: Vec<f64> = t
            .iter()
            .map(|&t| steady - mean_current_transient(&spec, t).unwrap())
            .collect();
        let (rate, _) = crate::fit::fit_decay(&t, &dev).unwrap();
        assert!((rate / gamma - 1.0).abs() < 0.01, "{rate}");
    }
}
