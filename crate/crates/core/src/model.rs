//! Physical parameter types shared by every other module.
//!
//! All rates and frequencies are expressed in a single user-chosen unit
//! (typically the electronic damping rate). No SI constants appear.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Minimum bandwidth-to-damping ratio for which the Markov closed forms are
/// considered valid.
pub const MARKOV_RATIO_MIN: f64 = 10.0;

/// Largest `g_L |alpha| / gamma_eps` accepted without a strong-excitation warning.
pub const WEAK_EXCITATION_MAX: f64 = 0.1;

/// The two-level transition. The ground-state energy is fixed at zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorSpec {
    pub transition_frequency: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReservoirKind {
    Electronic,
    Radiative,
}

impl ReservoirKind {
    pub fn name(self) -> &'static str {
        match self {
            ReservoirKind::Electronic => "electronic",
            ReservoirKind::Radiative => "radiative",
        }
    }
}

/// One damping channel of the detector.
///
/// `gamma` is the amplitude decay rate of the detector into this reservoir,
/// `bandwidth` the half-width of the mode band around `center_frequency`.
/// `mode_count` is only used when the reservoir is discretized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReservoirSpec {
    pub kind: ReservoirKind,
    pub gamma: f64,
    pub center_frequency: f64,
    pub bandwidth: f64,
    pub mode_count: usize,
}

impl ReservoirSpec {
    /// Spacing of the uniform mode grid spanning `[center - bandwidth, center + bandwidth]`.
    pub fn mode_spacing(&self) -> f64 {
        2.0 * self.bandwidth / (self.mode_count as f64 - 1.0)
    }

    /// Modes per unit angular frequency.
    pub fn density_of_states(&self) -> f64 {
        self.mode_count as f64 / (2.0 * self.bandwidth)
    }

    /// Per-mode coupling that reproduces `gamma` by the golden-rule estimate
    /// `gamma = pi g^2 / spacing`.
    pub fn nominal_coupling(&self) -> f64 {
        (self.gamma * self.mode_spacing() / std::f64::consts::PI).sqrt()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        let n = self.mode_count;
        let lo = self.center_frequency - self.bandwidth;
        let dw = self.mode_spacing();
        (0..n)
            .map(|j| {
                if j + 1 == n {
                    self.center_frequency + self.bandwidth
                } else {
                    lo + dw * j as f64
                }
            })
            .collect()
    }

    pub fn band(&self) -> (f64, f64) {
        (
            self.center_frequency - self.bandwidth,
            self.center_frequency + self.bandwidth,
        )
    }

    /// `bandwidth / gamma`; infinite for a switched-off reservoir.
    pub fn markov_ratio(&self) -> f64 {
        if self.gamma > 0.0 {
            self.bandwidth / self.gamma
        } else {
            f64::INFINITY
        }
    }

    pub fn is_markovian(&self) -> bool {
        self.markov_ratio() >= MARKOV_RATIO_MIN
    }
}

/// Coherent drive in the laser mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveSpec {
    pub alpha: Complex64,
    pub laser_frequency: f64,
    pub coupling: f64,
}

impl DriveSpec {
    /// `|alpha|^2`, the mean photon number of the coherent state.
    pub fn intensity(&self) -> f64 {
        self.alpha.norm_sqr()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub detector: DetectorSpec,
    pub electronic: ReservoirSpec,
    pub radiative: ReservoirSpec,
    pub drive: DriveSpec,
}

impl SystemSpec {
    /// Resonant reference configuration: `gamma_1 = 1`, `gamma_2 = 0`,
    /// `g_L = 0.1`, `|alpha|^2 = 1`, bands of half-width 40 with 2001 modes.
    pub fn reference() -> Self {
        let w_eps = 50.0;
        let reservoir = |kind, gamma| ReservoirSpec {
            kind,
            gamma,
            center_frequency: w_eps,
            bandwidth: 40.0,
            mode_count: 2001,
        };
        SystemSpec {
            detector: DetectorSpec {
                transition_frequency: w_eps,
            },
            electronic: reservoir(ReservoirKind::Electronic, 1.0),
            radiative: reservoir(ReservoirKind::Radiative, 0.0),
            drive: DriveSpec {
                alpha: Complex64::new(1.0, 0.0),
                laser_frequency: w_eps,
                coupling: 0.1,
            },
        }
    }

    pub fn with_gammas(mut self, gamma_1: f64, gamma_2: f64) -> Self {
        self.electronic.gamma = gamma_1;
        self.radiative.gamma = gamma_2;
        self
    }

    pub fn with_detuning(mut self, detuning: f64) -> Self {
        self.drive.laser_frequency = self.detector.transition_frequency + detuning;
        self
    }

    pub fn with_alpha(mut self, alpha: Complex64) -> Self {
        self.drive.alpha = alpha;
        self
    }

    /// Sets the half-width of both reservoir bands.
    pub fn with_bandwidth(mut self, bandwidth: f64) -> Self {
        self.electronic.bandwidth = bandwidth;
        self.radiative.bandwidth = bandwidth;
        self
    }

    pub fn with_mode_count(mut self, mode_count: usize) -> Self {
        self.electronic.mode_count = mode_count;
        self.radiative.mode_count = mode_count;
        self
    }

    /// Total detector damping `gamma_eps = gamma_1 + gamma_2`.
    pub fn gamma_total(&self) -> f64 {
        self.electronic.gamma + self.radiative.gamma
    }

    /// Branching ratio `gamma_2 / gamma_1`.
    pub fn xi(&self) -> f64 {
        self.radiative.gamma / self.electronic.gamma
    }

    /// Laser detuning `w_L - w_eps`.
    pub fn detuning(&self) -> f64 {
        self.drive.laser_frequency - self.detector.transition_frequency
    }

    pub fn weak_excitation_ratio(&self) -> f64 {
        self.drive.coupling * self.drive.alpha.norm() / self.gamma_total()
    }

    pub fn reservoir(&self, kind: ReservoirKind) -> &ReservoirSpec {
        match kind {
            ReservoirKind::Electronic => &self.electronic,
            ReservoirKind::Radiative => &self.radiative,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<String>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for v in &self.violations {
            writeln!(f, "violation: {v}")?;
        }
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        Ok(())
    }
}

fn check_reservoir(slot: ReservoirKind, r: &ReservoirSpec, report: &mut ValidationReport) {
    let name = slot.name();
    if r.kind != slot {
        report.violations.push(format!(
            "{name} reservoir declared with kind {}",
            r.kind.name()
        ));
    }
    let gamma_ok = match slot {
        ReservoirKind::Electronic => r.gamma > 0.0,
        // gamma_2 = 0 switches the vacuum channel off.
        ReservoirKind::Radiative => r.gamma >= 0.0,
    };
    if !(gamma_ok && r.gamma.is_finite()) {
        report
            .violations
            .push(format!("{name} gamma must be positive, got {}", r.gamma));
    }
    if !(r.bandwidth > 0.0 && r.bandwidth.is_finite()) {
        report.violations.push(format!(
            "{name} bandwidth must be positive, got {}",
            r.bandwidth
        ));
    }
    if !r.center_frequency.is_finite() {
        report
            .violations
            .push(format!("{name} center frequency is not finite"));
    }
    if r.mode_count < 3 || r.mode_count % 2 == 0 {
        report.violations.push(format!(
            "{name} mode_count must be odd and >= 3, got {}",
            r.mode_count
        ));
    }
    if r.gamma > 0.0 && !r.is_markovian() {
        report.warnings.push(format!(
            "non-Markovian: {name} Ω/γ = {} < {MARKOV_RATIO_MIN}",
            r.markov_ratio()
        ));
    }
}

/// Checks every invariant of the specification. Never fails; violations and
/// warnings are collected in the report.
pub fn validate(spec: &SystemSpec) -> ValidationReport {
    let mut report = ValidationReport::default();
    let w_eps = spec.detector.transition_frequency;
    if !(w_eps > 0.0 && w_eps.is_finite()) {
        report.violations.push(format!(
            "transition frequency must be positive, got {w_eps}"
        ));
    }
    check_reservoir(ReservoirKind::Electronic, &spec.electronic, &mut report);
    check_reservoir(ReservoirKind::Radiative, &spec.radiative, &mut report);

    let d = &spec.drive;
    if !(d.alpha.re.is_finite() && d.alpha.im.is_finite()) {
        report
            .violations
            .push("drive amplitude is not finite".into());
    }
    if !(d.coupling >= 0.0 && d.coupling.is_finite()) {
        report.violations.push(format!(
            "drive coupling must be non-negative, got {}",
            d.coupling
        ));
    }
    if !d.laser_frequency.is_finite() {
        report
            .violations
            .push("laser frequency is not finite".into());
    }
    if report.violations.is_empty() {
        let ratio = spec.weak_excitation_ratio();
        if ratio > WEAK_EXCITATION_MAX {
            report.warnings.push(format!(
                "weak-excitation ratio {ratio} > {WEAK_EXCITATION_MAX}"
            ));
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_spec_has_empty_report() {
        let mut spec = SystemSpec::reference().with_gammas(1.0, 0.5);
        spec.drive.coupling = 0.01;
        let report = validate(&spec);
        assert!(report.violations.is_empty());
        assert!(report.warnings.is_empty(), "{report}");
    }

    #[test]
    fn narrow_band_is_flagged_non_markovian() {
        let spec = SystemSpec::reference().with_bandwidth(2.0);
        let report = validate(&spec);
        assert!(report.is_valid());
        assert_eq!(report.warnings.len(), 1);
        assert!(report.warnings[0].starts_with("non-Markovian"));
        assert!(report.warnings[0].contains("Ω/γ"));
    }

    #[test]
    fn strong_drive_is_flagged() {
        let mut spec = SystemSpec::reference();
        spec.drive.coupling = 1.0;
        spec.drive.alpha = Complex64::new(10.0, 0.0);
        let report = validate(&spec);
        assert!(report.is_valid());
        assert_eq!(
            report.warnings,
            vec!["weak-excitation ratio 10 > 0.1".to_string()]
        );
    }

    #[test]
    fn even_mode_count_and_bad_gamma_are_violations() {
        let mut spec = SystemSpec::reference().with_mode_count(2000);
        spec.electronic.gamma = 0.0;
        spec.radiative.gamma = -1.0;
        let report = validate(&spec);
        assert_eq!(report.violations.len(), 4, "{report}");
    }

    #[test]
    fn swapped_kinds_are_violations() {
        let mut spec = SystemSpec::reference();
        std::mem::swap(&mut spec.electronic.kind, &mut spec.radiative.kind);
        assert_eq!(validate(&spec).violations.len(), 2);
    }

    #[test]
    fn grid_contains_center_exactly() {
        let r = SystemSpec::reference().electronic;
        let w = r.frequencies();
        assert_eq!(w.len(), 2001);
        assert_eq!(w[1000], r.center_frequency);
        assert_eq!(*w.last().unwrap(), r.center_frequency + r.bandwidth);
        assert!((r.density_of_states() - 2001.0 / 80.0).abs() < 1e-12);
    }

    #[test]
    fn json_field_names() {
        let json = serde_json::to_value(SystemSpec::reference()).unwrap();
        let e = &json["electronic"];
        for key in [
            "kind",
            "gamma",
            "center_frequency",
            "bandwidth",
            "mode_count",
        ] {
            assert!(e.get(key).is_some(), "{key}");
        }
        assert_eq!(e["kind"], "electronic");
        assert!(json["drive"].get("laser_frequency").is_some());
        assert!(json["detector"].get("transition_frequency").is_some());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn xi_is_exact_ratio(g1 in 1e-3f64..1e3, g2 in 0.0f64..1e3) {
                let spec = SystemSpec::reference().with_gammas(g1, g2);
                prop_assert_eq!(spec.xi(), g2 / g1);
            }

            #[test]
            fn validate_is_pure(g1 in 1e-3f64..10.0, bw in 0.5f64..100.0, n in 1usize..50) {
                let spec = SystemSpec::reference()
                    .with_gammas(g1, 0.3)
                    .with_bandwidth(bw)
                    .with_mode_count(n);
                prop_assert_eq!(validate(&spec), validate(&spec));
            }
        }
    }
}
