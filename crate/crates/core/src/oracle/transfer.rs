//! The propagator `U(t) = e^{M t}` in spectral form, the response to the
//! coherent drive, and kernels read off from both.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::arrowhead::ArrowheadEigen;
use super::discretize::DiscretizedSystem;
use super::DriveModel;
use crate::error::{Error, Result};
use crate::kernels::{check_grid, exp_integral, KernelSet};

/// Drift that aborts a propagation.
pub const UNITARITY_LIMIT: f64 = 1e-7;
/// Drift the oracle is expected to stay under.
pub const UNITARITY_TARGET: f64 = 1e-9;

const PROBE_SEED: u64 = 0x5eed;
const RANDOM_PROBES: usize = 2;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `U(t) = e^{-i w_ε t} Σ_n V_·n V_·nᵀ e^{-i λ_n t}` with `(λ, V)` the
/// eigenpairs of the rotating-frame coupling matrix. Entries are evaluated on
/// demand; nothing of size `dim²` is stored.
#[derive(Debug, Clone)]
pub struct TransferMatrix {
    eigen: ArrowheadEigen,
    lambda: Vec<f64>,
    w_eps: f64,
    pub time_grid: Vec<f64>,
    /// Largest `‖(U†U - I) x‖` over the probe vectors and checked times.
    pub unitarity_drift: f64,
}

/// Diagonalizes the coupling matrix once and checks unitarity on the grid.
pub fn propagate(sys: &DiscretizedSystem, time_grid: &[f64]) -> Result<TransferMatrix> {
    check_grid(time_grid)?;
    let eigen = sys.arrowhead().eigen();
    let lambda = eigen.eigenvalues();
    let mut u = TransferMatrix {
        eigen,
        lambda,
        w_eps: sys.w_eps(),
        time_grid: time_grid.to_vec(),
        unitarity_drift: 0.0,
    };
    u.unitarity_drift = u.probe_drift(sys);
    if !(u.unitarity_drift <= UNITARITY_LIMIT) {
        return Err(Error::UnitarityDrift {
            drift: u.unitarity_drift,
            limit: UNITARITY_LIMIT,
        });
    }
    Ok(u)
}

impl TransferMatrix {
    pub fn dim(&self) -> usize {
        self.lambda.len()
    }

    /// Rotating-frame eigenvalues.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.lambda
    }

    pub fn eigen(&self) -> &ArrowheadEigen {
        &self.eigen
    }

    pub fn w_eps(&self) -> f64 {
        self.w_eps
    }

    /// `x · V_n` for every eigenvector.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        self.eigen.project(x)
    }

    /// Component `i` of every eigenvector.
    pub fn row(&self, i: usize) -> Vec<f64> {
        let mut e = vec![0.0; self.dim()];
        e[i] = 1.0;
        self.project(&e)
    }

    fn frame(&self, t: f64) -> Complex64 {
        Complex64::from_polar(1.0, -self.w_eps * t)
    }

    /// `U(t) x`.
    pub fn evolve(&self, x: &[Complex64], t: f64) -> Vec<Complex64> {
        let phase = self.frame(t);
        let coeffs: Vec<Complex64> = self
            .eigen
            .project_complex(x)
            .into_iter()
            .zip(&self.lambda)
            .map(|(c, &l)| c * Complex64::from_polar(1.0, -l * t) * phase)
            .collect();
        self.eigen.synthesize(&coeffs, 0..self.dim())
    }

    /// `U(t)† x`.
    pub fn evolve_adjoint(&self, x: &[Complex64], t: f64) -> Vec<Complex64> {
        self.evolve(x, -t)
    }

    pub fn entry(&self, i: usize, j: usize, t: f64) -> Complex64 {
        let (vi, vj) = (self.row(i), self.row(j));
        self.frame(t)
            * vi.iter()
                .zip(&vj)
                .zip(&self.lambda)
                .map(|((a, b), &l)| Complex64::from_polar(a * b, -l * t))
                .sum::<Complex64>()
    }

    /// Dense `U(t)`; quadratic memory, for small systems.
    pub fn dense(&self, t: f64) -> Vec<Vec<Complex64>> {
        let n = self.dim();
        let rows: Vec<Vec<f64>> = (0..n).map(|i| self.row(i)).collect();
        let phases: Vec<Complex64> = self
            .lambda
            .iter()
            .map(|&l| Complex64::from_polar(1.0, -l * t) * self.frame(t))
            .collect();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        rows[i]
                            .iter()
                            .zip(&rows[j])
                            .zip(&phases)
                            .map(|((a, b), p)| p * (a * b))
                            .sum()
                    })
                    .collect()
            })
            .collect()
    }

    /// Max-entry norm of `U(t)†U(t) - I`, computed densely.
    pub fn dense_drift(&self, t: f64) -> f64 {
        let u = self.dense(t);
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let dot: Complex64 = (0..n).map(|k| u[k][i].conj() * u[k][j]).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - expect).norm());
            }
        }
        worst
    }

    /// `‖U†U x - x‖` for the detector, the current-source direction, the laser
    /// mode if present and a few seeded random unit vectors, at the middle
    /// and last grid times.
    fn probe_drift(&self, sys: &DiscretizedSystem) -> f64 {
        let n = self.dim();
        let mut probes: Vec<Vec<f64>> = Vec::new();
        let mut e0 = vec![0.0; n];
        e0[0] = 1.0;
        probes.push(e0);
        let g = sys.electronic_coupling_vector();
        let gn = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if gn > 0.0 {
            probes.push(g.iter().map(|x| x / gn).collect());
        }
        if let Some(l) = sys.laser {
            let mut e = vec![0.0; n];
            e[l] = 1.0;
            probes.push(e);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
        for _ in 0..RANDOM_PROBES {
            let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            probes.push(v.iter().map(|x| x / norm).collect());
        }

        let mut times = vec![];
        if let Some(&last) = self.time_grid.last() {
            times.push(self.time_grid[self.time_grid.len() / 2]);
            times.push(last);
        } else {
            times.push(0.0);
        }
        let mut worst: f64 = 0.0;
        for p in &probes {
            let x: Vec<Complex64> = p.iter().map(|&v| v.into()).collect();
            for &t in &times {
                let back = self.evolve_adjoint(&self.evolve(&x, t), t);
                let err = back
                    .iter()
                    .zip(&x)
                    .map(|(a, b)| (a - b).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                worst = worst.max(err);
            }
        }
        worst
    }
}

/// Amplitudes created by the coherent drive, per unit `α`.
///
/// [`DriveModel::Undepleted`]: the laser mode keeps its amplitude `α e^{-i w_L t}`
/// and feeds the detector as a source `i g_L α e^{-i w_L t}`.
/// [`DriveModel::SingleMode`]: the laser is an explicit mode prepared in `α`.
#[derive(Debug, Clone)]
pub struct DriveResponse {
    model: DriveModel,
    lambda: Vec<f64>,
    /// `ν_n` (undepleted) or `V_Ln` (single mode).
    source: Vec<f64>,
    w_laser: f64,
    coupling: f64,
    w_eps: f64,
}

impl DriveResponse {
    pub fn new(u: &TransferMatrix, sys: &DiscretizedSystem) -> Self {
        let source = match sys.laser {
            Some(l) => u.row(l),
            None => u.eigen.apex_components(),
        };
        DriveResponse {
            model: sys.drive_model,
            lambda: u.lambda.clone(),
            source,
            w_laser: sys.spec.drive.laser_frequency - sys.w_eps(),
            coupling: sys.spec.drive.coupling,
            w_eps: sys.w_eps(),
        }
    }

    /// Modal coefficients `c_n(t)` with the lab-frame phase folded in, so that
    /// the amplitude of mode `x` is `α Σ_n V_xn c_n(t)`.
    pub fn coefficients(&self, t: f64) -> Vec<Complex64> {
        let frame = Complex64::from_polar(1.0, -self.w_eps * t);
        match self.model {
            DriveModel::Undepleted => {
                let carrier = Complex64::from_polar(1.0, -self.w_laser * t) * frame;
                self.lambda
                    .iter()
                    .zip(&self.source)
                    .map(|(&l, &nu)| {
                        I * self.coupling * nu * carrier * exp_integral(-I * (l - self.w_laser), t)
                    })
                    .collect()
            }
            DriveModel::SingleMode => self
                .lambda
                .iter()
                .zip(&self.source)
                .map(|(&l, &v)| frame * Complex64::from_polar(v, -l * t))
                .collect(),
        }
    }

    /// `f_L(t) = b(t) / (i g_L α)`. Zero when the single-mode laser is uncoupled.
    pub fn laser_kernel_f(&self, t: f64, apex: &[f64]) -> Complex64 {
        match self.model {
            DriveModel::Undepleted => {
                let frame = Complex64::from_polar(1.0, -(self.w_eps + self.w_laser) * t);
                frame
                    * self
                        .lambda
                        .iter()
                        .zip(apex)
                        .map(|(&l, &nu)| nu * nu * exp_integral(-I * (l - self.w_laser), t))
                        .sum::<Complex64>()
            }
            DriveModel::SingleMode => {
                if self.coupling == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let b: Complex64 = self
                    .coefficients(t)
                    .iter()
                    .zip(apex)
                    .map(|(c, &nu)| c * nu)
                    .sum();
                b / (I * self.coupling)
            }
        }
    }
}

/// Mode whose initial amplitude drives the kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Mode(usize),
    Laser,
}

/// Kernels read off the propagator for source `k'` and target `k`:
/// `f_k'(t) = U_{b,k'} / (i g_k')`, `h_k'(t) = U_{k',b}`,
/// `p_kk'(t) = -(U_{k,k'} - δ_kk' e^{-i w_k t})`.
pub fn extract_kernels(
    u: &TransferMatrix,
    sys: &DiscretizedSystem,
    target: usize,
    source: Source,
) -> Result<KernelSet> {
    let n = sys.dim();
    if target == 0 || target >= n {
        return Err(Error::Grid(format!("target mode {target} outside 1..{n}")));
    }
    let source = match (source, sys.laser) {
        (Source::Laser, Some(l)) => Source::Mode(l),
        (s, _) => s,
    };
    let grid = &u.time_grid;
    let apex = u.eigen.apex_components();
    let vt = u.row(target);
    let mut set = KernelSet {
        time_grid: grid.clone(),
        f_values: Vec::with_capacity(grid.len()),
        h_values: Vec::with_capacity(grid.len()),
        p_values: Vec::with_capacity(grid.len()),
    };
    match source {
        Source::Mode(k) => {
            if k == 0 || k >= n {
                return Err(Error::Grid(format!("source mode {k} outside 1..{n}")));
            }
            let vk = u.row(k);
            let g = sys.couplings[k];
            for &t in grid {
                let sum = |a: &[f64], b: &[f64]| -> Complex64 {
                    u.frame(t)
                        * a.iter()
                            .zip(b)
                            .zip(&u.lambda)
                            .map(|((x, y), &l)| Complex64::from_polar(x * y, -l * t))
                            .sum::<Complex64>()
                };
                let u_bk = sum(&apex, &vk);
                let u_kk = sum(&vt, &vk);
                let free = if k == target {
                    Complex64::from_polar(1.0, -sys.frequencies[k] * t)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                set.f_values.push(if g != 0.0 {
                    u_bk / (I * g)
                } else {
                    Complex64::new(0.0, 0.0)
                });
                // U is complex symmetric, so U_{k,b} = U_{b,k}
                set.h_values.push(u_bk);
                set.p_values.push(-(u_kk - free));
            }
        }
        Source::Laser => {
            let drive = DriveResponse::new(u, sys);
            let g_l = sys.spec.drive.coupling;
            for &t in grid {
                let c = drive.coefficients(t);
                let f = drive.laser_kernel_f(t, &apex);
                let u_kl: Complex64 = c.iter().zip(&vt).map(|(c, &v)| c * v).sum();
                set.f_values.push(f);
                set.h_values.push(I * g_l * f);
                set.p_values.push(-u_kl);
            }
        }
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SystemSpec;
    use crate::oracle::{build_discretized, OracleSettings};

    fn tiny(model: DriveModel) -> DiscretizedSystem {
        let spec = SystemSpec::reference()
            .with_mode_count(15)
            .with_bandwidth(20.0)
            .with_gammas(1.0, 0.5);
        let settings = OracleSettings {
            calibrate: false,
            drive_model: model,
            ..OracleSettings::default()
        };
        build_discretized(&spec, &settings).unwrap()
    }

    fn dense_expm(m: &[Vec<Complex64>], t: f64) -> Vec<Vec<Complex64>> {
        // scaling and squaring with a Taylor core
        let n = m.len();
        let norm: f64 = m
            .iter()
            .map(|r| r.iter().map(|x| x.norm()).sum::<f64>())
            .fold(0.0, f64::max)
            * t.abs();
        let s = (norm.max(1.0).log2().ceil() as i32 + 4).max(0);
        let h = t / 2f64.powi(s);
        let mul = |a: &Vec<Vec<Complex64>>, b: &Vec<Vec<Complex64>>| -> Vec<Vec<Complex64>> {
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum())
                        .collect()
                })
                .collect()
        };
        let mut result: Vec<Vec<Complex64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { 1.0.into() } else { 0.0.into() })
                    .collect()
            })
            .collect();
        let mut term = result.clone();
        let mh: Vec<Vec<Complex64>> = m
            .iter()
            .map(|r| r.iter().map(|x| x * h).collect())
            .collect();
        for k in 1..30 {
            term = mul(&term, &mh)
                .into_iter()
                .map(|r| r.into_iter().map(|x| x / k as f64).collect())
                .collect();
            for i in 0..n {
                for j in 0..n {
                    result[i][j] += term[i][j];
                }
            }
        }
        for _ in 0..s {
            result = mul(&result, &result);
        }
        result
    }

    #[test]
    fn identity_at_zero_and_matches_expm() {
        let sys = tiny(DriveModel::SingleMode);
        let u = propagate(&sys, &[0.0, 0.7]).unwrap();
        let u0 = u.dense(0.0);
        for (i, row) in u0.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((x - e).norm() < 1e-13);
            }
        }
        let reference = dense_expm(&sys.generator(), 0.7);
        let ut = u.dense(0.7);
        for i in 0..sys.dim() {
            for j in 0..sys.dim() {
                assert!((ut[i][j] - reference[i][j]).norm() < 1e-10, "{i},{j}");
            }
        }
        assert!(u.dense_drift(0.7) < 1e-12);
        assert!(u.unitarity_drift < UNITARITY_TARGET);
    }

    #[test]
    fn two_mode_rabi() {
        let mut sys = tiny(DriveModel::Undepleted);
        let g = 0.3;
        sys.frequencies.truncate(2);
        sys.couplings.truncate(2);
        sys.frequencies[1] = sys.frequencies[0];
        sys.couplings[1] = g;
        sys.electronic = 1..2;
        sys.radiative = 2..2;
        let grid: Vec<f64> = (0..50).map(|j| 0.37 * j as f64).collect();
        let u = propagate(&sys, &grid).unwrap();
        for &t in &grid {
            assert!((u.entry(0, 0, t).norm() - (g * t).cos().abs()).abs() < 1e-13);
        }
    }

    #[test]
    fn undepleted_drive_matches_single_mode_at_weak_coupling() {
        // same spectrum, laser depletion is O(g_L²) so the two agree to leading order
        let weak = |model| {
            let mut spec = tiny(model).spec;
            spec.drive.coupling = 1e-4;
            let settings = OracleSettings {
                calibrate: false,
                drive_model: model,
                ..OracleSettings::default()
            };
            build_discretized(&spec, &settings).unwrap()
        };
        let detector = |sys: &DiscretizedSystem| -> Complex64 {
            let u = propagate(sys, &[3.0]).unwrap();
            DriveResponse::new(&u, sys)
                .coefficients(3.0)
                .iter()
                .zip(u.eigen.apex_components())
                .map(|(c, v)| c * v)
                .sum()
        };
        let ba = detector(&weak(DriveModel::Undepleted));
        let bb = detector(&weak(DriveModel::SingleMode));
        assert!((ba - bb).norm() < 1e-6 * ba.norm(), "{ba} vs {bb}");
    }

    #[test]
    fn kernels_from_propagator() {
        let sys = tiny(DriveModel::SingleMode);
        let grid: Vec<f64> = (0..20).map(|j| 0.25 * j as f64).collect();
        let u = propagate(&sys, &grid).unwrap();
        for source in [Source::Mode(3), Source::Laser] {
            let set = extract_kernels(&u, &sys, 3, source).unwrap();
            assert!(set.p_values[0].norm() < 1e-12);
            let g = match source {
                Source::Mode(k) => sys.couplings[k],
                Source::Laser => sys.spec.drive.coupling,
            };
            for (h, f) in set.h_values.iter().zip(&set.f_values) {
                assert!((h - I * g * f).norm() < 1e-12);
            }
        }
    }
}
