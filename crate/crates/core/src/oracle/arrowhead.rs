//! Eigendecomposition of real symmetric arrowhead matrices
//!
//! ```text
//! ⎡ a   z₁  z₂ … ⎤
//! ⎢ z₁  d₁       ⎥
//! ⎢ z₂      d₂   ⎥
//! ⎣ ⋮          ⋱ ⎦
//! ```
//!
//! which is the shape of a single oscillator coupled to independent modes.
//! Eigenvalues are roots of the secular equation
//! `a - λ + Σ z_k² / (λ - d_k) = 0`, solved in a coordinate anchored at the
//! nearest pole so that every `λ - d_k` keeps full relative accuracy.
//! Couplings are then recomputed from the eigenvalues (Löwner formula), which
//! makes the explicit eigenvectors `(1, z_k / (λ - d_k))` orthogonal to
//! working precision. Poles that coincide are deflated first: each group keeps
//! one bright combination and contributes `size - 1` dark states.

use std::cmp::Ordering;

/// Poles closer than this (relative to the largest pole magnitude, floored at 1)
/// are merged into one group.
const POLE_MERGE_TOL: f64 = 1e-12;
const MAX_ITER: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct Arrowhead {
    pub apex: f64,
    pub poles: Vec<f64>,
    pub couplings: Vec<f64>,
}

/// An eigenvector with a non-zero apex component.
#[derive(Debug, Clone, Copy)]
struct Coupled {
    /// Pole value the eigenvalue is measured from.
    anchor: f64,
    /// `λ - anchor`
    offset: f64,
    /// Apex component `ν`.
    apex: f64,
}

impl Coupled {
    fn lambda(&self) -> f64 {
        self.anchor + self.offset
    }

    /// `λ - d` with the cancellation confined to `anchor - d`.
    fn gap(&self, d: f64) -> f64 {
        (self.anchor - d) + self.offset
    }
}

#[derive(Debug, Clone)]
struct Dark {
    lambda: f64,
    components: Vec<(usize, f64)>,
}

#[derive(Debug, Clone)]
pub struct ArrowheadEigen {
    /// Per mode; members of a merged group share the group's pole value.
    poles: Vec<f64>,
    /// Per mode, rescaled to the Löwner couplings of the mode's group.
    couplings: Vec<f64>,
    coupled: Vec<Coupled>,
    dark: Vec<Dark>,
}

impl Arrowhead {
    pub fn dim(&self) -> usize {
        self.poles.len() + 1
    }

    /// Dense copy, for tests on small systems.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut m = vec![vec![0.0; n]; n];
        m[0][0] = self.apex;
        for (k, (&d, &z)) in self.poles.iter().zip(&self.couplings).enumerate() {
            m[k + 1][k + 1] = d;
            m[0][k + 1] = z;
            m[k + 1][0] = z;
        }
        m
    }

    pub fn eigen(&self) -> ArrowheadEigen {
        assert_eq!(self.poles.len(), self.couplings.len());
        let m = self.poles.len();
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| {
            self.poles[a]
                .partial_cmp(&self.poles[b])
                .unwrap_or(Ordering::Equal)
        });

        let scale = self.poles.iter().fold(1.0f64, |s, d| s.max(d.abs()));
        let znorm = self.couplings.iter().map(|z| z * z).sum::<f64>().sqrt();
        let ztol = 1e-14 * znorm;

        let mut poles = self.poles.clone();
        let mut couplings = self.couplings.clone();
        let mut dark = Vec::new();
        // reduced problem: one entry per bright group
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut reduced_d = Vec::new();
        let mut reduced_z = Vec::new();

        let mut start = 0;
        while start < m {
            let d0 = self.poles[order[start]];
            let mut end = start + 1;
            while end < m && self.poles[order[end]] - d0 <= POLE_MERGE_TOL * scale {
                end += 1;
            }
            let members: Vec<usize> = order[start..end].to_vec();
            for &k in &members {
                poles[k] = d0;
            }
            let total = members
                .iter()
                .map(|&k| self.couplings[k] * self.couplings[k])
                .sum::<f64>()
                .sqrt();
            if total <= ztol {
                for &k in &members {
                    couplings[k] = 0.0;
                    dark.push(Dark {
                        lambda: d0,
                        components: vec![(k, 1.0)],
                    });
                }
            } else {
                if members.len() > 1 {
                    dark.extend(group_dark_states(d0, &members, &self.couplings, total));
                }
                reduced_d.push(d0);
                reduced_z.push(total);
                groups.push(members);
            }
            start = end;
        }

        let roots = solve_secular(self.apex, &reduced_d, &reduced_z);
        let z_hat = lowner_couplings(&reduced_d, &reduced_z, &roots);
        for ((members, &zh), &z) in groups.iter().zip(&z_hat).zip(&reduced_z) {
            for &k in members {
                couplings[k] = self.couplings[k] * (zh / z);
            }
        }

        let coupled = roots
            .into_iter()
            .map(|(anchor, offset)| {
                let mut c = Coupled {
                    anchor,
                    offset,
                    apex: 1.0,
                };
                let norm2 = 1.0
                    + reduced_d
                        .iter()
                        .zip(&z_hat)
                        .map(|(&d, &z)| {
                            let r = z / c.gap(d);
                            r * r
                        })
                        .sum::<f64>();
                c.apex = 1.0 / norm2.sqrt();
                c
            })
            .collect();

        ArrowheadEigen {
            poles,
            couplings,
            coupled,
            dark,
        }
    }
}

/// Orthonormal complement of the bright direction inside a degenerate group,
/// from the columns of a Householder reflector.
fn group_dark_states(d0: f64, members: &[usize], z: &[f64], total: f64) -> Vec<Dark> {
    let s = members.len();
    let unit: Vec<f64> = members.iter().map(|&k| z[k] / total).collect();
    let mut u = unit.clone();
    u[0] += if unit[0] >= 0.0 { 1.0 } else { -1.0 };
    let uu: f64 = u.iter().map(|x| x * x).sum();
    (1..s)
        .map(|col| Dark {
            lambda: d0,
            components: (0..s)
                .map(|row| {
                    let delta = if row == col { 1.0 } else { 0.0 };
                    (members[row], delta - 2.0 * u[row] * u[col] / uu)
                })
                .collect(),
        })
        .collect()
}

/// `(F, F')` with `F(δ) = a - (anchor + δ) + Σ z_k² / ((anchor - d_k) + δ)`.
fn secular(apex: f64, d: &[f64], z2: &[f64], anchor: f64, delta: f64) -> (f64, f64) {
    let mut s = 0.0;
    let mut sp = 0.0;
    for (&dk, &zk2) in d.iter().zip(z2) {
        let den = (anchor - dk) + delta;
        let q = zk2 / den;
        s += q;
        sp += q / den;
    }
    (apex - anchor - delta + s, -1.0 - sp)
}

/// Root of the decreasing function `F` inside `(lo, hi)`, `F(lo) > 0 > F(hi)`.
/// Newton steps on the local model `A + B/δ` (pole at the anchor), guarded by
/// bisection.
fn bracketed_root(apex: f64, d: &[f64], z2: &[f64], anchor: f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut delta = 0.5 * (lo + hi);
    for _ in 0..MAX_ITER {
        let (f, fp) = secular(apex, d, z2, anchor, delta);
        if f == 0.0 {
            return delta;
        }
        if f > 0.0 {
            lo = delta;
        } else {
            hi = delta;
        }
        if hi - lo <= 4.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
            break;
        }
        let denom = f + fp * delta;
        let rational = fp * delta * delta / denom;
        let newton = delta - f / fp;
        let candidate = if rational > lo && rational < hi && rational.is_finite() {
            rational
        } else if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (candidate - delta).abs() <= 2.0 * f64::EPSILON * delta.abs() {
            return candidate;
        }
        // force progress when the bracket shrinks slowly
        delta = if (candidate - lo).min(hi - candidate) < 1e-3 * (hi - lo)
            && (hi - lo) > 1e-6 * lo.abs().max(hi.abs())
        {
            let mid = 0.5 * (lo + hi);
            0.5 * (candidate + mid)
        } else {
            candidate
        };
    }
    0.5 * (lo + hi)
}

/// All eigenvalues as `(anchor, offset)`, ascending. `d` strictly ascending,
/// `z > 0`.
fn solve_secular(apex: f64, d: &[f64], z: &[f64]) -> Vec<(f64, f64)> {
    let m = d.len();
    if m == 0 {
        return vec![(apex, 0.0)];
    }
    let z2: Vec<f64> = z.iter().map(|x| x * x).collect();
    let znorm = z2.iter().sum::<f64>().sqrt();
    let mut roots = Vec::with_capacity(m + 1);

    // below the first pole
    let lower = apex.min(d[0]) - znorm - 1e-12 * (1.0 + d[0].abs());
    roots.push((d[0], bracketed_root(apex, d, &z2, d[0], lower - d[0], 0.0)));

    for i in 0..m - 1 {
        let half = 0.5 * (d[i + 1] - d[i]);
        let (f_mid, _) = secular(apex, d, &z2, d[i], half);
        let root = if f_mid > 0.0 {
            (
                d[i + 1],
                bracketed_root(apex, d, &z2, d[i + 1], half - (d[i + 1] - d[i]), 0.0),
            )
        } else if f_mid < 0.0 {
            (d[i], bracketed_root(apex, d, &z2, d[i], 0.0, half))
        } else {
            (d[i], half)
        };
        roots.push(root);
    }

    let upper = apex.max(d[m - 1]) + znorm + 1e-12 * (1.0 + d[m - 1].abs());
    roots.push((
        d[m - 1],
        bracketed_root(apex, d, &z2, d[m - 1], 0.0, upper - d[m - 1]),
    ));
    roots
}

/// Couplings reproducing the computed eigenvalues exactly:
/// `ẑ_i² = -Π_j (λ_j - d_i) / Π_{k≠i} (d_k - d_i)`, with factors paired so
/// the running product stays near one.
fn lowner_couplings(d: &[f64], z: &[f64], roots: &[(f64, f64)]) -> Vec<f64> {
    let m = d.len();
    let gap = |j: usize, di: f64| (roots[j].0 - di) + roots[j].1;
    (0..m)
        .map(|i| {
            let di = d[i];
            let mut prod = -gap(i, di) * gap(i + 1, di);
            for k in 0..i {
                prod *= gap(k, di) / (d[k] - di);
            }
            for k in i + 1..m {
                prod *= gap(k + 1, di) / (d[k] - di);
            }
            if prod > 0.0 && prod.is_finite() {
                prod.sqrt().copysign(z[i])
            } else {
                z[i]
            }
        })
        .collect()
}

impl ArrowheadEigen {
    pub fn dim(&self) -> usize {
        self.coupled.len() + self.dark.len()
    }

    pub fn num_modes(&self) -> usize {
        self.poles.len()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.coupled
            .iter()
            .map(Coupled::lambda)
            .chain(self.dark.iter().map(|s| s.lambda))
            .collect()
    }

    /// Apex component of every eigenvector (zero for dark states).
    pub fn apex_components(&self) -> Vec<f64> {
        self.coupled
            .iter()
            .map(|c| c.apex)
            .chain(std::iter::repeat(0.0).take(self.dark.len()))
            .collect()
    }

    /// `Σ_i x_i V_in` for every eigenvector `n`; `x[0]` is the apex entry and
    /// `x[k + 1]` mode `k`.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.num_modes() + 1);
        let active: Vec<(f64, f64)> = (0..self.num_modes())
            .filter(|&k| x[k + 1] != 0.0 && self.couplings[k] != 0.0)
            .map(|k| (self.poles[k], self.couplings[k] * x[k + 1]))
            .collect();
        let mut out: Vec<f64> = self
            .coupled
            .iter()
            .map(|c| {
                let tail: f64 = active.iter().map(|&(d, zx)| zx / c.gap(d)).sum();
                c.apex * (x[0] + tail)
            })
            .collect();
        out.extend(
            self.dark
                .iter()
                .map(|s| s.components.iter().map(|&(k, v)| v * x[k + 1]).sum::<f64>()),
        );
        out
    }

    /// Complex version of [`ArrowheadEigen::project`].
    pub fn project_complex(&self, x: &[num_complex::Complex64]) -> Vec<num_complex::Complex64> {
        let re: Vec<f64> = x.iter().map(|v| v.re).collect();
        let im: Vec<f64> = x.iter().map(|v| v.im).collect();
        self.project(&re)
            .into_iter()
            .zip(self.project(&im))
            .map(|(a, b)| num_complex::Complex64::new(a, b))
            .collect()
    }

    /// `Σ_n V_in c_n` for the requested system indices (0 = apex).
    pub fn synthesize(
        &self,
        coeffs: &[num_complex::Complex64],
        indices: impl IntoIterator<Item = usize>,
    ) -> Vec<num_complex::Complex64> {
        use num_complex::Complex64;
        assert_eq!(coeffs.len(), self.dim());
        let nc = self.coupled.len();
        let mut dark_at: Vec<Vec<(usize, f64)>> = Vec::new();
        if !self.dark.is_empty() {
            dark_at = vec![Vec::new(); self.num_modes()];
            for (s, state) in self.dark.iter().enumerate() {
                for &(k, v) in &state.components {
                    dark_at[k].push((nc + s, v));
                }
            }
        }
        indices
            .into_iter()
            .map(|i| {
                if i == 0 {
                    return self
                        .coupled
                        .iter()
                        .zip(coeffs)
                        .map(|(c, &x)| x * c.apex)
                        .sum();
                }
                let k = i - 1;
                let (d, z) = (self.poles[k], self.couplings[k]);
                let mut acc = Complex64::new(0.0, 0.0);
                if z != 0.0 {
                    for (c, &x) in self.coupled.iter().zip(coeffs) {
                        acc += x * (c.apex / c.gap(d));
                    }
                    acc *= z;
                }
                if let Some(list) = dark_at.get(k) {
                    for &(n, v) in list {
                        acc += coeffs[n] * v;
                    }
                }
                acc
            })
            .collect()
    }

    /// Eigenvector `n` as a dense vector (apex first).
    pub fn eigenvector(&self, n: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.num_modes() + 1];
        if let Some(c) = self.coupled.get(n) {
            v[0] = c.apex;
            for k in 0..self.num_modes() {
                if self.couplings[k] != 0.0 {
                    v[k + 1] = self.couplings[k] * c.apex / c.gap(self.poles[k]);
                }
            }
        } else {
            for &(k, x) in &self.dark[n - self.coupled.len()].components {
                v[k + 1] = x;
            }
        }
        v
    }
}
