//! Closed forms of the kernel functions that appear in the formal solution of
//! the linear Heisenberg equations under Markov damping:
//!
//! ```text
//! f_k(t)       = ∫₀ᵗ e^{-i w_k t' - (i w_ε + γ_ε)(t - t')} dt'
//! h_kε(t)      = i g_k ∫₀ᵗ e^{-(i w_ε + γ_ε) t' - i w_k (t - t')} dt'
//! p_kk'(t)     = g_k g_k' ∫₀ᵗ f_k'(t') e^{-i w_k (t - t')} dt'
//! x_kε(t1, t2) = ∫₀^{t2-t1} e^{-i w_k (t1 + t') - (i w_ε + γ_ε)(t2 - t1 - t')} dt'
//! ```
//!
//! Every antiderivative is written in terms of `E(a, t) = (e^{a t} - 1) / a`,
//! evaluated through a complex `expm1` so that small `|a t|` does not cancel.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelArgs {
    pub w_k: f64,
    pub w_k_prime: f64,
    pub w_eps: f64,
    pub gamma_eps: f64,
    pub t: f64,
    pub g_k: f64,
    pub g_k_prime: f64,
}

impl KernelArgs {
    /// Arguments for a single mode; `w_k_prime` and `g_k_prime` mirror `w_k`, `g_k`.
    pub fn single(w_k: f64, w_eps: f64, gamma_eps: f64, g_k: f64, t: f64) -> Self {
        KernelArgs {
            w_k,
            w_k_prime: w_k,
            w_eps,
            gamma_eps,
            t,
            g_k,
            g_k_prime: g_k,
        }
    }

    pub fn at(self, t: f64) -> Self {
        KernelArgs { t, ..self }
    }

    /// Threshold on `|w_k - w_k'|` below which `kernel_p` switches to its
    /// degenerate-frequency limit.
    pub fn degenerate_tolerance(&self) -> f64 {
        1e-8 * self.gamma_eps.max(self.w_eps.abs())
    }

    /// `γ_ε + i (w_ε - w)`, the complex rate that appears in every denominator.
    fn rate(&self, w: f64) -> Complex64 {
        Complex64::new(self.gamma_eps, self.w_eps - w)
    }
}

/// `e^z - 1` without cancellation for small `|z|`.
pub fn expm1(z: Complex64) -> Complex64 {
    if z.norm() > 0.5 {
        return z.exp() - 1.0;
    }
    let (s, c) = z.im.sin_cos();
    let em1 = z.re.exp_m1();
    let half = (0.5 * z.im).sin();
    Complex64::new(em1 * c - 2.0 * half * half, (em1 + 1.0) * s)
}

/// `∫₀ᵗ e^{a s} ds`.
pub(crate) fn exp_integral(a: Complex64, t: f64) -> Complex64 {
    let at = a * t;
    if at.norm() < 1e-4 {
        // t (1 + at/2 + (at)^2/6 + (at)^3/24)
        t * (1.0 + at * (0.5 + at * (1.0 / 6.0 + at / 24.0)))
    } else {
        expm1(at) / a
    }
}

fn phase(w: f64, t: f64) -> Complex64 {
    Complex64::from_polar(1.0, -w * t)
}

pub fn kernel_f(args: &KernelArgs) -> Complex64 {
    let t = args.t;
    if t == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let z = args.rate(args.w_k);
    let decay = Complex64::new(-args.gamma_eps * t, -args.w_eps * t).exp();
    if args.gamma_eps * t > 1.0 {
        (phase(args.w_k, t) - decay) / z
    } else {
        decay * expm1(z * t) / z
    }
}

pub fn kernel_h(args: &KernelArgs) -> Complex64 {
    let t = args.t;
    if t == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let z = args.rate(args.w_k);
    I * args.g_k * phase(args.w_k, t) * (-expm1(-z * t)) / z
}

/// The source-field kernel. For `|w_k - w_k'|` below
/// [`KernelArgs::degenerate_tolerance`] the first integral is replaced by its
/// limit, which carries the secular `t e^{-i w_k t}` term.
pub fn kernel_p(args: &KernelArgs) -> Complex64 {
    let t = args.t;
    if t == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let z_prime = args.rate(args.w_k_prime);
    let z_k = args.rate(args.w_k);
    let beat = args.w_k - args.w_k_prime;
    let first = if beat.abs() < args.degenerate_tolerance() {
        let a = I * beat;
        t * (1.0 + a * t * 0.5)
    } else {
        exp_integral(I * beat, t)
    };
    let second = exp_integral(-z_k, t);
    args.g_k * args.g_k_prime / z_prime * phase(args.w_k, t) * (first - second)
}

/// Kernel of the two-time correlation. Requires `t2 >= t1 >= 0`.
pub fn kernel_x(w_k: f64, w_eps: f64, gamma_eps: f64, t1: f64, t2: f64) -> Result<Complex64> {
    if t2 < t1 {
        return Err(Error::TimeOrder { t1, t2 });
    }
    if t1 < 0.0 {
        return Err(Error::NegativeTime(t1));
    }
    let tau = t2 - t1;
    if tau == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    // with s = τ - t': e^{-i w_k t2} ∫₀^τ e^{-(γ_ε + i(w_ε - w_k)) s} ds
    let z = Complex64::new(gamma_eps, w_eps - w_k);
    Ok(phase(w_k, t2) * exp_integral(-z, tau))
}

/// `f̃_k(t) = f_k(t) e^{i w_k t}`.
pub fn kernel_f_tilde(args: &KernelArgs) -> Complex64 {
    kernel_f(args) * phase(-args.w_k, args.t)
}

/// `p̃_kk'(t) = p_kk'(t) e^{i w_k' t}`.
pub fn kernel_p_tilde(args: &KernelArgs) -> Complex64 {
    kernel_p(args) * phase(-args.w_k_prime, args.t)
}

/// Kernel values on a time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSet {
    pub time_grid: Vec<f64>,
    pub f_values: Vec<Complex64>,
    pub h_values: Vec<Complex64>,
    pub p_values: Vec<Complex64>,
}

impl KernelSet {
    /// Evaluates the closed forms at every grid time. `args.t` is ignored.
    pub fn tabulate(args: &KernelArgs, time_grid: &[f64]) -> Result<Self> {
        check_grid(time_grid)?;
        let eval = |k: fn(&KernelArgs) -> Complex64| -> Vec<Complex64> {
            time_grid.iter().map(|&t| k(&args.at(t))).collect()
        };
        Ok(KernelSet {
            time_grid: time_grid.to_vec(),
            f_values: eval(kernel_f),
            h_values: eval(kernel_h),
            p_values: eval(kernel_p),
        })
    }

    pub fn len(&self) -> usize {
        self.time_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time_grid.is_empty()
    }
}

pub(crate) fn check_grid(time_grid: &[f64]) -> Result<()> {
    if let Some(&t) = time_grid.iter().find(|&&t| !(t >= 0.0)) {
        return Err(Error::NegativeTime(t));
    }
    if time_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Grid("time grid must be non-decreasing".into()));
    }
    Ok(())
}
