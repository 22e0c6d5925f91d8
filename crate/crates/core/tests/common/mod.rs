//! Shared helpers: an adaptive Gauss–Kronrod integrator for complex
//! integrands, used as an independent check on the closed forms.
#![allow(dead_code, clippy::excessive_precision)]

use num_complex::Complex64;

// 7-point Gauss / 15-point Kronrod nodes on [-1, 1] (non-negative half).
const XK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XK[j];
        let s = f(c - x) + f(c + x);
        kronrod += s * WK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).norm())
}

fn adapt<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> Complex64 {
    let (value, err) = gk15(f, a, b);
    if err <= tol || depth == 0 {
        return value;
    }
    let m = 0.5 * (a + b);
    adapt(f, a, m, 0.5 * tol, depth - 1) + adapt(f, m, b, 0.5 * tol, depth - 1)
}

/// `∫_a^b f` to absolute tolerance `tol`. The interval is pre-split into
/// unit-length panels so oscillatory integrands start well resolved.
pub fn integrate<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, tol: f64) -> Complex64 {
    if b <= a {
        return Complex64::new(0.0, 0.0);
    }
    let panels = ((b - a).ceil() as usize).max(1);
    let w = (b - a) / panels as f64;
    (0..panels)
        .map(|j| {
            let lo = a + j as f64 * w;
            adapt(&f, lo, lo + w, tol / panels as f64, 40)
        })
        .sum()
}

pub fn cexp(z: Complex64) -> Complex64 {
    z.exp()
}

pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Integrand of `f_k(t)` at `t'`.
pub fn f_integrand(w_k: f64, w_eps: f64, gamma: f64, t: f64, tp: f64) -> Complex64 {
    cexp(-I * w_k * tp - (I * w_eps + gamma) * (t - tp))
}

pub fn f_quad(w_k: f64, w_eps: f64, gamma: f64, t: f64, tol: f64) -> Complex64 {
    integrate(|tp| f_integrand(w_k, w_eps, gamma, t, tp), 0.0, t, tol)
}

pub fn h_quad(w_k: f64, w_eps: f64, gamma: f64, g: f64, t: f64, tol: f64) -> Complex64 {
    I * g
        * integrate(
            |tp| cexp(-(I * w_eps + gamma) * tp - I * w_k * (t - tp)),
            0.0,
            t,
            tol,
        )
}

/// Two-level nested quadrature of `p_kk'(t)`; the inner `f_k'` is itself
/// integrated numerically.
pub fn p_quad(
    w_k: f64,
    w_kp: f64,
    w_eps: f64,
    gamma: f64,
    g: f64,
    gp: f64,
    t: f64,
    tol: f64,
) -> Complex64 {
    let inner_tol = tol * 1e-2 / t.max(1.0);
    g * gp
        * integrate(
            |tp| f_quad(w_kp, w_eps, gamma, tp, inner_tol) * cexp(-I * w_k * (t - tp)),
            0.0,
            t,
            tol,
        )
}

pub fn x_quad(w_k: f64, w_eps: f64, gamma: f64, t1: f64, t2: f64, tol: f64) -> Complex64 {
    let d = t2 - t1;
    integrate(
        |tp| cexp(-I * w_k * (t1 + tp) - (I * w_eps + gamma) * (d - tp)),
        0.0,
        d,
        tol,
    )
}
