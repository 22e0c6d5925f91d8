//! Least-squares line fits used for decay rates and scaling laws.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares `y ≈ slope x + intercept`. Needs at least two
/// distinct abscissae.
pub fn fit_line(x: &[f64], y: &[f64]) -> Option<LineFit> {
    let n = x.len();
    if n < 2 || n != y.len() {
        return None;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
        syy += (yi - my) * (yi - my);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    Some(LineFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
    })
}

/// Fits `|y| ≈ A e^{-rate t}` by a line through `ln |y|`. Returns the rate and
/// the fit. Non-positive magnitudes make the fit undefined.
pub fn fit_decay(t: &[f64], magnitude: &[f64]) -> Option<(f64, LineFit)> {
    if magnitude.iter().any(|&m| !(m > 0.0)) {
        return None;
    }
    let logs: Vec<f64> = magnitude.iter().map(|m| m.ln()).collect();
    let line = fit_line(t, &logs)?;
    Some((-line.slope, line))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_exponential() {
        let t: Vec<f64> = (0..20).map(|j| 0.1 * j as f64).collect();
        let m: Vec<f64> = t.iter().map(|t| 3.0 * (-1.7 * t).exp()).collect();
        let (rate, line) = fit_decay(&t, &m).unwrap();
        assert!((rate - 1.7).abs() < 1e-12);
        assert!((line.intercept - 3f64.ln()).abs() < 1e-12);
        assert!(line.r_squared > 1.0 - 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(fit_line(&[1.0], &[2.0]).is_none());
        assert!(fit_line(&[1.0, 1.0], &[2.0, 3.0]).is_none());
        assert!(fit_decay(&[0.0, 1.0], &[1.0, 0.0]).is_none());
    }
}
