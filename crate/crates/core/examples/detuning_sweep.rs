//! Lorentzian detuning scan using one diagonalization for every point, then
//! a fit of the half-width.

use vacdetect::analytic::mean_current_steady;
use vacdetect::fit::fit_line;
use vacdetect::oracle::{Oracle, OracleSettings};
use vacdetect::SystemSpec;

fn main() -> vacdetect::Result<()> {
    let spec = SystemSpec::reference()
        .with_gammas(1.0, 0.5)
        .with_bandwidth(60.0);
    let settings = OracleSettings::default();
    let oracle = Oracle::new(&spec, &settings)?;
    let horizon = settings.horizon(&spec);
    let (mut x, mut y) = (vec![], vec![]);
    println!("{:>6} {:>12} {:>12}", "Δ", "oracle", "closed form");
    for j in 0..=12 {
        let d = -3.0 + 0.5 * j as f64;
        let point = spec.with_detuning(d);
        let current = oracle
            .redriven(point.drive)
            .observer()
            .mean_current(horizon);
        println!(
            "{d:>6} {current:>12.6} {:>12.6}",
            mean_current_steady(&point).mean_current
        );
        x.push(d * d);
        y.push(1.0 / current);
    }
    let fit = fit_line(&x, &y).expect("enough points");
    println!(
        "half-width {:.4} (γ₁ + γ₂ = {})",
        (fit.intercept / fit.slope).sqrt(),
        spec.gamma_total()
    );
    Ok(())
}
