//! Stationary current correlation: the closed-form trace next to the exact
//! smooth part and its detector-commutator channel.

use vacdetect::analytic::correlation_stationary;
use vacdetect::oracle::{Oracle, OracleSettings};
use vacdetect::SystemSpec;

fn main() -> vacdetect::Result<()> {
    let spec = SystemSpec::reference().with_gammas(0.5, 0.5);
    let taus: Vec<f64> = (0..=8).map(|j| 0.5 * j as f64).collect();
    let analytic = correlation_stationary(&spec, &taus)?;
    let oracle = Oracle::new(&spec, &OracleSettings::default())?;
    let t1 = 10.0 / spec.gamma_total();
    let exact = oracle.observer().correlation_trace(t1, &taus)?;
    println!(
        "{:>5} {:>12} {:>12} {:>12}",
        "τ", "|closed|", "|smooth|", "|detector|"
    );
    for ((tau, a), e) in taus.iter().zip(analytic.envelope()).zip(&exact) {
        println!(
            "{tau:>5} {a:>12.4e} {:>12.4e} {:>12.4e}",
            e.smooth.norm(),
            e.detector.norm()
        );
    }
    Ok(())
}
