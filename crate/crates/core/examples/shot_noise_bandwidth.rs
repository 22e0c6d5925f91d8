//! Variance-to-mean ratio of the photocurrent against the electronic band
//! width: the shot noise grows linearly as Ω/π + γ₁/2.

use vacdetect::analytic::current_variance;
use vacdetect::oracle::{Oracle, OracleSettings};
use vacdetect::SystemSpec;

fn main() -> vacdetect::Result<()> {
    let settings = OracleSettings::default();
    println!(
        "{:>6} {:>12} {:>12} {:>12}",
        "Ω", "Ω/π+γ₁/2", "closed form", "oracle"
    );
    for band in [20.0, 40.0, 80.0] {
        let spec = SystemSpec::reference().with_bandwidth(band);
        let law = band / std::f64::consts::PI + spec.electronic.gamma / 2.0;
        let oracle = Oracle::new(&spec, &settings)?;
        let ratio = oracle.observer().variance(settings.horizon(&spec)).ratio;
        println!(
            "{band:>6} {law:>12.4} {:>12.4} {ratio:>12.4}",
            current_variance(&spec).fano_ratio
        );
    }
    Ok(())
}
