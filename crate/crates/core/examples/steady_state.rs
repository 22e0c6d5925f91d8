//! Closed-form steady current, efficiency factor and shot noise for the
//! reference detector, then the same numbers with half the decay branched
//! into the vacuum.

use vacdetect::analytic::{current_variance, mean_current_steady};
use vacdetect::SystemSpec;

fn main() {
    for (label, spec) in [
        ("ideal (ξ = 0)", SystemSpec::reference()),
        (
            "lossy (ξ = 1)",
            SystemSpec::reference().with_gammas(1.0, 1.0),
        ),
    ] {
        let s = mean_current_steady(&spec);
        let v = current_variance(&spec);
        println!("{label}");
        println!("  mean current       {:.6}", s.mean_current);
        println!("  efficiency factor  {:.4}", s.efficiency_factor);
        println!(
            "  variance / mean    {:.4}  (shot-noise limit Ω/π = {:.4})",
            v.fano_ratio,
            spec.electronic.bandwidth / std::f64::consts::PI
        );
    }
}
