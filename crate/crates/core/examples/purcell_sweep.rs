//! Bad-cavity branching: efficiency and shot-noise ratio as the cavity
//! linewidth κ grows, written as CSV to stdout.

use vacdetect::cavity::{efficiency_vs_kappa, write_kappa_csv, CavityConfig};
use vacdetect::SystemSpec;

fn main() -> vacdetect::Result<()> {
    let cfg = CavityConfig {
        g_ke: 0.5,
        kappa: 10.0,
        gamma_1: 1.0,
        other_loss_ratios: vec![0.02],
    };
    let grid: Vec<f64> = (1..=8).map(|j| 10.0 * j as f64).collect();
    let rows = efficiency_vs_kappa(&cfg, &grid, &SystemSpec::reference())?;
    write_kappa_csv(&rows, std::io::stdout().lock())
}
