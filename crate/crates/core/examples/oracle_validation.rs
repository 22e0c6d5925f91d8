//! Builds the exact finite-mode system for the reference spec and compares
//! its observables with the Markov closed forms.

use vacdetect::analytic::{current_variance, mean_current_steady};
use vacdetect::oracle::{Oracle, OracleSettings};
use vacdetect::SystemSpec;

fn main() -> vacdetect::Result<()> {
    let spec = SystemSpec::reference();
    let settings = OracleSettings::default();
    let oracle = Oracle::new(&spec, &settings)?;
    for c in &oracle.sys.calibration {
        println!(
            "{:?}: status {:?}, g² scale {:.4}, fitted rate {:?}",
            c.kind, c.status, c.scale, c.fitted_rate
        );
    }
    println!(
        "modes {}, unitarity drift {:.2e}",
        oracle.sys.dim(),
        oracle.propagator.unitarity_drift
    );

    let obs = oracle.observer();
    let t = settings.horizon(&spec);
    let current = obs.mean_current(t);
    let want = mean_current_steady(&spec).mean_current;
    println!(
        "mean current   oracle {current:.6}  closed form {want:.6}  ({:+.2}%)",
        100.0 * (current / want - 1.0)
    );
    let ratio = obs.variance(t).ratio;
    let want = current_variance(&spec).fano_ratio;
    println!(
        "variance/mean  oracle {ratio:.4}  closed form {want:.4}  ({:+.2}%)",
        100.0 * (ratio / want - 1.0)
    );
    Ok(())
}
