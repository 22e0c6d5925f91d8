//! Tabulates the response kernels on a time grid and shows the identity
//! h = i g f and the approach of |f| to 1/γ_ε on resonance.

use vacdetect::kernels::{kernel_f, kernel_p, kernel_x, KernelArgs, KernelSet};

fn main() -> vacdetect::Result<()> {
    let args = KernelArgs::single(1.0, 1.0, 1.0, 0.1, 0.0);
    let grid: Vec<f64> = (0..=8).map(|j| j as f64).collect();
    let set = KernelSet::tabulate(&args, &grid)?;
    println!("{:>4} {:>10} {:>12} {:>12}", "t", "|f|", "|h - igf|", "|p|");
    for j in 0..set.len() {
        let f = set.f_values[j];
        let h = set.h_values[j];
        let igf = num_complex::Complex64::new(0.0, args.g_k) * f;
        println!(
            "{:>4} {:>10.6} {:>12.2e} {:>12.6}",
            grid[j],
            f.norm(),
            (h - igf).norm(),
            set.p_values[j].norm()
        );
    }

    let off = KernelArgs::single(2.0, 1.0, 0.5, 0.0, 3.0);
    println!("f(w_k=2, w_ε=1, γ=0.5, t=3) = {:.10}", kernel_f(&off));
    let two = KernelArgs {
        w_k: 1.3,
        w_k_prime: 0.8,
        w_eps: 1.0,
        gamma_eps: 0.3,
        t: 4.0,
        g_k: 0.05,
        g_k_prime: 0.05,
    };
    println!("p(1.3, 0.8; t=4)           = {:.10}", kernel_p(&two));
    println!(
        "x(t1=1, t2=3)              = {:.10}",
        kernel_x(1.0, 1.0, 0.5, 1.0, 3.0)?
    );
    Ok(())
}
