//! Power of the likelihood-ratio test from its noncentral χ² approximation.
//!
//!     cargo run --example noncentral_power

use funcsel::inference::{chisq_cdf, noncentral_chisq_cdf};

/// Smallest x with Ψ_dof(x) ≥ 1 − alpha, by bisection.
fn critical_value(dof: usize, alpha: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 1000.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if chisq_cdf(mid, dof).unwrap() < 1.0 - alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

fn main() {
    let dof = 6;
    println!("dof = {dof}; columns are per-test levels α (Bonferroni over M = 6 at q = α·6)\n");
    let alphas = [0.01 / 6.0, 0.05 / 6.0, 0.1 / 6.0];
    let crit: Vec<f64> = alphas.iter().map(|&a| critical_value(dof, a)).collect();
    println!("    δ   {}", alphas.iter().map(|a| format!("α={a:.4}")).collect::<Vec<_>>().join("   "));
    for delta in [0.0, 2.0, 5.0, 10.0, 20.0, 40.0, 80.0] {
        let power: Vec<String> = crit
            .iter()
            .map(|&x| format!("{:9.3}", 1.0 - noncentral_chisq_cdf(x, dof, delta).unwrap()))
            .collect();
        println!("{delta:5.0}   {}", power.join("   "));
    }
}
