//! Correct-selection counts over the synthetic benchmark grid.
//!
//!     cargo run --release --example simulate_table1 -- [reps] [seed]

use funcsel::simgen::{run_monte_carlo_rules, SimScenario};
use funcsel::Method;

fn main() -> funcsel::Result<()> {
    let mut args = std::env::args().skip(1);
    let reps: usize = args.next().map_or(100, |a| a.parse().expect("reps must be an integer"));
    let seed: u64 = args.next().map_or(20240501, |a| a.parse().expect("seed must be an integer"));
    let levels = [0.01, 0.05, 0.1];
    let rules: Vec<(Method, f64)> = [Method::Bonferroni, Method::Fdr]
        .into_iter()
        .flat_map(|m| levels.map(|q| (m, q)))
        .collect();

    println!("correct selections out of {reps} (AMSE in parentheses)\n");
    println!("  c     n   |  bc .01       bc .05       bc .1        fdr .01      fdr .05      fdr .1");
    for c in [0.0, 0.4, 0.8] {
        for n in [100, 300] {
            let reports = run_monte_carlo_rules(&SimScenario::new(c, n, seed), &rules, reps)?;
            let cells: Vec<String> = reports
                .iter()
                .map(|r| format!("{:3} ({:.3})", r.correct_count, r.amse))
                .collect();
            println!("{c:4.1} {n:5}   |  {}", cells.join("  "));
        }
    }
    Ok(())
}
