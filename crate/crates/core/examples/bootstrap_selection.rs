//! Selection ratios over bootstrap resamples of one dataset.
//!
//!     cargo run --release --example bootstrap_selection

use funcsel::cli::{bootstrap_dataset, default_ids};
use funcsel::simgen::{generate_replication, BenchmarkBases, SimScenario};
use funcsel::{default_q, Method};

fn main() -> funcsel::Result<()> {
    let scenario = SimScenario::new(0.8, 300, 99);
    let data = BenchmarkBases::new().dataset(&generate_replication(&scenario, 0)?)?;
    let (_, names) = default_ids(data.n(), data.num_predictors());
    let q = default_q(data.n(), data.num_predictors());

    let report = bootstrap_dataset(&data, &names, &[Method::Bonferroni, Method::Fdr], q, 100, 2024)?;
    print!("{report}");
    println!("\ntrue set: x1..x5 (x6 has β ≡ 0)");
    Ok(())
}
