//! Full and restricted least squares on one synthetic replication, with the
//! per-predictor likelihood-ratio tests and their noncentralities.
//!
//!     cargo run --release --example fit_and_test

use funcsel::linmodel::{fit_restricted, noncentrality};
use funcsel::simgen::{generate_replication, projected_truth, BenchmarkBases, SimScenario};
use funcsel::{fit_ols, test_all};

fn main() -> funcsel::Result<()> {
    let scenario = SimScenario::new(0.8, 300, 7);
    let rep = generate_replication(&scenario, 0)?;
    let bases = BenchmarkBases::new();
    let data = bases.dataset(&rep)?;
    let design = bases.design(&data)?;
    let y = data.responses();
    println!("n = {}, k = {}, true set {:?}", design.n(), design.k(), scenario.truth().true_set);

    let full = fit_ols(&design, y)?;
    println!("RSS = {:.4}, σ̃² = RSS/n = {:.5} (true σ² = {:.5})", full.rss, full.sigma2_tilde, rep.response_sd.powi(2));

    let b = projected_truth(&design, &rep.mean_response)?;
    let sigma2 = rep.response_sd.powi(2);
    let tests = test_all(&design, y)?;
    println!("\npredictor     RSS₀      T_L  dof      p-value      δ");
    for t in &tests {
        let restricted = fit_restricted(&design, y, &full, t.predictor)?;
        let delta = noncentrality(&design, &b, t.predictor, sigma2)?;
        println!(
            "x{}        {:8.3} {:8.2} {:4} {:12.3e} {:6.1}",
            t.predictor + 1,
            restricted.rss,
            t.statistic,
            t.dof,
            t.p_value,
            delta
        );
    }
    Ok(())
}
