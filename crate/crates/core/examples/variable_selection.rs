//! Bonferroni against the Benjamini–Yekutieli step-up rule on the same p-values.
//!
//!     cargo run --release --example variable_selection

use funcsel::simgen::{generate_replication, BenchmarkBases, SimScenario};
use funcsel::{default_q, select, test_all, HypothesisTest, Method};

fn show(tests: &[HypothesisTest], q: f64) -> funcsel::Result<()> {
    for method in [Method::Bonferroni, Method::Fdr] {
        let r = select(tests, method, q)?;
        let names: Vec<String> = r.selected.iter().map(|m| format!("x{}", m + 1)).collect();
        println!("  {method:<3} q = {q:.3}: {{{}}}", names.join(", "));
    }
    Ok(())
}

fn main() -> funcsel::Result<()> {
    // Hand-made p-values where the two rules disagree.
    let p = [0.001, 0.012, 0.019, 0.025, 0.5, 0.9];
    let tests: Vec<HypothesisTest> = p
        .iter()
        .enumerate()
        .map(|(i, &p_value)| HypothesisTest { predictor: i, statistic: 0.0, dof: 6, p_value })
        .collect();
    println!("p-values {p:?}");
    show(&tests, 0.1)?;

    let bases = BenchmarkBases::new();
    for (c, n) in [(0.0, 100), (0.4, 300), (0.8, 300)] {
        let scenario = SimScenario::new(c, n, 3);
        let data = bases.dataset(&generate_replication(&scenario, 0)?)?;
        let tests = test_all(&bases.design(&data)?, data.responses())?;
        println!("\nc = {c}, n = {n}, true set {:?} (0-based)", scenario.truth().true_set);
        for t in &tests {
            println!("  x{}: T_L = {:8.2}, p = {:.2e}", t.predictor + 1, t.statistic, t.p_value);
        }
        show(&tests, 0.01)?;
        show(&tests, default_q(n, 6))?;
    }
    Ok(())
}
