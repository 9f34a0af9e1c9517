use funcsel::quadrature::adaptive;
use funcsel::simgen::{generate_replication, BenchmarkBases, SimScenario};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

#[test]
fn design_rows_are_integrals_against_beta() {
    // Z_i · b picks up Σ_m ∫ x̂_im β_m with β_m = Σ_j b_mj φ_mj.
    let scenario = SimScenario::new(0.8, 60, 3);
    let rep = generate_replication(&scenario, 0).unwrap();
    let bases = BenchmarkBases::new();
    let data = bases.dataset(&rep).unwrap();
    let design = bases.design(&data).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let b: Vec<Vec<f64>> = (0..6).map(|_| (0..6).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
        for i in [0, 17, 59] {
            for m in 0..6 {
                let basis = &bases.bases[m];
                let (lo, hi) = basis.domain();
                let w = data.coefficients(i, m);
                let want = adaptive(
                    |t| {
                        let phi = basis.evaluate(t).unwrap();
                        let x: f64 = phi.iter().zip(w).map(|(p, w)| p * w).sum();
                        let beta: f64 = phi.iter().zip(&b[m]).map(|(p, b)| p * b).sum();
                        x * beta
                    },
                    lo,
                    hi,
                    1e-13,
                );
                let cols = design.block(m);
                let got: f64 = cols.clone().zip(&b[m]).map(|(c, b)| design.values()[(i, c)] * b).sum();
                let rel = (got - want).abs() / want.abs().max(1e-12);
                worst = worst.max(rel);
                assert!(rel < 1e-8, "i {i}, m {m}: {got} vs {want}");
            }
        }
    }
    println!("largest relative gap: {worst:e}");
}

#[test]
fn benchmark_design_has_full_rank() {
    let scenario = SimScenario::new(0.0, 100, 20240501);
    let bases = BenchmarkBases::new();
    let data = bases.dataset(&generate_replication(&scenario, 0).unwrap()).unwrap();
    let design = bases.design(&data).unwrap();
    assert_eq!((design.n(), design.k()), (100, 37));
    assert_eq!(design.block_offsets(), &[1, 7, 13, 19, 25, 31, 37]);
    let sv = design.values().clone().singular_values();
    let ratio = sv.min() / sv.max();
    println!("σ_min / σ_max = {ratio:e}");
    assert!(ratio > 1e-10);
    assert!((0..100).all(|i| design.values()[(i, 0)] == 1.0));
    assert!(!design.satisfies_condition_c1());
}
