//! Least-squares smoothing of noisy curves onto a B-spline basis.
//!
//!     cargo run --example smooth_curves

use funcsel::{smooth_curve, BasisSpec, RawCurve};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};

fn main() -> funcsel::Result<()> {
    let mut rng = ChaCha20Rng::seed_from_u64(11);
    let noise = Normal::new(0.0, 0.05).unwrap();
    let truth = |t: f64| (2.0 * std::f64::consts::PI * t).sin() + 0.5 * t;

    let grid: Vec<f64> = (0..50).map(|g| g as f64 / 49.0).collect();
    let values: Vec<f64> = grid.iter().map(|&t| truth(t) + noise.sample(&mut rng)).collect();
    let curve = RawCurve::new(grid.clone(), values)?;

    for num_basis in [4, 6, 10, 15] {
        let basis = BasisSpec::uniform(0.0, 1.0, 3, num_basis)?;
        let w = smooth_curve(&curve, &basis)?;
        let mut sse = 0.0;
        for &t in &grid {
            let fit: f64 = basis.evaluate(t)?.iter().zip(&w).map(|(p, w)| p * w).sum();
            sse += (fit - truth(t)).powi(2);
        }
        println!("p = {num_basis:2}: RMSE against the noise-free curve = {:.4}", (sse / grid.len() as f64).sqrt());
    }

    // Too many basis functions for the grid is reported, naming the basis
    // function whose support has no observation.
    let sparse = RawCurve::new(vec![0.0, 0.01, 0.02, 0.03, 0.04, 1.0], vec![0.0; 6])?;
    let basis = BasisSpec::uniform(0.0, 1.0, 3, 6)?;
    match smooth_curve(&sparse, &basis) {
        Ok(_) => println!("unexpected success"),
        Err(e) => println!("\nsparse grid: {e}"),
    }
    Ok(())
}
