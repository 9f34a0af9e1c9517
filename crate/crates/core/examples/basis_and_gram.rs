//! Cubic B-spline basis on [0, 1]: values, partition of unity and the Gram matrix.
//!
//!     cargo run --example basis_and_gram

use funcsel::{gram_matrix, BasisSpec};

fn main() -> funcsel::Result<()> {
    let basis = BasisSpec::uniform(0.0, 1.0, 3, 6)?;
    println!("knots: {:?}", basis.knots());

    println!("\n   t    φ_1    φ_2    φ_3    φ_4    φ_5    φ_6    sum");
    for i in 0..=10 {
        let t = i as f64 / 10.0;
        let phi = basis.evaluate(t)?;
        let row: Vec<String> = phi.iter().map(|v| format!("{v:.3}")).collect();
        println!("{t:4.1}  {}  {:.3}", row.join("  "), phi.iter().sum::<f64>());
    }

    let gram = gram_matrix(&basis);
    println!("\nGram matrix J = ∫ φ φᵀ dt:");
    for r in 0..basis.num_basis() {
        let row: Vec<String> = (0..basis.num_basis()).map(|c| format!("{:8.5}", gram.values()[(r, c)])).collect();
        println!("  {}", row.join(" "));
    }
    // Σ_jk J_jk = ∫ (Σ φ_j)² = domain length.
    println!("sum of entries = {:.12}", gram.values().sum());

    // A curve in the span: x(t) = Σ w_j φ_j(t) and β(t) = Σ b_j φ_j(t) give
    // ∫ x β = wᵀ J b.
    let w = [1.0, -0.5, 2.0, 0.0, 0.3, 1.0];
    let b = [0.2, 0.2, 0.2, 0.2, 0.2, 0.2];
    let via_gram: f64 = (0..6).map(|r| (0..6).map(|c| w[r] * gram.values()[(r, c)] * b[c]).sum::<f64>()).sum();
    let direct = funcsel::quadrature::adaptive(
        |t| {
            let phi = basis.evaluate(t).unwrap();
            let x: f64 = phi.iter().zip(&w).map(|(p, w)| p * w).sum();
            let beta: f64 = phi.iter().zip(&b).map(|(p, b)| p * b).sum();
            x * beta
        },
        0.0,
        1.0,
        1e-12,
    );
    println!("wᵀJb = {via_gram:.12}, ∫ xβ = {direct:.12}");
    Ok(())
}
