mod common;

use common::{delete_columns, normals, projector, random_block_instance as random_instance, random_design, svd_rss};
use funcsel::linmodel::{noncentrality, projection_rss_identity_check, LeastSquares};
use funcsel::simgen::{generate_replication, projected_truth, BenchmarkBases, SimScenario};
use funcsel::{fit_ols, fit_restricted, DesignMatrix};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

#[test]
fn restricted_rss_matches_column_deletion() {
    let mut rng = ChaCha20Rng::seed_from_u64(100);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (design, y) = random_instance(&mut rng);
        let full = fit_ols(&design, &y).unwrap();
        assert!((full.rss - svd_rss(design.values(), &y)).abs() <= 1e-8 * full.rss);
        for r in 0..design.num_predictors() {
            let restricted = fit_restricted(&design, &y, &full, r).unwrap();
            let oracle = svd_rss(&delete_columns(design.values(), design.block(r)), &y);
            let gap = (restricted.rss - oracle).abs() / oracle;
            worst = worst.max(gap);
            assert!(gap < 1e-8, "relative gap {gap:e}");
            assert!(restricted.rss >= full.rss);
            assert!(design.block(r).all(|c| restricted.coefficients[c] == 0.0));
        }
    }
    println!("largest relative gap over 100 instances: {worst:e}");
}

#[test]
fn rss_gap_is_a_quadratic_form_in_the_projections() {
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    for _ in 0..100 {
        let (design, y) = random_instance(&mut rng);
        let r = rng.random_range(0..design.num_predictors());
        let full = fit_ols(&design, &y).unwrap();
        let rss0 = fit_restricted(&design, &y, &full, r).unwrap().rss;
        let p = projector(design.values());
        let p0 = projector(&delete_columns(design.values(), design.block(r)));
        let yv = DVector::from_column_slice(&y);
        let quad = (yv.transpose() * (&p - &p0) * &yv)[(0, 0)];
        let gap = ((rss0 - full.rss) - quad).abs() / quad.abs().max(1e-300);
        assert!(gap < 1e-6, "gap {gap:e}");
        let (a, b) = projection_rss_identity_check(&design, &y, r).unwrap();
        assert!((a - b).abs() <= 1e-6 * b.abs());
    }
}

#[test]
fn responses_in_the_restricted_space_give_zero_gap() {
    let mut rng = ChaCha20Rng::seed_from_u64(8);
    let z = random_design(&mut rng, 60, 7);
    let design = DesignMatrix::from_blocks(z, &[3, 3]).unwrap();
    let reduced = delete_columns(design.values(), design.block(1));
    let y: Vec<f64> = (reduced * DVector::from_vec(normals(&mut rng, 4))).iter().copied().collect();
    let norm2: f64 = y.iter().map(|v| v * v).sum();
    let (a, b) = projection_rss_identity_check(&design, &y, 1).unwrap();
    assert!(a.abs() < 1e-10 * norm2 && b.abs() < 1e-10 * norm2, "{a} {b}");
}

#[test]
fn benchmark_fit_matches_svd_solution() {
    let scenario = SimScenario::new(0.0, 300, 4);
    let bases = BenchmarkBases::new();
    let rep = generate_replication(&scenario, 0).unwrap();
    let data = bases.dataset(&rep).unwrap();
    let design = bases.design(&data).unwrap();
    let fit = fit_ols(&design, data.responses()).unwrap();
    let y = DVector::from_column_slice(data.responses());
    let oracle = design.values().clone().svd(true, true).solve(&y, 1e-14).unwrap();
    let rel = (&fit.coefficients - &oracle).norm() / oracle.norm();
    assert!(rel < 1e-8, "{rel:e}");

    // Fitted contribution of each block: large for x1, x2, x4, small for the rest.
    let spread = |m: usize| {
        let cols = design.block(m);
        let part: Vec<f64> = (0..design.n())
            .map(|i| cols.clone().map(|c| design.values()[(i, c)] * fit.coefficients[c]).sum())
            .collect();
        let mean = part.iter().sum::<f64>() / part.len() as f64;
        (part.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / part.len() as f64).sqrt()
    };
    let s: Vec<f64> = (0..6).map(spread).collect();
    println!("block contribution sd: {s:?}");
    let weakest_true = s[0].min(s[1]).min(s[3]);
    for m in [2, 4, 5] {
        assert!(s[m] < 0.2 * weakest_true, "block {m}: {s:?}");
    }
}

#[test]
fn noncentrality_agrees_with_residualised_signal() {
    let scenario = SimScenario::new(0.8, 300, 12);
    let bases = BenchmarkBases::new();
    let rep = generate_replication(&scenario, 0).unwrap();
    let design = bases.design(&bases.dataset(&rep).unwrap()).unwrap();
    let b = projected_truth(&design, &rep.mean_response).unwrap();
    let sigma2 = rep.response_sd.powi(2);
    let zb = design.values() * DVector::from_column_slice(&b);
    for r in 0..6 {
        let delta = noncentrality(&design, &b, r, sigma2).unwrap();
        let p0 = projector(&delete_columns(design.values(), design.block(r)));
        let resid = &zb - &p0 * &zb;
        let oracle = resid.norm_squared() / sigma2;
        let rel = (delta - oracle).abs() / oracle.max(1e-300);
        assert!(rel < 1e-8, "r {r}: {delta} vs {oracle}");
    }
}

#[test]
fn noncentrality_grows_linearly_in_n() {
    // Each generation has 800 samples and its first n form the size-n
    // dataset, with b and σ held fixed. A single generation is noisy at
    // n = 100, so δ/(n − k₀) is averaged over ten.
    let bases = BenchmarkBases::new();
    let sizes = [100, 200, 400, 800];
    let generations = 10;
    let mut mean = vec![[0.0; 4]; 5];
    for g in 0..generations {
        let rep = generate_replication(&SimScenario::new(0.8, 800, 31), g).unwrap();
        let full = bases.dataset(&rep).unwrap();
        let b = projected_truth(&bases.design(&full).unwrap(), &rep.mean_response).unwrap();
        let sigma2 = rep.response_sd.powi(2);
        for (j, &n) in sizes.iter().enumerate() {
            let rows: Vec<usize> = (0..n).collect();
            let design = bases.design(&full.resample(&rows).unwrap()).unwrap();
            for (r, row) in mean.iter_mut().enumerate() {
                let k0 = design.k() - design.block_size(r);
                row[j] += noncentrality(&design, &b, r, sigma2).unwrap() / (n - k0) as f64 / generations as f64;
            }
        }
    }
    for (r, scaled) in mean.iter().enumerate() {
        for w in scaled.windows(2) {
            let ratio = w[1] / w[0];
            assert!((ratio - 1.0).abs() < 0.15, "predictor {r}: δ/(n−k₀) = {scaled:?}");
        }
    }
}

#[test]
fn idempotent_projections() {
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    let design = DesignMatrix::from_blocks(random_design(&mut rng, 40, 6), &[2, 3]).unwrap();
    let (p, p0) = funcsel::linmodel::projection_matrices(&design, 1);
    assert!((&p * &p - &p).abs().max() < 1e-10);
    assert!((&p0 * &p0 - &p0).abs().max() < 1e-10);
    assert!((&p * &p0 - &p0).abs().max() < 1e-10);
    let ls = LeastSquares::new(&design).unwrap();
    let v = DVector::from_vec(normals(&mut rng, 40));
    let quad = (v.transpose() * (&p - &p0) * &v)[(0, 0)];
    assert!((ls.projection_gap(&v, 1) - quad).abs() < 1e-9 * quad.abs().max(1.0));
}
