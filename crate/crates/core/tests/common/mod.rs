//! Independent reference implementations shared by the integration tests.
//!
//! Nothing here calls into the code under test beyond reading plain inputs
//! (knot vectors, matrices), so agreement is meaningful.

#![allow(dead_code)]

use funcsel::DesignMatrix;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Textbook Cox–de Boor recursion. `left_limit` switches the degree-0
/// indicators from `[k_i, k_{i+1})` to `(k_i, k_{i+1}]`, which yields the
/// left-hand limit at a knot.
pub fn cox_de_boor(knots: &[f64], i: usize, degree: usize, t: f64, left_limit: bool) -> f64 {
    if degree == 0 {
        let (a, b) = (knots[i], knots[i + 1]);
        return if left_limit {
            (a < t && t <= b) as u8 as f64
        } else {
            (a <= t && t < b) as u8 as f64
        };
    }
    let mut v = 0.0;
    let d1 = knots[i + degree] - knots[i];
    if d1 > 0.0 {
        v += (t - knots[i]) / d1 * cox_de_boor(knots, i, degree - 1, t, left_limit);
    }
    let d2 = knots[i + degree + 1] - knots[i + 1];
    if d2 > 0.0 {
        v += (knots[i + degree + 1] - t) / d2 * cox_de_boor(knots, i + 1, degree - 1, t, left_limit);
    }
    v
}

/// All basis values at `t`; the right end of the domain uses left limits.
pub fn basis_values(knots: &[f64], degree: usize, num_basis: usize, t: f64, left_limit: bool) -> Vec<f64> {
    (0..num_basis).map(|j| cox_de_boor(knots, j, degree, t, left_limit)).collect()
}

/// `∫ φ_j φ_l` by the composite trapezoid rule on about `points` nodes,
/// spread over the knot spans so that every breakpoint is a node; each span
/// uses its own one-sided limits at its ends.
pub fn trapezoid_gram(knots: &[f64], degree: usize, num_basis: usize, points: usize) -> DMatrix<f64> {
    let lo = knots[0];
    let hi = knots[knots.len() - 1];
    let mut breaks: Vec<f64> = knots.to_vec();
    breaks.dedup();
    let mut gram = DMatrix::zeros(num_basis, num_basis);
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let steps = (((b - a) / (hi - lo)) * points as f64).ceil().max(1.0) as usize;
        let h = (b - a) / steps as f64;
        for s in 0..=steps {
            let t = a + h * s as f64;
            let weight = if s == 0 || s == steps { 0.5 * h } else { h };
            let phi = basis_values(knots, degree, num_basis, if s == steps { b } else { t }, s == steps);
            for r in 0..num_basis {
                if phi[r] == 0.0 {
                    continue;
                }
                for c in 0..num_basis {
                    gram[(r, c)] += weight * phi[r] * phi[c];
                }
            }
        }
    }
    gram
}

/// Residual sum of squares of the least-squares fit of `y` on `x`, via SVD.
pub fn svd_rss(x: &DMatrix<f64>, y: &[f64]) -> f64 {
    let yv = nalgebra::DVector::from_column_slice(y);
    let svd = x.clone().svd(true, true);
    let b = svd.solve(&yv, 1e-12).expect("svd solve");
    (yv - x * b).norm_squared()
}

/// Orthogonal projector onto the column space of `x`, from its left singular vectors.
pub fn projector(x: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = x.clone().svd(true, false);
    let u = svd.u.expect("u requested");
    let smax = svd.singular_values.max();
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > 1e-12 * smax)
        .collect();
    let ur = u.select_columns(&keep);
    &ur * ur.transpose()
}

/// Columns of `x` except `range`.
pub fn delete_columns(x: &DMatrix<f64>, range: std::ops::Range<usize>) -> DMatrix<f64> {
    let keep: Vec<usize> = (0..x.ncols()).filter(|c| !range.contains(c)).collect();
    x.select_columns(&keep)
}

/// Random `n × k` design with an intercept column and Gaussian entries.
pub fn random_design<R: Rng>(rng: &mut R, n: usize, k: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, k, |_, c| if c == 0 { 1.0 } else { StandardNormal.sample(rng) })
}

pub fn normals<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

/// Random block design (intercept plus 1 to 5 blocks of width 1 to 5) and a
/// response mixing signal with noise, so restricted fits differ from full ones.
pub fn random_block_instance<R: Rng>(rng: &mut R) -> (DesignMatrix, Vec<f64>) {
    let m = rng.random_range(1..=5);
    let sizes: Vec<usize> = (0..m).map(|_| rng.random_range(1..=5)).collect();
    let k = 1 + sizes.iter().sum::<usize>();
    let n = rng.random_range(k + 5..=200);
    let z = random_design(rng, n, k);
    let design = DesignMatrix::from_blocks(z, &sizes).unwrap();
    let b: Vec<f64> = normals(rng, k);
    let noise = normals(rng, n);
    let zb = design.values() * DVector::from_column_slice(&b);
    let y = zb.iter().zip(&noise).map(|(s, e)| s + 2.0 * e).collect();
    (design, y)
}

/// Bonferroni straight from its definition.
pub fn brute_bonferroni(p: &[f64], q: f64) -> Vec<usize> {
    let m = p.len() as f64;
    (0..p.len()).filter(|&i| p[i] <= q / m).collect()
}

/// Benjamini–Yekutieli step-up straight from its definition: rank each
/// p-value (ties by index), find the largest qualifying rank, and keep
/// everything ranked at or below it.
pub fn brute_fdr(p: &[f64], q: f64) -> Vec<usize> {
    let m = p.len();
    let h: f64 = (1..=m).map(|l| 1.0 / l as f64).sum();
    let rank = |i: usize| {
        1 + (0..m)
            .filter(|&l| p[l] < p[i] || (p[l] == p[i] && l < i))
            .count()
    };
    let mut s = 0;
    for i in 0..m {
        let j = rank(i);
        if p[i] <= j as f64 * q / (m as f64 * h) {
            s = s.max(j);
        }
    }
    (0..m).filter(|&i| rank(i) <= s).collect()
}

/// Two-sided Kolmogorov–Smirnov statistic of `sample` against `cdf`.
pub fn ks_statistic(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Asymptotic KS critical value at level 0.01.
pub fn ks_critical_01(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}

/// Sum of `dof` squared standard normals shifted so that the noncentrality is `delta`.
pub fn noncentral_chisq_draw<R: Rng>(rng: &mut R, dof: usize, delta: f64) -> f64 {
    let mut s = 0.0;
    for d in 0..dof {
        let z: f64 = StandardNormal.sample(rng);
        let z = if d == 0 { z + delta.sqrt() } else { z };
        s += z * z;
    }
    s
}
