//! Synthetic six-predictor benchmark and Monte Carlo selection experiments.
//!
//! Each sample draws the latent curve parameters
//!
//! ```text
//! u1(t) = cos(2π(t − a1)) + a2          on [0, 1]     a1 ~ N(−4, 3²),   a2 ~ N(7, 1.5²)
//! u2(t) = b1 sin(πt) + b2                on [0, π/3]   b1 ~ U(3, 7),     b2 ~ N(0, 1)
//! u3(t) = c1 t³ + c2 t² + c3 t           on [−1, 1]    c1 ~ N(−3, 1.2²), c2 ~ N(2, 0.5²), c3 ~ N(−2, 1)
//! u4(t) = sin(2(t − d1)) + d2 t          on [0, π/3]   d1 ~ N(−2, 1),    d2 ~ N(3, 1.5²)
//! u5(t) = e1 cos(2t) + e2 t              on [−2, 1]    e1 ~ U(2, 7),     e2 ~ N(2, 0.4²)
//! u6(t) = f1 exp(−t/3) + f2 t + f3       on [−1, 1]    f1 ~ N(4, 2²),    f2 ~ N(−3, 0.5²), f3 ~ N(1, 1)
//! ```
//!
//! observes `z = u(t) + N(0, (0.025 r_x)²)` on an equally spaced grid, where
//! `r_x` is the range of that curve over the grid, and responds with
//! `y = Σ_m ∫ u_m β_m dt + N(0, (0.05 R_y)²)`, where `R_y` is the range of the
//! noise-free responses over the `n` samples. The coefficient functions are
//! `β1 = sin t`, `β2 = sin 2t`, `β3 = −c t²`, `β4 = sin 2t`, `β5 = c sin πt`,
//! `β6 = 0`.
//!
//! # Random streams
//!
//! Every replication uses its own ChaCha20 stream: the generator is seeded
//! with `seed` and `set_stream` selects stream `2·rep` for the training data
//! and `2·rep + 1` for the independent test set, so a replication's draws do
//! not depend on how many replications run or in what order. Normal variates
//! come from `rand_distr::Normal` (ziggurat on the standard normal, then
//! affine), uniforms from `rand`'s `random_range` on `f64`. Per sample the
//! draw order is: the 14 curve parameters in the order listed above, then
//! `6 × grid_size` standard normals for the curve noise (predictor-major),
//! then one standard normal for the response noise. Draws happen even when a
//! noise multiplier is zero, so streams stay aligned across settings and the
//! first `n'` samples of a size-`n` dataset equal a size-`n'` dataset.

use std::f64::consts::PI;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::bspline::{BasisSpec, GramMatrix};
use crate::design::{build_design, DesignMatrix};
use crate::error::{Error, Result};
use crate::inference::{test_all, HypothesisTest};
use crate::linmodel::fit_ols;
use crate::quadrature;
use crate::selection::{select, Method};
use crate::smoothing::{build_dataset, FunctionalDataset, RawCurve};

pub const NUM_PREDICTORS: usize = 6;

/// Domains `𝒯_1 … 𝒯_6`.
pub const DOMAINS: [(f64, f64); NUM_PREDICTORS] = [
    (0.0, 1.0),
    (0.0, PI / 3.0),
    (-1.0, 1.0),
    (0.0, PI / 3.0),
    (-2.0, 1.0),
    (-1.0, 1.0),
];

/// Basis size used for every predictor in the benchmark.
pub const BASIS_SIZE: usize = 6;
pub const BASIS_DEGREE: usize = 3;

const INTEGRAL_TOL: f64 = 1e-10;

/// What the response depends on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ResponseModel {
    /// `y = Σ ∫ u_m β_m + ε` with the benchmark's coefficient functions.
    Benchmark,
    /// All `β ≡ 0`: `y` is pure noise, with the standard deviation the
    /// benchmark would have used (`noise_y_mult · R_y`).
    Null,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimScenario {
    pub c: f64,
    pub n: usize,
    pub grid_size: usize,
    pub noise_x_mult: f64,
    pub noise_y_mult: f64,
    pub seed: u64,
    pub response: ResponseModel,
}

impl SimScenario {
    pub fn new(c: f64, n: usize, seed: u64) -> Self {
        Self {
            c,
            n,
            grid_size: 50,
            noise_x_mult: 0.025,
            noise_y_mult: 0.05,
            seed,
            response: ResponseModel::Benchmark,
        }
    }

    pub fn null(n: usize, seed: u64) -> Self {
        Self {
            response: ResponseModel::Null,
            ..Self::new(0.0, n, seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 50 {
            return Err(Error::invalid(format!("scenario needs n ≥ 50, got {}", self.n)));
        }
        if self.grid_size < BASIS_SIZE {
            return Err(Error::invalid(format!(
                "grid_size {} is below the basis size {BASIS_SIZE}",
                self.grid_size
            )));
        }
        if !(self.noise_x_mult >= 0.0 && self.noise_y_mult >= 0.0) || !self.c.is_finite() {
            return Err(Error::invalid("noise multipliers must be ≥ 0 and c finite"));
        }
        Ok(())
    }

    pub fn truth(&self) -> SimTruth {
        SimTruth::new(self.c, self.response)
    }

    /// Equally spaced grid of `grid_size` points on predictor `m`'s domain.
    pub fn grid(&self, predictor: usize) -> Vec<f64> {
        let (lo, hi) = DOMAINS[predictor];
        let g = self.grid_size;
        (0..g)
            .map(|j| if j + 1 == g { hi } else { lo + (hi - lo) * j as f64 / (g - 1) as f64 })
            .collect()
    }
}

/// Coefficient function `β_m(t)` (0-based `m`).
pub fn beta(c: f64, predictor: usize, t: f64) -> f64 {
    match predictor {
        0 => t.sin(),
        1 | 3 => (2.0 * t).sin(),
        2 => -c * t * t,
        4 => c * (PI * t).sin(),
        5 => 0.0,
        _ => panic!("benchmark has {NUM_PREDICTORS} predictors, got index {predictor}"),
    }
}

fn beta_vanishes(c: f64, predictor: usize) -> bool {
    predictor == 5 || (c == 0.0 && matches!(predictor, 2 | 4))
}

/// The relevant predictor set `I₀` and the coefficient functions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimTruth {
    pub c: f64,
    pub response: ResponseModel,
    /// `I₀`, 0-based and ascending.
    pub true_set: Vec<usize>,
}

impl SimTruth {
    pub fn new(c: f64, response: ResponseModel) -> Self {
        let true_set = match response {
            ResponseModel::Null => Vec::new(),
            ResponseModel::Benchmark => (0..NUM_PREDICTORS).filter(|&m| !beta_vanishes(c, m)).collect(),
        };
        Self { c, response, true_set }
    }

    /// `M₀ = |I₀|`.
    pub fn num_relevant(&self) -> usize {
        self.true_set.len()
    }

    pub fn beta(&self, predictor: usize, t: f64) -> f64 {
        match self.response {
            ResponseModel::Null => 0.0,
            ResponseModel::Benchmark => beta(self.c, predictor, t),
        }
    }
}

/// Latent parameters of one sample's six curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveParams {
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub c: [f64; 3],
    pub d: [f64; 2],
    pub e: [f64; 2],
    pub f: [f64; 3],
}

impl CurveParams {
    fn draw<R: Rng>(rng: &mut R) -> Self {
        let normal = |rng: &mut R, mean: f64, sd: f64| Normal::new(mean, sd).expect("valid sd").sample(rng);
        let a1 = normal(rng, -4.0, 3.0);
        let a2 = normal(rng, 7.0, 1.5);
        let b1 = rng.random_range(3.0..7.0);
        let b2 = normal(rng, 0.0, 1.0);
        let c1 = normal(rng, -3.0, 1.2);
        let c2 = normal(rng, 2.0, 0.5);
        let c3 = normal(rng, -2.0, 1.0);
        let d1 = normal(rng, -2.0, 1.0);
        let d2 = normal(rng, 3.0, 1.5);
        let e1 = rng.random_range(2.0..7.0);
        let e2 = normal(rng, 2.0, 0.4);
        let f1 = normal(rng, 4.0, 2.0);
        let f2 = normal(rng, -3.0, 0.5);
        let f3 = normal(rng, 1.0, 1.0);
        Self {
            a: [a1, a2],
            b: [b1, b2],
            c: [c1, c2, c3],
            d: [d1, d2],
            e: [e1, e2],
            f: [f1, f2, f3],
        }
    }

    /// Noise-free curve `u_m(t)` (0-based `m`).
    pub fn curve(&self, predictor: usize, t: f64) -> f64 {
        match predictor {
            0 => (2.0 * PI * (t - self.a[0])).cos() + self.a[1],
            1 => self.b[0] * (PI * t).sin() + self.b[1],
            2 => self.c[0] * t.powi(3) + self.c[1] * t * t + self.c[2] * t,
            3 => (2.0 * (t - self.d[0])).sin() + self.d[1] * t,
            4 => self.e[0] * (2.0 * t).cos() + self.e[1] * t,
            5 => self.f[0] * (-t / 3.0).exp() + self.f[1] * t + self.f[2],
            _ => panic!("benchmark has {NUM_PREDICTORS} predictors, got index {predictor}"),
        }
    }

    /// `∫_{𝒯_m} u_m(t) β_m(t) dt` by adaptive Gauss–Legendre.
    pub fn contribution(&self, truth: &SimTruth, predictor: usize) -> f64 {
        if truth.response == ResponseModel::Null || beta_vanishes(truth.c, predictor) {
            return 0.0;
        }
        let (lo, hi) = DOMAINS[predictor];
        quadrature::adaptive(
            |t| self.curve(predictor, t) * beta(truth.c, predictor, t),
            lo,
            hi,
            INTEGRAL_TOL,
        )
    }

    /// Noise-free response `g(u) = Σ_m ∫ u_m β_m`.
    pub fn signal(&self, truth: &SimTruth) -> f64 {
        (0..NUM_PREDICTORS).map(|m| self.contribution(truth, m)).sum()
    }
}

/// One simulated dataset.
#[derive(Debug, Clone)]
pub struct Replication {
    /// `curves[i][m]`, noisy observations on the scenario grid.
    pub curves: Vec<Vec<RawCurve>>,
    pub responses: Vec<f64>,
    /// Noise-free responses `g(u_i)`; all zero under the null model.
    pub mean_response: Vec<f64>,
    /// Standard deviation of the response noise, `noise_y_mult · R_y`.
    pub response_sd: f64,
    pub params: Vec<CurveParams>,
    pub truth: SimTruth,
}

/// Which of a replication's two streams to draw from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Train,
    Test,
}

fn rng_for(seed: u64, rep_index: u64, stream: Stream) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(2 * rep_index + u64::from(stream == Stream::Test));
    rng
}

/// Draws replication `rep_index` of `scenario` (training stream).
pub fn generate_replication(scenario: &SimScenario, rep_index: u64) -> Result<Replication> {
    generate_from_stream(scenario, rep_index, Stream::Train)
}

pub fn generate_from_stream(scenario: &SimScenario, rep_index: u64, stream: Stream) -> Result<Replication> {
    scenario.validate()?;
    let mut rng = rng_for(scenario.seed, rep_index, stream);
    let truth = scenario.truth();
    // The benchmark signal fixes the noise scale, also under the null model.
    let benchmark = SimTruth::new(scenario.c, ResponseModel::Benchmark);
    let grids: Vec<Vec<f64>> = (0..NUM_PREDICTORS).map(|m| scenario.grid(m)).collect();
    let n = scenario.n;
    let g = scenario.grid_size;

    let mut params = Vec::with_capacity(n);
    let mut curves = Vec::with_capacity(n);
    let mut benchmark_signal = Vec::with_capacity(n);
    let mut response_noise = Vec::with_capacity(n);
    let mut curve_noise = vec![0.0; g];
    for _ in 0..n {
        let p = CurveParams::draw(&mut rng);
        let mut row = Vec::with_capacity(NUM_PREDICTORS);
        for (m, grid) in grids.iter().enumerate() {
            for z in curve_noise.iter_mut() {
                *z = StandardNormal.sample(&mut rng);
            }
            let clean: Vec<f64> = grid.iter().map(|&t| p.curve(m, t)).collect();
            let (lo, hi) = clean
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
            let sd = scenario.noise_x_mult * (hi - lo);
            let values = clean.iter().zip(&curve_noise).map(|(u, z)| u + sd * z).collect();
            row.push(RawCurve::new(grid.clone(), values)?);
        }
        let z: f64 = StandardNormal.sample(&mut rng);
        response_noise.push(z);
        benchmark_signal.push(p.signal(&benchmark));
        curves.push(row);
        params.push(p);
    }
    let (lo, hi) = benchmark_signal
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let response_sd = scenario.noise_y_mult * (hi - lo);
    let mean_response = match truth.response {
        ResponseModel::Benchmark => benchmark_signal,
        ResponseModel::Null => vec![0.0; n],
    };
    let responses = mean_response
        .iter()
        .zip(&response_noise)
        .map(|(m, z)| m + response_sd * z)
        .collect();
    Ok(Replication {
        curves,
        responses,
        mean_response,
        response_sd,
        params,
        truth,
    })
}

/// Cubic bases with six functions on each benchmark domain, and their Gram matrices.
#[derive(Debug, Clone)]
pub struct BenchmarkBases {
    pub bases: Vec<BasisSpec>,
    pub grams: Vec<GramMatrix>,
}

impl BenchmarkBases {
    pub fn new() -> Self {
        let bases: Vec<BasisSpec> = DOMAINS
            .iter()
            .map(|&(lo, hi)| BasisSpec::uniform(lo, hi, BASIS_DEGREE, BASIS_SIZE).expect("valid benchmark basis"))
            .collect();
        let grams = bases.iter().map(BasisSpec::gram).collect();
        Self { bases, grams }
    }

    pub fn dataset(&self, rep: &Replication) -> Result<FunctionalDataset> {
        build_dataset(&rep.curves, &rep.responses, &self.bases)
    }

    pub fn design(&self, data: &FunctionalDataset) -> Result<DesignMatrix> {
        build_design(data, &self.grams)
    }
}

impl Default for BenchmarkBases {
    fn default() -> Self {
        Self::new()
    }
}

/// The `b` whose `Zb` is the least-squares projection of `mean` onto `col(Z)`.
///
/// With `mean = g(u)` this is the "true" coefficient vector used for the
/// non-centrality `δ`.
pub fn projected_truth(design: &DesignMatrix, mean: &[f64]) -> Result<Vec<f64>> {
    Ok(fit_ols(design, mean)?.coefficients.iter().copied().collect())
}

/// Everything the Monte Carlo aggregation needs from one replication.
#[derive(Debug, Clone)]
pub struct ReplicationOutcome {
    pub tests: Vec<HypothesisTest>,
    /// One entry per requested `(method, q)`.
    pub selections: Vec<Vec<usize>>,
    /// Out-of-sample MSE of the model refit on each selection.
    pub mse: Vec<f64>,
}

/// Generates, fits, tests and selects for one replication under each rule.
pub fn analyze_replication(
    scenario: &SimScenario,
    rep_index: u64,
    rules: &[(Method, f64)],
    bases: &BenchmarkBases,
) -> Result<ReplicationOutcome> {
    let rep = generate_replication(scenario, rep_index)?;
    let data = bases.dataset(&rep)?;
    let design = bases.design(&data)?;
    let tests = test_all(&design, data.responses())?;

    let test_rep = generate_from_stream(scenario, rep_index, Stream::Test)?;
    let test_data = bases.dataset(&test_rep)?;

    let mut selections = Vec::with_capacity(rules.len());
    let mut mse = Vec::with_capacity(rules.len());
    for &(method, q) in rules {
        let sel = select(&tests, method, q)?;
        mse.push(prediction_mse(&data, &test_data, &sel.selected, &bases.grams)?);
        selections.push(sel.selected);
    }
    Ok(ReplicationOutcome { tests, selections, mse })
}

/// Refits on `selected` predictors (plus intercept) and returns the mean
/// squared prediction error on `test`.
pub fn prediction_mse(
    train: &FunctionalDataset,
    test: &FunctionalDataset,
    selected: &[usize],
    grams: &[GramMatrix],
) -> Result<f64> {
    let y_test = test.responses();
    let predictions: Vec<f64> = if selected.is_empty() {
        let mean = train.responses().iter().sum::<f64>() / train.n() as f64;
        vec![mean; test.n()]
    } else {
        let sub_grams: Vec<GramMatrix> = selected.iter().map(|&m| grams[m].clone()).collect();
        let train_sub = train.select_predictors(selected)?;
        let design = build_design(&train_sub, &sub_grams)?;
        let fit = fit_ols(&design, train_sub.responses())?;
        let test_design = build_design(&test.select_predictors(selected)?, &sub_grams)?;
        (test_design.values() * &fit.coefficients).iter().copied().collect()
    };
    let sse: f64 = y_test.iter().zip(&predictions).map(|(y, p)| (y - p).powi(2)).sum();
    Ok(sse / y_test.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloReport {
    pub scenario: SimScenario,
    pub method: Method,
    pub q: f64,
    pub replications: usize,
    /// Replications that failed in the pipeline and were skipped.
    pub failed: usize,
    /// Replications whose selected set equals `I₀` exactly.
    pub correct_count: usize,
    /// Mean out-of-sample MSE over successful replications.
    pub amse: f64,
    pub selection_counts: Vec<usize>,
    /// `selection_counts / (replications − failed)`.
    pub selection_frequencies: Vec<f64>,
}

/// Runs `replications` replications and reports one [`MonteCarloReport`] per rule.
///
/// Replications run on the current rayon pool; aggregation is in replication
/// order, so the reports do not depend on the thread count.
pub fn run_monte_carlo_rules(
    scenario: &SimScenario,
    rules: &[(Method, f64)],
    replications: usize,
) -> Result<Vec<MonteCarloReport>> {
    if replications == 0 {
        return Err(Error::invalid("replications must be at least 1"));
    }
    scenario.validate()?;
    let bases = BenchmarkBases::new();
    let outcomes: Vec<Result<ReplicationOutcome>> = (0..replications as u64)
        .into_par_iter()
        .map(|rep| analyze_replication(scenario, rep, rules, &bases))
        .collect();
    let truth = scenario.truth();
    let mut reports = Vec::with_capacity(rules.len());
    for (r, &(method, q)) in rules.iter().enumerate() {
        let mut failed = 0;
        let mut correct = 0;
        let mut counts = vec![0usize; NUM_PREDICTORS];
        let mut mse_sum = 0.0;
        for (rep, outcome) in outcomes.iter().enumerate() {
            match outcome {
                Ok(o) => {
                    let sel = &o.selections[r];
                    if *sel == truth.true_set {
                        correct += 1;
                    }
                    for &m in sel {
                        counts[m] += 1;
                    }
                    mse_sum += o.mse[r];
                }
                Err(e) => {
                    if r == 0 {
                        log::warn!("replication {rep} failed: {e}");
                    }
                    failed += 1;
                }
            }
        }
        let ok = replications - failed;
        let denom = ok.max(1) as f64;
        reports.push(MonteCarloReport {
            scenario: scenario.clone(),
            method,
            q,
            replications,
            failed,
            correct_count: correct,
            amse: if ok > 0 { mse_sum / denom } else { f64::NAN },
            selection_frequencies: counts.iter().map(|&c| c as f64 / denom).collect(),
            selection_counts: counts,
        });
    }
    Ok(reports)
}

pub fn run_monte_carlo(
    scenario: &SimScenario,
    method: Method,
    q: f64,
    replications: usize,
) -> Result<MonteCarloReport> {
    Ok(run_monte_carlo_rules(scenario, &[(method, q)], replications)?.remove(0))
}

/// Fresh responses `g(u_i) + ε_i` for the same predictors and noise level.
pub fn redraw_responses<R: Rng>(rep: &Replication, rng: &mut R) -> Vec<f64> {
    rep.mean_response
        .iter()
        .map(|m| {
            let z: f64 = StandardNormal.sample(rng);
            m + rep.response_sd * z
        })
        .collect()
}

/// `Zb` for a coefficient vector `b`.
pub fn linear_predictor(design: &DesignMatrix, b: &[f64]) -> Vec<f64> {
    (design.values() * DVector::from_column_slice(b)).iter().copied().collect()
}
