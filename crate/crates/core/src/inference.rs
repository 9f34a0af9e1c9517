//! Likelihood-ratio tests of individual functional predictors.
//!
//! `T_L = (RSS₀ − RSS) / σ̃²` with `σ̃² = RSS / n` is referred to a χ²
//! distribution with `p_r` degrees of freedom. The χ² CDF is the regularized
//! lower incomplete gamma function `P(dof/2, x/2)`, evaluated by its power
//! series below `a + 1` and by a Lentz continued fraction for `Q` above.

use crate::design::DesignMatrix;
use crate::error::{Error, Result};
use crate::linmodel::{FitResult, LeastSquares};

/// Smallest reported p-value.
pub const P_VALUE_FLOOR: f64 = 1e-300;

const EPS: f64 = 1e-16;
const MAX_ITER: usize = 100_000;

/// Outcome of testing `H₀: b_r = 0` for one predictor.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisTest {
    /// 0-based predictor index.
    pub predictor: usize,
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// `ln Γ(x)` for `x > 0` (Lanczos, g = 7, 9 coefficients).
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // Reflection.
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEF[0];
    let t = x + G + 0.5;
    for (i, c) in COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Regularized lower and upper incomplete gamma `(P(a, x), Q(a, x))`.
pub fn regularized_gamma(a: f64, x: f64) -> (f64, f64) {
    debug_assert!(a > 0.0 && x >= 0.0);
    if x == 0.0 {
        return (0.0, 1.0);
    }
    if x.is_infinite() {
        return (1.0, 0.0);
    }
    let log_prefactor = a * x.ln() - x - ln_gamma(a);
    if x < a + 1.0 {
        let p = lower_series(a, x, log_prefactor);
        (p, 1.0 - p)
    } else {
        let q = upper_continued_fraction(a, x, log_prefactor);
        (1.0 - q, q)
    }
}

fn lower_series(a: f64, x: f64, log_prefactor: f64) -> f64 {
    let mut ap = a;
    let mut term = 1.0 / a;
    let mut sum = term;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * EPS {
            break;
        }
    }
    (sum.ln() + log_prefactor).exp().min(1.0)
}

fn upper_continued_fraction(a: f64, x: f64, log_prefactor: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    (log_prefactor + h.ln()).exp().min(1.0)
}

/// CDF of the central χ² distribution with `dof` degrees of freedom.
pub fn chisq_cdf(x: f64, dof: usize) -> Result<f64> {
    check_chisq_args(x, dof)?;
    Ok(regularized_gamma(dof as f64 / 2.0, x / 2.0).0)
}

/// Upper tail `1 − Ψ_dof(x)`, computed without cancellation.
pub fn chisq_sf(x: f64, dof: usize) -> Result<f64> {
    check_chisq_args(x, dof)?;
    Ok(regularized_gamma(dof as f64 / 2.0, x / 2.0).1)
}

fn check_chisq_args(x: f64, dof: usize) -> Result<()> {
    if dof == 0 {
        return Err(Error::invalid("χ² degrees of freedom must be at least 1"));
    }
    if !(x >= 0.0) {
        return Err(Error::invalid(format!("χ² argument must be nonnegative, got {x}")));
    }
    Ok(())
}

/// CDF of the noncentral χ²(dof, δ) distribution as the Poisson(δ/2) mixture
/// `Σ_j w_j Ψ_{dof+2j}(x)`.
///
/// Summation starts at the Poisson mode (weight formed in log space) and walks
/// outwards with the ratio recurrence `w_{j+1} = w_j λ/(j+1)` until the
/// accumulated weight exceeds `1 − 1e-12`.
pub fn noncentral_chisq_cdf(x: f64, dof: usize, delta: f64) -> Result<f64> {
    check_chisq_args(x, dof)?;
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(Error::invalid(format!("noncentrality must be finite and ≥ 0, got {delta}")));
    }
    if delta == 0.0 {
        return chisq_cdf(x, dof);
    }
    let lambda = delta / 2.0;
    let term = |j: usize| regularized_gamma(dof as f64 / 2.0 + j as f64, x / 2.0).0;

    let mode = lambda.floor() as usize;
    let mode_weight = (-lambda + mode as f64 * lambda.ln() - ln_gamma(mode as f64 + 1.0)).exp();
    let mut total_weight = mode_weight;
    let mut sum = mode_weight * term(mode);
    let (mut up, mut up_w) = (mode, mode_weight);
    let (mut down, mut down_w) = (mode, mode_weight);
    while total_weight < 1.0 - 1e-12 {
        // Extend towards whichever side currently carries more weight.
        if down > 0 && down_w >= up_w {
            down_w *= down as f64 / lambda;
            down -= 1;
            total_weight += down_w;
            sum += down_w * term(down);
        } else {
            up += 1;
            up_w *= lambda / up as f64;
            total_weight += up_w;
            sum += up_w * term(up);
        }
        let frontier = if down > 0 { up_w.max(down_w) } else { up_w };
        if frontier < 1e-18 * mode_weight {
            break;
        }
    }
    // Normalising absorbs rounding in the mode weight.
    Ok((sum / total_weight).clamp(0.0, 1.0))
}

/// Likelihood-ratio test of predictor `r` (0-based) against a shared full fit.
pub fn test_predictor(design: &DesignMatrix, y: &[f64], full: &FitResult, predictor: usize) -> Result<HypothesisTest> {
    let ls = LeastSquares::new(design)?;
    test_with(&ls, y, full, predictor)
}

fn test_with(ls: &LeastSquares<'_>, y: &[f64], full: &FitResult, predictor: usize) -> Result<HypothesisTest> {
    let restricted = ls.restricted(y, full, predictor)?;
    let dof = ls.design().block_size(predictor);
    let statistic = if full.sigma2_tilde > 0.0 {
        (restricted.rss - full.rss) / full.sigma2_tilde
    } else if restricted.rss > full.rss {
        f64::INFINITY
    } else {
        0.0
    };
    let p_value = chisq_sf(statistic, dof)?.max(P_VALUE_FLOOR);
    Ok(HypothesisTest {
        predictor,
        statistic,
        dof,
        p_value,
    })
}

/// Tests every predictor against one full fit on `(design, y)`.
pub fn test_all(design: &DesignMatrix, y: &[f64]) -> Result<Vec<HypothesisTest>> {
    let ls = LeastSquares::new(design)?;
    let full = ls.fit(y)?;
    (0..design.num_predictors())
        .map(|r| test_with(&ls, y, &full, r))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_gamma_at_integers_and_half() {
        let mut fact = 1.0f64;
        for n in 1..25 {
            assert!((ln_gamma(n as f64) - fact.ln()).abs() < 1e-12 * fact.ln().max(1.0), "n={n}");
            fact *= n as f64;
        }
        let sqrt_pi = std::f64::consts::PI.sqrt();
        assert!((ln_gamma(0.5) - sqrt_pi.ln()).abs() < 1e-14);
    }

    #[test]
    fn chisq_cdf_special_cases() {
        for d in 1..10 {
            assert_eq!(chisq_cdf(0.0, d).unwrap(), 0.0);
        }
        let x = 2.0 * std::f64::consts::LN_2;
        assert!((chisq_cdf(x, 2).unwrap() - 0.5).abs() < 1e-15);
        for &x in &[0.01, 0.5, 1.0, 3.0, 10.0, 40.0, 200.0] {
            let want = 1.0 - (-x / 2.0f64).exp();
            assert!((chisq_cdf(x, 2).unwrap() - want).abs() < 1e-14, "x={x}");
        }
    }

    #[test]
    fn chisq_argument_errors() {
        assert!(chisq_cdf(-1.0, 3).is_err());
        assert!(chisq_cdf(1.0, 0).is_err());
        assert!(chisq_cdf(f64::NAN, 3).is_err());
        assert!(noncentral_chisq_cdf(1.0, 3, -0.5).is_err());
    }

    #[test]
    fn noncentral_reduces_to_central() {
        for &x in &[0.5, 3.0, 12.0] {
            let a = noncentral_chisq_cdf(x, 6, 0.0).unwrap();
            let b = chisq_cdf(x, 6).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn noncentral_two_dof_small_series() {
        // For dof = 2 the mixture has closed-form terms; check against a
        // directly summed series with 200 terms.
        let (x, delta) = (5.0f64, 3.0f64);
        let lambda = delta / 2.0;
        let mut want = 0.0;
        let mut w = (-lambda).exp();
        for j in 0..200 {
            if j > 0 {
                w *= lambda / j as f64;
            }
            want += w * chisq_cdf(x, 2 + 2 * j).unwrap();
        }
        let got = noncentral_chisq_cdf(x, 2, delta).unwrap();
        assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn noncentral_large_delta_does_not_underflow() {
        let delta = 4000.0f64;
        let mean = 6.0 + delta;
        let sd = (2.0 * (6.0 + 2.0 * delta)).sqrt();
        let mid = noncentral_chisq_cdf(mean, 6, delta).unwrap();
        assert!(mid > 0.4 && mid < 0.6, "{mid}");
        assert!(noncentral_chisq_cdf(mean - 8.0 * sd, 6, delta).unwrap() < 1e-10);
        assert!(noncentral_chisq_cdf(mean + 8.0 * sd, 6, delta).unwrap() > 1.0 - 1e-10);
    }

    #[test]
    fn p_value_decreases_with_statistic() {
        let mut last = 1.0;
        for i in 1..200 {
            let p = chisq_sf(i as f64 * 0.5, 6).unwrap();
            assert!(p < last);
            last = p;
        }
    }
}
