//! Ordinary and restricted least squares on the design `Z`.
//!
//! The full fit uses a thin QR factorisation `Z = QR`. The restricted fit
//! under `H₀: b_r = 0` applies the closed form
//!
//! ```text
//! b̂⁰ = b̂ − (ZᵀZ)⁻¹Aᵀ (A(ZᵀZ)⁻¹Aᵀ)⁻¹ A b̂
//! ```
//!
//! with `A` the `p_r × k` selector of block `r`. Since `A` only picks
//! columns, `(ZᵀZ)⁻¹Aᵀ` is a column slice of `(ZᵀZ)⁻¹ = R⁻¹R⁻ᵀ` and
//! `A(ZᵀZ)⁻¹Aᵀ` is its diagonal block.

use nalgebra::{DMatrix, DVector};

use crate::design::DesignMatrix;
use crate::error::{Error, Result};

/// Unrestricted least-squares fit.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub coefficients: DVector<f64>,
    pub rss: f64,
    /// Maximum-likelihood variance estimate `RSS / n`.
    pub sigma2_tilde: f64,
    pub fitted: DVector<f64>,
    pub n: usize,
    pub k: usize,
}

impl FitResult {
    /// Intercept `β̂₀`.
    pub fn intercept(&self) -> f64 {
        self.coefficients[0]
    }

    /// Coefficient block `b̂_m` of predictor `m`.
    pub fn block<'a>(&'a self, design: &DesignMatrix, predictor: usize) -> &'a [f64] {
        &self.coefficients.as_slice()[design.block(predictor)]
    }
}

/// Least-squares fit under `b_r = 0`.
#[derive(Debug, Clone)]
pub struct RestrictedFit {
    pub predictor: usize,
    pub coefficients: DVector<f64>,
    /// `RSS₀`, never below the unrestricted RSS.
    pub rss: f64,
    /// Rank of the restricted column space, `k₀ = k − p_r`.
    pub k0: usize,
}

/// A factorised design, reusable across response vectors and restrictions.
#[derive(Debug, Clone)]
pub struct LeastSquares<'a> {
    design: &'a DesignMatrix,
    q: DMatrix<f64>,
    r: DMatrix<f64>,
    xtx_inv: DMatrix<f64>,
}

impl<'a> LeastSquares<'a> {
    pub fn new(design: &'a DesignMatrix) -> Result<Self> {
        let k = design.k();
        let qr = design.values().clone().qr();
        let q = qr.q();
        let r = qr.r();
        let r_inv = r
            .solve_upper_triangular(&DMatrix::identity(k, k))
            .filter(|m| m.iter().all(|v| v.is_finite()))
            .ok_or_else(|| Error::ConditionC1("design R factor is singular".into()))?;
        let xtx_inv = &r_inv * r_inv.transpose();
        Ok(Self {
            design,
            q,
            r,
            xtx_inv,
        })
    }

    pub fn design(&self) -> &DesignMatrix {
        self.design
    }

    /// `(ZᵀZ)⁻¹`.
    pub fn xtx_inverse(&self) -> &DMatrix<f64> {
        &self.xtx_inv
    }

    pub fn fit(&self, y: &[f64]) -> Result<FitResult> {
        let n = self.design.n();
        if y.len() != n {
            return Err(Error::Shape(format!("{} responses for {n} design rows", y.len())));
        }
        let y = DVector::from_column_slice(y);
        let qty = self.q.tr_mul(&y);
        let coefficients = self
            .r
            .solve_upper_triangular(&qty)
            .ok_or_else(|| Error::ConditionC1("design R factor is singular".into()))?;
        let fitted = self.design.values() * &coefficients;
        let rss = (&y - &fitted).norm_squared();
        Ok(FitResult {
            coefficients,
            rss,
            sigma2_tilde: rss / n as f64,
            fitted,
            n,
            k: self.design.k(),
        })
    }

    pub fn restricted(&self, y: &[f64], full: &FitResult, predictor: usize) -> Result<RestrictedFit> {
        let m = self.design.num_predictors();
        if predictor >= m {
            return Err(Error::invalid(format!(
                "predictor index {predictor} out of range for {m} predictors"
            )));
        }
        if y.len() != self.design.n() || full.coefficients.len() != self.design.k() {
            return Err(Error::Shape("response or fit does not match the design".into()));
        }
        let block = self.design.block(predictor);
        let p = block.len();
        let g_cols = self.xtx_inv.columns(block.start, p);
        let g_block = self.xtx_inv.view((block.start, block.start), (p, p)).clone_owned();
        let b_block = full.coefficients.rows(block.start, p).clone_owned();
        let chol = g_block
            .cholesky()
            .ok_or(Error::SingularConstraint { predictor })?;
        let lambda = chol.solve(&b_block);
        let mut coefficients = &full.coefficients - g_cols * lambda;
        coefficients.rows_mut(block.start, p).fill(0.0);
        let y = DVector::from_column_slice(y);
        let rss0 = (y - self.design.values() * &coefficients).norm_squared();
        Ok(RestrictedFit {
            predictor,
            coefficients,
            rss: rss0.max(full.rss),
            k0: self.design.k() - p,
        })
    }

    /// `‖(P − P₀) v‖²` where `P₀` projects onto the columns left after
    /// deleting block `predictor`.
    pub fn projection_gap(&self, v: &DVector<f64>, predictor: usize) -> f64 {
        let pv = &self.q * self.q.tr_mul(v);
        let reduced = self.design.without_block(predictor);
        let q0 = reduced.qr().q();
        let p0v = &q0 * q0.tr_mul(v);
        (pv - p0v).norm_squared()
    }
}

/// Ordinary least squares `b̂ = argmin ‖y − Zb‖²`.
pub fn fit_ols(design: &DesignMatrix, y: &[f64]) -> Result<FitResult> {
    LeastSquares::new(design)?.fit(y)
}

/// Restricted fit for `H₀: b_r = 0`, with `r` a 0-based predictor index.
pub fn fit_restricted(
    design: &DesignMatrix,
    y: &[f64],
    full: &FitResult,
    predictor: usize,
) -> Result<RestrictedFit> {
    LeastSquares::new(design)?.restricted(y, full, predictor)
}

/// Non-centrality `δ = bᵀZᵀ(P − P₀)Zb / σ²` for testing block `predictor`.
pub fn noncentrality(design: &DesignMatrix, b: &[f64], predictor: usize, sigma2: f64) -> Result<f64> {
    if b.len() != design.k() {
        return Err(Error::Shape(format!("b has {} entries, design has k = {}", b.len(), design.k())));
    }
    if !(sigma2 > 0.0) {
        return Err(Error::invalid("σ² must be positive"));
    }
    let ls = LeastSquares::new(design)?;
    let mean = design.values() * DVector::from_column_slice(b);
    Ok(ls.projection_gap(&mean, predictor) / sigma2)
}

/// Explicit `n × n` projections `P` onto `col(Z)` and `P₀` onto `col(Z)`
/// with block `predictor` deleted.
///
/// Quadratic memory; meant for validation on small instances.
pub fn projection_matrices(design: &DesignMatrix, predictor: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let q = design.values().clone().qr().q();
    let q0 = design.without_block(predictor).qr().q();
    (&q * q.transpose(), &q0 * q0.transpose())
}

/// `(RSS₀ − RSS, yᵀ(P − P₀)y)`, the first from the fits and the second from
/// explicit projection matrices.
pub fn projection_rss_identity_check(design: &DesignMatrix, y: &[f64], predictor: usize) -> Result<(f64, f64)> {
    let ls = LeastSquares::new(design)?;
    let full = ls.fit(y)?;
    let restricted = ls.restricted(y, &full, predictor)?;
    let (p, p0) = projection_matrices(design, predictor);
    let yv = DVector::from_column_slice(y);
    let quad = yv.dot(&((p - p0) * &yv));
    Ok((restricted.rss - full.rss, quad))
}
