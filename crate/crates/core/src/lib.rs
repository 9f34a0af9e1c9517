//! Scalar-on-function linear regression with B-spline expansions,
//! per-predictor likelihood-ratio tests, and variable selection by
//! Bonferroni or Benjamini–Yekutieli FDR corrections.
//!
//! The pipeline for a dataset of `n` samples and `M` functional predictors:
//!
//! 1. [`smoothing`] turns each observed curve into B-spline coefficients `W_im`.
//! 2. [`design`] builds `Z` with rows `(1, W_i1ᵀ J_1, …, W_iMᵀ J_M)` where
//!    `J_m` is the Gram matrix from [`bspline`].
//! 3. [`linmodel`] fits the full model and each restricted model `b_r = 0`.
//! 4. [`inference`] turns the RSS gap into `T_L = (RSS₀ − RSS)/σ̃²` and a χ² p-value.
//! 5. [`selection`] applies Bonferroni or the FDR step-up rule.
//!
//! [`simgen`] reproduces the six-predictor synthetic benchmark and runs Monte
//! Carlo experiments; [`cli`] holds CSV ingestion and the job runners behind
//! the `funcsel` binary.

pub mod bspline;
pub mod cli;
pub mod design;
pub mod error;
pub mod inference;
pub mod linmodel;
pub mod quadrature;
pub mod selection;
pub mod simgen;
pub mod smoothing;

pub use bspline::{gram_matrix, BasisSpec, GramMatrix};
pub use design::{build_design, DesignMatrix};
pub use error::{Error, Result};
pub use inference::{chisq_cdf, noncentral_chisq_cdf, test_all, test_predictor, HypothesisTest};
pub use linmodel::{fit_ols, fit_restricted, FitResult, RestrictedFit};
pub use selection::{default_q, select, select_bonferroni, select_fdr, Method, SelectionResult};
pub use smoothing::{build_dataset, smooth_curve, FunctionalDataset, RawCurve};
