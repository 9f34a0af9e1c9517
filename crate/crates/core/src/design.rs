//! The linear-model design matrix `Z`.

use nalgebra::DMatrix;

use crate::bspline::GramMatrix;
use crate::error::{Error, Result};
use crate::smoothing::FunctionalDataset;

/// Relative singular-value cutoff below which `Z` is treated as rank deficient.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// `n × k` design with rows `(1, W_i1ᵀJ_1, …, W_iMᵀJ_M)`.
#[derive(Debug, Clone)]
pub struct DesignMatrix {
    values: DMatrix<f64>,
    block_offsets: Vec<usize>,
    condition_c1: bool,
}

impl DesignMatrix {
    /// Wraps a matrix whose column 0 is the intercept and whose remaining
    /// columns are split into blocks of the given sizes.
    ///
    /// Runs the same checks as [`build_design`].
    pub fn from_blocks(values: DMatrix<f64>, block_sizes: &[usize]) -> Result<Self> {
        let mut block_offsets = Vec::with_capacity(block_sizes.len() + 1);
        let mut at = 1;
        block_offsets.push(at);
        for &s in block_sizes {
            if s == 0 {
                return Err(Error::invalid("predictor blocks must be nonempty"));
            }
            at += s;
            block_offsets.push(at);
        }
        if values.ncols() != at {
            return Err(Error::Shape(format!(
                "design has {} columns, blocks need {at}",
                values.ncols()
            )));
        }
        if values.column(0).iter().any(|&v| v != 1.0) {
            return Err(Error::invalid("column 0 of the design must be the intercept"));
        }
        let n = values.nrows();
        if n <= at {
            return Err(Error::ConditionC1(format!(
                "n = {n} rows but k = {at} columns; need n > k"
            )));
        }
        check_rank(&values)?;
        let condition_c1 = satisfies_c1(n, at);
        if !condition_c1 {
            log::debug!(
                "condition (C1) not met: k = 1 + Σ p_m = {at} exceeds √n/log(n) = {:.3} for n = {n}",
                (n as f64).sqrt() / (n as f64).ln()
            );
        }
        Ok(Self {
            values,
            block_offsets,
            condition_c1,
        })
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    /// Total parameter count `k = 1 + Σ p_m`.
    pub fn k(&self) -> usize {
        self.values.ncols()
    }

    pub fn num_predictors(&self) -> usize {
        self.block_offsets.len() - 1
    }

    /// Column offsets: intercept at 0, predictor `m` spans
    /// `block_offsets[m]..block_offsets[m + 1]`.
    pub fn block_offsets(&self) -> &[usize] {
        &self.block_offsets
    }

    pub fn block(&self, predictor: usize) -> std::ops::Range<usize> {
        self.block_offsets[predictor]..self.block_offsets[predictor + 1]
    }

    pub fn block_size(&self, predictor: usize) -> usize {
        self.block(predictor).len()
    }

    /// Whether `k ≤ √n / log(n)` holds.
    pub fn satisfies_condition_c1(&self) -> bool {
        self.condition_c1
    }

    /// Copy of the design with the columns of `predictor` removed.
    pub fn without_block(&self, predictor: usize) -> DMatrix<f64> {
        let cols = self.block(predictor);
        self.values.clone().remove_columns(cols.start, cols.len())
    }

    /// Restricts the design to rows `rows` (repeats allowed).
    pub fn rows(&self, rows: &[usize]) -> Result<Self> {
        let k = self.k();
        let values = DMatrix::from_fn(rows.len(), k, |i, j| self.values[(rows[i], j)]);
        let sizes: Vec<usize> = (0..self.num_predictors()).map(|m| self.block_size(m)).collect();
        Self::from_blocks(values, &sizes)
    }
}

/// `k ≤ √n / log(n)`.
pub fn satisfies_c1(n: usize, k: usize) -> bool {
    let nf = n as f64;
    (k as f64) <= nf.sqrt() / nf.ln()
}

fn check_rank(values: &DMatrix<f64>) -> Result<()> {
    // Singular values of R from a QR factorisation equal those of Z.
    let r = values.clone().qr().r();
    let sv = r.singular_values();
    let max = sv.max();
    let min = sv.min();
    if !(max > 0.0) || !(min / max >= RANK_TOLERANCE) {
        return Err(Error::ConditionC1(format!(
            "design is numerically rank deficient: σ_min/σ_max = {:.3e} < {RANK_TOLERANCE:e}",
            if max > 0.0 { min / max } else { 0.0 }
        )));
    }
    Ok(())
}

/// Assembles `Z` from smoothed coefficients and per-predictor Gram matrices.
pub fn build_design(data: &FunctionalDataset, grams: &[GramMatrix]) -> Result<DesignMatrix> {
    let m_count = data.num_predictors();
    if grams.len() != m_count {
        return Err(Error::Shape(format!(
            "{} Gram matrices for {m_count} predictors",
            grams.len()
        )));
    }
    for (m, (g, b)) in grams.iter().zip(data.bases()).enumerate() {
        if g.basis() != b {
            return Err(Error::invalid(format!(
                "Gram matrix {m} was built from a different basis than predictor {m}"
            )));
        }
    }
    let sizes: Vec<usize> = data.bases().iter().map(|b| b.num_basis()).collect();
    let k = data.k();
    let n = data.n();
    let mut values = DMatrix::zeros(n, k);
    for i in 0..n {
        values[(i, 0)] = 1.0;
        let mut col = 1;
        for (m, gram) in grams.iter().enumerate() {
            let w = data.coefficients(i, m);
            let j = gram.values();
            for c in 0..sizes[m] {
                values[(i, col + c)] = (0..sizes[m]).map(|r| w[r] * j[(r, c)]).sum();
            }
            col += sizes[m];
        }
    }
    DesignMatrix::from_blocks(values, &sizes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bspline::BasisSpec;

    #[test]
    fn identity_gram_passes_coefficients_through() {
        let spec = BasisSpec::from_knots(1, vec![0.0, 0.0, 1.0, 1.0]).unwrap();
        let gram = GramMatrix::from_values(spec.clone(), DMatrix::identity(2, 2)).unwrap();
        let coefs = vec![
            vec![vec![1.0, 2.0]],
            vec![vec![0.0, 1.0]],
            vec![vec![3.0, -1.0]],
            vec![vec![2.0, 5.0]],
        ];
        let data = FunctionalDataset::from_coefficients(vec![spec], coefs, vec![0.0; 4]).unwrap();
        let z = build_design(&data, &[gram]).unwrap();
        assert_eq!(z.values().row(0).iter().copied().collect::<Vec<_>>(), vec![1.0, 1.0, 2.0]);
        assert_eq!(z.block_offsets(), &[1, 3]);
    }

    #[test]
    fn hat_gram_row_sums() {
        let spec = BasisSpec::from_knots(1, vec![0.0, 0.0, 1.0, 1.0]).unwrap();
        let gram = spec.gram();
        let coefs = vec![
            vec![vec![1.0, 1.0]],
            vec![vec![0.0, 1.0]],
            vec![vec![2.0, -1.0]],
            vec![vec![1.0, 3.0]],
        ];
        let data = FunctionalDataset::from_coefficients(vec![spec], coefs, vec![0.0; 4]).unwrap();
        let z = build_design(&data, &[gram]).unwrap();
        assert!((z.values()[(0, 1)] - 0.5).abs() < 1e-15);
        assert!((z.values()[(0, 2)] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn collinear_design_is_rejected() {
        let mut v = DMatrix::from_fn(10, 3, |i, j| (i * (j + 1)) as f64);
        v.column_mut(0).fill(1.0);
        let c1 = v.column(1).clone_owned();
        v.column_mut(2).copy_from(&(c1 * 2.0));
        let err = DesignMatrix::from_blocks(v, &[2]).unwrap_err();
        assert!(matches!(err, Error::ConditionC1(_)));
    }

    #[test]
    fn condition_c1_flag() {
        assert!(!satisfies_c1(100, 37));
        // √n/log n exceeds 37 only for very large n.
        assert!(satisfies_c1(300_000, 37));
        assert!(satisfies_c1(100, 2));
    }
}
