//! Least-squares projection of gridded curves onto B-spline bases.

use nalgebra::{DMatrix, DVector};

use crate::bspline::BasisSpec;
use crate::error::{Error, Result};

/// Observed values of one curve on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RawCurve {
    grid: Vec<f64>,
    values: Vec<f64>,
}

impl RawCurve {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::Shape(format!(
                "curve grid has {} points but {} values",
                grid.len(),
                values.len()
            )));
        }
        if grid.iter().chain(&values).any(|x| !x.is_finite()) {
            return Err(Error::invalid("curve grid and values must be finite"));
        }
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("curve grid must be strictly increasing"));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }
}

/// Precomputed least-squares smoother for one (basis, grid) pair.
///
/// Holds `H = (BᵀB)⁻¹Bᵀ` obtained from a QR factorisation of the basis
/// matrix `B`, so curves sharing a grid cost one matrix-vector product each.
#[derive(Debug, Clone)]
pub struct Smoother {
    grid: Vec<f64>,
    hat: DMatrix<f64>,
}

impl Smoother {
    pub fn new(spec: &BasisSpec, grid: &[f64]) -> Result<Self> {
        let p = spec.num_basis();
        if grid.len() < p {
            return Err(Error::invalid(format!(
                "grid has {} points, fewer than the {p} basis functions",
                grid.len()
            )));
        }
        let basis = spec.design(grid)?;
        check_schoenberg_whitney(spec, &basis)?;
        let qr = basis.qr();
        let r = qr.r();
        let diag_max = r.diagonal().amax();
        if let Some(j) = (0..p).find(|&j| r[(j, j)].abs() <= 1e-12 * diag_max) {
            let (span_lo, span_hi) = spec.support(j);
            return Err(Error::RankDeficientBasis {
                basis_index: j,
                span_lo,
                span_hi,
            });
        }
        let qt = qr.q().transpose();
        let hat = r
            .solve_upper_triangular(&qt)
            .expect("nonzero diagonal checked above");
        Ok(Self {
            grid: grid.to_vec(),
            hat,
        })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// Coefficients for values observed on this smoother's grid.
    pub fn smooth(&self, values: &[f64]) -> Vec<f64> {
        assert_eq!(values.len(), self.grid.len());
        let v = DVector::from_column_slice(values);
        (&self.hat * v).iter().copied().collect()
    }
}

/// Schoenberg–Whitney condition: the basis matrix has full column rank iff
/// grid points `t_0 < … < t_{p-1}` can be matched with `φ_j(t_j) > 0`.
fn check_schoenberg_whitney(spec: &BasisSpec, basis: &DMatrix<f64>) -> Result<()> {
    let mut next = 0;
    for j in 0..spec.num_basis() {
        match (next..basis.nrows()).find(|&g| basis[(g, j)] > 0.0) {
            Some(g) => next = g + 1,
            None => {
                let (span_lo, span_hi) = spec.support(j);
                return Err(Error::RankDeficientBasis {
                    basis_index: j,
                    span_lo,
                    span_hi,
                });
            }
        }
    }
    Ok(())
}

/// Least-squares basis coefficients `argmin_W Σ_g (values[g] − Wᵀφ(grid[g]))²`.
pub fn smooth_curve(curve: &RawCurve, spec: &BasisSpec) -> Result<Vec<f64>> {
    Ok(Smoother::new(spec, curve.grid())?.smooth(curve.values()))
}

/// Basis coefficients and scalar responses for `n` samples of `M` predictors.
#[derive(Debug, Clone)]
pub struct FunctionalDataset {
    bases: Vec<BasisSpec>,
    coefs: Vec<Vec<Vec<f64>>>,
    responses: Vec<f64>,
}

impl FunctionalDataset {
    /// Assembles a dataset from already-smoothed coefficients.
    ///
    /// `coefs[i][m]` must have length `bases[m].num_basis()` and
    /// `n > 1 + Σ p_m` must hold.
    pub fn from_coefficients(
        bases: Vec<BasisSpec>,
        coefs: Vec<Vec<Vec<f64>>>,
        responses: Vec<f64>,
    ) -> Result<Self> {
        let n = responses.len();
        if coefs.len() != n {
            return Err(Error::Shape(format!(
                "{} coefficient rows but {n} responses",
                coefs.len()
            )));
        }
        if bases.is_empty() {
            return Err(Error::invalid("at least one functional predictor is required"));
        }
        for (i, row) in coefs.iter().enumerate() {
            if row.len() != bases.len() {
                return Err(Error::Shape(format!(
                    "sample {i} has {} predictors, expected {}",
                    row.len(),
                    bases.len()
                )));
            }
            for (m, (w, b)) in row.iter().zip(&bases).enumerate() {
                if w.len() != b.num_basis() {
                    return Err(Error::Shape(format!(
                        "sample {i}, predictor {m}: {} coefficients, basis has {}",
                        w.len(),
                        b.num_basis()
                    )));
                }
            }
        }
        let k = 1 + bases.iter().map(BasisSpec::num_basis).sum::<usize>();
        if n <= k {
            return Err(Error::ConditionC1(format!(
                "n = {n} samples but k = 1 + Σ p_m = {k} parameters; need n > k"
            )));
        }
        Ok(Self {
            bases,
            coefs,
            responses,
        })
    }

    pub fn n(&self) -> usize {
        self.responses.len()
    }

    pub fn num_predictors(&self) -> usize {
        self.bases.len()
    }

    /// Number of regression parameters `k = 1 + Σ p_m`.
    pub fn k(&self) -> usize {
        1 + self.bases.iter().map(BasisSpec::num_basis).sum::<usize>()
    }

    pub fn bases(&self) -> &[BasisSpec] {
        &self.bases
    }

    /// Coefficient vector `W_im`.
    pub fn coefficients(&self, sample: usize, predictor: usize) -> &[f64] {
        &self.coefs[sample][predictor]
    }

    pub fn responses(&self) -> &[f64] {
        &self.responses
    }

    /// A dataset made of the given rows (repeats allowed), e.g. a bootstrap resample.
    pub fn resample(&self, rows: &[usize]) -> Result<Self> {
        Self::from_coefficients(
            self.bases.clone(),
            rows.iter().map(|&i| self.coefs[i].clone()).collect(),
            rows.iter().map(|&i| self.responses[i]).collect(),
        )
    }

    /// Same predictors with a different response vector.
    pub fn with_responses(&self, responses: Vec<f64>) -> Result<Self> {
        if responses.len() != self.n() {
            return Err(Error::Shape(format!(
                "{} responses for {} samples",
                responses.len(),
                self.n()
            )));
        }
        Ok(Self {
            bases: self.bases.clone(),
            coefs: self.coefs.clone(),
            responses,
        })
    }

    /// Keeps only the listed predictors, in the given order.
    pub fn select_predictors(&self, predictors: &[usize]) -> Result<Self> {
        Self::from_coefficients(
            predictors.iter().map(|&m| self.bases[m].clone()).collect(),
            self.coefs
                .iter()
                .map(|row| predictors.iter().map(|&m| row[m].clone()).collect())
                .collect(),
            self.responses.clone(),
        )
    }
}

/// Smooths every curve `curves[i][m]` onto `bases[m]` and bundles the result.
///
/// Curves of one predictor that share a grid reuse a single factorisation.
pub fn build_dataset(
    curves: &[Vec<RawCurve>],
    responses: &[f64],
    bases: &[BasisSpec],
) -> Result<FunctionalDataset> {
    if curves.len() != responses.len() {
        return Err(Error::Shape(format!(
            "{} samples of curves but {} responses",
            curves.len(),
            responses.len()
        )));
    }
    let mut cache: Vec<Option<Smoother>> = vec![None; bases.len()];
    let mut coefs = Vec::with_capacity(curves.len());
    for (i, row) in curves.iter().enumerate() {
        if row.len() != bases.len() {
            return Err(Error::Shape(format!(
                "sample {i} has {} curves, expected {}",
                row.len(),
                bases.len()
            )));
        }
        let mut sample = Vec::with_capacity(bases.len());
        for (m, curve) in row.iter().enumerate() {
            let reuse = matches!(&cache[m], Some(s) if s.grid() == curve.grid());
            if !reuse {
                cache[m] = Some(Smoother::new(&bases[m], curve.grid()).map_err(|e| Error::Smoothing {
                    sample: i,
                    predictor: m,
                    source: Box::new(e),
                })?);
            }
            let smoother = cache[m].as_ref().expect("populated above");
            sample.push(smoother.smooth(curve.values()));
        }
        coefs.push(sample);
    }
    FunctionalDataset::from_coefficients(bases.to_vec(), coefs, responses.to_vec())
}
