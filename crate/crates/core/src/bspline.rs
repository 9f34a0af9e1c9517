//! Clamped B-spline bases, pointwise evaluation and exact Gram matrices.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

/// A B-spline basis on `[domain_lo, domain_hi]` with a clamped knot vector.
///
/// The first and last knots are repeated `degree + 1` times; interior knots
/// lie strictly inside the domain. There are `num_basis` basis functions and
/// `num_basis + degree + 1` knots.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisSpec {
    domain_lo: f64,
    domain_hi: f64,
    degree: usize,
    num_basis: usize,
    knots: Vec<f64>,
}

impl BasisSpec {
    /// Clamped basis with `num_basis - degree - 1` equally spaced interior knots.
    pub fn uniform(domain_lo: f64, domain_hi: f64, degree: usize, num_basis: usize) -> Result<Self> {
        if !(domain_lo.is_finite() && domain_hi.is_finite() && domain_lo < domain_hi) {
            return Err(Error::invalid(format!(
                "basis domain must satisfy lo < hi, got [{domain_lo}, {domain_hi}]"
            )));
        }
        if num_basis <= degree {
            return Err(Error::invalid(format!(
                "num_basis ({num_basis}) must exceed degree ({degree})"
            )));
        }
        let interior = num_basis - degree - 1;
        let width = domain_hi - domain_lo;
        let mut knots = Vec::with_capacity(num_basis + degree + 1);
        knots.extend(std::iter::repeat_n(domain_lo, degree + 1));
        knots.extend((1..=interior).map(|j| domain_lo + width * j as f64 / (interior + 1) as f64));
        knots.extend(std::iter::repeat_n(domain_hi, degree + 1));
        Ok(Self {
            domain_lo,
            domain_hi,
            degree,
            num_basis,
            knots,
        })
    }

    /// Builds a basis from an explicit clamped knot vector.
    pub fn from_knots(degree: usize, knots: Vec<f64>) -> Result<Self> {
        if knots.len() < 2 * (degree + 1) {
            return Err(Error::invalid(format!(
                "a degree-{degree} clamped knot vector needs at least {} knots, got {}",
                2 * (degree + 1),
                knots.len()
            )));
        }
        if knots.iter().any(|k| !k.is_finite()) || knots.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::invalid("knots must be finite and nondecreasing"));
        }
        let lo = knots[0];
        let hi = knots[knots.len() - 1];
        if lo >= hi {
            return Err(Error::invalid("knot vector spans an empty domain"));
        }
        let num_basis = knots.len() - degree - 1;
        let clamped_lo = knots[..=degree].iter().all(|&k| k == lo);
        let clamped_hi = knots[num_basis..].iter().all(|&k| k == hi);
        if !clamped_lo || !clamped_hi {
            return Err(Error::invalid(format!(
                "end knots must have multiplicity degree + 1 = {}",
                degree + 1
            )));
        }
        if knots[degree + 1..num_basis].iter().any(|&k| k <= lo || k >= hi) {
            return Err(Error::invalid("interior knots must lie strictly inside the domain"));
        }
        Ok(Self {
            domain_lo: lo,
            domain_hi: hi,
            degree,
            num_basis,
            knots,
        })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.domain_lo, self.domain_hi)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn num_basis(&self) -> usize {
        self.num_basis
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Support interval `[knots[j], knots[j + degree + 1]]` of basis function `j`.
    pub fn support(&self, j: usize) -> (f64, f64) {
        (self.knots[j], self.knots[j + self.degree + 1])
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.domain_lo && t <= self.domain_hi
    }

    /// Index `s` of the knot span `[knots[s], knots[s+1])` containing `t`.
    ///
    /// At the right endpoint the last nonempty span is returned, so evaluation
    /// there is the limit from the left.
    fn span(&self, t: f64) -> usize {
        let last = self.num_basis - 1;
        if t >= self.knots[last + 1] {
            return last;
        }
        // knots[degree..=num_basis] is sorted; find the largest s with knots[s] <= t.
        let upper = self.knots[self.degree..=last + 1].partition_point(|&k| k <= t);
        (self.degree + upper - 1).min(last)
    }

    /// Evaluates all `num_basis` basis functions at `t`.
    pub fn evaluate(&self, t: f64) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.num_basis];
        self.evaluate_into(t, &mut out)?;
        Ok(out)
    }

    /// Like [`evaluate`](Self::evaluate) but writes into a caller buffer of
    /// length `num_basis`.
    pub fn evaluate_into(&self, t: f64, out: &mut [f64]) -> Result<()> {
        if !self.contains(t) || t.is_nan() {
            return Err(Error::OutOfDomain {
                t,
                lo: self.domain_lo,
                hi: self.domain_hi,
            });
        }
        assert_eq!(out.len(), self.num_basis);
        out.fill(0.0);
        let span = self.span(t);
        let local = self.nonzero_at_span(span, t);
        out[span - self.degree..=span].copy_from_slice(&local);
        Ok(())
    }

    /// The `degree + 1` functions that can be nonzero on `span`, i.e. indices
    /// `span - degree ..= span`, via the Cox–de Boor triangle.
    fn nonzero_at_span(&self, span: usize, t: f64) -> Vec<f64> {
        let p = self.degree;
        let k = &self.knots;
        let mut values = vec![0.0; p + 1];
        let mut left = vec![0.0; p + 1];
        let mut right = vec![0.0; p + 1];
        values[0] = 1.0;
        for j in 1..=p {
            left[j] = t - k[span + 1 - j];
            right[j] = k[span + j] - t;
            let mut saved = 0.0;
            for r in 0..j {
                let denom = right[r + 1] + left[j - r];
                let temp = if denom == 0.0 { 0.0 } else { values[r] / denom };
                values[r] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            values[j] = saved;
        }
        values
    }

    /// Basis matrix with one row per point of `grid`.
    pub fn design(&self, grid: &[f64]) -> Result<DMatrix<f64>> {
        let mut m = DMatrix::zeros(grid.len(), self.num_basis);
        let mut row = vec![0.0; self.num_basis];
        for (g, &t) in grid.iter().enumerate() {
            self.evaluate_into(t, &mut row)?;
            for (j, v) in row.iter().enumerate() {
                m[(g, j)] = *v;
            }
        }
        Ok(m)
    }

    /// Distinct knot values, i.e. the breakpoints of the piecewise polynomials.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.knots[self.degree..=self.num_basis].to_vec();
        b.dedup();
        b
    }

    /// The Gram matrix `∫ φ φᵀ dt` over the domain.
    pub fn gram(&self) -> GramMatrix {
        gram_matrix(self)
    }
}

/// Cross-product matrix `J = ∫ φ(t) φ(t)ᵀ dt` of a basis.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    values: DMatrix<f64>,
    basis: BasisSpec,
}

impl GramMatrix {
    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn basis(&self) -> &BasisSpec {
        &self.basis
    }

    /// Wraps an arbitrary square matrix as a Gram matrix for `basis`.
    ///
    /// Intended for tests and for callers that already hold `J` from elsewhere.
    pub fn from_values(basis: BasisSpec, values: DMatrix<f64>) -> Result<Self> {
        let p = basis.num_basis();
        if values.nrows() != p || values.ncols() != p {
            return Err(Error::Shape(format!(
                "Gram matrix must be {p}x{p}, got {}x{}",
                values.nrows(),
                values.ncols()
            )));
        }
        Ok(Self { values, basis })
    }
}

/// Exact Gram matrix by Gauss–Legendre quadrature on each knot span.
///
/// On a span every product `φ_i φ_j` is a polynomial of degree at most
/// `2·degree`, which `degree + 1` nodes integrate exactly.
pub fn gram_matrix(spec: &BasisSpec) -> GramMatrix {
    let p = spec.num_basis;
    let deg = spec.degree;
    let rule = GaussLegendre::new(deg + 1);
    let mut values = DMatrix::zeros(p, p);
    for span in deg..p {
        let (a, b) = (spec.knots[span], spec.knots[span + 1]);
        if b <= a {
            continue;
        }
        let first = span - deg;
        for (t, w) in rule.mapped(a, b) {
            let local = spec.nonzero_at_span(span, t);
            for (r, vr) in local.iter().enumerate() {
                for (c, vc) in local.iter().enumerate().skip(r) {
                    values[(first + r, first + c)] += w * vr * vc;
                }
            }
        }
    }
    values.fill_lower_triangle_with_upper_triangle();
    GramMatrix {
        values,
        basis: spec.clone(),
    }
}
