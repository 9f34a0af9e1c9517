//! Multiple-testing corrections over the per-predictor p-values.
//!
//! * Bonferroni: `Î = {m : π_m ≤ q/M}`.
//! * FDR (Benjamini–Yekutieli step-up): with ordered p-values
//!   `π_(1) ≤ … ≤ π_(M)` and `H_M = Σ_{l=1}^M 1/l`,
//!   `s = max{j : π_(j) ≤ (j/M)(q/H_M)}`; the `s` smallest are selected, none
//!   if no such `j` exists.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inference::HypothesisTest;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[serde(rename = "bc")]
    Bonferroni,
    Fdr,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Bonferroni => "bc",
            Method::Fdr => "fdr",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bc" | "bonferroni" => Ok(Method::Bonferroni),
            "fdr" | "by" => Ok(Method::Fdr),
            other => Err(Error::Config(format!("unknown method `{other}` (expected bc or fdr)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub method: Method,
    pub q: f64,
    pub tests: Vec<HypothesisTest>,
    /// Selected predictor indices (0-based), ascending.
    pub selected: Vec<usize>,
    /// Number of rejections.
    pub rejections: usize,
}

impl SelectionResult {
    pub fn is_selected(&self, predictor: usize) -> bool {
        self.selected.binary_search(&predictor).is_ok()
    }
}

fn check_q(q: f64) -> Result<()> {
    if q > 0.0 && q < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("q must lie in (0, 1), got {q}")))
    }
}

/// `H_M = Σ_{l=1}^M 1/l` by direct summation.
pub fn harmonic(m: usize) -> f64 {
    (1..=m).map(|l| 1.0 / l as f64).sum()
}

pub fn select_bonferroni(tests: &[HypothesisTest], q: f64) -> Result<SelectionResult> {
    check_q(q)?;
    if tests.is_empty() {
        return Err(Error::invalid("no hypothesis tests to select from"));
    }
    let threshold = q / tests.len() as f64;
    let mut selected: Vec<usize> = tests
        .iter()
        .filter(|t| t.p_value <= threshold)
        .map(|t| t.predictor)
        .collect();
    selected.sort_unstable();
    Ok(SelectionResult {
        method: Method::Bonferroni,
        q,
        tests: tests.to_vec(),
        rejections: selected.len(),
        selected,
    })
}

pub fn select_fdr(tests: &[HypothesisTest], q: f64) -> Result<SelectionResult> {
    check_q(q)?;
    let m = tests.len();
    if m == 0 {
        return Err(Error::invalid("no hypothesis tests to select from"));
    }
    let mut order: Vec<&HypothesisTest> = tests.iter().collect();
    // Ties broken by predictor index.
    order.sort_by(|a, b| a.p_value.total_cmp(&b.p_value).then(a.predictor.cmp(&b.predictor)));
    let scale = q / (m as f64 * harmonic(m));
    let s = (1..=m)
        .rev()
        .find(|&j| order[j - 1].p_value <= j as f64 * scale)
        .unwrap_or(0);
    let mut selected: Vec<usize> = order[..s].iter().map(|t| t.predictor).collect();
    selected.sort_unstable();
    Ok(SelectionResult {
        method: Method::Fdr,
        q,
        tests: tests.to_vec(),
        rejections: s,
        selected,
    })
}

pub fn select(tests: &[HypothesisTest], method: Method, q: f64) -> Result<SelectionResult> {
    match method {
        Method::Bonferroni => select_bonferroni(tests, q),
        Method::Fdr => select_fdr(tests, q),
    }
}

/// Rule-of-thumb level: `1/M` when `M > √n`, otherwise `1/√n`.
pub fn default_q(n: usize, m: usize) -> f64 {
    let root = (n as f64).sqrt();
    if m as f64 > root {
        1.0 / m as f64
    } else {
        1.0 / root
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn tests_from(p: &[f64]) -> Vec<HypothesisTest> {
        p.iter()
            .enumerate()
            .map(|(i, &p_value)| HypothesisTest {
                predictor: i,
                statistic: 0.0,
                dof: 6,
                p_value,
            })
            .collect()
    }

    const PAPER_LIKE: [f64; 6] = [0.001, 0.002, 0.2, 0.5, 0.9, 0.95];

    #[test]
    fn bonferroni_threshold() {
        let r = select_bonferroni(&tests_from(&PAPER_LIKE), 0.05).unwrap();
        assert_eq!(r.selected, vec![0, 1]);
        assert!(select_bonferroni(&tests_from(&[1.0; 6]), 0.05).unwrap().selected.is_empty());
        assert_eq!(select_bonferroni(&tests_from(&[0.0; 4]), 0.05).unwrap().selected, vec![0, 1, 2, 3]);
    }

    #[test]
    fn fdr_step_up() {
        let r = select_fdr(&tests_from(&PAPER_LIKE), 0.05).unwrap();
        assert_eq!(r.rejections, 2);
        assert_eq!(r.selected, vec![0, 1]);
        let none = select_fdr(&tests_from(&[1.0; 6]), 0.05).unwrap();
        assert_eq!(none.rejections, 0);
        assert!(none.selected.is_empty());
        let single = select_fdr(&tests_from(&[0.025]), 0.05).unwrap();
        assert_eq!(single.selected, vec![0]);
    }

    #[test]
    fn fdr_is_step_up_not_step_down() {
        // π_(1) fails its own threshold but π_(2) passes its; step-up rejects both.
        let q = 0.1;
        let scale = q / (2.0 * harmonic(2));
        let p = [scale * 1.5, scale * 1.9];
        assert_eq!(select_fdr(&tests_from(&p), q).unwrap().selected, vec![0, 1]);
    }

    #[test]
    fn invalid_q() {
        let t = tests_from(&PAPER_LIKE);
        for q in [0.0, 1.0, -0.1, f64::NAN] {
            assert!(select_fdr(&t, q).is_err());
            assert!(select_bonferroni(&t, q).is_err());
        }
    }

    #[test]
    fn rule_of_thumb_q() {
        assert!((default_q(100, 6) - 0.1).abs() < 1e-15);
        assert!((default_q(100, 50) - 0.02).abs() < 1e-15);
        assert!((default_q(10_000, 6) - 0.01).abs() < 1e-15);
    }

    #[test]
    fn method_parsing() {
        assert_eq!("BC".parse::<Method>().unwrap(), Method::Bonferroni);
        assert_eq!("fdr".parse::<Method>().unwrap(), Method::Fdr);
        assert!("lasso".parse::<Method>().is_err());
    }
}
