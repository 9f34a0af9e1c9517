//! Long-format CSV input and output.
//!
//! Curves: `sample_id,predictor_id,t,value`, one row per observation.
//! Responses: `sample_id,y`, one row per sample. Rows may come in any order;
//! samples follow the responses file and predictors follow their first
//! appearance in the curves file.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::bspline::BasisSpec;
use crate::cli::config::JobConfig;
use crate::error::{Error, Result};
use crate::smoothing::{build_dataset, FunctionalDataset, RawCurve};

pub const CURVES_HEADER: [&str; 4] = ["sample_id", "predictor_id", "t", "value"];
pub const RESPONSES_HEADER: [&str; 2] = ["sample_id", "y"];

/// Curves and responses read from disk, grouped per sample and predictor.
#[derive(Debug, Clone)]
pub struct IngestedData {
    pub sample_ids: Vec<String>,
    pub predictor_ids: Vec<String>,
    /// `curves[i][m]`, sorted by `t`.
    pub curves: Vec<Vec<RawCurve>>,
    pub responses: Vec<f64>,
    /// Per-predictor domain: the configured override, else `[min t, max t]`.
    pub domains: Vec<(f64, f64)>,
}

impl IngestedData {
    pub fn n(&self) -> usize {
        self.responses.len()
    }

    /// Basis per predictor from the configured degree and size.
    pub fn bases(&self, config: &JobConfig) -> Result<Vec<BasisSpec>> {
        self.predictor_ids
            .iter()
            .zip(&self.domains)
            .map(|(id, &(lo, hi))| {
                let (degree, num_basis, _) = config.basis_for(id);
                BasisSpec::uniform(lo, hi, degree, num_basis)
                    .map_err(|e| Error::Config(format!("basis for predictor `{id}`: {e}")))
            })
            .collect()
    }

    pub fn dataset(&self, config: &JobConfig) -> Result<FunctionalDataset> {
        build_dataset(&self.curves, &self.responses, &self.bases(config)?)
    }
}

fn data_err(file: &Path, line: u64, field: &str, message: impl Into<String>) -> Error {
    Error::Data {
        file: file.to_path_buf(),
        line,
        field: field.to_string(),
        message: message.into(),
    }
}

fn open_reader(path: &Path, expected: &[&str]) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let header = reader
        .headers()
        .map_err(|e| data_err(path, 1, "header", e.to_string()))?
        .clone();
    let got: Vec<&str> = header.iter().map(|h| h.trim_start_matches('\u{feff}')).collect();
    if got != expected {
        return Err(data_err(
            path,
            1,
            "header",
            format!("expected `{}`, found `{}`", expected.join(","), got.join(",")),
        ));
    }
    Ok(reader)
}

/// Iterates `(line, record)` pairs, turning CSV syntax errors into data errors.
fn records<'a>(path: &Path, reader: &'a mut csv::Reader<File>) -> impl Iterator<Item = Result<(u64, csv::StringRecord)>> + 'a {
    let path = path.to_path_buf();
    reader.records().map(move |r| match r {
        Ok(rec) => Ok((rec.position().map_or(0, |p| p.line()), rec)),
        Err(e) => {
            let line = e.position().map_or(0, |p| p.line());
            Err(data_err(&path, line, "record", e.to_string()))
        }
    })
}

fn number(path: &Path, line: u64, field: &str, raw: &str) -> Result<f64> {
    let v: f64 = raw
        .parse()
        .map_err(|_| data_err(path, line, field, format!("`{raw}` is not a number")))?;
    if !v.is_finite() {
        return Err(data_err(path, line, field, format!("`{raw}` is not finite")));
    }
    Ok(v)
}

struct Observation {
    t: f64,
    value: f64,
    line: u64,
}

/// Reads and validates a curves/responses pair.
///
/// Every sample must appear in both files, every (sample, predictor) pair
/// must be present with at least as many distinct `t` values as its basis
/// size, and no `(sample, predictor, t)` may repeat.
pub fn ingest_long_csv(curves_path: &Path, responses_path: &Path, config: &JobConfig) -> Result<IngestedData> {
    // Responses first: they fix the sample order.
    let mut reader = open_reader(responses_path, &RESPONSES_HEADER)?;
    let mut sample_ids = Vec::new();
    let mut sample_lines = Vec::new();
    let mut responses = Vec::new();
    let mut sample_index: HashMap<String, usize> = HashMap::new();
    for rec in records(responses_path, &mut reader) {
        let (line, rec) = rec?;
        let id = rec[0].to_string();
        if id.is_empty() {
            return Err(data_err(responses_path, line, "sample_id", "empty sample id"));
        }
        let y = number(responses_path, line, "y", &rec[1])?;
        if let Some(&prev) = sample_index.get(&id) {
            return Err(data_err(
                responses_path,
                line,
                "sample_id",
                format!("duplicate sample `{id}` (first on line {})", sample_lines[prev]),
            ));
        }
        sample_index.insert(id.clone(), sample_ids.len());
        sample_ids.push(id);
        sample_lines.push(line);
        responses.push(y);
    }
    if sample_ids.is_empty() {
        return Err(data_err(responses_path, 2, "sample_id", "no samples"));
    }

    let mut reader = open_reader(curves_path, &CURVES_HEADER)?;
    let mut predictor_ids: Vec<String> = Vec::new();
    let mut predictor_index: HashMap<String, usize> = HashMap::new();
    let mut cells: HashMap<(usize, usize), Vec<Observation>> = HashMap::new();
    for rec in records(curves_path, &mut reader) {
        let (line, rec) = rec?;
        let sid = &rec[0];
        let i = *sample_index.get(sid).ok_or_else(|| {
            data_err(
                curves_path,
                line,
                "sample_id",
                format!("sample `{sid}` has no row in {}", responses_path.display()),
            )
        })?;
        let pid = &rec[1];
        if pid.is_empty() {
            return Err(data_err(curves_path, line, "predictor_id", "empty predictor id"));
        }
        let m = match predictor_index.get(pid) {
            Some(&m) => m,
            None => {
                predictor_index.insert(pid.to_string(), predictor_ids.len());
                predictor_ids.push(pid.to_string());
                predictor_ids.len() - 1
            }
        };
        let t = number(curves_path, line, "t", &rec[2])?;
        let value = number(curves_path, line, "value", &rec[3])?;
        cells.entry((i, m)).or_default().push(Observation { t, value, line });
    }
    if predictor_ids.is_empty() {
        return Err(data_err(curves_path, 2, "predictor_id", "no observations"));
    }

    let mut domains: Vec<Option<(f64, f64)>> = predictor_ids
        .iter()
        .map(|id| config.basis_for(id).2)
        .collect();
    let overridden: Vec<bool> = domains.iter().map(Option::is_some).collect();
    let mut curves = Vec::with_capacity(sample_ids.len());
    for (i, sid) in sample_ids.iter().enumerate() {
        let mut row = Vec::with_capacity(predictor_ids.len());
        for (m, pid) in predictor_ids.iter().enumerate() {
            let mut obs = cells.remove(&(i, m)).ok_or_else(|| {
                data_err(
                    curves_path,
                    0,
                    "predictor_id",
                    format!(
                        "sample `{sid}` (line {} of {}) has no rows for predictor `{pid}`",
                        sample_lines[i],
                        responses_path.display()
                    ),
                )
            })?;
            obs.sort_by(|a, b| a.t.total_cmp(&b.t).then(a.line.cmp(&b.line)));
            for w in obs.windows(2) {
                if w[0].t == w[1].t {
                    return Err(data_err(
                        curves_path,
                        w[1].line,
                        "t",
                        format!(
                            "duplicate observation for sample `{sid}`, predictor `{pid}`, t = {} (also line {})",
                            w[1].t, w[0].line
                        ),
                    ));
                }
            }
            let (_, num_basis, _) = config.basis_for(pid);
            if obs.len() < num_basis {
                return Err(data_err(
                    curves_path,
                    obs[0].line,
                    "t",
                    format!(
                        "sample `{sid}`, predictor `{pid}` has {} distinct t values, basis needs at least {num_basis}",
                        obs.len()
                    ),
                ));
            }
            let (lo, hi) = (obs[0].t, obs[obs.len() - 1].t);
            match &mut domains[m] {
                Some((dlo, dhi)) if overridden[m] => {
                    if let Some(bad) = obs.iter().find(|o| o.t < *dlo || o.t > *dhi) {
                        return Err(data_err(
                            curves_path,
                            bad.line,
                            "t",
                            format!("t = {} outside the configured domain [{dlo}, {dhi}] of `{pid}`", bad.t),
                        ));
                    }
                }
                Some((dlo, dhi)) => {
                    *dlo = dlo.min(lo);
                    *dhi = dhi.max(hi);
                }
                slot @ None => *slot = Some((lo, hi)),
            }
            let (grid, values) = obs.iter().map(|o| (o.t, o.value)).unzip();
            row.push(RawCurve::new(grid, values).map_err(|e| data_err(curves_path, obs[0].line, "value", e.to_string()))?);
        }
        curves.push(row);
    }
    let domains = domains
        .into_iter()
        .zip(&predictor_ids)
        .map(|(d, pid)| {
            let (lo, hi) = d.expect("every predictor has at least one curve");
            if lo < hi {
                Ok((lo, hi))
            } else {
                Err(data_err(curves_path, 0, "t", format!("predictor `{pid}` has a degenerate domain [{lo}, {hi}]")))
            }
        })
        .collect::<Result<_>>()?;
    Ok(IngestedData {
        sample_ids,
        predictor_ids,
        curves,
        responses,
        domains,
    })
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> Error + '_ {
    move |e| Error::Io {
        path: path.to_path_buf(),
        source: std::io::Error::other(e),
    }
}

/// Writes curves and responses in the format read by [`ingest_long_csv`].
///
/// Numbers use the shortest representation that parses back to the same `f64`.
pub fn write_long_csv(
    curves_path: &Path,
    responses_path: &Path,
    sample_ids: &[String],
    predictor_ids: &[String],
    curves: &[Vec<RawCurve>],
    responses: &[f64],
) -> Result<()> {
    if curves.len() != sample_ids.len() || responses.len() != sample_ids.len() {
        return Err(Error::Shape(format!(
            "{} sample ids, {} curve rows, {} responses",
            sample_ids.len(),
            curves.len(),
            responses.len()
        )));
    }
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(curves_path).map_err(io_err(curves_path))?));
    w.write_record(CURVES_HEADER).map_err(csv_err(curves_path))?;
    for (sid, row) in sample_ids.iter().zip(curves) {
        if row.len() != predictor_ids.len() {
            return Err(Error::Shape(format!(
                "sample `{sid}` has {} curves, expected {}",
                row.len(),
                predictor_ids.len()
            )));
        }
        for (pid, curve) in predictor_ids.iter().zip(row) {
            for (t, v) in curve.grid().iter().zip(curve.values()) {
                w.write_record([sid.as_str(), pid.as_str(), &t.to_string(), &v.to_string()])
                    .map_err(csv_err(curves_path))?;
            }
        }
    }
    w.flush().map_err(io_err(curves_path))?;

    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(responses_path).map_err(io_err(responses_path))?));
    w.write_record(RESPONSES_HEADER).map_err(csv_err(responses_path))?;
    for (sid, y) in sample_ids.iter().zip(responses) {
        w.write_record([sid.as_str(), &y.to_string()]).map_err(csv_err(responses_path))?;
    }
    w.into_inner()
        .map_err(|e| Error::Io {
            path: responses_path.to_path_buf(),
            source: std::io::Error::other(e.to_string()),
        })?
        .flush()
        .map_err(io_err(responses_path))?;
    Ok(())
}

/// Default sample and predictor names (`s1…`, `x1…`) for generated data.
pub fn default_ids(n: usize, num_predictors: usize) -> (Vec<String>, Vec<String>) {
    (
        (1..=n).map(|i| format!("s{i}")).collect(),
        (1..=num_predictors).map(|m| format!("x{m}")).collect(),
    )
}
