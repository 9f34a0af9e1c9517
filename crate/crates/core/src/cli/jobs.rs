//! Select, bootstrap and simulate jobs, their reports and record output.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bspline::{gram_matrix, GramMatrix};
use crate::cli::config::{JobConfig, Mode, OutputFormat};
use crate::cli::ingest::{ingest_long_csv, IngestedData};
use crate::design::build_design;
use crate::error::{Error, Result};
use crate::inference::test_all;
use crate::selection::{select, Method, SelectionResult};
use crate::simgen::{run_monte_carlo_rules, MonteCarloReport, NUM_PREDICTORS};
use crate::smoothing::FunctionalDataset;

/// Runs `f` on a rayon pool of `threads` workers, or on the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(format!("cannot build a pool of {n} threads: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Tests every predictor of `data` and applies each method at level `q`.
pub fn select_dataset(
    data: &FunctionalDataset,
    grams: &[GramMatrix],
    methods: &[Method],
    q: f64,
) -> Result<Vec<SelectionResult>> {
    let design = build_design(data, grams)?;
    let tests = test_all(&design, data.responses())?;
    methods.iter().map(|&m| select(&tests, m, q)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectReport {
    pub predictors: Vec<String>,
    pub n: usize,
    pub k: usize,
    pub condition_c1: bool,
    pub q: f64,
    pub selections: Vec<SelectionResult>,
}

fn load(config: &JobConfig) -> Result<IngestedData> {
    let (Some(c), Some(r)) = (&config.curves, &config.responses) else {
        return Err(Error::Config(format!("mode {} requires `curves` and `responses`", config.mode)));
    };
    ingest_long_csv(c, r, config)
}

pub fn run_select(config: &JobConfig) -> Result<SelectReport> {
    let input = load(config)?;
    let data = input.dataset(config)?;
    let grams: Vec<GramMatrix> = data.bases().iter().map(gram_matrix).collect();
    let design = build_design(&data, &grams)?;
    let q = config.q.resolve(data.n(), data.num_predictors());
    if !design.satisfies_condition_c1() {
        log::warn!(
            "k = {} exceeds sqrt(n)/log(n) for n = {}; p-values rely on asymptotics outside their regime",
            data.k(),
            data.n()
        );
    }
    let tests = test_all(&design, data.responses())?;
    let selections = config
        .methods
        .iter()
        .map(|&m| select(&tests, m, q))
        .collect::<Result<_>>()?;
    Ok(SelectReport {
        predictors: input.predictor_ids,
        n: data.n(),
        k: data.k(),
        condition_c1: design.satisfies_condition_c1(),
        q,
        selections,
    })
}

/// Row indices of bootstrap replicate `replicate`: `n` draws with replacement
/// from stream `replicate` of a ChaCha20 generator seeded with `seed`.
pub fn bootstrap_indices(seed: u64, replicate: u64, n: usize) -> Vec<usize> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    (0..n).map(|_| rng.random_range(0..n)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodRatios {
    pub method: Method,
    pub q: f64,
    pub counts: Vec<usize>,
    /// `counts / (B − failed)`.
    pub ratios: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BootstrapReport {
    pub b: usize,
    pub seed: u64,
    /// Replicates whose design was rank deficient or otherwise numerically unusable.
    pub failed: usize,
    pub predictors: Vec<String>,
    pub methods: Vec<MethodRatios>,
}

/// Resamples whole observations `b` times and tallies how often each
/// predictor is selected.
///
/// Numerical failures in a replicate are counted and excluded from the
/// ratios; other errors abort the run.
pub fn bootstrap_dataset(
    data: &FunctionalDataset,
    predictors: &[String],
    methods: &[Method],
    q: f64,
    b: usize,
    seed: u64,
) -> Result<BootstrapReport> {
    if b == 0 {
        return Err(Error::invalid("bootstrap_b must be at least 1"));
    }
    let grams: Vec<GramMatrix> = data.bases().iter().map(gram_matrix).collect();
    let outcomes: Vec<Result<Vec<SelectionResult>>> = (0..b as u64)
        .into_par_iter()
        .map(|rep| {
            let sample = data.resample(&bootstrap_indices(seed, rep, data.n()))?;
            select_dataset(&sample, &grams, methods, q)
        })
        .collect();
    let m = data.num_predictors();
    let mut counts = vec![vec![0usize; m]; methods.len()];
    let mut failed = 0;
    for (rep, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(sels) => {
                for (c, sel) in counts.iter_mut().zip(&sels) {
                    for &r in &sel.selected {
                        c[r] += 1;
                    }
                }
            }
            Err(e) if e.exit_code() == 3 => {
                log::warn!("bootstrap replicate {rep} failed: {e}");
                failed += 1;
            }
            Err(e) => return Err(e),
        }
    }
    if failed == b {
        return Err(Error::ConditionC1(format!("all {b} bootstrap replicates failed")));
    }
    let denom = (b - failed) as f64;
    Ok(BootstrapReport {
        b,
        seed,
        failed,
        predictors: predictors.to_vec(),
        methods: methods
            .iter()
            .zip(counts)
            .map(|(&method, counts)| MethodRatios {
                method,
                q,
                ratios: counts.iter().map(|&c| c as f64 / denom).collect(),
                counts,
            })
            .collect(),
    })
}

pub fn run_bootstrap(config: &JobConfig) -> Result<BootstrapReport> {
    let input = load(config)?;
    let data = input.dataset(config)?;
    let q = config.q.resolve(data.n(), data.num_predictors());
    with_threads(config.threads, || {
        bootstrap_dataset(&data, &input.predictor_ids, &config.methods, q, config.bootstrap_b, config.seed)
    })?
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulateReport {
    pub reports: Vec<MonteCarloReport>,
}

pub fn run_simulate(config: &JobConfig) -> Result<SimulateReport> {
    let scenario = config.scenario();
    let q = config.q.resolve(scenario.n, NUM_PREDICTORS);
    let rules: Vec<(Method, f64)> = config.methods.iter().map(|&m| (m, q)).collect();
    let reports = with_threads(config.threads, || run_monte_carlo_rules(&scenario, &rules, config.reps))??;
    Ok(SimulateReport { reports })
}

#[derive(Debug, Clone, PartialEq)]
pub enum JobOutput {
    Select(SelectReport),
    Bootstrap(BootstrapReport),
    Simulate(SimulateReport),
}

/// Runs the job selected by `config.mode`.
pub fn run(config: &JobConfig) -> Result<JobOutput> {
    Ok(match config.mode {
        Mode::Select => JobOutput::Select(with_threads(config.threads, || run_select(config))??),
        Mode::Bootstrap => JobOutput::Bootstrap(run_bootstrap(config)?),
        Mode::Simulate => JobOutput::Simulate(run_simulate(config)?),
    })
}

/// A flat table of named columns, written as CSV or JSON lines.
#[derive(Debug, Clone, PartialEq)]
pub struct Records {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Records {
    pub fn write_to<W: Write>(&self, out: W, format: OutputFormat) -> Result<()> {
        let io = |e: std::io::Error| Error::Io {
            path: "<output>".into(),
            source: e,
        };
        let mut out = out;
        match format {
            OutputFormat::Csv => {
                let mut w = csv::Writer::from_writer(&mut out);
                let csv_io = |e: csv::Error| io(std::io::Error::other(e));
                w.write_record(&self.columns).map_err(csv_io)?;
                for row in &self.rows {
                    let cells = row.iter().map(|v| match v {
                        Value::String(s) => s.clone(),
                        Value::Null => String::new(),
                        other => other.to_string(),
                    });
                    w.write_record(cells).map_err(csv_io)?;
                }
                w.flush().map_err(io)?;
            }
            OutputFormat::JsonLines => {
                // Objects are assembled by hand so keys keep column order.
                for row in &self.rows {
                    let fields: Vec<String> = self
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(k, v)| format!("{}:{}", Value::from(*k), v))
                        .collect();
                    writeln!(out, "{{{}}}", fields.join(",")).map_err(io)?;
                }
            }
        }
        out.flush().map_err(io)
    }

    pub fn write_file(&self, path: &Path, format: OutputFormat) -> Result<()> {
        let file = File::create(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.write_to(BufWriter::new(file), format).map_err(|e| match e {
            Error::Io { source, .. } => Error::Io {
                path: path.to_path_buf(),
                source,
            },
            other => other,
        })
    }
}

impl SelectReport {
    /// One row per (method, predictor).
    pub fn records(&self) -> Records {
        let mut rows = Vec::new();
        for sel in &self.selections {
            for t in &sel.tests {
                rows.push(vec![
                    json!(sel.method),
                    json!(sel.q),
                    json!(self.predictors[t.predictor]),
                    json!(t.statistic),
                    json!(t.dof),
                    json!(t.p_value),
                    json!(sel.is_selected(t.predictor)),
                ]);
            }
        }
        Records {
            columns: vec!["method", "q", "predictor", "statistic", "dof", "p_value", "selected"],
            rows,
        }
    }
}

impl BootstrapReport {
    /// One row per (method, predictor).
    pub fn records(&self) -> Records {
        let mut rows = Vec::new();
        for mr in &self.methods {
            for (r, name) in self.predictors.iter().enumerate() {
                rows.push(vec![
                    json!(mr.method),
                    json!(mr.q),
                    json!(self.b),
                    json!(self.seed),
                    json!(self.failed),
                    json!(name),
                    json!(mr.counts[r]),
                    json!(mr.ratios[r]),
                ]);
            }
        }
        Records {
            columns: vec!["method", "q", "b", "seed", "failed", "predictor", "count", "ratio"],
            rows,
        }
    }
}

const FREQ_COLUMNS: [&str; NUM_PREDICTORS] = ["freq_1", "freq_2", "freq_3", "freq_4", "freq_5", "freq_6"];

impl SimulateReport {
    /// One row per method.
    pub fn records(&self) -> Records {
        let mut columns = vec![
            "method",
            "q",
            "c",
            "n",
            "response",
            "seed",
            "replications",
            "failed",
            "correct_count",
            "amse",
        ];
        columns.extend(FREQ_COLUMNS);
        let rows = self
            .reports
            .iter()
            .map(|r| {
                let mut row = vec![
                    json!(r.method),
                    json!(r.q),
                    json!(r.scenario.c),
                    json!(r.scenario.n),
                    json!(r.scenario.response),
                    json!(r.scenario.seed),
                    json!(r.replications),
                    json!(r.failed),
                    json!(r.correct_count),
                    json!(r.amse),
                ];
                row.extend(r.selection_frequencies.iter().map(|f| json!(f)));
                row
            })
            .collect();
        Records { columns, rows }
    }
}

impl JobOutput {
    pub fn records(&self) -> Records {
        match self {
            JobOutput::Select(r) => r.records(),
            JobOutput::Bootstrap(r) => r.records(),
            JobOutput::Simulate(r) => r.records(),
        }
    }
}

impl fmt::Display for SelectReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "n = {}, k = {}, q = {}{}",
            self.n,
            self.k,
            self.q,
            if self.condition_c1 { "" } else { "  (k exceeds sqrt(n)/log(n))" }
        )?;
        let width = self.predictors.iter().map(String::len).max().unwrap_or(0).max(9);
        for sel in &self.selections {
            writeln!(f)?;
            writeln!(f, "method {}", sel.method)?;
            writeln!(f, "{:<width$}  {:>12}  {:>3}  {:>12}  selected", "predictor", "T_L", "dof", "p-value")?;
            for t in &sel.tests {
                writeln!(
                    f,
                    "{:<width$}  {:>12.4}  {:>3}  {:>12.4e}  {}",
                    self.predictors[t.predictor],
                    t.statistic,
                    t.dof,
                    t.p_value,
                    if sel.is_selected(t.predictor) { "*" } else { "" }
                )?;
            }
            let names: Vec<&str> = sel.selected.iter().map(|&r| self.predictors[r].as_str()).collect();
            writeln!(f, "selected: {{{}}}", names.join(", "))?;
        }
        Ok(())
    }
}

impl fmt::Display for BootstrapReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "B = {}, failed = {}, seed = {}", self.b, self.failed, self.seed)?;
        let width = self.predictors.iter().map(String::len).max().unwrap_or(0).max(9);
        write!(f, "{:<width$}", "predictor")?;
        for mr in &self.methods {
            write!(f, "  {:>10}", format!("{} q={:.3}", mr.method, mr.q))?;
        }
        writeln!(f)?;
        for (r, name) in self.predictors.iter().enumerate() {
            write!(f, "{name:<width$}")?;
            for mr in &self.methods {
                write!(f, "  {:>10.2}", mr.ratios[r])?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl fmt::Display for SimulateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(first) = self.reports.first() {
            let s = &first.scenario;
            writeln!(
                f,
                "c = {}, n = {}, replications = {}, seed = {}",
                s.c, s.n, first.replications, s.seed
            )?;
        }
        write!(f, "{:<6}  {:>7}  {:>7}  {:>6}  {:>8}", "method", "q", "correct", "failed", "AMSE")?;
        for m in 1..=NUM_PREDICTORS {
            write!(f, "  {:>5}", format!("x{m}"))?;
        }
        writeln!(f)?;
        for r in &self.reports {
            write!(
                f,
                "{:<6}  {:>7.4}  {:>7}  {:>6}  {:>8.4}",
                r.method.to_string(),
                r.q,
                r.correct_count,
                r.failed,
                r.amse
            )?;
            for fr in &r.selection_frequencies {
                write!(f, "  {fr:>5.2}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl fmt::Display for JobOutput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JobOutput::Select(r) => r.fmt(f),
            JobOutput::Bootstrap(r) => r.fmt(f),
            JobOutput::Simulate(r) => r.fmt(f),
        }
    }
}
