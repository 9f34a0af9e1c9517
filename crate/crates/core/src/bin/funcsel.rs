use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use funcsel::cli::{self, JobConfig, SEED_ENV};
use funcsel::Error;

/// Variable selection for scalar-on-function regression.
///
/// Flags override values from `--config`; see the README for the file format.
#[derive(Debug, Parser)]
#[command(name = "funcsel", version)]
struct Args {
    /// select, simulate or bootstrap
    #[arg(long)]
    mode: Option<String>,
    /// Long-format curves CSV (sample_id,predictor_id,t,value)
    #[arg(long)]
    curves: Option<PathBuf>,
    /// Responses CSV (sample_id,y)
    #[arg(long)]
    responses: Option<PathBuf>,
    /// bc, fdr, or a comma list
    #[arg(long)]
    method: Option<String>,
    /// Level in (0, 1) or `auto`
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    basis_size: Option<String>,
    #[arg(long)]
    degree: Option<String>,
    /// Falls back to FUNCSEL_SEED, then 0
    #[arg(long)]
    seed: Option<String>,
    /// Monte Carlo replications (simulate)
    #[arg(long)]
    reps: Option<String>,
    /// Bootstrap resamples
    #[arg(long)]
    bootstrap_b: Option<String>,
    #[arg(long)]
    threads: Option<String>,
    /// Machine-readable output path
    #[arg(long)]
    out: Option<PathBuf>,
    /// jsonl or csv (default: from the --out extension)
    #[arg(long)]
    format: Option<String>,
    /// Flat key=value configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Simulation coefficient scale c
    #[arg(long)]
    sim_c: Option<String>,
    /// Simulation sample size
    #[arg(long)]
    sim_n: Option<String>,
    /// Curve noise multiplier
    #[arg(long)]
    sim_noise_x: Option<String>,
    /// Response noise multiplier
    #[arg(long)]
    sim_noise_y: Option<String>,
    /// benchmark or null
    #[arg(long)]
    sim_response: Option<String>,
}

impl Args {
    fn assignments(&self) -> Vec<(String, String)> {
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        [
            ("mode", self.mode.clone()),
            ("curves", path(&self.curves)),
            ("responses", path(&self.responses)),
            ("method", self.method.clone()),
            ("q", self.q.clone()),
            ("basis_size", self.basis_size.clone()),
            ("degree", self.degree.clone()),
            ("seed", self.seed.clone()),
            ("reps", self.reps.clone()),
            ("bootstrap_b", self.bootstrap_b.clone()),
            ("threads", self.threads.clone()),
            ("out", path(&self.out)),
            ("format", self.format.clone()),
            ("sim.c", self.sim_c.clone()),
            ("sim.n", self.sim_n.clone()),
            ("sim.noise_x", self.sim_noise_x.clone()),
            ("sim.noise_y", self.sim_noise_y.clone()),
            ("sim.response", self.sim_response.clone()),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.map(|v| (k.to_string(), v)))
        .collect()
    }
}

fn main_inner(args: Args) -> Result<(), Error> {
    let mut pairs = match &args.config {
        Some(p) => cli::read_config_file(p)?,
        None => Vec::new(),
    };
    pairs.extend(args.assignments());
    let env_seed = std::env::var(SEED_ENV).ok();
    let config = JobConfig::from_assignments(pairs, env_seed.as_deref())?;

    let output = cli::run(&config)?;
    let mut stdout = std::io::stdout().lock();
    let _ = write!(stdout, "{output}");
    if let Some(out) = &config.out {
        output.records().write_file(out, config.output_format())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match main_inner(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
