//! Writes a synthetic dataset in the long CSV format, reads it back and runs
//! the selection job on the files, as the `funcsel` binary does.
//!
//!     cargo run --release --example csv_roundtrip

use funcsel::cli::{default_ids, run_select, write_long_csv, JobConfig, Mode, OutputFormat, QSetting};
use funcsel::simgen::{generate_replication, SimScenario};
use funcsel::Method;

fn main() -> funcsel::Result<()> {
    let dir = std::env::temp_dir().join("funcsel-csv-roundtrip");
    std::fs::create_dir_all(&dir).map_err(|source| funcsel::Error::Io { path: dir.clone(), source })?;
    let (curves, responses) = (dir.join("curves.csv"), dir.join("responses.csv"));

    let rep = generate_replication(&SimScenario::new(0.8, 300, 5), 0)?;
    let (samples, predictors) = default_ids(rep.responses.len(), rep.curves[0].len());
    write_long_csv(&curves, &responses, &samples, &predictors, &rep.curves, &rep.responses)?;
    println!("wrote {} and {}", curves.display(), responses.display());

    let config = JobConfig {
        mode: Mode::Select,
        curves: Some(curves),
        responses: Some(responses),
        methods: vec![Method::Bonferroni, Method::Fdr],
        q: QSetting::Auto,
        ..JobConfig::default()
    };
    let report = run_select(&config)?;
    print!("\n{report}");

    let out = dir.join("selection.csv");
    report.records().write_file(&out, OutputFormat::Csv)?;
    println!("\nrecords written to {}", out.display());
    Ok(())
}
