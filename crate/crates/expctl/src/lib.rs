//! Configuration, execution and reporting of experiments.

pub mod config;
pub mod error;
pub mod record;
pub mod report;
pub mod run;

pub use config::{ExperimentConfig, Kind};
pub use error::{CliError, CliResult};
pub use record::ResultRecord;
pub use report::{report_dir, summarize, Summary};
pub use run::{execute, RunOptions, RunOutput};

use std::path::Path;

/// Runs `config` and writes `records.jsonl`, companion files, the config copy
/// and `timings.jsonl` under `out`.
pub fn run_to_dir(config: &Path, out: &Path, opts: &RunOptions) -> CliResult<RunOutput> {
    let (cfg, bytes) = ExperimentConfig::load(config)?;
    let result = execute(&cfg, &bytes, opts)?;
    std::fs::create_dir_all(out)?;
    record::append_jsonl(&out.join("records.jsonl"), &result.records)?;
    for (name, body) in &result.artifacts {
        std::fs::write(out.join(name), body)?;
    }
    std::fs::write(out.join(format!("{}.toml", cfg.experiment.id)), &bytes)?;
    let timing = serde_json::json!({
        "experiment": cfg.experiment.id,
        "config_hash": result.records.first().map(|r| r.config_hash.clone()).unwrap_or_else(|| cfg.hash()),
        "wall_clock_seconds": result.wall_clock,
        "threads": result.threads,
    });
    use std::io::Write;
    let mut f = std::fs::OpenOptions::new().create(true).append(true).open(out.join("timings.jsonl"))?;
    writeln!(f, "{timing}")?;
    Ok(result)
}
