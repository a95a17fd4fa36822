//! Configuration, job pipelines and file output for the `respkit` binary.

pub mod config;
pub mod error;
pub mod jobs;
pub mod output;
pub mod report;

use std::path::{Path, PathBuf};

pub use config::{parse_config, JobKind, RunConfig};
pub use error::{CliError, ConfigError};
pub use jobs::{run, JobOutput};
pub use report::RunReport;

use output::{commit, OutputFile};

pub const REPORT_FILE: &str = "report.json";

/// Resolves the output directory: explicit override, then config, then `respkit-out`.
pub fn output_dir(cfg: &RunConfig, override_dir: Option<&Path>) -> PathBuf {
    override_dir
        .map(Path::to_path_buf)
        .or_else(|| cfg.job.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("respkit-out"))
}

/// Writes the job's files, then `report.json` with the checksum manifest.
pub fn write_job(dir: &Path, output: JobOutput) -> Result<RunReport, CliError> {
    let JobOutput { mut report, files } = output;
    report.files = output::commit(dir, &files)?;
    let json = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    commit(dir, &[OutputFile::new(REPORT_FILE, json)])?;
    Ok(report)
}
