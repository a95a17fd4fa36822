use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use respkit_cli::{output_dir, parse_config, run, write_job, CliError, JobKind};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Job {
    Absorb,
    Twodir,
    Validate,
    Stability,
}

impl From<Job> for JobKind {
    fn from(j: Job) -> Self {
        match j {
            Job::Absorb => JobKind::Absorb,
            Job::Twodir => JobKind::Twodir,
            Job::Validate => JobKind::Validate,
            Job::Stability => JobKind::Stability,
        }
    }
}

/// Linear and 2D IR response of an anharmonic oscillator in a harmonic bath.
#[derive(Debug, Parser)]
#[command(name = "respkit", version)]
struct Args {
    job: Job,
    #[arg(long)]
    config: PathBuf,
    /// Overrides `output_dir` from the config.
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Run baths whose response never decays, truncating at the grid length.
    #[arg(long)]
    allow_divergent: bool,
    #[arg(long)]
    emit_svg: bool,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

fn execute(args: &Args) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.config).map_err(|source| CliError::Io {
        path: args.config.clone(),
        source,
    })?;
    let mut cfg = parse_config(&text)?.for_job(args.job.into())?;
    cfg.job.allow_divergent |= args.allow_divergent;
    cfg.job.emit_svg |= args.emit_svg;
    let dir = output_dir(&cfg, args.output_dir.as_deref());
    let output = run(&cfg)?;
    let report = write_job(&dir, output)?;
    log::info!("wrote {} files to {}", report.files.len() + 1, dir.display());
    println!(
        "{}",
        serde_json::to_string_pretty(&report.results).expect("results serialize")
    );
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    if let Some(n) = args.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("respkit: cannot configure {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    match execute(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("respkit: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
