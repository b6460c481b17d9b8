use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use shiftinv_cli::problem::{self, Objects, Overrides, ProblemFile, TaskDecl, Workspace};
use shiftinv_cli::report::Report;
use shiftinv_cli::{run, CliError};

#[derive(Parser)]
#[command(name = "shiftinv", version, about = "Checks invariance and near-invariance of truncated Hardy-space subspaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args)]
struct Opts {
    /// Membership tolerance, overriding the file.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Degree cap, overriding the file.
    #[arg(long, global = true)]
    cap: Option<usize>,
    /// Worker threads; 1 runs everything sequentially.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Run every task in the file.
    Run { file: PathBuf },
    /// Run only the check-invariance tasks.
    CheckInvariance { file: PathBuf },
    /// Run only the check-near-invariance tasks.
    CheckNearInvariance { file: PathBuf },
    /// Run only the verify-theta tasks.
    VerifyTheta { file: PathBuf },
    /// Run only the hitt tasks.
    Hitt { file: PathBuf },
    /// Run only the blaschke-transfer tasks.
    BlaschkeTransfer { file: PathBuf },
    /// Print Sigma(m, gamma, k), from a file's build-sigma tasks or from flags.
    BuildSigma {
        #[arg(required_unless_present_all = ["m", "gamma", "k"])]
        file: Option<PathBuf>,
        #[arg(long, conflicts_with = "file")]
        m: Option<usize>,
        #[arg(long, conflicts_with = "file")]
        gamma: Option<usize>,
        #[arg(long, conflicts_with = "file")]
        k: Option<usize>,
    },
}

fn read(path: &Path) -> Result<ProblemFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    problem::parse(&text)
}

fn load(command: Command) -> Result<ProblemFile, CliError> {
    let (file, kind) = match command {
        Command::Run { file } => (file, None),
        Command::CheckInvariance { file } => (file, Some("check-invariance")),
        Command::CheckNearInvariance { file } => (file, Some("check-near-invariance")),
        Command::VerifyTheta { file } => (file, Some("verify-theta")),
        Command::Hitt { file } => (file, Some("hitt")),
        Command::BlaschkeTransfer { file } => (file, Some("blaschke-transfer")),
        Command::BuildSigma {
            file: Some(file), ..
        } => (file, Some("build-sigma")),
        Command::BuildSigma {
            file: None,
            m,
            gamma,
            k,
        } => {
            let (Some(m), Some(gamma), Some(k)) = (m, gamma, k) else {
                unreachable!("clap requires a file or all of --m, --gamma, --k")
            };
            return Ok(ProblemFile {
                workspace: Workspace::default(),
                objects: Objects::default(),
                subspaces: Default::default(),
                tasks: vec![TaskDecl::BuildSigma {
                    name: None,
                    m,
                    gamma,
                    k,
                }],
            });
        }
    };
    let mut file = read(&file)?;
    if let Some(kind) = kind {
        file.tasks.retain(|t| t.kind() == kind);
    }
    Ok(file)
}

fn configure_jobs(jobs: Option<usize>) {
    match jobs {
        Some(0) | None => {}
        Some(1) => shiftinv_core::par::set_parallel(false),
        #[cfg(feature = "parallel")]
        Some(n) => {
            // Only fails if a pool already exists, in which case it is used as is.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        #[cfg(not(feature = "parallel"))]
        Some(_) => {}
    }
}

fn emit(report: &Report, opts: &Opts) -> Result<(), CliError> {
    let body = match opts.format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    };
    match &opts.out {
        Some(path) => std::fs::write(path, body).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_jobs(cli.opts.jobs);
    let overrides = Overrides {
        cap: cli.opts.cap,
        tol: cli.opts.tol,
    };
    let start = Instant::now();
    let result = load(cli.command)
        .and_then(|file| problem::validate(&file, overrides))
        .map(|p| run::run(&p));
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let Err(e) = emit(&report, &cli.opts) {
        eprintln!("error: {e}");
        return ExitCode::from(e.exit_code() as u8);
    }
    for t in &report.tasks {
        let name = t.name.as_deref().unwrap_or("-");
        eprintln!("{:>5}  {:<22} {}", t.status.label(), t.kind, name);
    }
    let s = &report.summary;
    eprintln!(
        "{} tasks: {} pass, {} fail, {} error ({:.2?})",
        s.total,
        s.passed,
        s.failed,
        s.errors,
        start.elapsed()
    );
    ExitCode::from(report.exit_code() as u8)
}
