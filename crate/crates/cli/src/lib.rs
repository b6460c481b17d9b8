//! Problem files in, deterministic reports out.

pub mod problem;
pub mod report;
pub mod run;

use thiserror::Error;

/// Input errors. Computation errors never surface here; they mark the task
/// that raised them as ERROR.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid {field}: {message}")]
    Validation { field: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

/// Parses, validates and runs a problem file's text.
pub fn run_text(text: &str, overrides: problem::Overrides) -> Result<report::Report, CliError> {
    let file = problem::parse(text)?;
    let problem = problem::validate(&file, overrides)?;
    Ok(run::run(&problem))
}
