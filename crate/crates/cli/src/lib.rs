//! Command-line front end: every subcommand prints a JSON envelope
//! `{command, inputs, result, warnings, version}` or the same result as
//! csv or an aligned table.
//!
//! Exit codes: 0 success, 2 invalid input, 3 not converged or not
//! certified, 4 resource cap exceeded.

pub mod args;
mod commands;
mod render;

use std::ffi::OsString;

use cfdim::exact::parse_exact;
use cfdim::{Error, ErrorKind, PrecisionContext};
use clap::Parser;
use serde_json::{json, Value};

pub use args::Format;

/// Exit status, standard output and standard error of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn exit_code(e: &Error) -> i32 {
    match e.kind() {
        ErrorKind::InvalidInput => 2,
        ErrorKind::Uncertified => 3,
        ErrorKind::Resource => 4,
    }
}

fn error_json(e: &Error) -> Value {
    let kind = match e.kind() {
        ErrorKind::InvalidInput => "invalid-input",
        ErrorKind::Uncertified => "uncertified",
        ErrorKind::Resource => "resource",
    };
    let mut v = json!({"kind": kind, "message": e.to_string()});
    if let Error::BoundaryAmbiguity { determined } = e {
        v["determined"] = json!(determined);
    }
    v
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match args::Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            let code = e.exit_code();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code: 2, stdout: String::new(), stderr: text }
            };
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(p) => p,
        Err(e) => return Outcome { code: 4, stdout: String::new(), stderr: format!("thread pool: {e}\n") },
    };
    pool.install(|| execute(&cli))
}

fn execute(cli: &args::Cli) -> Outcome {
    let command = commands::command_name(&cli.command);
    let inputs = commands::inputs_of(&cli.command);
    let outcome = parse_exact(&cli.abs_tol)
        .and_then(|tol| PrecisionContext::new(tol, cli.working_digits))
        .and_then(|ctx| commands::dispatch(&cli.command, &ctx));
    match outcome {
        Ok(out) => {
            let env = render::envelope(&command, inputs, out.result, &out.warnings, None);
            let stdout = render::render(cli.format, &env, out.rows.as_deref());
            let (code, stderr) = if out.uncertified {
                (3, out.warnings.iter().map(|w| format!("{command}: {w}\n")).collect())
            } else {
                (0, String::new())
            };
            Outcome { code, stdout, stderr }
        }
        Err(e) => {
            let stderr = format!("{command}: {e}\n");
            let stdout = match cli.format {
                Format::Json => {
                    let env = render::envelope(&command, inputs, Value::Null, &[], Some(error_json(&e)));
                    render::render(Format::Json, &env, None)
                }
                _ => String::new(),
            };
            Outcome { code: exit_code(&e), stdout, stderr }
        }
    }
}

#[cfg(test)]
mod tests;
