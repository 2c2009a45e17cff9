//! `lqlab`: window-minimum distributions for reflected Lévy input.
//!
//! Usage:
//!
//! ```text
//! lqlab <command> <model key=value tokens> [--flag value ...]
//!
//! commands: survival | transform | mgf | asymp-heavy | asymp-light |
//!           simulate | validate
//! models:   kind=brownian sigma=S | kind=cpp lambda=L mu=M |
//!           kind=cpn lambda=L mu=M | kind=stable alpha=A beta=B
//! ```
//!
//! Results are written as CSV (`--output FILE`, stdout otherwise);
//! `validate` additionally prints a pass/fail table on stderr. Exit codes:
//! 0 success (and all checks passed), 1 validation check failure, 2 parse
//! error, 3 numeric failure. `LQLAB_THREADS` overrides `--workers`.

mod args;
mod commands;
mod table;
mod validate;

use lqlab::error::Error;
use std::process::ExitCode;

fn write_output(path: Option<&str>, csv: &str) -> Result<(), Error> {
    match path {
        Some(p) => std::fs::write(p, csv).map_err(|e| Error::Numeric {
            operation: "write_output",
            message: format!("cannot write {p}: {e}"),
        }),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn run(argv: &[String]) -> Result<bool, Error> {
    let tokens = args::expand_tokens(argv)?;
    let request = args::parse_request(&tokens)?;
    match commands::execute(&request)? {
        commands::Outcome::Table(rows) => {
            write_output(request.output.as_deref(), &table::render_csv(&rows))?;
            Ok(true)
        }
        commands::Outcome::Validation { rows, summary, passed } => {
            write_output(request.output.as_deref(), &table::render_csv(&rows))?;
            eprint!("{summary}");
            Ok(passed)
        }
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    match run(&argv) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Error::Parse { index: 0, offset: 0, message }) => {
            // request-level errors carry their own location in the message
            eprintln!("error: parse error: {message}");
            eprintln!("run `lqlab survival kind=brownian sigma=1 --t 1 --u 0,0.5` for a smoke test");
            ExitCode::from(2)
        }
        Err(e @ Error::Parse { .. }) => {
            eprintln!("error: {e}");
            eprintln!("run `lqlab survival kind=brownian sigma=1 --t 1 --u 0,0.5` for a smoke test");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
