//! Command-line front end: argument handling, dispatch and exit codes.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 model-invariant
//! violation.

// `!(x > y)` is used on purpose so that NaN fails positivity checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod commands;
pub mod report;

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;
use tradebloc_core::{parse_exact, Exact, ModelError, ModelParams, Scalar};

use args::{Cli, Command, Format, RunConfig};
use commands::Context;
use report::Report;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

/// Errors caused by the caller's input rather than by the model.
fn is_input_error(e: &ModelError) -> bool {
    !matches!(
        e,
        ModelError::ProhibitiveTariff { .. }
            | ModelError::NonPositivePrice { .. }
            | ModelError::NoConvergence { .. }
    )
}

fn params<T: Scalar>(config: &RunConfig) -> Result<ModelParams<T>, ModelError> {
    let a: Exact = parse_exact(&config.a)?;
    let lambda: Exact = parse_exact(&config.lambda)?;
    let (a, lambda) = (T::of_exact(&a), T::of_exact(&lambda));
    if config.allow_two_countries {
        ModelParams::with_two_country_override(config.n, a, lambda)
    } else {
        ModelParams::new(config.n, a, lambda)
    }
}

fn build<T: Scalar>(config: &RunConfig, command: &Command) -> Result<Report, ModelError> {
    let cx = Context {
        params: params::<T>(config)?,
        sigfigs: usize::from(config.sigfigs),
    };
    match command {
        Command::Sweep => commands::sweep(&cx),
        Command::TwoFta { first } => commands::two_fta(&cx, *first),
        Command::Spe { rule, order, solver } => commands::spe(&cx, *rule, order, *solver),
        Command::Nash => commands::nash(&cx),
        Command::Regime { regime } => commands::regime(&cx, regime),
        Command::Cu { partition } => commands::cu(&cx, partition),
        Command::Stability { regime } => commands::stability(&cx, regime),
        Command::Figure => commands::figure(&cx),
    }
}

/// Parses `args` (including the program name), runs the command and writes
/// the report to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, S>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    return EXIT_OK;
                }
                _ => EXIT_USAGE,
            };
            let _ = write!(err, "{e}");
            return code;
        }
    };
    let built = if cli.config.exact {
        build::<Exact>(&cli.config, &cli.command)
    } else {
        build::<f64>(&cli.config, &cli.command)
    };
    let report = match built {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return if is_input_error(&e) { EXIT_USAGE } else { EXIT_VIOLATION };
        }
    };
    let text = match cli.config.format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json(),
    };
    if out.write_all(text.as_bytes()).is_err() {
        return EXIT_USAGE;
    }
    if report.violations.is_empty() {
        EXIT_OK
    } else {
        for v in &report.violations {
            let _ = writeln!(err, "invariant violation: {v}");
        }
        EXIT_VIOLATION
    }
}
