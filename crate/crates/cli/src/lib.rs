//! Command-line front end for `spider-core`.
//!
//! The `spider` binary is a thin wrapper around [`main_with`]; tests drive the
//! same entry point in-process.

pub mod args;
pub mod commands;
pub mod error;
pub mod manifest;
pub mod svg;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;
use spider_core::verify::ACCEPTANCE_SEED;

pub use args::Cli;
pub use commands::{Context, Outcome};
pub use error::{CliError, CliResult, EXIT_FAILED, EXIT_OK, EXIT_USAGE};
pub use manifest::RunManifest;

/// Runs a parsed command line.
///
/// Failed verdicts are not an error here; callers inspect
/// [`Outcome::failures`].
pub fn run(cli: &Cli, stdout: &mut (dyn Write + Send)) -> CliResult<Outcome> {
    let ctx = Context {
        seed: cli.seed.unwrap_or(ACCEPTANCE_SEED),
        deterministic: cli.deterministic,
    };
    let dispatch = |stdout: &mut (dyn Write + Send)| {
        use args::Command as C;
        match &cli.command {
            C::Sample(a) => commands::sample(ctx, a),
            C::Simulate(a) => commands::simulate(ctx, a),
            C::Density(a) => commands::density(ctx, a),
            C::Figure1(a) => commands::figure1(ctx, a),
            C::Figure2(a) => commands::figure2(ctx, a),
            C::Verify(a) => commands::verify(ctx, a, stdout),
        }
    };
    match cli.threads {
        None => dispatch(stdout),
        Some(0) => Err(CliError::usage("--threads must be positive")),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| CliError::usage(format!("cannot start {t} threads: {e}")))?
            .install(|| dispatch(stdout)),
    }
}

/// Parses `args`, runs, reports to stdout/stderr and returns the exit code.
pub fn main_with<I, T>(args: I, stdout: &mut (dyn Write + Send), stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{text}")
            } else {
                write!(stdout, "{text}")
            };
            return e.exit_code();
        }
    };
    match run(&cli, stdout) {
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
        Ok(outcome) => {
            if let Some((m, path)) = &outcome.manifest {
                for p in m.outputs.iter().chain([path]) {
                    let _ = writeln!(stdout, "wrote {}", p.display());
                }
            }
            let failures = outcome.failures();
            if failures.is_empty() {
                return EXIT_OK;
            }
            let _ = writeln!(
                stderr,
                "{} of {} checks failed:",
                failures.len(),
                outcome.reports.len()
            );
            for r in failures {
                let _ = writeln!(stderr, "  {r}");
            }
            EXIT_FAILED
        }
    }
}
