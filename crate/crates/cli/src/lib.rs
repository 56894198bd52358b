//! Command-line sweeps over `lossfish-core`.
//!
//! Every subcommand produces a [`table::Table`] that is written as CSV or
//! JSON with 12 significant digits, so repeated runs are byte-identical.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod error;
pub mod grid;
pub mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};

pub use commands::{Cli, Command};
pub use error::{CliError, CliResult};

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "LOSSFISH_THREADS";

/// Configures the global thread pool from [`THREADS_ENV`].
pub fn init_threads() -> CliResult<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| CliError::Invalid(format!("{THREADS_ENV}={v} is not a thread count")))?;
    if n == 0 {
        return Err(CliError::Invalid(format!("{THREADS_ENV} must be at least 1")));
    }
    // a pool that was already built keeps its size
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Runs a parsed command and writes its table.
pub fn run(cli: &Cli) -> CliResult<()> {
    let table = cli.command.run()?;
    let out = cli.command.output();
    match &out.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            table.write(out.format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            table.write(out.format, &mut w)?;
        }
    }
    Ok(())
}
