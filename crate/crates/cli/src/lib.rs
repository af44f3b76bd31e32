//! The `kneadlab` command line. [`run`] is the whole program minus process
//! exit, so tests can drive it in-process.

pub mod args;
pub mod commands;
pub mod output;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};

use clap::Parser;
use kneadlab_core::KneadError;
use serde_json::json;

use args::Cli;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_PRECISION: i32 = 2;
pub const EXIT_INVALID: i32 = 3;

pub fn exit_code(e: &KneadError) -> i32 {
    match e {
        KneadError::PrecisionExhausted { .. }
        | KneadError::UndecidedSymbol { .. }
        | KneadError::UnresolvedContainment { .. }
        | KneadError::EndpointUnresolved(_) => EXIT_PRECISION,
        KneadError::AdmissibilityViolation { .. }
        | KneadError::ClosestReturnViolated { .. }
        | KneadError::MonotonicityViolation(_) => EXIT_NEGATIVE,
        _ => EXIT_INVALID,
    }
}

/// Parses `argv`, runs the command and writes its output to `stdout` or
/// `--out`. Diagnostics go to `stderr`. Returns the exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(stdout, "{text}")
            } else {
                write!(stderr, "{text}")
            };
            return code;
        }
    };
    let ctx = match commands::Context::new(cli.common.clone(), &cli.command) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return exit_code(&e);
        }
    };
    let outcome = match commands::run(&ctx, &cli.command) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return exit_code(&e);
        }
    };
    let format = cli
        .common
        .format
        .unwrap_or_else(|| cli.command.default_format());
    let inputs = json!({
        "command": cli.command.name(),
        "rule": cli.common.rule,
        "map": cli.common.map,
        "ell": cli.common.ell,
        "depth": ctx.depth,
        "bits": cli.common.bits,
        "target": cli.common.target,
        "max_bits": cli.common.max_bits,
        "max_orbit_len": cli.common.max_orbit_len,
        "c": cli.common.c,
        "options": format!("{:?}", cli.command),
    });
    let written = match &cli.common.out {
        Some(path) => File::create(path).and_then(|f| {
            let mut w = BufWriter::new(f);
            output::emit(&mut w, format, &inputs, &outcome)?;
            w.flush()
        }),
        None => output::emit(stdout, format, &inputs, &outcome),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: writing output: {e}");
        return EXIT_INVALID;
    }
    for v in outcome.verdicts.iter().filter(|v| v.failed()) {
        let _ = writeln!(stderr, "negative verdict: {}: {}", v.name, v.witness);
    }
    if outcome.negative() {
        EXIT_NEGATIVE
    } else {
        EXIT_OK
    }
}

pub fn main_exit() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
