//! Command-line front end: `orlicz <command> [--config file.toml] [--key value ...]`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod commands;
pub mod config;
pub mod error;
pub mod report;

use std::io::Write;
use std::path::Path;

use config::RawConfig;
use error::{CliError, Result};

pub const USAGE: &str = "orlicz <verify-family|tree|goodlambda|hardy-report> [--config <file.toml>] \
[--out <path>] [--format json|csv] [--<key> <value> ...]";

/// Merge the config file and the `--key value` overrides.
pub fn parse_args(args: &[String]) -> Result<RawConfig> {
    let mut command = None;
    let mut config_path = None;
    let mut overrides = Vec::new();
    let mut it = args.iter();
    while let Some(arg) = it.next() {
        if let Some(key) = arg.strip_prefix("--") {
            let value = it.next().ok_or_else(|| CliError::config(key, "missing value"))?;
            if key == "config" {
                config_path = Some(value.clone());
            } else {
                overrides.push((key.to_string(), value.clone()));
            }
        } else if command.is_none() {
            command = Some(arg.clone());
        } else {
            return Err(CliError::Usage(format!("unexpected argument `{arg}`; {USAGE}")));
        }
    }
    let mut raw = match config_path {
        Some(p) => RawConfig::load(Path::new(&p))?,
        None => RawConfig::empty(),
    };
    if let Some(c) = command {
        raw.set("command", &format!("\"{c}\""));
    }
    for (k, v) in overrides {
        raw.set(&k, &v);
    }
    Ok(raw)
}

/// Run one command; returns the process exit status.
pub fn run_cli(args: &[String], stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    if args.iter().any(|a| a == "--help" || a == "-h") || args.is_empty() {
        let _ = writeln!(stdout, "usage: {USAGE}");
        return if args.is_empty() { 2 } else { 0 };
    }
    let result = parse_args(args).and_then(|raw| raw.resolve()).and_then(|cfg| {
        let report = commands::run(cfg.clone())?;
        match &cfg.out {
            Some(path) => {
                let mut file = std::fs::File::create(path)
                    .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
                report.write(&mut file, cfg.format)?;
            }
            None => report.write(stdout, cfg.format)?,
        }
        Ok(report)
    });
    match result {
        Ok(report) => {
            if let Some(e) = &report.error {
                let _ = writeln!(stderr, "error: {e}");
            }
            let verdict = if report.passed { "passed" } else { "failed" };
            let _ = writeln!(stderr, "{verdict} (expect_fail = {}), exit {}", report.expect_fail, report.exit_code);
            report.exit_code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
