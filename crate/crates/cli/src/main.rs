//! `pbit`: generate instances, build APT ladders, run campaigns, write TTS
//! reports and run the validation suites.
//!
//! Exit codes: 0 on success, 1 on a failed command or suite, 2 on a usage
//! error.

mod args;
mod commands;
mod manifest;

use std::ffi::OsString;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Parser;

use args::{Cli, Command, ReplayArgs};
use commands::RunContext;
use manifest::RunManifest;

fn main() -> ExitCode {
    let argv: Vec<OsString> = std::env::args_os().collect();
    let cli = Cli::parse_from(&argv);
    let argv = argv[1..].iter().map(|a| a.to_string_lossy().into_owned()).collect();
    match run(cli, argv) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli, argv: Vec<String>) -> Result<bool> {
    if let Some(w) = cli.workers.filter(|&w| w > 0) {
        // Fails only when a replay already configured the pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w).build_global();
    }
    let ctx = RunContext {
        argv,
        workers: rayon::current_num_threads(),
    };
    match &cli.command {
        Command::Generate(a) => commands::generate(a, &ctx)?,
        Command::Preprocess(a) => commands::preprocess(a, &ctx)?,
        Command::Solve(a) => commands::solve(a, &ctx)?,
        Command::Benchmark(a) => commands::benchmark(a, &ctx)?,
        Command::Validate(a) => return commands::validate(a),
        Command::SweepTime(a) => commands::sweep_time(a)?,
        Command::Replay(a) => return replay(a),
    }
    Ok(true)
}

/// Arguments of `recorded` with the output directory replaced by `out`.
fn retarget(recorded: &[String], out: &Path, force: bool) -> Vec<String> {
    let mut argv = Vec::with_capacity(recorded.len() + 2);
    let mut it = recorded.iter();
    while let Some(a) = it.next() {
        if a == "--out" {
            it.next();
        } else if a.starts_with("--out=") || a == "--force" {
        } else {
            argv.push(a.clone());
        }
    }
    argv.push("--out".into());
    argv.push(out.display().to_string());
    if force {
        argv.push("--force".into());
    }
    argv
}

fn replay(args: &ReplayArgs) -> Result<bool> {
    let recorded = RunManifest::read(&args.manifest)?;
    if recorded.argv.first().is_some_and(|c| c == "replay") {
        bail!("refusing to replay a replay manifest");
    }
    let out = std::env::current_dir()?.join(&args.out);
    std::env::set_current_dir(&recorded.cwd)
        .with_context(|| format!("entering recorded directory {}", recorded.cwd.display()))?;
    recorded.check_inputs()?;
    let mut argv = vec!["pbit".to_string()];
    argv.extend(retarget(&recorded.argv, &out, args.force));
    let cli = Cli::try_parse_from(&argv)?;
    run(cli, argv[1..].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn retarget_replaces_out_in_both_spellings() {
        let rec: Vec<String> = ["solve", "--in", "a", "--out", "old", "--force", "--runs", "3"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(
            retarget(&rec, Path::new("/new"), false),
            ["solve", "--in", "a", "--runs", "3", "--out", "/new"]
        );
        let rec: Vec<String> = ["generate", "--out=old", "--vars", "8"].iter().map(|s| s.to_string()).collect();
        assert_eq!(
            retarget(&rec, Path::new("x"), true),
            ["generate", "--vars", "8", "--out", "x", "--force"]
        );
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
