mod args;
mod commands;
mod error;
mod report;
mod suite;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{CommandFactory, Parser};
use lclab::catalog::Catalog;

use args::{Cli, Command};
use commands::Ctx;
use error::{CliError, CliResult};
use report::{pretty, read_manifest, write_manifest, write_outputs, RunManifest, MANIFEST_NAME};

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_VIOLATION: u8 = 2;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::from(EXIT_OK);
            }
            let _ = e.print();
            print_schema();
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, CliError::Usage(_)) {
                print_schema();
            }
            ExitCode::from(EXIT_USAGE)
        }
    }
}

/// Help text of the subcommand named on the command line, or the top level.
fn print_schema() {
    let mut cmd = Cli::command();
    cmd.build();
    let name = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let help = match name.as_deref().and_then(|n| cmd.find_subcommand_mut(n)) {
        Some(sub) => sub.render_help(),
        None => cmd.render_help(),
    };
    eprintln!("{help}");
}

fn load_catalog(path: Option<&Path>) -> CliResult<Catalog> {
    match path {
        Some(p) => Ok(Catalog::load(p)?),
        None => Ok(Catalog::default()),
    }
}

fn absolutize(p: &mut Option<PathBuf>) -> CliResult<()> {
    if let Some(path) = p {
        *path = path.canonicalize().map_err(|e| CliError::io(path, e))?;
    }
    Ok(())
}

fn execute(cli: Cli) -> CliResult<u8> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build_global()
            .map_err(|e| CliError::usage(format!("--threads: {e}")))?;
    }
    if let Command::Replay { manifest } = &cli.command {
        return replay(manifest, cli.out.as_deref());
    }
    let mut command = cli.command;
    if let Command::Calculus { input, input2, .. } = &mut command {
        absolutize(input)?;
        absolutize(input2)?;
    }
    let catalog = std::env::var_os("LCLAB_CATALOG").map(PathBuf::from);
    let catalog = match catalog {
        Some(p) => Some(p.canonicalize().map_err(|e| CliError::io(&p, e))?),
        None => None,
    };
    run_and_record(&command, catalog, cli.threads, cli.out.as_deref())
}

fn run_and_record(command: &Command, catalog: Option<PathBuf>, threads: Option<usize>, out: Option<&Path>) -> CliResult<u8> {
    let ctx = Ctx { catalog: load_catalog(catalog.as_deref())? };
    let config = serde_json::to_value(command)?;
    let start = Instant::now();
    let report = commands::run(&ctx, command)?;
    let wall = start.elapsed().as_secs_f64();
    let name = command.name();
    match out {
        Some(dir) => {
            let outputs = write_outputs(dir, &report, name, &config)?;
            let manifest = RunManifest {
                command: name.to_string(),
                config,
                seed: command.common().map(|c| c.seed),
                version: env!("CARGO_PKG_VERSION").to_string(),
                threads,
                catalog,
                wall_time_seconds: wall,
                outputs,
            };
            write_manifest(dir, &manifest)?;
        }
        None => {
            if !report.files.is_empty() {
                return Err(CliError::usage(format!("{name} writes files and needs --out")));
            }
            let text = pretty(&report.to_json(name, &config))?;
            print!("{}", String::from_utf8_lossy(&text));
        }
    }
    let violated = report.violated();
    if violated.is_empty() {
        return Ok(EXIT_OK);
    }
    for b in violated {
        eprintln!("bound violated: {}: {}", b.name, b.detail);
    }
    Ok(EXIT_VIOLATION)
}

/// Re-runs a manifest into `out` (default `<manifest dir>/replay`) and
/// compares every output file with the original.
fn replay(manifest_path: &Path, out: Option<&Path>) -> CliResult<u8> {
    let manifest_path = if manifest_path.is_dir() { manifest_path.join(MANIFEST_NAME) } else { manifest_path.to_path_buf() };
    let m = read_manifest(&manifest_path)?;
    let origin = manifest_path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let command: Command = serde_json::from_value(m.config.clone())?;
    if matches!(command, Command::Replay { .. }) {
        return Err(CliError::usage("a manifest cannot record a replay"));
    }
    let dir = out.map(Path::to_path_buf).unwrap_or_else(|| origin.join("replay"));
    let code = run_and_record(&command, m.catalog.clone(), m.threads, Some(&dir))?;
    let mut mismatched = Vec::new();
    for name in &m.outputs {
        let a = std::fs::read(origin.join(name)).map_err(|e| CliError::io(&origin.join(name), e))?;
        let b = std::fs::read(dir.join(name)).map_err(|e| CliError::io(&dir.join(name), e))?;
        if a != b {
            mismatched.push(name.clone());
        }
    }
    if !mismatched.is_empty() {
        return Err(CliError::ReplayMismatch(mismatched.join(", ")));
    }
    eprintln!("replay identical: {} file(s) in {}", m.outputs.len(), dir.display());
    Ok(code)
}
