//! Command-line front end. Every subcommand accepts either flags or a JSON
//! run-spec (`--spec file.json` with a "command" field). Artifacts go to
//! `--out`, else `$INVSQ_OUT_DIR`, else the working directory.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 I/O.

mod golden;
mod output;
mod run;
mod spec;

use clap::Parser;
use serde_json::json;
use spec::RunSpec;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "invsq", version, about = "Regulated inverse-square potential toolkit")]
struct Cli {
    /// JSON run-spec; replaces the subcommand and its flags.
    #[arg(long, global = true)]
    spec: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sampling and sweeps.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Option<RunSpec>,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Model(#[from] invsq::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "invalid_input",
            CliError::Model(invsq::Error::Domain(_)) => "domain",
            CliError::Model(invsq::Error::NoBoundState(_)) => "no_bound_state",
            CliError::Model(invsq::Error::Numerical { .. }) => "numerical",
            CliError::Io(_) => "io",
        }
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Model(invsq::Error::Domain(_) | invsq::Error::NoBoundState(_)) => 2,
            CliError::Model(invsq::Error::Numerical { .. }) => 3,
            CliError::Io(_) => 4,
        }
    }
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("{}", json!({"error": {"kind": e.kind(), "message": e.to_string()}}));
    ExitCode::from(e.code())
}

/// Parse a run-spec file. An optional "output_dir" field is honoured when
/// `--out` is absent.
fn load_spec(path: &PathBuf) -> Result<(RunSpec, Option<PathBuf>), CliError> {
    let text = std::fs::read_to_string(path)?;
    let mut v: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let out = match v.as_object_mut().and_then(|m| m.remove("output_dir")) {
        None => None,
        Some(serde_json::Value::String(s)) => Some(PathBuf::from(s)),
        Some(_) => return Err(CliError::Usage("output_dir must be a string".into())),
    };
    let spec = serde_json::from_value(v).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Ok((spec, out))
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let (spec, spec_out) = match (&cli.spec, cli.command) {
        (Some(_), Some(_)) => return Err(CliError::Usage("give either --spec or a subcommand, not both".into())),
        (Some(path), None) => load_spec(path)?,
        (None, Some(c)) => (c, None),
        (None, None) => return Err(CliError::Usage("missing subcommand or --spec".into())),
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let dir = cli
        .out
        .or(spec_out)
        .or_else(|| std::env::var_os("INVSQ_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    let artifacts = run::run(&spec)?;
    let guard = matches!(spec, RunSpec::RegenGolden(_));
    let written = artifacts.write(&dir, spec.name(), guard)?;
    let files: Vec<String> = written.iter().map(|p| p.display().to_string()).collect();
    println!("{}", json!({"command": spec.name(), "files": files, "summary": artifacts.summary}));
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            return fail(&CliError::Usage(e.render().to_string()));
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}
