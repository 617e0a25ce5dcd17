use std::io;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use cqg_cli::{
    commands, configure_threads, Command, ConfigError, Format, Overrides, RunConfig, Settings, EXIT_CHECK_FAILED, EXIT_INVALID_CONFIG,
    EXIT_PASS,
};

#[derive(Debug, Parser)]
#[command(name = "cqg", version, about = "Conformal quantum geometrodynamics verification suites")]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON run configuration; flags below override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<u64>,
    /// Output stem; `<stem>.csv` and `<stem>.json` are written.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

fn exit(code: i32) -> ExitCode {
    ExitCode::from(code as u8)
}

/// Refuses output paths that would overwrite the config file.
fn check_outputs(settings: &Settings, config: Option<&Path>) -> Result<(), ConfigError> {
    let (Some(out), Some(config)) = (&settings.out, config) else {
        return Ok(());
    };
    for ext in ["csv", "json"] {
        if out.with_extension(ext) == config {
            return Err(ConfigError(format!("output {} would overwrite the config file", config.display())));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let file = match cli.config.as_deref().map(RunConfig::from_path).transpose() {
        Ok(file) => file.unwrap_or_default(),
        Err(e) => {
            eprintln!("cqg: {e}");
            return exit(EXIT_INVALID_CONFIG);
        }
    };
    let flags = Overrides {
        seed: cli.seed,
        samples: cli.samples,
        out: cli.out,
        format: cli.format,
    };
    let config_path = cli.config.clone();
    let settings = match Settings::resolve(cli.command, file, flags)
        .and_then(|s| check_outputs(&s, config_path.as_deref()).map(|_| s))
        .and_then(|s| configure_threads().map(|_| s))
    {
        Ok(s) => s,
        Err(e) => {
            eprintln!("cqg: {e}");
            return exit(EXIT_INVALID_CONFIG);
        }
    };
    let report = match commands::run(&settings) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("cqg {}: {e}", settings.command);
            return exit(EXIT_CHECK_FAILED);
        }
    };
    if let Err(e) = cqg_cli::output::emit(&report, &settings, &mut io::stdout().lock(), &mut io::stderr().lock()) {
        eprintln!("cqg: writing output: {e}");
        return exit(EXIT_CHECK_FAILED);
    }
    exit(if report.passed() { EXIT_PASS } else { EXIT_CHECK_FAILED })
}
