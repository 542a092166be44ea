mod args;
mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use serde::Serialize;

use args::{Cli, Command, OUT_DIR_ENV};

/// Failure classes, mapped onto exit codes 1 and 2.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Runtime(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Runtime(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Runtime(m) => m,
        }
    }
}

#[derive(Serialize)]
struct RunMeta<'a> {
    verb: &'a str,
    argv: Vec<String>,
    version: &'static str,
    status: &'static str,
    exit_code: u8,
    error: Option<String>,
    seed: Option<u64>,
    files: Vec<String>,
    config: Option<endophy::montecarlo::ScenarioConfig>,
}

fn default_out() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("endophy_out"))
}

/// `--out` as written on the command line, for usage errors clap rejects
/// before the arguments are available.
fn scan_out(argv: &[String]) -> Option<PathBuf> {
    argv.iter().enumerate().find_map(|(i, a)| {
        if a == "--out" {
            argv.get(i + 1).map(PathBuf::from)
        } else {
            a.strip_prefix("--out=").map(PathBuf::from)
        }
    })
}

fn write_meta(dir: &Path, meta: &RunMeta) {
    let result = std::fs::create_dir_all(dir).and_then(|_| {
        let text = serde_json::to_string_pretty(meta).expect("run metadata serializes");
        std::fs::write(dir.join("run_meta.json"), text)
    });
    if let Err(e) = result {
        eprintln!("warning: could not write run_meta.json to {}: {e}", dir.display());
    }
}

fn verb_name(c: &Command) -> &'static str {
    match c {
        Command::Simulate(_) => "simulate",
        Command::Sample(_) => "sample",
        Command::Observe(_) => "observe",
        Command::Estimate(_) => "estimate",
        Command::Avar(_) => "avar",
        Command::Mc(_) => "mc",
        Command::Constants(_) => "constants",
        Command::Diag(_) => "diag",
    }
}

fn run(cmd: &Command, out: &Path) -> (Result<commands::Outcome, Failure>, Option<u64>) {
    let prepare = |out: &Path| {
        std::fs::create_dir_all(out)
            .map_err(|e| Failure::Usage(format!("output directory {} is not writable: {e}", out.display())))
    };
    let scenario = |c: &args::Common| -> Result<_, Failure> {
        let cfg = config::resolve(c)?;
        prepare(out)?;
        Ok(cfg)
    };
    match cmd {
        Command::Simulate(c) => (scenario(c).and_then(|cfg| commands::simulate(c, cfg, out)), Some(c.seed)),
        Command::Sample(c) => (scenario(c).and_then(|cfg| commands::sample(c, cfg, out)), Some(c.seed)),
        Command::Observe(c) => (scenario(c).and_then(|cfg| commands::observe(c, cfg, out)), Some(c.seed)),
        Command::Estimate(a) => (
            scenario(&a.common).and_then(|cfg| commands::estimate(a, cfg, out)),
            Some(a.common.seed),
        ),
        Command::Avar(a) => (
            scenario(&a.common).and_then(|cfg| commands::avar(a, cfg, out)),
            Some(a.common.seed),
        ),
        Command::Mc(c) => (scenario(c).and_then(|cfg| commands::mc(c, cfg, out)), Some(c.seed)),
        Command::Constants(a) => (prepare(out).and_then(|_| commands::constants(a, out)), None),
        Command::Diag(a) => (prepare(out).and_then(|_| commands::diag(a, out)), Some(a.seed)),
    }
}

fn out_of(cmd: &Command) -> Option<PathBuf> {
    match cmd {
        Command::Simulate(c) | Command::Sample(c) | Command::Observe(c) | Command::Mc(c) => c.out.clone(),
        Command::Estimate(a) | Command::Avar(a) => a.common.out.clone(),
        Command::Constants(a) => a.out.clone(),
        Command::Diag(a) => a.out.clone(),
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            let meta = RunMeta {
                verb: argv.get(1).map(String::as_str).unwrap_or(""),
                argv: argv.clone(),
                version: env!("CARGO_PKG_VERSION"),
                status: "usage_error",
                exit_code: 1,
                error: Some(e.to_string()),
                seed: None,
                files: Vec::new(),
                config: None,
            };
            write_meta(&scan_out(&argv).unwrap_or_else(default_out), &meta);
            return ExitCode::from(1);
        }
    };
    let out = out_of(&cli.command).unwrap_or_else(default_out);
    let (result, seed) = run(&cli.command, &out);
    let (status, code, error, files, config) = match result {
        Ok(o) => ("ok", 0, None, o.files, o.config),
        Err(f) => {
            eprintln!("error: {}", f.message());
            let status = if f.code() == 1 { "usage_error" } else { "runtime_error" };
            (status, f.code(), Some(f.message().to_string()), Vec::new(), None)
        }
    };
    let meta = RunMeta {
        verb: verb_name(&cli.command),
        argv,
        version: env!("CARGO_PKG_VERSION"),
        status,
        exit_code: code,
        error,
        seed,
        files: files.iter().map(|p| p.display().to_string()).collect(),
        config,
    };
    write_meta(&out, &meta);
    if code == 0 {
        for f in &meta.files {
            println!("{f}");
        }
    }
    ExitCode::from(code)
}
