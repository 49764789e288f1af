//! Command-line driver for `szego-core`: configuration, file formats, reports and
//! parallel sweeps.
//!
//! Exit codes: 0 when every check passed, 2 when a run completed but failed a
//! check, 1 on errors (bad configuration, IO, numerical failure).

pub mod commands;
pub mod config;
pub mod output;

use std::io::Write;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::Result;
use serde_json::json;

use config::{parse_config, CliConfig, Invocation};

/// Outcome of a completed invocation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    ChecksFailed,
}

fn init_logging() {
    let env = env_logger::Env::default().default_filter_or("info");
    let _ = env_logger::Builder::from_env(env)
        .format(|buf, rec| writeln!(buf, "{} {}", rec.level(), rec.args()))
        .try_init();
}

/// Runs one resolved configuration and writes `meta.json` next to its outputs.
pub fn run_config(cfg: &CliConfig) -> Result<Status> {
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let clock = Instant::now();
    log::info!("start command={} out_dir={}", cfg.command, cfg.out_dir().display());
    let pass = commands::execute(cfg)?;
    let wall = clock.elapsed().as_secs_f64();
    output::write_json(
        &cfg.out_dir().join("meta.json"),
        &json!({
            "version": env!("CARGO_PKG_VERSION"),
            "command": cfg.command.name(),
            "wall_time_s": wall,
            "threads": rayon::current_num_threads(),
            "started_unix": started,
        }),
    )?;
    log::info!("done command={} pass={pass} wall_time_s={wall:.3}", cfg.command);
    Ok(if pass { Status::Pass } else { Status::ChecksFailed })
}

/// Entry point of the `szego` binary; `args` includes the program name.
pub fn run_main(args: &[String]) -> ExitCode {
    init_logging();
    let result = parse_config(args).and_then(|inv| match inv {
        Invocation::Info(text) => {
            print!("{text}");
            Ok(Status::Pass)
        }
        Invocation::Run(cfg) => run_config(&cfg),
    });
    match result {
        Ok(Status::Pass) => ExitCode::SUCCESS,
        Ok(Status::ChecksFailed) => ExitCode::from(2),
        Err(e) => {
            log::error!("message={:?}", format!("{e:#}"));
            ExitCode::from(1)
        }
    }
}
