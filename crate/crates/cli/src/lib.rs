//! Command-line front end: JSON workspaces in, deterministic JSON reports out.

pub mod commands;
pub mod error;
pub mod schema;
pub mod workspace;

use std::path::PathBuf;
use std::time::Instant;

use clap::Parser;

pub use commands::{run, Command, Report};
pub use error::{CliError, Issue, Result};
pub use schema::Document;
pub use workspace::Workspace;

use tcm_core::Limits;

#[derive(Debug, Parser)]
#[command(name = "tcm", version, about = "Topos causal models over finite data")]
pub struct Cli {
    /// Workspace directory or JSON file; repeat to merge several.
    #[arg(short, long, global = true, default_value = "corpus/v1")]
    pub workspace: Vec<PathBuf>,
    /// Cap on any single enumeration.
    #[arg(long, global = true, default_value_t = Limits::default().max_enum)]
    pub max_enum: u64,
    /// Largest apex tried when checking universality.
    #[arg(long, global = true, default_value_t = Limits::default().cone_apex_bound)]
    pub cone_apex_bound: usize,
    /// Add wall-clock time to the report.
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

impl Cli {
    pub fn limits(&self) -> Limits {
        Limits {
            max_enum: self.max_enum,
            cone_apex_bound: self.cone_apex_bound,
        }
    }
}

/// Parse arguments, load the workspace and run one command.
pub fn execute<I, T>(args: I) -> Result<Report>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| match e.kind() {
        clap::error::ErrorKind::InvalidSubcommand => {
            let name = e
                .get(clap::error::ContextKind::InvalidSubcommand)
                .map(|v| v.to_string())
                .unwrap_or_default();
            CliError::UnknownCommand(name)
        }
        _ => CliError::Usage(e.to_string()),
    })?;
    let start = Instant::now();
    let mut command = cli.command.clone();
    let mut ws = Workspace::load_all(&cli.workspace, cli.limits())?;
    if let Command::Force { formula, .. } = &mut command {
        let path = PathBuf::from(&*formula);
        if path.is_file() {
            let name = workspace::read_documents(&path)?
                .into_iter()
                .find_map(|d| matches!(d, Document::Formula(_)).then(|| d.name().to_string()))
                .ok_or_else(|| CliError::Usage(format!("{} holds no formula", path.display())))?;
            if ws.formula(&name).is_err() {
                let mut paths = cli.workspace.clone();
                paths.push(path);
                ws = Workspace::load_all(&paths, cli.limits())?;
            }
            *formula = name;
        }
    }
    let mut report = run(&command, &ws)?;
    if cli.timing {
        report.timing_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    Ok(report)
}
