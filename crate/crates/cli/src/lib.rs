//! Command-line front end for the workbench: JSON documents in, checks,
//! reports and derived documents out.

pub mod analysis;
pub mod derive;
pub mod document;
pub mod error;
pub mod workspace;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use ncwb_core::builtins::{builtin, parse_builtin_spec};
use ncwb_core::linalg::parse_rational;

use crate::analysis::{analyze_all, render_json, render_text};
use crate::derive::What;
use crate::document::{parse_document, render_document, Document, RawObject, SCHEMA};
use crate::error::CliError;
use crate::workspace::{load, Workspace};

pub const MAX_WORD_LEN_VAR: &str = "NCWB_MAX_WORD_LEN";
pub const DEFAULT_MAX_WORD_LEN: usize = 4;

#[derive(Parser, Debug)]
#[command(name = "ncwb", version, about = "Exact workbench for Cartan pairs, calculi and differential operators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Validate every object, or one object, of a document
    Check {
        file: PathBuf,
        name: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Derive new objects and write them as a self-contained document
    Derive {
        file: PathBuf,
        name: String,
        #[arg(value_enum)]
        what: What,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Checks plus structural diagnostics for every object
    Report {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Write a builtin example as an explicit document
    Builtin {
        /// Name, optionally with parameters: `quantum_plane_trunc(2,2)`
        name: String,
        params: Vec<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// What a command produced; the caller prints it and exits.
#[derive(Debug, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

pub fn max_word_len() -> Result<usize, CliError> {
    match std::env::var(MAX_WORD_LEN_VAR) {
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_MAX_WORD_LEN),
        Err(e) => Err(CliError::Usage(format!("{MAX_WORD_LEN_VAR}: {e}"))),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(CliError::Usage(format!("{MAX_WORD_LEN_VAR} must be a positive integer, got {s:?}"))),
        },
    }
}

pub fn read_workspace(path: &Path) -> Result<Workspace, CliError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: shown.clone(), source })?;
    let doc = parse_document(&text).map_err(|source| CliError::Parse { path: shown.clone(), source })?;
    load(&doc).map_err(|source| CliError::Load { path: shown, source })
}

fn emit(text: String, output: Option<&Path>) -> Result<String, CliError> {
    match output {
        None => Ok(text),
        Some(p) => {
            std::fs::write(p, text).map_err(|source| CliError::Io { path: p.display().to_string(), source })?;
            Ok(String::new())
        }
    }
}

fn render(reports: &[analysis::ObjectReport], format: Format) -> String {
    match format {
        Format::Text => render_text(reports),
        Format::Json => render_json(reports),
    }
}

/// Document for a builtin, with every object written out explicitly.
pub fn builtin_document(spec: &str, extra: &[String]) -> Result<Document, CliError> {
    let (name, mut params) = parse_builtin_spec(spec).map_err(|e| CliError::Usage(e.to_string()))?;
    for p in extra {
        params.push(parse_rational(p).map_err(|e| CliError::Usage(e.to_string()))?);
    }
    builtin(&name, &params).map_err(|e| CliError::Usage(e.to_string()))?;
    let decl = Document {
        schema: SCHEMA.to_string(),
        objects: vec![RawObject::Builtin {
            name: name.clone(),
            builtin: name.clone(),
            params: workspace::format_params(&params),
        }],
        summary: None,
    };
    let ws = load(&decl).map_err(|source| CliError::Load { path: name, source })?;
    let all: Vec<usize> = (0..ws.items.len()).collect();
    Ok(ws.export_items(&all, None))
}

pub fn execute(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Check { file, name, format } => {
            let ws = read_workspace(&file)?;
            let indices = match &name {
                None => (0..ws.items.len()).collect(),
                Some(n) => ws.select(n).ok_or_else(|| CliError::Usage(format!("no object named {n:?}")))?,
            };
            let reports = analyze_all(&ws, &indices, false);
            let code = if reports.iter().all(|r| r.passed) { 0 } else { 1 };
            Ok(Outcome { stdout: render(&reports, format), code })
        }
        Command::Report { file, format } => {
            let ws = read_workspace(&file)?;
            let indices: Vec<usize> = (0..ws.items.len()).collect();
            let reports = analyze_all(&ws, &indices, true);
            let code = if reports.iter().all(|r| r.passed) { 0 } else { 1 };
            Ok(Outcome { stdout: render(&reports, format), code })
        }
        Command::Derive { file, name, what, output } => {
            let max_len = max_word_len()?;
            let ws = read_workspace(&file)?;
            let derived = derive::derive(ws, &name, what, max_len)?;
            let stdout = emit(render_document(&derived.document), output.as_deref())?;
            Ok(Outcome { stdout, code: if derived.passed { 0 } else { 1 } })
        }
        Command::Builtin { name, params, output } => {
            let doc = builtin_document(&name, &params)?;
            let stdout = emit(render_document(&doc), output.as_deref())?;
            Ok(Outcome { stdout, code: 0 })
        }
    }
}

/// Parses arguments, runs the command and writes to stdout/stderr. Returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.stdout.as_bytes());
            out.code
        }
        Err(e) => {
            eprintln!("ncwb: error: {e}");
            e.exit_code()
        }
    }
}
