//! `regfman run DOC` reads a problem document, runs its task and writes a
//! JSON report. Exit status: 0 when every check passes, 1 when a check or
//! the computation fails, 2 for unusable input.

mod doc;
mod explain;
mod report;
mod tasks;

use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use doc::{parse_document, InputError, Settings, Task};

#[derive(Parser)]
#[command(
    name = "regfman",
    version,
    about = "Verify regular F-manifolds and Frobenius metrics on jets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a problem document ("-" reads standard input).
    Run {
        #[arg(default_value = "-")]
        doc: String,
        /// Jet truncation order.
        #[arg(long)]
        order: Option<usize>,
        /// Residual tolerance; falls back to the document, then REGFMAN_TOL.
        #[arg(long)]
        tol: Option<f64>,
        /// Seed for random cyclic-vector probes.
        #[arg(long)]
        seed: Option<u64>,
        /// Write the report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print a readable summary on standard error.
        #[arg(long)]
        summary: bool,
    },
    /// Describe a task and the residuals it reports.
    Explain {
        #[arg(value_enum)]
        task: Task,
    },
}

struct Flags {
    order: Option<usize>,
    tol: Option<f64>,
    seed: Option<u64>,
}

fn env_tol() -> Result<Option<f64>, InputError> {
    match std::env::var("REGFMAN_TOL") {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| InputError::new("REGFMAN_TOL", format!("not a number: {v:?}"))),
        Err(_) => Ok(None),
    }
}

fn settings(flags: &Flags, doc: &doc::DocSettings) -> Result<Settings, InputError> {
    let tol = match flags.tol.or(doc.tol) {
        Some(t) => t,
        None => env_tol()?.unwrap_or(regfman::DEFAULT_TOL),
    };
    if !(tol.is_finite() && tol > 0.0) {
        return Err(InputError::new(
            "settings.tol",
            "tolerance must be positive and finite",
        ));
    }
    Ok(Settings {
        order: flags.order.or(doc.order).unwrap_or(regfman::DEFAULT_ORDER),
        tol,
        seed: flags.seed.or(doc.seed).unwrap_or(0),
        anchors: doc.anchors.clone(),
    })
}

fn read_input(path: &str) -> Result<String, InputError> {
    let mut text = String::new();
    if path == "-" {
        io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| InputError::new("", format!("reading standard input: {e}")))?;
    } else {
        text = std::fs::read_to_string(path)
            .map_err(|e| InputError::new("", format!("reading {path}: {e}")))?;
    }
    Ok(text)
}

fn run(
    path: &str,
    flags: &Flags,
    out: Option<&PathBuf>,
    summary: bool,
) -> Result<bool, InputError> {
    let text = read_input(path)?;
    let doc = parse_document(&text)?;
    let settings = settings(flags, &doc.settings)?;
    let report = tasks::run(doc.task, &doc.payload, &settings)?;
    let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
    json.push('\n');
    match out {
        Some(p) => std::fs::write(p, &json)
            .map_err(|e| InputError::new("", format!("writing {}: {e}", p.display())))?,
        None => {
            let _ = io::stdout().write_all(json.as_bytes());
        }
    }
    if summary {
        eprint!("{}", report.summary());
    }
    Ok(report.pass)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match cli.command {
        Command::Explain { task } => {
            print!("{}", explain::render(task));
            ExitCode::SUCCESS
        }
        Command::Run {
            doc,
            order,
            tol,
            seed,
            out,
            summary,
        } => match run(&doc, &Flags { order, tol, seed }, out.as_ref(), summary) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => ExitCode::from(1),
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
    }
}
