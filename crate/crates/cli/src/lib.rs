//! The `rickart` command line: loads elements from JSON, runs audits,
//! spectral decompositions, norm and lattice computations, and prints one
//! report per invocation.
//!
//! Exit status is 0 when every check passes, 1 when a check fails (the
//! report is still printed) and 2 for malformed input.

pub mod commands;
pub mod input;
pub mod report;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::commands::{Failure, LatticeOp, ModelChoice, Output};
use crate::input::{load, InputError};
use crate::report::{InputsDigest, RunReport};
use rickart_core::CheckRecord;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "rickart",
    version,
    about = "Audits and computations on ordered *-algebra models"
)]
pub struct Cli {
    /// Print a human-readable report instead of JSON.
    #[arg(long, global = true)]
    pub pretty: bool,
    /// Include the wall time in the report.
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModelArg {
    Matrix,
    Stepfn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OpArg {
    PosPart,
    Join,
    Meet,
    Abs,
    Sup,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Randomized audit of the axioms on one model.
    Axioms {
        #[arg(long, value_enum)]
        model: ModelArg,
        /// Matrix size (matrix model only; default 3).
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        samples: usize,
        #[arg(long, env = "RICKART_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Spectral family, its checks and a Riemann reconstruction.
    Spectral {
        #[arg(long)]
        input: PathBuf,
        /// Largest admissible cell width of the partition.
        #[arg(long)]
        mesh: f64,
        /// Partition document; by default a uniform grid around the spectrum.
        #[arg(long)]
        partition: Option<PathBuf>,
    },
    /// Order norm with the C*-identity and unit-ball checks.
    Norm {
        #[arg(long)]
        input: PathBuf,
    },
    /// Lattice operations; `sup` reads a sequence document and takes the
    /// bound from `--with`.
    Lattice {
        #[arg(long)]
        input: PathBuf,
        #[arg(long = "with")]
        with: Option<PathBuf>,
        #[arg(long, value_enum)]
        op: OpArg,
    },
    /// Supremum of a dominated series with its tail estimates.
    Series {
        #[arg(long)]
        input: PathBuf,
    },
    /// The full acceptance suite.
    Report {
        #[arg(long)]
        all: bool,
        #[arg(long, env = "RICKART_SEED", default_value_t = 0)]
        seed: u64,
    },
}

/// What the process prints and its exit status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Invocation {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> Invocation
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Invocation {
                    code: EXIT_INPUT,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Invocation {
                    code: EXIT_PASS,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    execute(&cli)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Axioms { .. } => "axioms",
        Command::Spectral { .. } => "spectral",
        Command::Norm { .. } => "norm",
        Command::Lattice { .. } => "lattice",
        Command::Series { .. } => "series",
        Command::Report { .. } => "report",
    }
}

pub fn execute(cli: &Cli) -> Invocation {
    let start = Instant::now();
    let name = command_name(&cli.command);
    let mut digest = InputsDigest::default();
    digest.part("command", name.as_bytes());
    let (seed, outcome) = dispatch(&cli.command, &mut digest);
    let digest = digest.finish();
    let (report, code) = match outcome {
        Ok(Output { results, checks }) => {
            let r = RunReport::new(name, digest, seed, results, checks);
            let code = if r.passed() { EXIT_PASS } else { EXIT_FAIL };
            (r, code)
        }
        Err(Failure::Runtime(check, message)) => {
            let r = RunReport::new(
                name,
                digest,
                seed,
                serde_json::Value::Null,
                vec![CheckRecord::fail(check, message, Vec::new())],
            );
            (r, EXIT_FAIL)
        }
        Err(Failure::Input(e)) => return input_error(name, &e, cli.pretty),
    };
    let mut report = report;
    if cli.timing {
        report.wall_time_seconds = Some(start.elapsed().as_secs_f64());
    }
    let stdout = if cli.pretty { report.to_text() } else { report.to_json() };
    Invocation {
        code,
        stdout: stdout + "\n",
        stderr: String::new(),
    }
}

fn input_error(command: &str, e: &InputError, pretty: bool) -> Invocation {
    let stdout = if pretty {
        String::new()
    } else {
        json!({"command": command, "error": {"field": e.field, "message": e.message}}).to_string() + "\n"
    };
    Invocation {
        code: EXIT_INPUT,
        stdout,
        stderr: format!("error: {e}\n"),
    }
}

fn load_into(digest: &mut InputsDigest, label: &str, path: &Path) -> Result<serde_json::Value, InputError> {
    let loaded = load(path, label)?;
    digest.part(label, &loaded.bytes);
    Ok(loaded.value)
}

fn dispatch(command: &Command, digest: &mut InputsDigest) -> (Option<u64>, Result<Output, Failure>) {
    match command {
        Command::Axioms {
            model,
            dim,
            samples,
            seed,
        } => {
            digest
                .part("model", format!("{model:?}").as_bytes())
                .part("dim", format!("{dim:?}").as_bytes())
                .part("samples", samples.to_string().as_bytes());
            let model = match model {
                ModelArg::Matrix => ModelChoice::Matrix,
                ModelArg::Stepfn => ModelChoice::Stepfn,
            };
            (Some(*seed), commands::axioms(model, *dim, *samples, *seed))
        }
        Command::Report { all, seed } => {
            if !all {
                return (
                    Some(*seed),
                    Err(InputError::new("--all", "required; the suite has no partial mode").into()),
                );
            }
            digest.part("all", b"true");
            (Some(*seed), commands::report(*seed))
        }
        other => (None, run_with_files(other, digest)),
    }
}

fn run_with_files(command: &Command, digest: &mut InputsDigest) -> Result<Output, Failure> {
    match command {
        Command::Spectral { input, mesh, partition } => {
            digest.part("mesh", mesh.to_string().as_bytes());
            let x = input::element_at(&load_into(digest, "--input", input)?, "")?;
            let p = match partition {
                Some(path) => {
                    let v = load_into(digest, "--partition", path)?;
                    Some(
                        input::partition(&v)
                            .map_err(|e| InputError::new(format!("partition.{}", e.field), e.message))?,
                    )
                }
                None => None,
            };
            commands::spectral(x, *mesh, p)
        }
        Command::Norm { input } => {
            let x = input::element_at(&load_into(digest, "--input", input)?, "")?;
            commands::norm(x)
        }
        Command::Lattice { input, with, op } => {
            digest.part("op", format!("{op:?}").as_bytes());
            let v = load_into(digest, "--input", input)?;
            let z = match with {
                Some(path) => {
                    let w = load_into(digest, "--with", path)?;
                    Some(
                        input::element_at(&w, "")
                            .map_err(|e| InputError::new(format!("with.{}", e.field), e.message))?,
                    )
                }
                None => None,
            };
            match op {
                OpArg::Sup => {
                    let seq = input::sequence(&v)?;
                    let z = z.ok_or_else(|| InputError::new("--with", "required for --op sup"))?;
                    commands::sup(seq, z)
                }
                OpArg::PosPart | OpArg::Abs if z.is_some() => {
                    Err(InputError::new("--with", format!("not used by --op {}", op_name(*op))).into())
                }
                _ => {
                    let x = input::element_at(&v, "")?;
                    let op = match op {
                        OpArg::PosPart => LatticeOp::PosPart,
                        OpArg::Abs => LatticeOp::Abs,
                        OpArg::Join => LatticeOp::Join,
                        OpArg::Meet => LatticeOp::Meet,
                        OpArg::Sup => unreachable!(),
                    };
                    commands::lattice(op, x, z)
                }
            }
        }
        Command::Series { input } => {
            let v = load_into(digest, "--input", input)?;
            commands::series(input::sequence(&v)?)
        }
        Command::Axioms { .. } | Command::Report { .. } => unreachable!("handled by dispatch"),
    }
}

fn op_name(op: OpArg) -> &'static str {
    match op {
        OpArg::PosPart => "pos-part",
        OpArg::Join => "join",
        OpArg::Meet => "meet",
        OpArg::Abs => "abs",
        OpArg::Sup => "sup",
    }
}
