//! `coreir`: lint, inspect, substitute, exitify, generate and format Core
//! programs written in the textual syntax.
//!
//! Exit codes: 0 success, 1 violations or warnings, 2 parse error, 3 usage
//! or I/O error.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use coreir::exitify::{exitify_program, ExitifyMode};
use coreir::freevars::expr_free_vars;
use coreir::ir::{expr_size, flatten_binds, Bind, CoreProgram};
use coreir::lint::{is_join_points_valid_program_report, well_scoped_program_report};
use coreir::syntax::{parse_program, parse_subst_spec, print_program, ParseError};
use coreir::testgen::{gen_program, GenConfig};

const EXIT_OK: u8 = 0;
const EXIT_FAIL: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_USAGE: u8 = 3;

#[derive(Parser)]
#[command(name = "coreir", version, about = "Tools for a small named-variable Core IR")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check scoping (and optionally join points) of a program.
    Lint {
        /// Program file, or `-` for standard input.
        file: PathBuf,
        /// Also check join-point validity.
        #[arg(long)]
        join_points: bool,
    },
    /// Print the free local variables of each top-level right-hand side.
    Freevars { file: PathBuf },
    /// Print the size of each top-level right-hand side and the total.
    Size { file: PathBuf },
    /// Apply a substitution file to every top-level right-hand side.
    Subst {
        file: PathBuf,
        #[arg(long)]
        spec: PathBuf,
    },
    /// Float exit paths out of recursive join points.
    Exitify {
        file: PathBuf,
        /// Reproduce the historical shadowing bug instead of the fixed pass.
        #[arg(long)]
        legacy_bug: bool,
    },
    /// Emit a generated program.
    Gen {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        size: usize,
        /// Probability of reusing a visible unique for a new binder.
        #[arg(long, default_value_t = GenConfig::default().shadow_p)]
        shadow: f64,
        /// Fraction of let-forms that are recursive join groups.
        #[arg(long, default_value_t = GenConfig::default().join_density)]
        join_density: f64,
    },
    /// Parse and print in canonical form.
    Fmt { file: PathBuf },
}

/// A failure carrying its exit code; the message goes to stderr.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }

    fn parse(path: &Path, err: ParseError) -> Self {
        Failure { code: EXIT_PARSE, message: format!("{}:{err}", path.display()) }
    }
}

fn read_source(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::usage(format!("cannot read standard input: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn load_program(path: &Path) -> Result<CoreProgram, Failure> {
    let src = read_source(path)?;
    parse_program(&src).map_err(|e| Failure::parse(path, e))
}

fn doc_name(path: &Path) -> String {
    if path == Path::new("-") {
        "<stdin>".to_string()
    } else {
        path.display().to_string()
    }
}

fn run(command: Command, out: &mut impl Write) -> Result<u8, Failure> {
    let w = |out: &mut dyn Write, s: &str| {
        out.write_all(s.as_bytes()).map_err(|e| Failure::usage(format!("cannot write output: {e}")))
    };
    match command {
        Command::Lint { file, join_points } => {
            let p = load_program(&file)?;
            let mut report = well_scoped_program_report(&p);
            if join_points {
                report = report.merge(is_join_points_valid_program_report(&p));
            }
            w(out, &report.to_string())?;
            Ok(if report.ok() { EXIT_OK } else { EXIT_FAIL })
        }
        Command::Freevars { file } => {
            let p = load_program(&file)?;
            for (v, rhs) in flatten_binds(&p) {
                let fvs: Vec<String> = expr_free_vars(&rhs).iter().map(ToString::to_string).collect();
                let line = if fvs.is_empty() { format!("{v}:\n") } else { format!("{v}: {}\n", fvs.join(" ")) };
                w(out, &line)?;
            }
            Ok(EXIT_OK)
        }
        Command::Size { file } => {
            let p = load_program(&file)?;
            let mut total = 0;
            for (v, rhs) in flatten_binds(&p) {
                let n = expr_size(&rhs);
                total += n;
                w(out, &format!("{v}: {n}\n"))?;
            }
            w(out, &format!("total: {total}\n"))?;
            Ok(EXIT_OK)
        }
        Command::Subst { file, spec } => {
            let p = load_program(&file)?;
            let spec_src = read_source(&spec)?;
            let spec = parse_subst_spec(&spec_src).map_err(|e| Failure::parse(&spec, e))?;
            let s = spec.to_subst();
            let doc = doc_name(&file);
            let mut warnings = Vec::new();
            let substituted: CoreProgram = p
                .iter()
                .map(|b| match b {
                    Bind::NonRec(v, rhs) => {
                        let (e, ws) = s.subst_expr(&doc, rhs);
                        warnings.extend(ws);
                        Bind::NonRec(v.clone(), e)
                    }
                    Bind::Rec(pairs) => Bind::Rec(
                        pairs
                            .iter()
                            .map(|(v, rhs)| {
                                let (e, ws) = s.subst_expr(&doc, rhs);
                                warnings.extend(ws);
                                (v.clone(), e)
                            })
                            .collect(),
                    ),
                })
                .collect();
            w(out, &print_program(&substituted))?;
            for warning in &warnings {
                eprintln!("warning: {warning}");
            }
            Ok(if warnings.is_empty() { EXIT_OK } else { EXIT_FAIL })
        }
        Command::Exitify { file, legacy_bug } => {
            let p = load_program(&file)?;
            let mode = if legacy_bug { ExitifyMode::LegacyBug } else { ExitifyMode::Fixed };
            match exitify_program(mode, &p) {
                Ok(q) => {
                    w(out, &print_program(&q))?;
                    Ok(EXIT_OK)
                }
                Err(e) => {
                    eprintln!("error: {}: {e}", doc_name(&file));
                    Ok(EXIT_FAIL)
                }
            }
        }
        Command::Gen { seed, size, shadow, join_density } => {
            for (flag, p) in [("--shadow", shadow), ("--join-density", join_density)] {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Failure::usage(format!("{flag} must be a probability in [0, 1], got {p}")));
                }
            }
            let p = gen_program(seed, GenConfig { size, shadow_p: shadow, join_density });
            w(out, &print_program(&p))?;
            Ok(EXIT_OK)
        }
        Command::Fmt { file } => {
            let p = load_program(&file)?;
            w(out, &print_program(&p))?;
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let code = match run(cli.command, &mut out) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    };
    let _ = out.flush();
    ExitCode::from(code)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
