use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dirac_check::report::Verdict;
use dirac_check::run::{admissible_lines, bracket_lines};
use dirac_check::{builtins, run, Overrides, Prepared, Scenario};
use twisted_dirac::dirac::SignConvention;

#[derive(Parser)]
#[command(name = "dirac-check", version, about = "Check identities of twisted Dirac structures")]
struct Cli {
    /// Oracle seed; overrides the scenario's seed.
    #[arg(long, global = true, env = "DIRAC_CHECK_SEED")]
    seed: Option<u64>,
    /// Number of oracle sample points.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Absolute and relative oracle tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// `+` for df = i_X h, `-` for df = -i_X h.
    #[arg(long, global = true, value_parser = parse_sign, allow_hyphen_values = true)]
    sign_convention: Option<SignConvention>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check in a scenario file or builtin.
    Check {
        scenario: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Run a scenario and write its report.
    Report {
        scenario: String,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Print {f, g} and the Hamiltonian fields of f and g.
    Bracket {
        scenario: String,
        f: String,
        g: String,
        #[arg(long)]
        structure: Option<String>,
    },
    /// Print the admissibility report of f.
    Admissible {
        scenario: String,
        f: String,
        #[arg(long)]
        structure: Option<String>,
    },
    /// List the builtin scenarios.
    Builtins,
}

fn parse_sign(s: &str) -> Result<SignConvention, String> {
    s.parse()
}

fn prepare(source: &str, overrides: &Overrides) -> Result<Prepared, String> {
    let scenario = Scenario::load(source).map_err(|e| e.to_string())?;
    Prepared::new(scenario, overrides).map_err(|e| e.to_string())
}

/// Writes to stdout, ignoring errors such as a closed pipe.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn emit_lines(lines: &[String]) {
    emit(&lines.iter().map(|l| format!("{l}\n")).collect::<String>());
}

fn execute(cli: Cli) -> Result<u8, String> {
    let overrides = Overrides { seed: cli.seed, samples: cli.samples, tol: cli.tol, sign: cli.sign_convention };
    match cli.command {
        Command::Check { scenario, format } => {
            let report = run(&prepare(&scenario, &overrides)?);
            match format {
                Format::Text => emit(&report.to_text()),
                Format::Json => emit(&(report.to_json() + "\n")),
            }
            Ok(report.exit_code() as u8)
        }
        Command::Report { scenario, format, output } => {
            let report = run(&prepare(&scenario, &overrides)?);
            let text = match format {
                Format::Text => report.to_text(),
                Format::Json => report.to_json() + "\n",
            };
            match output {
                Some(path) => std::fs::write(&path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))?,
                None => emit(&text),
            }
            Ok(report.exit_code() as u8)
        }
        Command::Bracket { scenario, f, g, structure } => {
            let p = prepare(&scenario, &overrides)?;
            let lines = bracket_lines(&p, structure.as_deref(), &f, &g).map_err(|e| e.to_string())?;
            emit_lines(&lines);
            Ok(0)
        }
        Command::Admissible { scenario, f, structure } => {
            let p = prepare(&scenario, &overrides)?;
            let (lines, verdict) = admissible_lines(&p, structure.as_deref(), &f).map_err(|e| e.to_string())?;
            emit_lines(&lines);
            Ok(match verdict {
                Verdict::Pass => 0,
                Verdict::Fail => 1,
                _ => 2,
            })
        }
        Command::Builtins => {
            emit_lines(&builtins::NAMES.map(String::from));
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
