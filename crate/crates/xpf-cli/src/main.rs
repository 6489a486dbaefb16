//! `xpf`: command-line front end for the XP stabiliser formalism.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 empty codespace,
//! 3 size limit or search budget exceeded. `check` also exits with 1 when
//! an invariant fails.

mod codefile;
mod commands;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use thiserror::Error;
use xpf::XpError;

use codefile::CodeFile;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Xp(#[from] XpError),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Xp(XpError::EmptyCodespace { .. } | XpError::NoSupport) => 2,
            CliError::Xp(XpError::SizeLimit(_) | XpError::SearchBudget { .. }) => 3,
            _ => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "xpf",
    version,
    about = "XP stabiliser codes: canonical generators, codewords, logical operators and measurement"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value = "text", global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Canonical generators S_X and S_Z.
    Canon { file: PathBuf },
    /// Orbit representatives and codewords.
    Codewords { file: PathBuf },
    /// Logical identity group, logical operators and achievable diagonal actions.
    Logical { file: PathBuf },
    /// Logical action of an operator on the codewords.
    Action { file: PathBuf, operator: String },
    /// Outcome probabilities and post-measurement codes.
    Measure {
        file: PathBuf,
        operator: String,
        /// Treat the operator as a diagonal Pauli and update the core form.
        #[arg(long)]
        diag_pauli: bool,
    },
    /// Convert between weighted hypergraph states and XP codes.
    #[command(group(ArgGroup::new("direction").required(true).args(["whg_to_xp", "xp_to_whg"])))]
    Convert {
        /// Input: `r=<int>` header then one `CP(p/q,v)` per line.
        #[arg(long)]
        whg_to_xp: bool,
        /// Input: code file of a stabiliser state.
        #[arg(long)]
        xp_to_whg: bool,
        /// Use the reduced embedding for hypergraph input.
        #[arg(long, requires = "whg_to_xp")]
        optimised: bool,
        input: PathBuf,
    },
    /// Emit the Reed-Muller code on 2^r - 1 qubits as a code file.
    Rm {
        r: usize,
        /// Rescale the generators to this precision.
        #[arg(long)]
        precision: Option<i64>,
    },
    /// Verify the code against the dense oracle.
    Check { file: PathBuf },
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn code_file(path: &Path) -> Result<CodeFile, CliError> {
    Ok(CodeFile::parse(&read(path)?)?)
}

fn run(cli: &Cli) -> commands::CmdResult {
    match &cli.command {
        Command::Canon { file } => commands::canon(&code_file(file)?),
        Command::Codewords { file } => commands::codewords(&code_file(file)?),
        Command::Logical { file } => commands::logical(&code_file(file)?),
        Command::Action { file, operator } => commands::action(&code_file(file)?, operator),
        Command::Measure {
            file,
            operator,
            diag_pauli,
        } => commands::measure_cmd(&code_file(file)?, operator, *diag_pauli),
        Command::Convert {
            whg_to_xp,
            optimised,
            input,
            ..
        } => {
            if *whg_to_xp {
                commands::whg_to_xp_cmd(&read(input)?, *optimised)
            } else {
                commands::xp_to_whg_cmd(&code_file(input)?)
            }
        }
        Command::Rm { r, precision } => {
            if !(3..=12).contains(r) {
                return Err(CliError::Usage(format!(
                    "r must be between 3 and 12, got {r}"
                )));
            }
            commands::rm(*r, *precision)
        }
        Command::Check { file } => commands::check(&code_file(file)?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(report) => {
            match cli.format {
                Format::Text => print!("{}", report.text),
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&report.json).expect("reports serialise")
                ),
            }
            if report.success {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
