//! Command-line front end for `mertens-core`.
//!
//! Every command writes one JSON report line to stdout; tabular artifacts
//! go to the CSV named by `--out`. Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | numerical failure |
//! | 2 | usage error |
//! | 3 | parameter outside its valid range |
//! | 4 | missing input file |
//! | 5 | an in-run assertion failed (witness on stderr) |
//! | 6 | malformed input file |

mod commands;
mod lemmas;

use clap::{Args, Parser, Subcommand};
use mertens_core::Error;
use serde::Serialize;
use serde_json::Value;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

pub use lemmas::{run_lemma_grids, LemmaGridReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RANGE: i32 = 3;
pub const EXIT_MISSING_FILE: i32 = 4;
pub const EXIT_ASSERTION: i32 = 5;
pub const EXIT_MALFORMED: i32 = 6;

#[derive(Debug, Parser, Serialize)]
#[command(name = "mertens", version, about = "Numerical checks around conditional Mertens-function bounds")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Serialize)]
pub struct Global {
    /// Seed for every randomized study.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Default location of zero tables.
    #[arg(long, global = true, env = "MERTENS_DATA_DIR", default_value = "data")]
    pub data_dir: PathBuf,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Sieve μ, Λ and M(n) up to a limit.
    Sieve(commands::SieveArgs),
    /// Locate zeta zeros on the critical line from sign changes of Z.
    ZerosGenerate(commands::ZerosGenerateArgs),
    /// Validate an external zero table and store it in canonical form.
    ZerosImport(commands::ZerosImportArgs),
    /// Classify ordinates as V-typical or not.
    Classify(commands::ClassifyArgs),
    /// Count spaced atypical ordinates in [T, 2T].
    Census(commands::CensusArgs),
    /// Build the dyadic contour for N.
    Contour(commands::ContourArgs),
    /// Perron integrals for M(N) on the vertical line and the contour.
    Perron(commands::PerronArgs),
    /// Guinand-Weil residuals and zero-count sandwiches.
    ExplicitFormula(commands::ExplicitArgs),
    /// Grid checks of the Beurling-Selberg pair properties.
    SelbergCheck(commands::SelbergArgs),
    /// Pure-arithmetic inequality grids.
    Lemmas(commands::LemmasArgs),
    /// |M(N)| against the theorem envelope.
    Report(commands::ReportArgs),
}

/// Failure of a command, mapped to an exit code.
#[derive(Debug)]
pub enum CliError {
    Core(Error),
    MissingFile(PathBuf),
    Range(String),
    Io(String),
    Assertion { name: String, witness: Value },
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => match e {
                Error::InvalidParameter { .. }
                | Error::OutOfRange { .. }
                | Error::BudgetExceeded { .. }
                | Error::Coverage { .. }
                | Error::TableTooShort { .. } => EXIT_RANGE,
                Error::Parse { .. } | Error::EmptyTable => EXIT_MALFORMED,
                _ => EXIT_FAILURE,
            },
            CliError::MissingFile(_) => EXIT_MISSING_FILE,
            CliError::Range(_) => EXIT_RANGE,
            CliError::Io(_) => EXIT_FAILURE,
            CliError::Assertion { .. } => EXIT_ASSERTION,
        }
    }

    fn to_json(&self) -> Value {
        match self {
            CliError::Assertion { name, witness } => serde_json::json!({
                "error": "assertion",
                "assertion": name,
                "witness": witness,
            }),
            CliError::Core(e) => serde_json::json!({ "error": "core", "message": e.to_string() }),
            CliError::MissingFile(p) => serde_json::json!({ "error": "missing-file", "path": p }),
            CliError::Range(m) => serde_json::json!({ "error": "range", "message": m }),
            CliError::Io(m) => serde_json::json!({ "error": "io", "message": m }),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Parse `args` (program name first) and run the command, returning the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let pool = match cli.global.threads {
        Some(0) => {
            let _ = writeln!(err, "{}", CliError::Range("--threads must be positive".into()).to_json());
            return EXIT_RANGE;
        }
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build(),
        None => rayon::ThreadPoolBuilder::new().build(),
    };
    let pool = match pool {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "{}", CliError::Io(e.to_string()).to_json());
            return EXIT_FAILURE;
        }
    };
    let mut buf = Vec::new();
    let outcome = pool.install(|| commands::dispatch(&cli, &mut buf));
    if let Err(e) = out.write_all(&buf).and_then(|_| out.flush()) {
        let _ = writeln!(err, "{}", CliError::Io(e.to_string()).to_json());
        return EXIT_FAILURE;
    }
    match outcome {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "{}", e.to_json());
            e.exit_code()
        }
    }
}
