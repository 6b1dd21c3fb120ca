//! Command-line front end: parameter generation, key files, signing,
//! verification, simulation, security games and timings.
//!
//! Exit codes are stable for scripting:
//!
//! | code | meaning                          |
//! |------|----------------------------------|
//! | 0    | success, or a valid signature    |
//! | 1    | signature rejected               |
//! | 2    | usage error                      |
//! | 3    | I/O error                        |
//! | 4    | malformed or mismatched artifact |
//! | 5    | a security game verdict failed   |

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod files;

pub use files::{read_artifact, write_artifact};

/// Environment variable naming the parameter file used when `--params` is absent.
pub const PARAMS_ENV: &str = "CSISDVS_PARAMS";
/// Parameter file used when neither `--params` nor the environment says otherwise.
pub const DEFAULT_PARAMS_PATH: &str = "csisdvs.params";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_MALFORMED: i32 = 4;
pub const EXIT_GAME_FAILED: i32 = 5;

#[derive(Parser, Debug)]
#[command(name = "csisdvs", version, about = "Strong designated verifier signatures from isogeny group actions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate public parameters
    Paramgen(ParamgenArgs),
    /// Generate a signer or verifier key pair
    Keygen(KeygenArgs),
    /// Sign a message for a designated verifier
    Sign(SignArgs),
    /// Check a signature with the verifier's secret key
    Verify(VerifyArgs),
    /// Produce a signature with the verifier's secret key
    Simulate(SimulateArgs),
    /// Run a security experiment with the built-in adversaries
    Game(GameArgs),
    /// Time key generation, signing, simulation and verification
    Bench(BenchArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Profile {
    /// p = 419 isogeny backend (UNSAFE-TOY)
    Toy,
    /// Additive mock backend at production widths
    Mock,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Role {
    Signer,
    Verifier,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExperimentName {
    Suf,
    Nt,
    Psi,
}

#[derive(Args, Debug, Clone)]
pub struct ProfileArgs {
    #[arg(long, value_enum)]
    pub profile: Profile,
    /// Number of parallel key components
    #[arg(long, default_value_t = 1)]
    pub eta: usize,
    /// Security parameter: 16 (UNSAFE-TOY) or 128
    #[arg(long, default_value_t = 128)]
    pub lambda: u32,
    /// Mock group order, decimal or `2^k` (default 2^(2 lambda))
    #[arg(long)]
    pub order: Option<String>,
}

#[derive(Args, Debug)]
pub struct ParamgenArgs {
    #[command(flatten)]
    pub profile: ProfileArgs,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct KeygenArgs {
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub role: Role,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Writes `<prefix>.sk` and `<prefix>.pk`
    #[arg(long)]
    pub out_prefix: PathBuf,
}

#[derive(Args, Debug)]
pub struct SignArgs {
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Signer secret key
    #[arg(long)]
    pub sk: PathBuf,
    /// Verifier public key
    #[arg(long)]
    pub pk: PathBuf,
    #[arg(long)]
    pub message: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Verifier secret key
    #[arg(long)]
    pub sk: PathBuf,
    /// Signer public key
    #[arg(long)]
    pub pk: PathBuf,
    #[arg(long)]
    pub message: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Verifier secret key
    #[arg(long)]
    pub sk: PathBuf,
    /// Signer public key
    #[arg(long)]
    pub pk: PathBuf,
    #[arg(long)]
    pub message: PathBuf,
    #[arg(long)]
    pub signature: PathBuf,
}

#[derive(Args, Debug)]
pub struct GameArgs {
    #[arg(value_enum)]
    pub experiment: ExperimentName,
    /// Parameter file; ignored when `--profile` is given
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub profile: Option<Profile>,
    #[arg(long, default_value_t = 1)]
    pub eta: usize,
    /// Security parameter for `--profile` (default 16, so collisions are measurable)
    #[arg(long, default_value_t = 16)]
    pub lambda: u32,
    #[arg(long)]
    pub order: Option<String>,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 16)]
    pub query_budget: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write a JSON summary of the verdicts here
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    pub iterations: u32,
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Parses `args` (including the program name) and runs the command, writing
/// to the given streams. Returns the process exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match commands::dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// [`run_with`] on the process's standard streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}
