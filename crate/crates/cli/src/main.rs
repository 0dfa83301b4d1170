//! `aucm`: build cloning machines, emit boundary data, run the oracle suite.
//!
//! Data goes to files (CSV or JSON, with a `.meta.json` sidecar holding the
//! configuration and tolerances); stdout gets a short human summary.
//! Exit status 1 means an invalid configuration, 2 a failed verification.

mod commands;
mod emit;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use aucm_core::machines::Sign;
use clap::{Args, Parser, Subcommand, ValueEnum};

use emit::Format;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] aucm_core::Error),
    #[error("cannot write {0}: {1}")]
    Path(PathBuf, std::io::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 2,
            _ => 1,
        }
    }
}

pub fn config<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Config(msg.into()))
}

#[derive(Parser, Debug)]
#[command(
    name = "aucm",
    version,
    about = "Asymmetric universal cloning machines for qudits"
)]
pub struct Cli {
    /// Data file format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,

    /// Data file path; defaults to a name derived from the arguments inside
    /// $AUCM_OUT_DIR (or the working directory).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a machine and report its coefficients, fidelities and region.
    Machine(MachineArgs),
    /// The 1→2 trade-off ellipse.
    Boundary12(Boundary12Args),
    /// The 1→3 hull mesh or one of its component surfaces.
    Boundary13(Boundary13Args),
    /// The 1→N bound along the two-fidelity family.
    Bound1n(Bound1nArgs),
    /// Finite-N and asymptotic two-fidelity trade-off curves.
    Banaszek(BanaszekArgs),
    /// Run the oracle suite; exits 2 on any failed check.
    Verify(VerifyArgs),
    /// Mix two extremal machines onto a target fidelity point.
    Mix(MixArgs),
}

/// `+`/`plus` or `-`/`minus`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SignArg(pub Sign);

fn parse_sign(s: &str) -> Result<SignArg, String> {
    match s {
        "+" | "plus" => Ok(SignArg(Sign::Plus)),
        "-" | "minus" => Ok(SignArg(Sign::Minus)),
        _ => Err(format!("expected + or -, got `{s}`")),
    }
}

#[derive(Args, Debug)]
pub struct MachineArgs {
    #[arg(long)]
    pub d: usize,
    /// Build `U±` from three coefficients; without it, `U_α` with one
    /// coefficient per output.
    #[arg(long, value_parser = parse_sign, allow_hyphen_values = true)]
    pub sign: Option<SignArg>,
    /// Raw coefficients, normalized before building.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub coeffs: Option<Vec<f64>>,
    /// Signed root-fidelity targets (`U±` only) instead of coefficients.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        conflicts_with = "coeffs"
    )]
    pub targets: Option<Vec<f64>>,
    /// Symmetric `U_α` with this many outputs when no coefficients are given.
    #[arg(long)]
    pub n: Option<usize>,
    /// Also estimate fidelities over this many Haar inputs (needs --seed).
    #[arg(long)]
    pub haar_samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct Boundary12Args {
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 100)]
    pub resolution: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Surface {
    Hull,
    Plus,
    Minus,
    Sphere,
}

#[derive(Args, Debug)]
pub struct Boundary13Args {
    #[arg(long)]
    pub d: usize,
    /// Directions per angle; the mesh has resolution² directions.
    #[arg(long, default_value_t = 200)]
    pub resolution: usize,
    #[arg(long, value_enum, default_value_t = Surface::Hull)]
    pub surface: Surface,
}

#[derive(Args, Debug)]
pub struct Bound1nArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub n: usize,
    /// Points along the family, from the trivial to the symmetric machine.
    #[arg(long, default_value_t = 50)]
    pub resolution: usize,
    /// Skip the dense Choi cross-check.
    #[arg(long)]
    pub no_choi: bool,
}

#[derive(Args, Debug)]
pub struct BanaszekArgs {
    #[arg(long)]
    pub d: usize,
    /// Output counts for the finite-N curves.
    #[arg(long, value_delimiter = ',', default_value = "10,100,1000")]
    pub n: Vec<usize>,
    /// Points in g ∈ [1, d].
    #[arg(long, default_value_t = 101)]
    pub resolution: usize,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Qudit dimension; both 2 and 3 when omitted.
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long)]
    pub seed: u64,
    /// Hull mesh resolution for the support-function check.
    #[arg(long, default_value_t = 200)]
    pub resolution: usize,
    #[command(flatten)]
    pub tol: verify::Tolerances,
}

#[derive(Args, Debug)]
pub struct MixArgs {
    #[arg(long)]
    pub d: usize,
    /// Sign and raw coefficients of the first endpoint machine; without a
    /// sign the coefficients define a `U_α`.
    #[arg(long, value_parser = parse_sign, allow_hyphen_values = true, requires = "coeffs_g")]
    pub sign_g: Option<SignArg>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub coeffs_g: Option<Vec<f64>>,
    #[arg(long, value_parser = parse_sign, allow_hyphen_values = true, requires = "coeffs_b")]
    pub sign_b: Option<SignArg>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub coeffs_b: Option<Vec<f64>>,
    /// Weight of the first endpoint.
    #[arg(long, conflicts_with = "target")]
    pub p: Option<f64>,
    /// Target f-point on the segment between the endpoints.
    #[arg(long, value_delimiter = ',')]
    pub target: Option<Vec<f64>>,
    /// Instead of explicit endpoints: the hull face hit by this root-space
    /// direction.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["sign_g", "sign_b", "p", "target"])]
    pub direction: Option<Vec<f64>>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
