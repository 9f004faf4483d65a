//! `irac`: issuer, holder and verifier commands over files.

mod commands;
mod envelope;
mod error;
mod store;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use error::CliError;

#[derive(Parser)]
#[command(name = "irac", version, about = "Issuer-hiding revocable anonymous credentials")]
struct Cli {
    /// System parameters file.
    #[arg(long, global = true, default_value = "params.irac")]
    params: PathBuf,
    /// Attribute universe file. Defaults to universe.irac next to the parameters.
    #[arg(long, global = true)]
    universe: Option<PathBuf>,
    /// Directory holding the issuer key or the holder wallet.
    #[arg(long, global = true, default_value = ".")]
    state_dir: PathBuf,
    /// Seed for all randomness. For reproducible test runs only.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Prod,
    Test,
}

#[derive(Subcommand)]
enum Cmd {
    /// Creates system parameters and an empty attribute universe.
    Setup(SetupArgs),
    #[command(subcommand)]
    Universe(UniverseCmd),
    #[command(subcommand)]
    Issuer(IssuerCmd),
    #[command(subcommand)]
    Holder(HolderCmd),
    #[command(subcommand)]
    Verifier(VerifierCmd),
}

#[derive(Args)]
pub struct SetupArgs {
    #[arg(long, default_value_t = 8)]
    n_a: usize,
    #[arg(long, default_value_t = 8)]
    n_r: usize,
    #[arg(long, default_value_t = 8)]
    n_i: usize,
    /// Largest circuit the parameters support, a power of two.
    #[arg(long, default_value_t = 1 << 16)]
    max_constraints: usize,
    #[arg(long, value_enum, default_value = "prod")]
    backend: BackendArg,
    /// Overwrite existing files.
    #[arg(long)]
    force: bool,
}

#[derive(Subcommand)]
enum UniverseCmd {
    /// Appends attributes given as name:numBITS or name:cat.
    Add {
        #[arg(required = true)]
        attrs: Vec<String>,
    },
}

#[derive(Subcommand)]
enum IssuerCmd {
    /// Creates a key pair and an empty revocation list.
    Init {
        /// Attribute names or #indices, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        attrs: Vec<String>,
    },
    /// Signs a credential over name=value pairs.
    Issue {
        #[arg(long = "value", required = true)]
        values: Vec<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Adds a credential to the revocation list.
    Revoke {
        #[arg(long)]
        credential: PathBuf,
    },
    /// Copies the public bundle to a file, or stdout for `-`.
    Publish {
        #[arg(long, default_value = "-")]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum HolderCmd {
    /// Checks a credential against its issuer bundle and adds it to the wallet.
    Store {
        #[arg(long)]
        credential: PathBuf,
        #[arg(long)]
        bundle: PathBuf,
    },
    /// Proves the predicate with a wallet credential.
    Present {
        #[command(flatten)]
        session: Session,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum VerifierCmd {
    /// Prints ACCEPT or REJECT.
    Verify {
        #[command(flatten)]
        session: Session,
        #[arg(long)]
        token: PathBuf,
    },
}

/// What holder and verifier must agree on.
#[derive(Args)]
pub struct Session {
    /// Predicate file in the text grammar.
    #[arg(long)]
    predicate: PathBuf,
    /// Issuer bundle files, comma separated or repeated.
    #[arg(long, value_delimiter = ',', required = true)]
    issuer_set: Vec<PathBuf>,
    /// Verifier challenge as hex.
    #[arg(long, default_value = "")]
    ctx: String,
    /// Backend the parameters are expected to use.
    #[arg(long, value_enum)]
    backend: Option<BackendArg>,
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let env = commands::Env::new(cli.params, cli.universe, cli.state_dir, cli.seed);
    match cli.cmd {
        Cmd::Setup(a) => commands::setup(&env, &a),
        Cmd::Universe(UniverseCmd::Add { attrs }) => commands::universe_add(&env, &attrs),
        Cmd::Issuer(IssuerCmd::Init { attrs }) => commands::issuer_init(&env, &attrs),
        Cmd::Issuer(IssuerCmd::Issue { values, out }) => commands::issuer_issue(&env, &values, &out),
        Cmd::Issuer(IssuerCmd::Revoke { credential }) => commands::issuer_revoke(&env, &credential),
        Cmd::Issuer(IssuerCmd::Publish { out }) => commands::issuer_publish(&env, &out),
        Cmd::Holder(HolderCmd::Store { credential, bundle }) => commands::holder_store(&env, &credential, &bundle),
        Cmd::Holder(HolderCmd::Present { session, out }) => commands::holder_present(&env, &session, &out),
        Cmd::Verifier(VerifierCmd::Verify { session, token }) => commands::verifier_verify(&env, &session, &token),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let (code, name) = e.code();
            eprintln!("error[{name}]: {e}");
            ExitCode::from(code)
        }
    }
}
