use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use stark_spectrum::experiment::{run_command, Command, Overrides};

#[derive(Parser)]
#[command(
    name = "stark",
    version,
    about = "Spectral data of the perturbed Stark operator on the half-line"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Eigenvalues by shooting and/or the finite-difference oracle
    Eig(Common),
    /// Norming constants
    Norming(Common),
    /// First-order predictions, remainders and decay fits
    Asympt(Common),
    /// Full verification campaign
    Verify(Common),
    /// Accuracy self-test of the Airy layer
    AirySelftest(Common),
}

#[derive(Args)]
struct Common {
    /// JSON configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Largest eigenvalue index
    #[arg(long)]
    n_max: Option<usize>,
    /// shooting, oracle or both
    #[arg(long)]
    method: Option<String>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (cmd, c) = match cli.command {
        Cmd::Eig(c) => (Command::Eig, c),
        Cmd::Norming(c) => (Command::Norming, c),
        Cmd::Asympt(c) => (Command::Asympt, c),
        Cmd::Verify(c) => (Command::Verify, c),
        Cmd::AirySelftest(c) => (Command::AirySelftest, c),
    };
    let ov = Overrides {
        n_max: c.n_max,
        method: c.method,
        out: c.out,
    };
    ExitCode::from(run_command(cmd, c.config.as_deref(), &ov) as u8)
}
