//! `qrom`: seeded batch experiments over qrom-core.
//!
//! Exit status is 0 when every asserted row passes, 1 when one fails and 2
//! on a usage or runtime error.

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qrom_cli::{demo, lemmas, reduce, separation, Common};

#[derive(Parser, Debug)]
#[command(name = "qrom", version, about = "Quantum random-oracle experiments at desk scale")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Bound checks for the oracle lemmas.
    Lemmas(lemmas::LemmaArgs),
    /// The IS* protocol against classical and quantum collision finders.
    Separation(separation::SeparationArgs),
    /// History-free reductions against planted forgers.
    Reduce(reduce::ReduceArgs),
    /// Scheme correctness and the encryption-proof experiments.
    CryptoDemo(demo::DemoArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Lemmas(a) => lemmas::run(&cli.common, a),
        Cmd::Separation(a) => separation::run(&cli.common, a),
        Cmd::Reduce(a) => reduce::run(&cli.common, a),
        Cmd::CryptoDemo(a) => demo::run(&cli.common, a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("qrom: at least one asserted row failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("qrom: {e:#}");
            ExitCode::from(2)
        }
    }
}
