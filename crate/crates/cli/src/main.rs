mod args;
mod run;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use run::{Context, Failure};

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: cannot start {threads} threads: {e}");
            return ExitCode::from(run::EXIT_USAGE);
        }
    }
    let ctx = Context {
        verbose: cli.verbose,
        seed: cli.seed,
    };
    let result = match &cli.command {
        Command::Construct(a) => run::construct(&ctx, a),
        Command::Verify(a) => run::verify(&ctx, a),
        Command::Rvalue(a) => run::rvalue(&ctx, a),
        Command::Density(a) => run::density(&ctx, a),
        Command::Schedule(a) => run::schedule(&ctx, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { code, message }) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
