use std::process::ExitCode;

use clap::Parser;
use dyadic_cli::{parse_config, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, opts) = cli.command.split();
    let config = match parse_config(kind, opts) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&config) {
        Ok(outcome) => {
            println!("{}", outcome.summary.trim_end());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
