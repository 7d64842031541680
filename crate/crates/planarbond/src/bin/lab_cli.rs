//! Laboratory command line. See `planarbond::cli` for the contract.
//!
//! Exit codes: 0 success / all report cells pass, 1 a report cell failed,
//! 2 usage or configuration error, 3 numerical or I/O failure.

use planarbond::cli::{self, CliError};

fn main() {
    let code = match cli::parse_config(std::env::args_os()) {
        Err(CliError::HelpOrVersion(text)) => {
            print!("{text}");
            0
        }
        Err(err) => {
            eprintln!("{err}");
            err.exit_code()
        }
        Ok(cfg) => match cli::run(&cfg) {
            Ok(outcome) => {
                print!("{}", outcome.csv);
                outcome.exit_code
            }
            Err(err) => {
                eprintln!("{err}");
                err.exit_code()
            }
        },
    };
    std::process::exit(code);
}
