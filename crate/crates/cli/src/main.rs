use std::process::ExitCode;

use page_cli::{parse_args, run, CliError};

fn main() -> ExitCode {
    match parse_args(std::env::args_os()).and_then(|config| run(&config)) {
        Ok(_) => ExitCode::SUCCESS,
        Err(CliError::Usage(e)) => {
            let code = e.exit_code();
            let _ = e.print();
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("page: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
