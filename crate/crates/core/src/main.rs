use std::process::ExitCode;

fn main() -> ExitCode {
    match pascal_ga::cli::run_cli(std::env::args_os()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(pascal_ga::cli::exit_code(&e) as u8)
        }
    }
}
