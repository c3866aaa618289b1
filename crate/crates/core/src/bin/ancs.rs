use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(ancs::cli::run(std::env::args_os()) as u8)
}
