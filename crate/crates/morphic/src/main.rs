use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(morphic::cli::run(std::env::args_os()) as u8)
}
