use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(k2design::cli::run_from_args(std::env::args_os()))
}
