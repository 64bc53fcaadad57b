use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(rdst_cli::run(std::env::args_os()))
}
