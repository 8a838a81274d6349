use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(capquad_cli::run(std::env::args_os()))
}
