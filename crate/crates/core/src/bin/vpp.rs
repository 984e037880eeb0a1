use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(vpp_complete::cli::run(std::env::args_os()))
}
