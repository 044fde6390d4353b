use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(scootfuse::main_with_args(std::env::args_os()))
}
