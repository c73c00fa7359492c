use std::process::ExitCode;

fn main() -> ExitCode {
    casimir_core::cli::main_from(std::env::args_os())
}
