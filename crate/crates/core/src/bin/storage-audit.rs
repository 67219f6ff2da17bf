use std::process::ExitCode;

fn main() -> ExitCode {
    storage_audit::cli::main_with_args(std::env::args_os())
}
