use std::process::ExitCode;

fn main() -> ExitCode {
    jumpopt::cli::main_from(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr())
}
