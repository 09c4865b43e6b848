use std::process::ExitCode;

fn main() -> ExitCode {
    boolsketch_cli::main_entry()
}
