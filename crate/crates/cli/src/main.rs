use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(tiqflash_cli::run(std::env::args_os()) as u8)
}
