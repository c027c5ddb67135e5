use std::io;
use std::panic;
use std::process::ExitCode;

use bk_cli::report::EXIT_INTERNAL;

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let code = panic::catch_unwind(|| bk_cli::cli::run(&argv, &mut io::stdout().lock(), &mut io::stderr().lock()))
        .unwrap_or(EXIT_INTERNAL);
    ExitCode::from(code as u8)
}
