use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let code = cutlink_cli::run(std::env::args_os(), &mut io::stdin().lock(), &mut out, &mut io::stderr());
    ExitCode::from(code as u8)
}
