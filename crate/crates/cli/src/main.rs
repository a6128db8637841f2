use std::io;
use std::process::ExitCode;

use hermite_cli::{args, commands, Exit};

fn main() -> ExitCode {
    let cli = match args::parse_from(std::env::args_os()) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.exit_code() == 0 {
                Exit::Pass
            } else {
                Exit::Usage
            }
            .into();
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match commands::execute(&cli, &mut out) {
        Ok(code) => code.into(),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit().into()
        }
    }
}
