use std::io::{self, Write};
use std::process::ExitCode;

fn main() -> ExitCode {
    let config = match countstable_cli::parse_args(std::env::args_os()) {
        Ok(c) => c,
        Err(e) => {
            if e.exit_code == countstable_cli::EXIT_OK {
                print!("{e}");
            } else {
                eprint!("{e}");
                if !e.message.ends_with('\n') {
                    eprintln!();
                }
            }
            return ExitCode::from(e.exit_code as u8);
        }
    };
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let mut err = io::stderr();
    let code = countstable_cli::run(&config, &mut out, &mut err);
    if out.flush().is_err() {
        return ExitCode::from(countstable_cli::EXIT_INVALID_PARAMS as u8);
    }
    ExitCode::from(code as u8)
}
