use std::process::ExitCode;

fn main() -> ExitCode {
    let config = match dbh_cli::parse_args(std::env::args_os()) {
        Ok(c) => c,
        // Help and version exit 0; everything else is a usage error (2).
        Err(e) => e.exit(),
    };
    ExitCode::from(dbh_cli::execute(&config))
}
