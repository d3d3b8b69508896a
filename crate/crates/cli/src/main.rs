use clap::Parser;
use episcale_cli::{run, Cli, Status};
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let mut stdout = std::io::stdout().lock();
    let status = match run(&cli, &mut stdout) {
        Ok(status) => status,
        Err(e) => {
            eprintln!("error: {e}");
            Status::Failure
        }
    };
    ExitCode::from(status.code())
}
