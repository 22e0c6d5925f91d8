use clap::Parser;
use vacdetect::run::{execute, Cli};

fn main() -> std::process::ExitCode {
    execute(&Cli::parse())
}
