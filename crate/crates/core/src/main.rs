use std::process::ExitCode;

use clap::Parser;
use rinv::cli::{run, RunConfig};

fn main() -> ExitCode {
    let config = RunConfig::parse();
    let out = run(&config);
    eprint!("{}", out.stderr);
    println!("{}", out.stdout);
    ExitCode::from(out.exit_code as u8)
}
