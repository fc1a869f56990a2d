use std::path::PathBuf;
use std::process::ExitCode;

use abcd_ldg::commands;
use abcd_ldg::config::{self, Cli, OUTPUT_ROOT_ENV};
use clap::Parser;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let env_root = std::env::var_os(OUTPUT_ROOT_ENV).map(PathBuf::from);
    let result = config::resolve(cli.command.kind(), cli.command.args(), env_root).and_then(|cfg| commands::run(&cfg));
    match result {
        Ok(out) => {
            print!("{}", out.summary);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
