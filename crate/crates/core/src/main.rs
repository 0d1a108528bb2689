use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use towerdecomp::cli::commands::Format;
use towerdecomp::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (format, result) = run(&cli);
    match result {
        Ok(report) => {
            let _ = writeln!(std::io::stdout(), "{}", report.output);
            ExitCode::from(report.code as u8)
        }
        Err(e) => {
            if format == Format::Json {
                let _ = writeln!(std::io::stdout(), "{}", e.to_json());
            }
            eprintln!("towerdecomp: {} error: {e}", e.kind());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
