use std::process::ExitCode;

use clap::Parser;
use mtlab_cli::args::Cli;
use mtlab_cli::{report_error, run};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let explicit_out = cli.out.clone();
    let command = cli.command.as_ref().map(|c| c.kind());
    let config = match cli.into_config() {
        Ok(c) => c,
        Err(e) => {
            let rec = report_error(&e, command, explicit_out.as_deref());
            println!("{}", serde_json::to_string(&rec).unwrap_or_default());
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(&config) {
        Ok(outcome) => {
            println!("{}", outcome.summary_path.display());
            for p in outcome.tables.iter().chain(&outcome.plots) {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let out = config.out_dir().ok();
            let rec = report_error(&e, Some(config.command), out.as_deref());
            println!("{}", serde_json::to_string(&rec).unwrap_or_default());
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
