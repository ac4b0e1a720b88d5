use std::process::ExitCode;

use clap::Parser;
use lowres_array::cli::{execute, load_config, output_path, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = load_config(cli.command.args()).and_then(|cfg| {
        let outcome = execute(&cli.command, &cfg)?;
        let path = output_path(&cli.command, &cfg);
        std::fs::write(&path, &outcome.csv)?;
        print!("{}", outcome.summary);
        println!("wrote {}", path.display());
        Ok(outcome.exit_code)
    });
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
