use std::process::ExitCode;

use clap::Parser;
use lagfid::cli::{execute, Args};

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = lagfid::thread_cap().and_then(|cap| {
        if let Some(n) = cap {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| lagfid::Error::Config(e.to_string()))?;
        }
        let config = args.into_config()?;
        execute(&config, &mut std::io::stdout().lock())
    });
    match result {
        Ok(status) => ExitCode::from(status.code() as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
