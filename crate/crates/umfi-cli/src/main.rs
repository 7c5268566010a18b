//! `umfi` — command-line access to importance estimation, dependence
//! removal, diagnostics, simulation studies, and the runtime benchmark.
//!
//! Exit codes: 0 success, 1 usage error, 2 data/validation error.

mod cli;
mod commands;
mod output;

use clap::error::ErrorKind;
use clap::Parser;

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let parsed = match cli::Cli::try_parse() {
        Ok(parsed) => parsed,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };

    if parsed.threads > 0 {
        // Ignore "already initialized": only the first build wins, which
        // can only happen in-process during tests.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(parsed.threads)
            .build_global();
    }

    match commands::dispatch(&parsed) {
        Ok(()) => 0,
        Err(commands::Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(commands::Failure::Data(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    }
}
