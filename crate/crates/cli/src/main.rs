mod args;
mod commands;
mod report;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Format};

const EXIT_VALIDATION: u8 = 2;
const EXIT_IO: u8 = 1;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_VALIDATION),
            };
        }
    };

    if cli.global.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.global.threads)
            .build_global()
        {
            eprintln!("error: cannot configure thread pool: {e}");
            return ExitCode::from(EXIT_IO);
        }
    }

    let report = match commands::run(&cli.global, &cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_VALIDATION);
        }
    };

    let mut out: Box<dyn Write> = match &cli.global.output {
        Some(path) => match File::create(path) {
            Ok(f) => Box::new(BufWriter::new(f)),
            Err(e) => {
                eprintln!("error: cannot create {}: {e}", path.display());
                return ExitCode::from(EXIT_IO);
            }
        },
        None => Box::new(io::stdout().lock()),
    };
    let written = match cli.global.format {
        Format::Json => report.write_json(&mut out).map_err(|e| e.to_string()),
        Format::Csv => report.write_csv(&mut out).map_err(|e| e.to_string()),
    };
    if let Err(e) = written.and_then(|_| out.flush().map_err(|e| e.to_string())) {
        eprintln!("error: writing report: {e}");
        return ExitCode::from(EXIT_IO);
    }

    if report.passed {
        ExitCode::SUCCESS
    } else {
        eprintln!("validation failed; see residuals in the report");
        ExitCode::from(EXIT_VALIDATION)
    }
}
