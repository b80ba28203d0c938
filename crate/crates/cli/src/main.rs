mod args;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use parasort::bench::run_benchmark_with;
use parasort::report::{emit_all_plots, write_csv, write_csv_to};
use parasort::Measurement;

use crate::args::Args;

const USAGE_ERROR: u8 = 2;

fn progress(m: &Measurement) {
    match &m.failure {
        None => eprintln!(
            "{:<9} {} {}-bit {:<5} {:<11} n={:<9} {:>10.3} M/s",
            m.algorithm, m.mode, m.width, m.payload, m.distribution, m.n, m.sort_rate
        ),
        Some(f) => eprintln!("{} {}: INVALID: {f}", m.cell_key(), m.mode),
    }
}

fn main() -> ExitCode {
    let bare = std::env::args_os().len() <= 1;
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE_ERROR } else { 0 });
        }
    };
    let config = match args.to_config(bare) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(USAGE_ERROR);
        }
    };
    if bare {
        eprintln!(
            "no arguments given: running the full default grid (exponents {} to {}, {} repetitions); see --help",
            config.min_exp, config.max_exp, config.repetitions
        );
    }

    let measurements = match run_benchmark_with(&config, progress) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    let written = match &args.out {
        Some(path) => write_csv(&measurements, path),
        None => {
            let mut stdout = std::io::stdout().lock();
            write_csv_to(&measurements, &mut stdout).and_then(|n| {
                stdout.flush()?;
                Ok(n)
            })
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::FAILURE;
    }
    if let Some(prefix) = &args.plot {
        match emit_all_plots(&measurements, prefix) {
            Ok(paths) => {
                for p in paths {
                    eprintln!("wrote {}", p.display());
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::FAILURE;
            }
        }
    }
    let invalid = measurements.iter().filter(|m| !m.is_valid()).count();
    if invalid > 0 {
        eprintln!("warning: {invalid} cell(s) failed verification and were left out of the output");
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}
