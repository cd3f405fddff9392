use std::process::ExitCode;

use clap::Parser;
use elastika_cli::cli::{Cli, Command, ReportCommand};
use elastika_cli::error::{CliError, Result, EXIT_USAGE};
use elastika_cli::{cli, run};

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("ELASTIKA_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| {
            CliError::usage(format!(
                "ELASTIKA_THREADS must be a positive integer, got {value:?}"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Internal(e.to_string()))
}

fn dispatch(command: &Command) -> Result<Vec<String>> {
    match command {
        Command::Tune(a) => run::tune(a),
        Command::Sweep(a) => run::sweep(a),
        Command::Noise(a) => run::noise(a),
        Command::Pf(a) => run::pf(a),
        Command::Predict(a) => run::predict(a),
        Command::Report(ReportCommand::Scatter(a)) => run::report_scatter(a),
        Command::Report(ReportCommand::Cd(a)) => run::report_cd(a),
        Command::Synth(a) => run::synth(a),
        Command::Timing(a) => run::timing(a),
    }
}

fn fail(err: CliError) -> ExitCode {
    eprintln!("elastika: {err}");
    ExitCode::from(err.exit_code())
}

fn main() -> ExitCode {
    let args = match cli::expand_config(std::env::args_os().collect()) {
        Ok(args) => args,
        Err(e) => return fail(e),
    };
    let parsed = match Cli::try_parse_from(args) {
        Ok(parsed) => parsed,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Err(e) = configure_threads() {
        return fail(e);
    }
    match dispatch(&parsed.command) {
        Ok(lines) => {
            for line in lines {
                println!("{line}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(e),
    }
}
