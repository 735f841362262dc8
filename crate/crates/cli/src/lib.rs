//! Command-line front end: parses arguments, runs one subcommand and writes a
//! self-describing CSV plus a short summary.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod plan;
pub mod records;

use std::ffi::OsString;
use std::io::Write;

use clap::{Parser, Subcommand};
use raman_qkd::Parallelism;

use commands::{FitArgs, FwmArgs, KeyrateArgs, MaxdistArgs, NoiseArgs, Report};
pub use error::{CliError, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK};

pub const PROGRAM: &str = "raman-qkd";

#[derive(Parser, Debug)]
#[command(name = PROGRAM, version, about = "Raman noise and key-rate models for QKD over shared DWDM fiber")]
pub struct Cli {
    /// Worker threads for sweeps (0 = all cores, 1 = sequential)
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// SRS counts per gate versus fiber length
    Noise(NoiseArgs),
    /// Fit Stokes / anti-Stokes slopes to count records
    Fit(FitArgs),
    /// Four-wave-mixing negligibility and phase-mismatch report
    Fwm(FwmArgs),
    /// Secure key rate versus fiber length
    Keyrate(KeyrateArgs),
    /// Maximum distance versus per-channel launch power
    Maxdist(MaxdistArgs),
}

fn execute(command: &Command, par: Parallelism) -> Result<Report, CliError> {
    match command {
        Command::Noise(a) => commands::noise(a),
        Command::Fit(a) => commands::fit(a),
        Command::Fwm(a) => commands::fwm(a),
        Command::Keyrate(a) => commands::keyrate(a, par),
        Command::Maxdist(a) => commands::maxdist(a, par),
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let report = if cli.threads == 1 {
        execute(&cli.command, Parallelism::Sequential)?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build()
            .map_err(|e| CliError::config(format!("cannot start thread pool: {e}")))?;
        pool.install(|| execute(&cli.command, Parallelism::Parallel))?
    };
    match &report.output {
        Some(path) => {
            let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
            report.table.write_to(&mut file)?;
            file.flush()?;
            out.write_all(report.summary.as_bytes())?;
        }
        None => {
            report.table.write_to(out)?;
            err.write_all(report.summary.as_bytes())?;
        }
    }
    Ok(())
}

/// Runs the program on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match dispatch(&cli, out, err) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
