//! `dbarrier`: price, converge, bench and validate jobs from a TOML config.

mod config;
mod jobs;
mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::Representation;
use table::Table;

const CONFIG_ERROR: u8 = 2;
const NUMERICAL_ERROR: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "dbarrier", version, about = "Double-barrier pricing on a curvilinear heat strip")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write the CSV here instead of the config's path or stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for point evaluation.
    #[arg(long, global = true, env = "DBARRIER_THREADS")]
    threads: Option<usize>,

    /// Overrides the config's representation choice.
    #[arg(long, global = true, value_enum)]
    representation: Option<Representation>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Prices on the configured points with every enabled method.
    Price { config: PathBuf },
    /// Error against grid size with measured orders.
    Converge { config: PathBuf },
    /// Median timings of solves and point evaluation.
    Bench { config: PathBuf },
    /// Checks the config and the problem it describes.
    Validate { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let path = match &cli.command {
        Command::Price { config }
        | Command::Converge { config }
        | Command::Bench { config }
        | Command::Validate { config } => config,
    };
    let mut job = match config::load(path) {
        Ok(job) => job,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(CONFIG_ERROR);
        }
    };
    if let Some(r) = cli.representation {
        job.representation = r;
    }
    let threads = cli.threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())).max(1);

    let result = match &cli.command {
        Command::Validate { .. } => {
            let (lines, ok) = jobs::validate(&job);
            for l in lines {
                println!("{l}");
            }
            return if ok { ExitCode::SUCCESS } else { ExitCode::from(CONFIG_ERROR) };
        }
        Command::Price { .. } => jobs::price(&job, threads),
        Command::Converge { .. } => jobs::converge(&job, threads),
        Command::Bench { .. } => jobs::bench(&job),
    };
    let table = match result {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            return ExitCode::from(if e.is_numerical() { NUMERICAL_ERROR } else { CONFIG_ERROR });
        }
    };
    let target = cli.out.or_else(|| job.config.output.csv.clone());
    match emit(&table, target) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cannot write output: {e}");
            ExitCode::FAILURE
        }
    }
}

fn emit(table: &Table, target: Option<PathBuf>) -> io::Result<()> {
    match target {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            let mut w = BufWriter::new(File::create(&p)?);
            table.write(&mut w)?;
            w.flush()
        }
        None => {
            let stdout = io::stdout();
            table.write(stdout.lock())?;
            Ok(())
        }
    }
}
