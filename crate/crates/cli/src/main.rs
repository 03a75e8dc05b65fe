//! `reebdist`: descriptors, distances, matrices, retrieval metrics and
//! time-series peaks from the command line.

mod commands;
mod config;
mod error;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Parser, Subcommand};

use config::ConfigArgs;
use error::{CliError, CliResult};

#[derive(Parser, Debug)]
#[command(name = "reebdist", version, about = "Topological distances between multi-fields")]
struct Cli {
    /// Worker threads; defaults to one per core. Results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Log progress (-v) or everything (-vv) to stderr.
    #[arg(short, long, action = ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eigenfunction descriptors of a surface mesh as CSV.
    Descriptors {
        mesh: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Distance report (JSON) between two items.
    Distance {
        /// Mesh path or grid:NXxNYxNZ[@h].
        a: String,
        b: String,
        /// Fields of A: `eig`, `desc:PATH` or `PATH[#COLUMN];...`.
        #[arg(long, default_value = "eig")]
        fields_a: String,
        /// Fields of B; defaults to the spec of A.
        #[arg(long)]
        fields_b: Option<String>,
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Distance matrix CSV over every pair of manifest items.
    Matrix {
        /// CSV with columns id,geometry,fields,label.
        manifest: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also write the id,label CSV used by `evaluate`.
        #[arg(long)]
        labels: Option<PathBuf>,
        /// Reuse pairs from an earlier, possibly interrupted, run with the same output.
        #[arg(long)]
        resume: bool,
    },
    /// Retrieval metrics (JSON) of a labeled distance matrix.
    Evaluate {
        matrix: PathBuf,
        labels: PathBuf,
        /// Ranks considered by the E-measure.
        #[arg(long, default_value_t = reebdist::evaluate::DEFAULT_EMEASURE_CUTOFF)]
        cutoff: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Distances between consecutive sites and their ranked peaks (CSV).
    Timeseries {
        /// Manifest listing the sites in order.
        manifest: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Gnuplot data file of the distance sequence.
        #[arg(long)]
        plot: Option<PathBuf>,
        /// JSON with distances and peaks.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Descriptors { mesh, config, output } => {
            commands::descriptors(&mesh, &config.resolve()?, output.as_deref())
        }
        Command::Distance {
            a,
            b,
            fields_a,
            fields_b,
            config,
            output,
        } => commands::distance(&a, &b, &fields_a, fields_b.as_deref(), &config.resolve()?, output.as_deref()),
        Command::Matrix {
            manifest,
            config,
            output,
            labels,
            resume,
        } => commands::matrix(&manifest, &config.resolve()?, output.as_deref(), labels.as_deref(), resume),
        Command::Evaluate {
            matrix,
            labels,
            cutoff,
            output,
        } => commands::evaluate(&matrix, &labels, cutoff, output.as_deref()),
        Command::Timeseries {
            manifest,
            config,
            output,
            plot,
            report,
        } => commands::timeseries(&manifest, &config.resolve()?, output.as_deref(), plot.as_deref(), report.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.workers {
        if n == 0 {
            eprintln!("{}", CliError::Usage("--workers must be at least 1".into()));
            return ExitCode::from(1);
        }
        pool = pool.num_threads(n);
    }
    let result = match pool.build() {
        Ok(pool) => pool.install(|| run(cli.command)),
        Err(e) => Err(CliError::Internal(format!("cannot start workers: {e}"))),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("reebdist: {e}");
            e.exit_code()
        }
    }
}
