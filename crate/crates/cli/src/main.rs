//! `prefforge`: generate comparison sets, elicit preferences in the terminal,
//! learn and evaluate objective functions, run simulated users, and serve the
//! HTTP session API.
//!
//! Exit codes: 0 success, 1 usage error, 2 invalid input, 3 runtime failure.

mod commands;

use std::net::IpAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "prefforge",
    version,
    about = "Learn objective functions from pairwise preferences"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Pair up solutions of problem instances into a comparison set.
    Generate {
        /// Instance catalog document.
        #[arg(long)]
        instances: PathBuf,
        /// Generation config document; defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Ask for preferences in the terminal and save the answered comparisons.
    Elicit {
        #[arg(long)]
        set: PathBuf,
        #[arg(long, default_value_t = 50)]
        max_questions: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Deltas at or below this count as unchanged when picking structured pairs.
        #[arg(long, default_value_t = 1.0)]
        measure_tolerance: f64,
        #[arg(long)]
        out: PathBuf,
        /// Also save the session document, which records the question order.
        #[arg(long)]
        session_out: Option<PathBuf>,
    },
    /// Learn an objective function from an answered comparison set.
    Learn {
        #[arg(long)]
        set: PathBuf,
        /// Learn config document; the flags below override it.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        val_error: Option<f64>,
        #[arg(long)]
        tie_epsilon: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Learned function document.
        #[arg(long)]
        out: PathBuf,
        /// Learn report document.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Keep the per-generation error trace in the report.
        #[arg(long)]
        trace: bool,
        /// Write the solutions labelled against the learned function as CSV.
        #[arg(long)]
        debug_examples: Option<PathBuf>,
    },
    /// Global error and incompatible count of a function on a comparison set.
    Eval {
        #[arg(long)]
        function: PathBuf,
        #[arg(long)]
        set: PathBuf,
        #[arg(long, default_value_t = 40.0)]
        val_error: f64,
        #[arg(long, default_value_t = 0.5)]
        tie_epsilon: f64,
    },
    /// Elicit from a simulated user, learn, and score on held-out instances.
    Simulate {
        #[arg(long)]
        instances: PathBuf,
        /// Oracle config document with the ground-truth function.
        #[arg(long)]
        oracle: PathBuf,
        /// Simulation config document; defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Report document; printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the HTTP session service.
    Serve {
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Persist sessions here and reload them at startup.
        #[arg(long)]
        data_dir: Option<PathBuf>,
        /// Serve the browser UI from this directory.
        #[arg(long)]
        static_dir: Option<PathBuf>,
    },
    /// Print a function's rules as text.
    Render {
        #[arg(long)]
        function: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::from_default_env())
        .with_writer(std::io::stderr)
        .init();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
