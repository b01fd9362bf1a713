//! `nseg`: ingest packet captures into columnar edge files, anonymize
//! vertex identities, and compute network property reports.
//!
//! Exit codes: 0 on success, 1 on data or I/O errors, 2 on usage errors.

use clap::{Parser, Subcommand};

mod cmd;
mod queries;
mod report;

#[derive(Parser)]
#[command(
    name = "nseg",
    version,
    about = "Columnar network traffic graph toolkit"
)]
struct Cli {
    /// Worker threads for the analytics kernels (default: all cores).
    /// Results are identical for every thread count.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a PCAP capture into an edge file
    Ingest(cmd::ingest::IngestArgs),
    /// Relabel vertex identities with a seeded random permutation
    Anonymize(cmd::anonymize::AnonymizeArgs),
    /// Compute the network property report for an edge file
    Analyze(cmd::analyze::AnalyzeArgs),
    /// Generate synthetic traffic with known ground truth
    Gen(cmd::gen::GenArgs),
    /// Analyze an edge file repeatedly and print a timing table
    Bench(cmd::bench::BenchArgs),
}

fn main() {
    let cli = Cli::parse();
    let threads = cli.threads.unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    });
    if threads == 0 {
        cmd::usage_error("--threads must be >= 1");
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap_or_else(|e| {
            eprintln!("error: failed to build thread pool: {e}");
            std::process::exit(1);
        });
    let outcome = pool.install(|| match cli.command {
        Command::Ingest(args) => cmd::ingest::run(&args),
        Command::Anonymize(args) => cmd::anonymize::run(&args),
        Command::Analyze(args) => cmd::analyze::run(&args, threads),
        Command::Gen(args) => cmd::gen::run(&args),
        Command::Bench(args) => cmd::bench::run(&args, threads),
    });
    if let Err(err) = outcome {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
