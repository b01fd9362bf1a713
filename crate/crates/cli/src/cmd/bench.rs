use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::Args;

use nseg_core::edge::io::read_edges;

use super::{usage_error, CacheHint};
use crate::queries::{run_queries, timed};

#[derive(Args)]
pub struct BenchArgs {
    /// Edge file to analyze repeatedly
    pub edges: PathBuf,
    /// Number of load+analyze runs
    #[arg(long, default_value_t = 3)]
    pub repeats: u32,
    /// Operator-declared page-cache state for the run labels. The first
    /// read of a file is the cold one; repeats hit the page cache.
    #[arg(long, value_enum, default_value_t = CacheHint::Warm)]
    pub cache_hint: CacheHint,
}

pub fn run(args: &BenchArgs, threads: usize) -> anyhow::Result<()> {
    if args.repeats < 1 {
        usage_error("--repeats must be >= 1");
    }
    println!(
        "# input: {}  repeats: {}  cache_hint: {}  threads: {}",
        args.edges.display(),
        args.repeats,
        args.cache_hint.as_str(),
        threads
    );
    println!(
        "{:>4}  {:>10}  {:>10}  {:>10}",
        "run", "load_s", "queries_s", "total_s"
    );

    let mut baseline = None;
    for run in 1..=args.repeats {
        let total_start = Instant::now();
        let ((_dict, table), load_s) = {
            let (result, s) = timed(|| read_edges(&args.edges));
            (
                result.with_context(|| format!("reading {}", args.edges.display()))?,
                s,
            )
        };
        let (query_run, queries_s) = timed(|| run_queries(&table));
        let total_s = total_start.elapsed().as_secs_f64();
        println!("{run:>4}  {load_s:>10.4}  {queries_s:>10.4}  {total_s:>10.4}");

        let results = (query_run.properties, query_run.unique_ips);
        match &baseline {
            None => baseline = Some(results),
            Some(first) => {
                if *first != results {
                    bail!("run {run} produced different property values than run 1");
                }
            }
        }
    }
    println!(
        "# property values identical across {} run(s): true",
        args.repeats
    );
    Ok(())
}
