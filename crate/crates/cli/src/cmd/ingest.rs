use std::path::PathBuf;

use anyhow::Context;
use clap::Args;
use serde::Serialize;

use nseg_core::edge::build;
use nseg_core::edge::io::write_edges;
use nseg_core::pcap::ingest_pcap;

use super::{format_name, FormatArg};
use crate::queries::timed;

#[derive(Args)]
pub struct IngestArgs {
    /// Classic PCAP capture file
    pub pcap: PathBuf,
    /// Output edge file
    #[arg(short, long)]
    pub out: PathBuf,
    /// Output format
    #[arg(long, value_enum, default_value_t = FormatArg::Binary)]
    pub format: FormatArg,
}

#[derive(Serialize)]
struct IngestSummary {
    input: String,
    valid_packets: u64,
    invalid_packets: u64,
    truncated_packets: u64,
    bytes_read: u64,
    read_s: f64,
    rows: u64,
    vertices: u64,
    build_s: f64,
    output: String,
    output_format: &'static str,
    output_bytes: u64,
    write_s: f64,
}

pub fn run(args: &IngestArgs) -> anyhow::Result<()> {
    let (records, stats) =
        ingest_pcap(&args.pcap).with_context(|| format!("reading {}", args.pcap.display()))?;
    let ((dict, table), build_s) = timed(|| build(records));
    let format = args.format.into();
    let (written, write_s) = timed(|| write_edges(&table, &dict, &args.out, format));
    let output_bytes = written.with_context(|| format!("writing {}", args.out.display()))?;

    let summary = IngestSummary {
        input: args.pcap.display().to_string(),
        valid_packets: stats.valid_packets,
        invalid_packets: stats.invalid_packets,
        truncated_packets: stats.truncated_packets,
        bytes_read: stats.bytes_read,
        read_s: stats.wall_time.as_secs_f64(),
        rows: table.len() as u64,
        vertices: table.vertex_count() as u64,
        build_s,
        output: args.out.display().to_string(),
        output_format: format_name(format),
        output_bytes,
        write_s,
    };
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}
