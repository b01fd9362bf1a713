use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, ValueEnum};
use serde::Serialize;

use nseg_core::analytics::{NetworkProperties, UniqueIps};
use nseg_core::edge::build;
use nseg_core::edge::io::write_edges;
use nseg_core::synth::{generate, write_pcap, SynthConfig, TrafficModel};

use super::{format_name, usage_error, FormatArg};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Uniform,
    Skewed,
}

#[derive(Args)]
pub struct GenArgs {
    /// Output file (edge file, or PCAP with --pcap)
    #[arg(short, long)]
    pub out: PathBuf,
    /// Number of packets to generate
    #[arg(long)]
    pub packets: u64,
    /// Vertex space size
    #[arg(long)]
    pub vertices: u32,
    /// Source distribution
    #[arg(long, value_enum, default_value_t = ModelArg::Uniform)]
    pub model: ModelArg,
    /// Power-law exponent for the skewed model
    #[arg(long, default_value_t = 2.0)]
    pub exponent: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Emit a PCAP capture instead of an edge file
    #[arg(long)]
    pub pcap: bool,
    /// Fraction of injected non-IPv4 frames (PCAP output only)
    #[arg(long, default_value_t = 0.0)]
    pub invalid_fraction: f64,
    /// Edge file format (ignored with --pcap)
    #[arg(long, value_enum, default_value_t = FormatArg::Binary)]
    pub format: FormatArg,
}

#[derive(Serialize)]
struct GenSummary {
    output: String,
    kind: &'static str,
    format: &'static str,
    packets: u64,
    vertices_observed: u64,
    seed: u64,
    bytes_written: u64,
    properties: NetworkProperties,
    unique_ips: UniqueIps,
}

pub fn run(args: &GenArgs) -> anyhow::Result<()> {
    if args.invalid_fraction != 0.0 && !args.pcap {
        usage_error("--invalid-fraction only applies to PCAP output; add --pcap");
    }
    let config = SynthConfig {
        n_packets: args.packets,
        n_vertices: args.vertices,
        model: match args.model {
            ModelArg::Uniform => TrafficModel::Uniform,
            ModelArg::Skewed => TrafficModel::Skewed {
                exponent: args.exponent,
            },
        },
        seed: args.seed,
        invalid_fraction: args.invalid_fraction,
    };
    if let Err(e) = config.validate() {
        usage_error(&e.to_string());
    }

    let (records, truth) = generate(&config);
    let (kind, format, bytes_written) = if args.pcap {
        let bytes = write_pcap(&records, &args.out, args.invalid_fraction, args.seed)
            .with_context(|| format!("writing {}", args.out.display()))?;
        ("pcap", "pcap", bytes)
    } else {
        let (dict, table) = build(records);
        let format = args.format.into();
        let bytes = write_edges(&table, &dict, &args.out, format)
            .with_context(|| format!("writing {}", args.out.display()))?;
        ("edges", format_name(format), bytes)
    };

    let summary = GenSummary {
        output: args.out.display().to_string(),
        kind,
        format,
        packets: args.packets,
        vertices_observed: truth.unique_ips.total,
        seed: args.seed,
        bytes_written,
        properties: truth.properties,
        unique_ips: truth.unique_ips,
    };
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}
