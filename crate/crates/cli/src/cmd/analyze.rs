use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use clap::Args;

use nseg_core::analytics::DegreeVector;
use nseg_core::edge::io::{detect_format, read_edges, write_edges, EdgeFileFormat};
use nseg_core::edge::{EdgeTable, TableForm, VertexDictionary};
use nseg_core::oracle::{oracle_all_properties, OracleReport};

use super::{format_name, CacheHint};
use crate::queries::{run_queries, timed, QueryRun};
use crate::report::{InputInfo, RunReport, Timings, ToolInfo, REPORT_SCHEMA_VERSION};

#[derive(Args)]
pub struct AnalyzeArgs {
    /// Edge file (CSV or NSEG binary, detected by content)
    pub edges: PathBuf,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Directory for the distribution CSV sidecars
    #[arg(long)]
    pub distributions: Option<PathBuf>,
    /// Operator-declared page-cache state, recorded in the report
    #[arg(long, value_enum, default_value_t = CacheHint::Cold)]
    pub cache_hint: CacheHint,
    /// Omit wall-clock timings and thread count, making the report a
    /// pure function of the input
    #[arg(long)]
    pub no_timings: bool,
    /// Compute with the brute-force reference instead of the kernels
    #[arg(long, hide = true)]
    pub oracle: bool,
}

pub fn run(args: &AnalyzeArgs, threads: usize) -> anyhow::Result<()> {
    let total_start = Instant::now();
    let format =
        detect_format(&args.edges).with_context(|| format!("opening {}", args.edges.display()))?;
    let bytes = fs::metadata(&args.edges)?.len();
    let ((dict, table), load_s) = {
        let (result, s) = timed(|| read_edges(&args.edges));
        (
            result.with_context(|| format!("reading {}", args.edges.display()))?,
            s,
        )
    };

    let run = if args.oracle {
        oracle_run(&table).context("oracle pass")?
    } else {
        run_queries(&table)
    };

    let (distributions, write_outputs_s) = match &args.distributions {
        Some(dir) => {
            let (result, s) = timed(|| write_distributions(dir, &dict, &run));
            (Some(result?), s)
        }
        None => (None, 0.0),
    };

    let timings = (!args.no_timings && !args.oracle).then(|| Timings {
        load: load_s,
        queries: run.timings,
        write_outputs: write_outputs_s,
        total: total_start.elapsed().as_secs_f64(),
    });
    let report = RunReport {
        schema_version: REPORT_SCHEMA_VERSION,
        tool: ToolInfo::current(),
        input: InputInfo {
            path: args.edges.display().to_string(),
            format: format_name(format).to_string(),
            bytes,
            rows: table.len() as u64,
            vertices: table.vertex_count() as u64,
            form: match table.form() {
                TableForm::Raw => "raw".to_string(),
                TableForm::Aggregated => "aggregated".to_string(),
            },
        },
        cache_hint: args.cache_hint.as_str().to_string(),
        threads: (!args.no_timings).then_some(threads),
        seed: None,
        rounds: None,
        timings_s: timings,
        properties: run.properties,
        unique_ips: run.unique_ips,
        distributions,
    };

    let json = report.to_json();
    match &args.report {
        Some(path) => {
            fs::write(path, json).with_context(|| format!("writing report {}", path.display()))?
        }
        None => print!("{json}"),
    }
    Ok(())
}

/// Sidecar file names, fixed so reports are comparable across runs.
const SIDECARS: [&str; 5] = [
    "link_packets.csv",
    "packets_from_source.csv",
    "packets_to_destination.csv",
    "fan_out.csv",
    "fan_in.csv",
];

fn write_distributions(
    dir: &Path,
    dict: &VertexDictionary,
    run: &QueryRun,
) -> anyhow::Result<Vec<String>> {
    fs::create_dir_all(dir)?;
    write_edges(
        &run.link_packets,
        dict,
        dir.join(SIDECARS[0]),
        EdgeFileFormat::Csv,
    )?;
    let vectors = [
        (SIDECARS[1], &run.packets_from_source),
        (SIDECARS[2], &run.packets_to_destination),
        (SIDECARS[3], &run.fan_out),
        (SIDECARS[4], &run.fan_in),
    ];
    for (name, vector) in vectors {
        write_degree_csv(&dir.join(name), dict, vector)?;
    }
    Ok(SIDECARS.iter().map(|s| s.to_string()).collect())
}

/// Degree sidecar: `vertex,ip,value`, non-zero entries only, ascending
/// by vertex id.
fn write_degree_csv(
    path: &Path,
    dict: &VertexDictionary,
    vector: &DegreeVector,
) -> anyhow::Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "vertex,ip,value")?;
    for (id, value) in vector.iter_nonzero() {
        writeln!(w, "{id},{},{value}", dict.addr(id))?;
    }
    w.flush()?;
    Ok(())
}

/// The hidden `--oracle` path: same report shape, reference results.
fn oracle_run(table: &EdgeTable) -> anyhow::Result<QueryRun> {
    let report = oracle_all_properties(table)?;
    let v = table.vertex_count();
    let dense = |map| DegreeVector::from_values(OracleReport::dense(map, v));
    let (src, dst, n): (Vec<_>, Vec<_>, Vec<_>) = unzip_links(&report.link_packets);
    let link_packets = EdgeTable::from_columns(src, dst, n, v, TableForm::Aggregated)?;
    Ok(QueryRun {
        properties: report.properties,
        unique_ips: report.unique_ips,
        link_packets,
        packets_from_source: dense(&report.packets_from_source),
        packets_to_destination: dense(&report.packets_to_destination),
        fan_out: dense(&report.fan_out),
        fan_in: dense(&report.fan_in),
        timings: Default::default(),
    })
}

fn unzip_links(
    links: &std::collections::BTreeMap<(u32, u32), u64>,
) -> (Vec<u32>, Vec<u32>, Vec<u64>) {
    let mut src = Vec::with_capacity(links.len());
    let mut dst = Vec::with_capacity(links.len());
    let mut n = Vec::with_capacity(links.len());
    for (&(s, d), &count) in links {
        src.push(s);
        dst.push(d);
        n.push(count);
    }
    (src, dst, n)
}
