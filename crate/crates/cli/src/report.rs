//! The analyze report: one JSON object with a fixed key order.
//!
//! Schema (version 1):
//!
//! ```text
//! schema_version   report schema, currently 1
//! tool             { name, version }
//! input            { path, format: csv|binary, bytes, rows, vertices,
//!                    form: raw|aggregated }
//! cache_hint       cold|warm, operator-declared
//! threads          worker thread count; omitted with --no-timings
//! seed, rounds     anonymization parameters when known, else null
//! timings_s        wall times in seconds; omitted with --no-timings:
//!                  { load, queries: { one field per query }, write_outputs,
//!                    total }
//! properties       the nine scalar quantities
//! unique_ips       { total, src_only, dst_only, both }
//! distributions    sidecar file names, when --distributions was given
//! ```
//!
//! Key order is struct declaration order and never changes within a
//! schema version, so reports are diffable. Queries run on the shared
//! pre-aggregated table; the aggregation cost itself is reported as the
//! `link_packets` query.

use serde::Serialize;

use nseg_core::analytics::{NetworkProperties, UniqueIps};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub tool: ToolInfo,
    pub input: InputInfo,
    pub cache_hint: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    pub seed: Option<u64>,
    pub rounds: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_s: Option<Timings>,
    pub properties: NetworkProperties,
    pub unique_ips: UniqueIps,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distributions: Option<Vec<String>>,
}

#[derive(Debug, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

impl ToolInfo {
    pub fn current() -> Self {
        ToolInfo {
            name: "nseg",
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct InputInfo {
    pub path: String,
    pub format: String,
    pub bytes: u64,
    pub rows: u64,
    pub vertices: u64,
    pub form: String,
}

#[derive(Debug, Serialize)]
pub struct Timings {
    pub load: f64,
    pub queries: QueryTimings,
    pub write_outputs: f64,
    pub total: f64,
}

/// Per-query wall times, one field per quantity.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct QueryTimings {
    pub valid_packets: f64,
    pub unique_links: f64,
    pub link_packets: f64,
    pub max_link_packets: f64,
    pub unique_sources: f64,
    pub unique_destinations: f64,
    pub packets_from_source: f64,
    pub packets_to_destination: f64,
    pub max_source_packets: f64,
    pub max_destination_packets: f64,
    pub fan_out: f64,
    pub fan_in: f64,
    pub max_fan_out: f64,
    pub max_fan_in: f64,
    pub unique_ips: f64,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }
}
