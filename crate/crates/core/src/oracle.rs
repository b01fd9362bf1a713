//! Brute-force reference for every query, used by the test suites.
//!
//! Deliberately naive: per-row iteration into plain ordered maps,
//! sharing no code with the columnar kernels. Its only job is to be
//! obviously correct, so it is single-threaded, unoptimized, and capped
//! at 10^6 rows.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::analytics::{NetworkProperties, UniqueIps};
use crate::edge::{EdgeTable, VertexId};

/// Row cap; the oracle refuses larger tables rather than crawl.
pub const MAX_ORACLE_ROWS: usize = 1_000_000;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("table has {rows} rows, above the oracle cap of {cap}")]
    TooLarge { rows: usize, cap: usize },
}

/// Every query result, computed naively. Vector-valued results are kept
/// as sparse ordered maps holding the non-zero entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleReport {
    pub properties: NetworkProperties,
    pub unique_ips: UniqueIps,
    pub link_packets: BTreeMap<(VertexId, VertexId), u64>,
    pub packets_from_source: BTreeMap<VertexId, u64>,
    pub packets_to_destination: BTreeMap<VertexId, u64>,
    pub fan_out: BTreeMap<VertexId, u64>,
    pub fan_in: BTreeMap<VertexId, u64>,
}

impl OracleReport {
    /// Expands a sparse map into a dense vector of length `vertex_count`.
    pub fn dense(map: &BTreeMap<VertexId, u64>, vertex_count: u32) -> Vec<u64> {
        let mut out = vec![0u64; vertex_count as usize];
        for (&id, &v) in map {
            out[id as usize] = v;
        }
        out
    }
}

/// Computes all queries by direct tallying.
pub fn oracle_all_properties(table: &EdgeTable) -> Result<OracleReport, OracleError> {
    if table.len() > MAX_ORACLE_ROWS {
        return Err(OracleError::TooLarge {
            rows: table.len(),
            cap: MAX_ORACLE_ROWS,
        });
    }

    let mut valid_packets = 0u64;
    let mut link_packets: BTreeMap<(VertexId, VertexId), u64> = BTreeMap::new();
    let mut packets_from_source: BTreeMap<VertexId, u64> = BTreeMap::new();
    let mut packets_to_destination: BTreeMap<VertexId, u64> = BTreeMap::new();
    let mut sources: BTreeSet<VertexId> = BTreeSet::new();
    let mut destinations: BTreeSet<VertexId> = BTreeSet::new();

    for (s, d, n) in table.rows() {
        valid_packets += n;
        *link_packets.entry((s, d)).or_default() += n;
        *packets_from_source.entry(s).or_default() += n;
        *packets_to_destination.entry(d).or_default() += n;
        sources.insert(s);
        destinations.insert(d);
    }

    let mut fan_out: BTreeMap<VertexId, u64> = BTreeMap::new();
    let mut fan_in: BTreeMap<VertexId, u64> = BTreeMap::new();
    for &(s, d) in link_packets.keys() {
        *fan_out.entry(s).or_default() += 1;
        *fan_in.entry(d).or_default() += 1;
    }

    let both = sources.intersection(&destinations).count() as u64;
    let unique_ips = UniqueIps {
        total: sources.union(&destinations).count() as u64,
        src_only: sources.len() as u64 - both,
        dst_only: destinations.len() as u64 - both,
        both,
    };

    let properties = NetworkProperties {
        valid_packets,
        unique_links: link_packets.len() as u64,
        max_link_packets: link_packets.values().copied().max().unwrap_or(0),
        unique_sources: sources.len() as u64,
        unique_destinations: destinations.len() as u64,
        max_source_packets: packets_from_source.values().copied().max().unwrap_or(0),
        max_destination_packets: packets_to_destination.values().copied().max().unwrap_or(0),
        max_fan_out: fan_out.values().copied().max().unwrap_or(0),
        max_fan_in: fan_in.values().copied().max().unwrap_or(0),
    };

    Ok(OracleReport {
        properties,
        unique_ips,
        link_packets,
        packets_from_source,
        packets_to_destination,
        fan_out,
        fan_in,
    })
}
