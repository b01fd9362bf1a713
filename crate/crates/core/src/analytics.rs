//! Network property queries over an [`EdgeTable`].
//!
//! The table is the traffic matrix in coordinate form: entry `(i, j)` is
//! the summed `n_packets` over rows with `src = i`, `dst = j`. Every
//! query is defined on that matrix, so raw and aggregated tables give
//! identical answers, and every query is invariant under bijective
//! relabeling of the vertex ids.
//!
//! Per-vertex reductions use dense accumulators indexed by vertex id:
//! the dictionary assigns ids only to observed addresses, so V never
//! exceeds twice the row count and the dense arrays stay proportional to
//! the data. Pair-space reductions (distinct links, fan-out/fan-in) are
//! sort-based and never materialize anything quadratic in V; the sorted
//! group-by doubles as the fallback strategy for any key space too large
//! to index directly.
//!
//! All queries are pure. The group-by sort may run on the ambient rayon
//! pool; integer aggregation makes the results identical for every
//! thread count.

use serde::Serialize;

use crate::edge::{aggregate, EdgeTable, VertexId};

/// A per-vertex count vector of length V: packets per vertex or distinct
/// neighbors per vertex, depending on the query. Vertices absent from
/// the relevant column hold 0.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DegreeVector {
    values: Vec<u64>,
}

impl DegreeVector {
    pub fn from_values(values: Vec<u64>) -> Self {
        DegreeVector { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, id: VertexId) -> u64 {
        self.values[id as usize]
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn max(&self) -> u64 {
        self.values.iter().copied().max().unwrap_or(0)
    }

    /// Non-zero entries as `(vertex, value)`, ascending by vertex.
    pub fn iter_nonzero(&self) -> impl Iterator<Item = (VertexId, u64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(|(i, &v)| (i as VertexId, v))
    }

    /// Number of vertices with a non-zero entry.
    pub fn nonzero_count(&self) -> u64 {
        self.values.iter().filter(|&&v| v != 0).count() as u64
    }
}

/// The scalar network properties. Maxima over an empty table are 0.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct NetworkProperties {
    pub valid_packets: u64,
    pub unique_links: u64,
    pub max_link_packets: u64,
    pub unique_sources: u64,
    pub unique_destinations: u64,
    pub max_source_packets: u64,
    pub max_destination_packets: u64,
    pub max_fan_out: u64,
    pub max_fan_in: u64,
}

/// Set algebra over the addresses appearing as sources and destinations.
/// `total = src_only + dst_only + both`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct UniqueIps {
    pub total: u64,
    pub src_only: u64,
    pub dst_only: u64,
    pub both: u64,
}

/// The vector- and matrix-valued query results.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distributions {
    /// Aggregated link table, sorted by `(src, dst)`.
    pub link_packets: EdgeTable,
    pub packets_from_source: DegreeVector,
    pub packets_to_destination: DegreeVector,
    pub fan_out: DegreeVector,
    pub fan_in: DegreeVector,
}

#[derive(Clone, Copy)]
enum Column {
    Src,
    Dst,
}

fn vertex_sums(table: &EdgeTable, column: Column) -> DegreeVector {
    let ids = match column {
        Column::Src => table.src(),
        Column::Dst => table.dst(),
    };
    let mut values = vec![0u64; table.vertex_count() as usize];
    for (&id, &n) in ids.iter().zip(table.n_packets()) {
        values[id as usize] += n;
    }
    DegreeVector { values }
}

fn distinct_in_column(table: &EdgeTable, column: Column) -> u64 {
    let ids = match column {
        Column::Src => table.src(),
        Column::Dst => table.dst(),
    };
    let mut seen = vec![false; table.vertex_count() as usize];
    let mut count = 0u64;
    for &id in ids {
        if !seen[id as usize] {
            seen[id as usize] = true;
            count += 1;
        }
    }
    count
}

fn fan_vector(table: &EdgeTable, column: Column) -> DegreeVector {
    // Aggregated tables already have distinct pairs; raw ones need the
    // sort-based dedup first.
    let agg;
    let distinct = match table.form() {
        crate::edge::TableForm::Aggregated => table,
        crate::edge::TableForm::Raw => {
            agg = aggregate(table);
            &agg
        }
    };
    let ids = match column {
        Column::Src => distinct.src(),
        Column::Dst => distinct.dst(),
    };
    let mut values = vec![0u64; table.vertex_count() as usize];
    for &id in ids {
        values[id as usize] += 1;
    }
    DegreeVector { values }
}

/// Total packet count: the sum of the `n_packets` column.
pub fn valid_packets(table: &EdgeTable) -> u64 {
    table.n_packets().iter().sum()
}

/// Number of distinct directed `(src, dst)` pairs.
pub fn unique_links(table: &EdgeTable) -> u64 {
    match table.form() {
        crate::edge::TableForm::Aggregated => table.len() as u64,
        crate::edge::TableForm::Raw => aggregate(table).len() as u64,
    }
}

/// Packet count per link: the aggregated table itself.
pub fn link_packets(table: &EdgeTable) -> EdgeTable {
    aggregate(table)
}

/// Largest packet count over any single link.
pub fn max_link_packets(table: &EdgeTable) -> u64 {
    match table.form() {
        crate::edge::TableForm::Aggregated => table.n_packets().iter().copied().max().unwrap_or(0),
        crate::edge::TableForm::Raw => aggregate(table)
            .n_packets()
            .iter()
            .copied()
            .max()
            .unwrap_or(0),
    }
}

/// Number of distinct vertices appearing as a source.
pub fn unique_sources(table: &EdgeTable) -> u64 {
    distinct_in_column(table, Column::Src)
}

/// Number of distinct vertices appearing as a destination.
pub fn unique_destinations(table: &EdgeTable) -> u64 {
    distinct_in_column(table, Column::Dst)
}

/// Packets sent by each vertex.
pub fn packets_from_source(table: &EdgeTable) -> DegreeVector {
    vertex_sums(table, Column::Src)
}

/// Packets received by each vertex.
pub fn packets_to_destination(table: &EdgeTable) -> DegreeVector {
    vertex_sums(table, Column::Dst)
}

/// Largest per-source packet count.
pub fn max_source_packets(table: &EdgeTable) -> u64 {
    packets_from_source(table).max()
}

/// Largest per-destination packet count.
pub fn max_destination_packets(table: &EdgeTable) -> u64 {
    packets_to_destination(table).max()
}

/// Distinct destinations contacted by each source. Duplicate links count
/// once: this is the zero-norm of the traffic matrix row, not the row
/// multiplicity.
pub fn fan_out(table: &EdgeTable) -> DegreeVector {
    fan_vector(table, Column::Src)
}

/// Distinct sources contacting each destination.
pub fn fan_in(table: &EdgeTable) -> DegreeVector {
    fan_vector(table, Column::Dst)
}

/// Largest fan-out over all sources.
pub fn max_fan_out(table: &EdgeTable) -> u64 {
    fan_out(table).max()
}

/// Largest fan-in over all destinations.
pub fn max_fan_in(table: &EdgeTable) -> u64 {
    fan_in(table).max()
}

/// Address counts by role: sources only, destinations only, or both.
pub fn unique_ips(table: &EdgeTable) -> UniqueIps {
    let v = table.vertex_count() as usize;
    let mut as_src = vec![false; v];
    let mut as_dst = vec![false; v];
    for &id in table.src() {
        as_src[id as usize] = true;
    }
    for &id in table.dst() {
        as_dst[id as usize] = true;
    }
    let mut out = UniqueIps::default();
    for i in 0..v {
        match (as_src[i], as_dst[i]) {
            (true, true) => out.both += 1,
            (true, false) => out.src_only += 1,
            (false, true) => out.dst_only += 1,
            (false, false) => {}
        }
    }
    out.total = out.src_only + out.dst_only + out.both;
    out
}

/// All scalar properties in one plan. Aggregates once and derives every
/// pair-space quantity from the result; field-by-field equal to calling
/// the individual queries.
pub fn all_properties(table: &EdgeTable) -> NetworkProperties {
    all_properties_full(table).0
}

/// Scalar properties plus the distribution-valued results.
pub fn all_properties_full(table: &EdgeTable) -> (NetworkProperties, Distributions) {
    let agg = aggregate(table);
    let packets_from = vertex_sums(&agg, Column::Src);
    let packets_to = vertex_sums(&agg, Column::Dst);
    let mut fan_out_values = vec![0u64; table.vertex_count() as usize];
    let mut fan_in_values = vec![0u64; table.vertex_count() as usize];
    for (&s, &d) in agg.src().iter().zip(agg.dst()) {
        fan_out_values[s as usize] += 1;
        fan_in_values[d as usize] += 1;
    }
    let fan_out = DegreeVector {
        values: fan_out_values,
    };
    let fan_in = DegreeVector {
        values: fan_in_values,
    };
    let properties = NetworkProperties {
        valid_packets: valid_packets(&agg),
        unique_links: agg.len() as u64,
        max_link_packets: agg.n_packets().iter().copied().max().unwrap_or(0),
        unique_sources: packets_from.nonzero_count(),
        unique_destinations: packets_to.nonzero_count(),
        max_source_packets: packets_from.max(),
        max_destination_packets: packets_to.max(),
        max_fan_out: fan_out.max(),
        max_fan_in: fan_in.max(),
    };
    (
        properties,
        Distributions {
            link_packets: agg,
            packets_from_source: packets_from,
            packets_to_destination: packets_to,
            fan_out,
            fan_in,
        },
    )
}
