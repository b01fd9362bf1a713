//! Columnar storage of the traffic graph.
//!
//! The graph lives in an [`EdgeTable`] of three equal-length columns
//! (`src`, `dst`, `n_packets`) over dense vertex ids, either *raw* (one
//! row per packet, unit counts) or *aggregated* (one row per distinct
//! link, counts >= 1). A [`VertexDictionary`] holds the bijection
//! between observed IPv4 addresses and the dense id space `0..V`, which
//! keeps every group-by key bounded and lets the analytics kernels use
//! array indexing instead of hashing.

use std::collections::HashMap;
use std::net::Ipv4Addr;

use rayon::slice::ParallelSliceMut;
use thiserror::Error;

use crate::pcap::PacketRecord;

pub mod io;

/// Dense vertex identifier, `0..V`.
pub type VertexId = u32;

/// Bijection between IPv4 addresses and dense vertex ids.
///
/// Ids are assigned in first-appearance order, so rebuilding a
/// dictionary from the same address sequence reproduces the same ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VertexDictionary {
    forward: HashMap<Ipv4Addr, VertexId>,
    reverse: Vec<Ipv4Addr>,
}

impl VertexDictionary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of distinct addresses, V.
    pub fn len(&self) -> usize {
        self.reverse.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reverse.is_empty()
    }

    /// Returns the id for `ip`, assigning the next dense id on first
    /// sight.
    pub fn intern(&mut self, ip: Ipv4Addr) -> VertexId {
        if let Some(&id) = self.forward.get(&ip) {
            return id;
        }
        let id = self.reverse.len() as VertexId;
        self.forward.insert(ip, id);
        self.reverse.push(ip);
        id
    }

    pub fn id(&self, ip: Ipv4Addr) -> Option<VertexId> {
        self.forward.get(&ip).copied()
    }

    /// Address for a dense id. Panics if `id >= V`.
    pub fn addr(&self, id: VertexId) -> Ipv4Addr {
        self.reverse[id as usize]
    }

    /// Addresses indexed by id.
    pub fn addresses(&self) -> &[Ipv4Addr] {
        &self.reverse
    }

    /// Rebuilds a dictionary from an id-ordered address list.
    pub fn from_addresses(addresses: Vec<Ipv4Addr>) -> Self {
        let forward = addresses
            .iter()
            .enumerate()
            .map(|(id, &ip)| (ip, id as VertexId))
            .collect();
        VertexDictionary {
            forward,
            reverse: addresses,
        }
    }
}

/// Whether a table is one-row-per-packet or one-row-per-link.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableForm {
    /// One row per packet; `n_packets` is identically 1.
    Raw,
    /// One row per distinct `(src, dst)` pair; `n_packets >= 1`.
    Aggregated,
}

/// Violations of the [`EdgeTable`] column invariants.
#[derive(Debug, Error)]
pub enum EdgeTableError {
    #[error("column lengths differ: src {src}, dst {dst}, n_packets {n_packets}")]
    ColumnLengthMismatch {
        src: usize,
        dst: usize,
        n_packets: usize,
    },
    #[error("row {row}: vertex id {id} out of range (vertex count {vertex_count})")]
    VertexIdOutOfRange {
        row: usize,
        id: VertexId,
        vertex_count: u32,
    },
    #[error("row {row}: raw tables must have n_packets = 1, found {value}")]
    BadRawCount { row: usize, value: u64 },
    #[error("row {row}: aggregated tables must have n_packets >= 1")]
    ZeroAggregatedCount { row: usize },
}

/// Columnar edge list over dense vertex ids; the sparse traffic matrix
/// in coordinate form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeTable {
    src: Vec<VertexId>,
    dst: Vec<VertexId>,
    n_packets: Vec<u64>,
    vertex_count: u32,
    form: TableForm,
}

impl EdgeTable {
    /// Assembles a table from columns, checking lengths, id range, and
    /// the per-form count invariant. Pair distinctness of aggregated
    /// tables is the producer's contract and is not re-checked here.
    pub fn from_columns(
        src: Vec<VertexId>,
        dst: Vec<VertexId>,
        n_packets: Vec<u64>,
        vertex_count: u32,
        form: TableForm,
    ) -> Result<Self, EdgeTableError> {
        if src.len() != dst.len() || src.len() != n_packets.len() {
            return Err(EdgeTableError::ColumnLengthMismatch {
                src: src.len(),
                dst: dst.len(),
                n_packets: n_packets.len(),
            });
        }
        for (row, (&s, &d)) in src.iter().zip(&dst).enumerate() {
            let id = if s >= vertex_count {
                Some(s)
            } else if d >= vertex_count {
                Some(d)
            } else {
                None
            };
            if let Some(id) = id {
                return Err(EdgeTableError::VertexIdOutOfRange {
                    row,
                    id,
                    vertex_count,
                });
            }
        }
        for (row, &n) in n_packets.iter().enumerate() {
            match form {
                TableForm::Raw if n != 1 => {
                    return Err(EdgeTableError::BadRawCount { row, value: n })
                }
                TableForm::Aggregated if n == 0 => {
                    return Err(EdgeTableError::ZeroAggregatedCount { row })
                }
                _ => {}
            }
        }
        Ok(EdgeTable {
            src,
            dst,
            n_packets,
            vertex_count,
            form,
        })
    }

    pub fn empty(form: TableForm) -> Self {
        EdgeTable {
            src: Vec::new(),
            dst: Vec::new(),
            n_packets: Vec::new(),
            vertex_count: 0,
            form,
        }
    }

    /// Number of rows.
    pub fn len(&self) -> usize {
        self.src.len()
    }

    pub fn is_empty(&self) -> bool {
        self.src.is_empty()
    }

    pub fn form(&self) -> TableForm {
        self.form
    }

    /// Size V of the dense id space; ids in the columns are `< V`.
    pub fn vertex_count(&self) -> u32 {
        self.vertex_count
    }

    pub fn src(&self) -> &[VertexId] {
        &self.src
    }

    pub fn dst(&self) -> &[VertexId] {
        &self.dst
    }

    pub fn n_packets(&self) -> &[u64] {
        &self.n_packets
    }

    pub fn row(&self, i: usize) -> (VertexId, VertexId, u64) {
        (self.src[i], self.dst[i], self.n_packets[i])
    }

    pub fn rows(&self) -> impl Iterator<Item = (VertexId, VertexId, u64)> + '_ {
        self.src
            .iter()
            .zip(&self.dst)
            .zip(&self.n_packets)
            .map(|((&s, &d), &n)| (s, d, n))
    }

    /// Rows with ids resolved back to addresses.
    pub fn ip_rows<'a>(
        &'a self,
        dict: &'a VertexDictionary,
    ) -> impl Iterator<Item = (Ipv4Addr, Ipv4Addr, u64)> + 'a {
        self.rows().map(|(s, d, n)| (dict.addr(s), dict.addr(d), n))
    }

    /// Same table with the source and destination columns exchanged.
    pub fn swapped(&self) -> EdgeTable {
        EdgeTable {
            src: self.dst.clone(),
            dst: self.src.clone(),
            n_packets: self.n_packets.clone(),
            vertex_count: self.vertex_count,
            form: self.form,
        }
    }
}

/// Builds the dictionary and raw table from a packet stream. Row `i`
/// corresponds to input record `i`; ids are assigned in encounter order
/// (source before destination within a record).
pub fn build(records: impl IntoIterator<Item = PacketRecord>) -> (VertexDictionary, EdgeTable) {
    let mut dict = VertexDictionary::new();
    let mut src = Vec::new();
    let mut dst = Vec::new();
    for record in records {
        src.push(dict.intern(record.src));
        dst.push(dict.intern(record.dst));
    }
    let n_packets = vec![1u64; src.len()];
    let table = EdgeTable {
        src,
        dst,
        n_packets,
        vertex_count: dict.len() as u32,
        form: TableForm::Raw,
    };
    (dict, table)
}

/// Collapses duplicate `(src, dst)` pairs, summing their counts. Output
/// rows are sorted by `(src, dst)` ascending, so the result is
/// independent of input order and thread count. Aggregating an already
/// aggregated table re-sorts it and preserves its content.
pub fn aggregate(table: &EdgeTable) -> EdgeTable {
    // Pack each pair into one u64; ascending key order is ascending
    // (src, dst) order, so a plain sort is the whole group-by.
    let mut src = Vec::new();
    let mut dst = Vec::new();
    let mut n_packets = Vec::new();
    if table.form == TableForm::Raw {
        let mut keys: Vec<u64> = table
            .rows()
            .map(|(s, d, _)| ((s as u64) << 32) | d as u64)
            .collect();
        keys.par_sort_unstable();
        let mut i = 0;
        while i < keys.len() {
            let key = keys[i];
            let mut j = i + 1;
            while j < keys.len() && keys[j] == key {
                j += 1;
            }
            src.push((key >> 32) as VertexId);
            dst.push(key as VertexId);
            n_packets.push((j - i) as u64);
            i = j;
        }
    } else {
        let mut keyed: Vec<(u64, u64)> = table
            .rows()
            .map(|(s, d, n)| (((s as u64) << 32) | d as u64, n))
            .collect();
        keyed.par_sort_unstable_by_key(|&(key, _)| key);
        let mut i = 0;
        while i < keyed.len() {
            let key = keyed[i].0;
            let mut total = 0u64;
            while i < keyed.len() && keyed[i].0 == key {
                total += keyed[i].1;
                i += 1;
            }
            src.push((key >> 32) as VertexId);
            dst.push(key as VertexId);
            n_packets.push(total);
        }
    }
    EdgeTable {
        src,
        dst,
        n_packets,
        vertex_count: table.vertex_count,
        form: TableForm::Aggregated,
    }
}
