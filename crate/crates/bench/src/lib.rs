//! Shared helpers for the criterion benches.

use nseg_core::edge::{build, EdgeTable, VertexDictionary};
use nseg_core::synth::{generate, SynthConfig, TrafficModel};

/// A seeded uniform table of the given size.
pub fn uniform_table(rows: u64, vertices: u32, seed: u64) -> (VertexDictionary, EdgeTable) {
    let (records, _) = generate(&SynthConfig {
        n_packets: rows,
        n_vertices: vertices,
        model: TrafficModel::Uniform,
        seed,
        invalid_fraction: 0.0,
    });
    build(records)
}
