//! Columnar network traffic graph toolkit.
//!
//! The pipeline: parse packet captures ([`pcap`]) into a dictionary-
//! encoded columnar edge table ([`edge`]), relabel vertex identities
//! with a seeded random permutation ([`anonymize`]), and compute link,
//! degree, and fan statistics with array-indexed group-by kernels
//! ([`analytics`]). [`synth`] generates traffic with known ground truth
//! and [`oracle`] is the brute-force reference the test suites compare
//! against.

pub mod analytics;
pub mod anonymize;
pub mod edge;
pub mod oracle;
pub mod pcap;
pub mod rng;
pub mod synth;

pub use analytics::{DegreeVector, Distributions, NetworkProperties, UniqueIps};
pub use anonymize::AnonymizationMap;
pub use edge::io::EdgeFileFormat;
pub use edge::{EdgeTable, TableForm, VertexDictionary, VertexId};
pub use pcap::{IngestStats, PacketRecord, PcapHeader};
pub use synth::{SynthConfig, TrafficModel};
