//! Synthetic traffic with known ground truth.
//!
//! Generates packet streams over a configurable vertex count, either
//! uniform or with power-law sources (heavy-tailed fan-out, the regime
//! where most of the traffic matrix is empty). Ground truth for every
//! query is tallied directly during generation, independent of both the
//! analytics kernels and the test oracle, enabling three-way agreement
//! checks. Generated addresses sit in 10.0.0.0/8 to mark them as
//! synthetic.
//!
//! [`write_pcap`] emits the generated stream as a classic capture file
//! (little-endian, microsecond magic by default) and can interleave
//! non-IPv4 frames to exercise the invalid-packet path of the reader.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::net::Ipv4Addr;
use std::path::Path;

use thiserror::Error;

use crate::analytics::{NetworkProperties, UniqueIps};
use crate::pcap::{Endianness, PacketRecord, TsResolution};
use crate::rng::Rng;

/// Vertex indices are embedded in 10.0.0.0/8, which caps the id space.
pub const MAX_SYNTH_VERTICES: u32 = 1 << 24;

/// How source vertices are drawn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrafficModel {
    /// Sources and destinations uniform over the vertex space.
    Uniform,
    /// Sources from a discrete power law `P(rank k) ~ k^-exponent`,
    /// destinations uniform.
    Skewed { exponent: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub n_packets: u64,
    pub n_vertices: u32,
    pub model: TrafficModel,
    pub seed: u64,
    /// Fraction of extra non-IPv4 frames injected on PCAP emission only.
    pub invalid_fraction: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_packets: 0,
            n_vertices: 1,
            model: TrafficModel::Uniform,
            seed: 0,
            invalid_fraction: 0.0,
        }
    }
}

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("n_vertices must be >= 1 when n_packets >= 1")]
    ZeroVertices,
    #[error("n_vertices {0} exceeds the synthetic address space ({MAX_SYNTH_VERTICES})")]
    TooManyVertices(u32),
    #[error("invalid_fraction {0} is outside [0, 1]")]
    BadInvalidFraction(f64),
    #[error("power-law exponent {0} must be finite and > 0")]
    BadExponent(f64),
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        if self.n_packets >= 1 && self.n_vertices == 0 {
            return Err(SynthError::ZeroVertices);
        }
        if self.n_vertices > MAX_SYNTH_VERTICES {
            return Err(SynthError::TooManyVertices(self.n_vertices));
        }
        if !(0.0..=1.0).contains(&self.invalid_fraction) {
            return Err(SynthError::BadInvalidFraction(self.invalid_fraction));
        }
        if let TrafficModel::Skewed { exponent } = self.model {
            if !exponent.is_finite() || exponent <= 0.0 {
                return Err(SynthError::BadExponent(exponent));
            }
        }
        Ok(())
    }
}

/// Synthetic address for a vertex index: `10.x.y.z` with the index in
/// the low 24 bits.
pub fn vertex_ip(index: u32) -> Ipv4Addr {
    debug_assert!(index < MAX_SYNTH_VERTICES);
    Ipv4Addr::from(0x0a00_0000 | index)
}

/// Ground truth for every query, keyed by address so it is independent
/// of any dictionary id assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthTruth {
    pub properties: NetworkProperties,
    pub unique_ips: UniqueIps,
    pub links: BTreeMap<(Ipv4Addr, Ipv4Addr), u64>,
    pub packets_from_source: BTreeMap<Ipv4Addr, u64>,
    pub packets_to_destination: BTreeMap<Ipv4Addr, u64>,
    pub fan_out: BTreeMap<Ipv4Addr, u64>,
    pub fan_in: BTreeMap<Ipv4Addr, u64>,
}

/// Draws source indices from the configured model.
enum SourceSampler {
    Uniform,
    /// Cumulative power-law weights over ranks `1..=V`.
    PowerLaw(Vec<f64>),
}

impl SourceSampler {
    fn new(model: TrafficModel, n_vertices: u32) -> Self {
        match model {
            TrafficModel::Uniform => SourceSampler::Uniform,
            TrafficModel::Skewed { exponent } => {
                let mut cumulative = Vec::with_capacity(n_vertices as usize);
                let mut total = 0.0f64;
                for rank in 1..=n_vertices as u64 {
                    total += (rank as f64).powf(-exponent);
                    cumulative.push(total);
                }
                SourceSampler::PowerLaw(cumulative)
            }
        }
    }

    fn draw(&self, rng: &mut Rng, n_vertices: u32) -> u32 {
        match self {
            SourceSampler::Uniform => rng.next_below(n_vertices as u64) as u32,
            SourceSampler::PowerLaw(cumulative) => {
                let total = *cumulative.last().expect("n_vertices >= 1");
                let u = rng.next_f64() * total;
                let idx = cumulative.partition_point(|&c| c <= u);
                idx.min(cumulative.len() - 1) as u32
            }
        }
    }
}

/// Generates the packet list and its ground truth. The config must pass
/// [`SynthConfig::validate`].
pub fn generate(config: &SynthConfig) -> (Vec<PacketRecord>, SynthTruth) {
    config.validate().expect("invalid SynthConfig");
    let mut rng = Rng::from_seed(config.seed);
    let sampler = SourceSampler::new(config.model, config.n_vertices);

    let mut records = Vec::with_capacity(config.n_packets as usize);
    let mut links: HashMap<(u32, u32), u64> = HashMap::new();
    let mut from_src: HashMap<u32, u64> = HashMap::new();
    let mut to_dst: HashMap<u32, u64> = HashMap::new();

    for i in 0..config.n_packets {
        let src = sampler.draw(&mut rng, config.n_vertices);
        let dst = rng.next_below(config.n_vertices as u64) as u32;
        records.push(PacketRecord {
            ts_sec: 1_700_000_000u32.wrapping_add((i / 1_000_000) as u32),
            ts_frac: (i % 1_000_000) as u32,
            src: vertex_ip(src),
            dst: vertex_ip(dst),
        });
        *links.entry((src, dst)).or_default() += 1;
        *from_src.entry(src).or_default() += 1;
        *to_dst.entry(dst).or_default() += 1;
    }

    let mut fan_out: HashMap<u32, u64> = HashMap::new();
    let mut fan_in: HashMap<u32, u64> = HashMap::new();
    for &(s, d) in links.keys() {
        *fan_out.entry(s).or_default() += 1;
        *fan_in.entry(d).or_default() += 1;
    }

    let sources: HashSet<u32> = from_src.keys().copied().collect();
    let destinations: HashSet<u32> = to_dst.keys().copied().collect();
    let both = sources.intersection(&destinations).count() as u64;
    let unique_ips = UniqueIps {
        total: sources.union(&destinations).count() as u64,
        src_only: sources.len() as u64 - both,
        dst_only: destinations.len() as u64 - both,
        both,
    };

    let properties = NetworkProperties {
        valid_packets: config.n_packets,
        unique_links: links.len() as u64,
        max_link_packets: links.values().copied().max().unwrap_or(0),
        unique_sources: sources.len() as u64,
        unique_destinations: destinations.len() as u64,
        max_source_packets: from_src.values().copied().max().unwrap_or(0),
        max_destination_packets: to_dst.values().copied().max().unwrap_or(0),
        max_fan_out: fan_out.values().copied().max().unwrap_or(0),
        max_fan_in: fan_in.values().copied().max().unwrap_or(0),
    };

    let by_ip = |m: HashMap<u32, u64>| -> BTreeMap<Ipv4Addr, u64> {
        m.into_iter().map(|(v, n)| (vertex_ip(v), n)).collect()
    };
    let truth = SynthTruth {
        properties,
        unique_ips,
        links: links
            .into_iter()
            .map(|((s, d), n)| ((vertex_ip(s), vertex_ip(d)), n))
            .collect(),
        packets_from_source: by_ip(from_src),
        packets_to_destination: by_ip(to_dst),
        fan_out: by_ip(fan_out),
        fan_in: by_ip(fan_in),
    };
    (records, truth)
}

/// Knobs for [`write_pcap_with`]; the defaults match [`write_pcap`].
#[derive(Debug, Clone, Copy)]
pub struct PcapWriteOptions {
    pub endian: Endianness,
    pub resolution: TsResolution,
    /// Extra invalid frames per valid record; the total injected count
    /// is `round(invalid_fraction * records)`.
    pub invalid_fraction: f64,
    /// Seed for the placement of injected frames.
    pub seed: u64,
}

impl Default for PcapWriteOptions {
    fn default() -> Self {
        PcapWriteOptions {
            endian: Endianness::Little,
            resolution: TsResolution::Micro,
            invalid_fraction: 0.0,
            seed: 0,
        }
    }
}

const FRAME_LEN: u32 = 34; // 14 Ethernet + 20 IPv4

/// Writes records as a classic little-endian microsecond PCAP with
/// minimal Ethernet+IPv4 frames. Returns bytes written.
pub fn write_pcap(
    records: &[PacketRecord],
    path: impl AsRef<Path>,
    invalid_fraction: f64,
    seed: u64,
) -> std::io::Result<u64> {
    let mut writer = BufWriter::with_capacity(1 << 20, File::create(path)?);
    let bytes = write_pcap_with(
        records,
        &mut writer,
        &PcapWriteOptions {
            invalid_fraction,
            seed,
            ..PcapWriteOptions::default()
        },
    )?;
    writer.flush()?;
    Ok(bytes)
}

/// [`write_pcap`] with byte order and timestamp resolution control.
pub fn write_pcap_with<W: Write>(
    records: &[PacketRecord],
    writer: &mut W,
    options: &PcapWriteOptions,
) -> std::io::Result<u64> {
    assert!(
        (0.0..=1.0).contains(&options.invalid_fraction),
        "invalid_fraction must be in [0, 1]"
    );
    let magic: u32 = match options.resolution {
        TsResolution::Micro => 0xa1b2_c3d4,
        TsResolution::Nano => 0xa1b2_3c4d,
    };
    let put_u16 = |buf: &mut Vec<u8>, v: u16| match options.endian {
        Endianness::Little => buf.extend_from_slice(&v.to_le_bytes()),
        Endianness::Big => buf.extend_from_slice(&v.to_be_bytes()),
    };
    let put_u32 = |buf: &mut Vec<u8>, v: u32| match options.endian {
        Endianness::Little => buf.extend_from_slice(&v.to_le_bytes()),
        Endianness::Big => buf.extend_from_slice(&v.to_be_bytes()),
    };

    let mut out = Vec::with_capacity(1 << 16);
    put_u32(&mut out, magic);
    put_u16(&mut out, 2); // version major
    put_u16(&mut out, 4); // version minor
    put_u32(&mut out, 0); // thiszone
    put_u32(&mut out, 0); // sigfigs
    put_u32(&mut out, 65535); // snaplen
    put_u32(&mut out, 1); // linktype: Ethernet

    // Interleave round(f * n) invalid frames at seeded positions.
    let injected = (options.invalid_fraction * records.len() as f64).round() as usize;
    let mut is_invalid = vec![false; records.len() + injected];
    for slot in is_invalid.iter_mut().take(injected) {
        *slot = true;
    }
    Rng::from_seed(options.seed).shuffle(&mut is_invalid);

    let mut written = 0u64;
    let mut next_record = records.iter();
    for invalid in is_invalid {
        if invalid {
            put_u32(&mut out, 0);
            put_u32(&mut out, 0);
            put_u32(&mut out, FRAME_LEN);
            put_u32(&mut out, FRAME_LEN);
            encode_invalid_frame(&mut out);
        } else {
            let r = next_record.next().expect("one slot per record");
            put_u32(&mut out, r.ts_sec);
            put_u32(&mut out, r.ts_frac);
            put_u32(&mut out, FRAME_LEN);
            put_u32(&mut out, FRAME_LEN);
            encode_valid_frame(&mut out, r.src, r.dst);
        }
        if out.len() >= (1 << 16) - 64 {
            writer.write_all(&out)?;
            written += out.len() as u64;
            out.clear();
        }
    }
    writer.write_all(&out)?;
    written += out.len() as u64;
    Ok(written)
}

fn encode_ethernet(out: &mut Vec<u8>, ethertype: u16) {
    out.extend_from_slice(&[0x02, 0, 0, 0, 0, 0x02]); // dst MAC
    out.extend_from_slice(&[0x02, 0, 0, 0, 0, 0x01]); // src MAC
    out.extend_from_slice(&ethertype.to_be_bytes());
}

fn encode_valid_frame(out: &mut Vec<u8>, src: Ipv4Addr, dst: Ipv4Addr) {
    encode_ethernet(out, 0x0800);
    out.push(0x45); // version 4, IHL 5
    out.push(0);
    out.extend_from_slice(&20u16.to_be_bytes()); // total length: header only
    out.extend_from_slice(&[0, 0, 0, 0]); // id, flags, fragment offset
    out.push(64); // ttl
    out.push(253); // protocol: reserved for experimentation
    out.extend_from_slice(&[0, 0]); // checksum, unused by the reader
    out.extend_from_slice(&src.octets());
    out.extend_from_slice(&dst.octets());
}

fn encode_invalid_frame(out: &mut Vec<u8>) {
    encode_ethernet(out, 0x86dd); // IPv6
    out.extend_from_slice(&[0u8; 20]);
}
