//! Classic PCAP (libpcap) capture file parsing.
//!
//! A capture file is a 24-byte global header followed by packet records,
//! each with a 16-byte record header (`ts_sec`, `ts_frac`, `incl_len`,
//! `orig_len`) and `incl_len` bytes of link-layer payload. Both byte
//! orders and both timestamp resolutions of the classic format are
//! accepted; pcapng is rejected with a dedicated error.
//!
//! Only Ethernet captures (linktype 1) are supported and only IPv4 frames
//! (ethertype 0x0800, optionally behind one 802.1Q VLAN tag) produce
//! [`PacketRecord`]s. Everything else is counted as invalid and skipped;
//! the single fatal condition mid-stream is a record whose payload
//! overruns the end of the file.

use std::fs::File;
use std::io::{BufReader, Read};
use std::net::Ipv4Addr;
use std::path::Path;
use std::time::{Duration, Instant};

use thiserror::Error;

/// Byte order of the capture file, inferred from the magic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endianness {
    Little,
    Big,
}

/// Timestamp resolution of the capture file, inferred from the magic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TsResolution {
    Micro,
    Nano,
}

/// Magic of a microsecond-resolution capture, as written by a big-endian
/// producer (`a1 b2 c3 d4` on disk).
pub const MAGIC_MICRO: u32 = 0xa1b2_c3d4;
/// Microsecond magic as seen when the producer was little-endian.
pub const MAGIC_MICRO_SWAPPED: u32 = 0xd4c3_b2a1;
/// Nanosecond-resolution magic, big-endian producer.
pub const MAGIC_NANO: u32 = 0xa1b2_3c4d;
/// Nanosecond magic, little-endian producer.
pub const MAGIC_NANO_SWAPPED: u32 = 0x4d3c_b2a1;
/// First four bytes of a pcapng section header block.
const PCAPNG_BLOCK: u32 = 0x0a0d_0d0a;

/// Ethernet, the only supported linktype.
pub const LINKTYPE_ETHERNET: u32 = 1;

/// Upper bound on a single record's `incl_len`; anything larger is
/// treated as a corrupt record header rather than allocated.
pub const MAX_INCL_LEN: u32 = 1 << 26;

const GLOBAL_HEADER_LEN: usize = 24;
const RECORD_HEADER_LEN: usize = 16;

/// Errors from header parsing and the record stream.
#[derive(Debug, Error)]
pub enum PcapError {
    #[error("not a pcap file (unrecognized magic {0:#010x})")]
    UnknownMagic(u32),
    #[error("pcapng input is not supported; convert to classic pcap first")]
    PcapngUnsupported,
    #[error("unsupported linktype {0} (only Ethernet, linktype 1, is supported)")]
    UnsupportedLinktype(u32),
    #[error("truncated pcap file at offset {offset}")]
    TruncatedFile { offset: u64 },
    #[error("record at offset {offset} declares incl_len {incl_len} above the {limit}-byte limit")]
    PacketTooLarge {
        offset: u64,
        incl_len: u32,
        limit: u32,
    },
    #[error("i/o error at offset {offset}: {source}")]
    Io {
        offset: u64,
        #[source]
        source: std::io::Error,
    },
}

/// Parsed global header of a capture file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PcapHeader {
    pub endian: Endianness,
    pub ts_resolution: TsResolution,
    pub version_major: u16,
    pub version_minor: u16,
    pub snaplen: u32,
    pub linktype: u32,
}

/// One captured IPv4 packet. `ts_frac` is in micro- or nanoseconds
/// depending on the file magic; timestamps are carried along but unused
/// by the analytics queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PacketRecord {
    pub ts_sec: u32,
    pub ts_frac: u32,
    pub src: Ipv4Addr,
    pub dst: Ipv4Addr,
}

/// Why a captured frame did not produce a [`PacketRecord`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvalidReason {
    /// Ethertype other than IPv4 after unwrapping at most one VLAN tag.
    NonIpv4,
    /// Frame too short to hold the Ethernet (or VLAN) header plus a
    /// 20-byte IPv4 fixed header.
    Truncated,
    /// Ethertype says IPv4 but the IP header is not (version 4, IHL >= 5).
    Malformed,
}

/// Result of parsing a single packet record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PacketOutcome {
    Record(PacketRecord),
    Invalid(InvalidReason),
}

/// Counters accumulated while reading a capture.
///
/// `valid_packets + invalid_packets` equals the number of packet records
/// encountered, and `truncated_packets` is the subset of the invalid ones
/// that were cut short.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IngestStats {
    pub valid_packets: u64,
    pub invalid_packets: u64,
    pub truncated_packets: u64,
    pub bytes_read: u64,
    pub wall_time: Duration,
}

/// Parses the 24-byte global header, inferring byte order and timestamp
/// resolution from the magic.
pub fn parse_pcap_header(bytes: &[u8; GLOBAL_HEADER_LEN]) -> Result<PcapHeader, PcapError> {
    let raw_magic = u32::from_be_bytes([bytes[0], bytes[1], bytes[2], bytes[3]]);
    let (endian, ts_resolution) = match raw_magic {
        MAGIC_MICRO => (Endianness::Big, TsResolution::Micro),
        MAGIC_MICRO_SWAPPED => (Endianness::Little, TsResolution::Micro),
        MAGIC_NANO => (Endianness::Big, TsResolution::Nano),
        MAGIC_NANO_SWAPPED => (Endianness::Little, TsResolution::Nano),
        PCAPNG_BLOCK => return Err(PcapError::PcapngUnsupported),
        other => return Err(PcapError::UnknownMagic(other)),
    };
    let u16_at = |i: usize| {
        let b = [bytes[i], bytes[i + 1]];
        match endian {
            Endianness::Little => u16::from_le_bytes(b),
            Endianness::Big => u16::from_be_bytes(b),
        }
    };
    let u32_at = |i: usize| {
        let b = [bytes[i], bytes[i + 1], bytes[i + 2], bytes[i + 3]];
        match endian {
            Endianness::Little => u32::from_le_bytes(b),
            Endianness::Big => u32::from_be_bytes(b),
        }
    };
    let header = PcapHeader {
        endian,
        ts_resolution,
        version_major: u16_at(4),
        version_minor: u16_at(6),
        snaplen: u32_at(16),
        linktype: u32_at(20),
    };
    if header.linktype != LINKTYPE_ETHERNET {
        return Err(PcapError::UnsupportedLinktype(header.linktype));
    }
    Ok(header)
}

/// Extracts IPv4 source and destination from an Ethernet frame, or the
/// reason the frame is not a valid IPv4 packet.
fn classify_frame(frame: &[u8]) -> Result<(Ipv4Addr, Ipv4Addr), InvalidReason> {
    if frame.len() < 14 {
        return Err(InvalidReason::Truncated);
    }
    let mut ethertype = u16::from_be_bytes([frame[12], frame[13]]);
    let mut ip_start = 14;
    // Unwrap one 802.1Q tag; a second tag falls through as non-IPv4.
    if ethertype == 0x8100 {
        if frame.len() < 18 {
            return Err(InvalidReason::Truncated);
        }
        ethertype = u16::from_be_bytes([frame[16], frame[17]]);
        ip_start = 18;
    }
    if ethertype != 0x0800 {
        return Err(InvalidReason::NonIpv4);
    }
    let ip = &frame[ip_start..];
    if ip.len() < 20 {
        return Err(InvalidReason::Truncated);
    }
    let version = ip[0] >> 4;
    let ihl = ip[0] & 0x0f;
    if version != 4 || ihl < 5 {
        return Err(InvalidReason::Malformed);
    }
    let src = Ipv4Addr::new(ip[12], ip[13], ip[14], ip[15]);
    let dst = Ipv4Addr::new(ip[16], ip[17], ip[18], ip[19]);
    Ok((src, dst))
}

fn read_u32(header: &PcapHeader, bytes: &[u8]) -> u32 {
    let b = [bytes[0], bytes[1], bytes[2], bytes[3]];
    match header.endian {
        Endianness::Little => u32::from_le_bytes(b),
        Endianness::Big => u32::from_be_bytes(b),
    }
}

/// Parses one complete packet record (16-byte record header plus
/// payload). Returns `TruncatedFile` if `record_bytes` is shorter than
/// the record header or than the declared `incl_len`.
pub fn parse_packet(header: &PcapHeader, record_bytes: &[u8]) -> Result<PacketOutcome, PcapError> {
    if record_bytes.len() < RECORD_HEADER_LEN {
        return Err(PcapError::TruncatedFile {
            offset: record_bytes.len() as u64,
        });
    }
    let ts_sec = read_u32(header, &record_bytes[0..4]);
    let ts_frac = read_u32(header, &record_bytes[4..8]);
    let incl_len = read_u32(header, &record_bytes[8..12]) as usize;
    if record_bytes.len() < RECORD_HEADER_LEN + incl_len {
        return Err(PcapError::TruncatedFile {
            offset: record_bytes.len() as u64,
        });
    }
    let frame = &record_bytes[RECORD_HEADER_LEN..RECORD_HEADER_LEN + incl_len];
    Ok(match classify_frame(frame) {
        Ok((src, dst)) => PacketOutcome::Record(PacketRecord {
            ts_sec,
            ts_frac,
            src,
            dst,
        }),
        Err(reason) => PacketOutcome::Invalid(reason),
    })
}

/// Streaming reader over the valid packets of a capture.
///
/// Invalid frames are counted in [`IngestStats`] and skipped; iteration
/// ends with an error only for truncated files and I/O failures.
pub struct PcapReader<R: Read> {
    header: PcapHeader,
    reader: R,
    stats: IngestStats,
    offset: u64,
    started: Instant,
    buf: Vec<u8>,
    done: bool,
}

impl PcapReader<BufReader<File>> {
    pub fn open(path: impl AsRef<Path>) -> Result<Self, PcapError> {
        let file = File::open(path).map_err(|source| PcapError::Io { offset: 0, source })?;
        Self::from_reader(BufReader::with_capacity(1 << 20, file))
    }
}

impl<R: Read> PcapReader<R> {
    /// Reads and checks the global header, leaving the reader positioned
    /// at the first record.
    pub fn from_reader(mut reader: R) -> Result<Self, PcapError> {
        let mut bytes = [0u8; GLOBAL_HEADER_LEN];
        let got = read_full(&mut reader, &mut bytes, 0)?;
        if got < GLOBAL_HEADER_LEN {
            return Err(PcapError::TruncatedFile { offset: got as u64 });
        }
        let header = parse_pcap_header(&bytes)?;
        Ok(PcapReader {
            header,
            reader,
            stats: IngestStats {
                bytes_read: GLOBAL_HEADER_LEN as u64,
                ..IngestStats::default()
            },
            offset: GLOBAL_HEADER_LEN as u64,
            started: Instant::now(),
            buf: Vec::new(),
            done: false,
        })
    }

    pub fn header(&self) -> &PcapHeader {
        &self.header
    }

    /// Counters so far; totals are final once the iterator is exhausted.
    pub fn stats(&self) -> &IngestStats {
        &self.stats
    }

    fn next_record(&mut self) -> Option<Result<PacketRecord, PcapError>> {
        loop {
            let mut rec_header = [0u8; RECORD_HEADER_LEN];
            let got = match read_full(&mut self.reader, &mut rec_header, self.offset) {
                Ok(n) => n,
                Err(e) => return Some(Err(e)),
            };
            if got == 0 {
                return None;
            }
            if got < RECORD_HEADER_LEN {
                return Some(Err(PcapError::TruncatedFile {
                    offset: self.offset,
                }));
            }
            let ts_sec = read_u32(&self.header, &rec_header[0..4]);
            let ts_frac = read_u32(&self.header, &rec_header[4..8]);
            let incl_len = read_u32(&self.header, &rec_header[8..12]);
            if incl_len > MAX_INCL_LEN {
                return Some(Err(PcapError::PacketTooLarge {
                    offset: self.offset,
                    incl_len,
                    limit: MAX_INCL_LEN,
                }));
            }
            self.offset += RECORD_HEADER_LEN as u64;
            self.buf.resize(incl_len as usize, 0);
            let got = match read_full(&mut self.reader, &mut self.buf, self.offset) {
                Ok(n) => n,
                Err(e) => return Some(Err(e)),
            };
            if got < incl_len as usize {
                return Some(Err(PcapError::TruncatedFile {
                    offset: self.offset + got as u64,
                }));
            }
            self.offset += incl_len as u64;
            self.stats.bytes_read = self.offset;
            match classify_frame(&self.buf) {
                Ok((src, dst)) => {
                    self.stats.valid_packets += 1;
                    return Some(Ok(PacketRecord {
                        ts_sec,
                        ts_frac,
                        src,
                        dst,
                    }));
                }
                Err(reason) => {
                    self.stats.invalid_packets += 1;
                    if reason == InvalidReason::Truncated {
                        self.stats.truncated_packets += 1;
                    }
                }
            }
        }
    }
}

impl<R: Read> Iterator for PcapReader<R> {
    type Item = Result<PacketRecord, PcapError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let item = self.next_record();
        match &item {
            None | Some(Err(_)) => {
                self.done = true;
                self.stats.wall_time = self.started.elapsed();
            }
            Some(Ok(_)) => {}
        }
        item
    }
}

/// Reads a whole capture into memory: every valid packet in file order,
/// plus the final counters and wall time.
pub fn ingest_pcap(path: impl AsRef<Path>) -> Result<(Vec<PacketRecord>, IngestStats), PcapError> {
    let started = Instant::now();
    let mut reader = PcapReader::open(path)?;
    let mut records = Vec::new();
    for item in &mut reader {
        records.push(item?);
    }
    let mut stats = reader.stats.clone();
    stats.wall_time = started.elapsed();
    Ok((records, stats))
}

/// Fills `buf` as far as the stream allows; a short count means EOF.
fn read_full<R: Read>(reader: &mut R, buf: &mut [u8], offset: u64) -> Result<usize, PcapError> {
    let mut filled = 0;
    while filled < buf.len() {
        match reader.read(&mut buf[filled..]) {
            Ok(0) => break,
            Ok(n) => filled += n,
            Err(e) if e.kind() == std::io::ErrorKind::Interrupted => continue,
            Err(source) => {
                return Err(PcapError::Io {
                    offset: offset + filled as u64,
                    source,
                })
            }
        }
    }
    Ok(filled)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header_bytes(magic: [u8; 4]) -> [u8; 24] {
        let mut bytes = [0u8; 24];
        bytes[0..4].copy_from_slice(&magic);
        let le = magic[0] != 0xa1;
        let (major, minor, snaplen, linktype) = (2u16, 4u16, 65535u32, 1u32);
        if le {
            bytes[4..6].copy_from_slice(&major.to_le_bytes());
            bytes[6..8].copy_from_slice(&minor.to_le_bytes());
            bytes[16..20].copy_from_slice(&snaplen.to_le_bytes());
            bytes[20..24].copy_from_slice(&linktype.to_le_bytes());
        } else {
            bytes[4..6].copy_from_slice(&major.to_be_bytes());
            bytes[6..8].copy_from_slice(&minor.to_be_bytes());
            bytes[16..20].copy_from_slice(&snaplen.to_be_bytes());
            bytes[20..24].copy_from_slice(&linktype.to_be_bytes());
        }
        bytes
    }

    #[test]
    fn header_magic_variants() {
        let h = parse_pcap_header(&header_bytes([0xd4, 0xc3, 0xb2, 0xa1])).unwrap();
        assert_eq!(h.endian, Endianness::Little);
        assert_eq!(h.ts_resolution, TsResolution::Micro);

        let h = parse_pcap_header(&header_bytes([0xa1, 0xb2, 0xc3, 0xd4])).unwrap();
        assert_eq!(h.endian, Endianness::Big);
        assert_eq!(h.ts_resolution, TsResolution::Micro);

        let h = parse_pcap_header(&header_bytes([0x4d, 0x3c, 0xb2, 0xa1])).unwrap();
        assert_eq!(h.endian, Endianness::Little);
        assert_eq!(h.ts_resolution, TsResolution::Nano);

        let h = parse_pcap_header(&header_bytes([0xa1, 0xb2, 0x3c, 0x4d])).unwrap();
        assert_eq!(h.endian, Endianness::Big);
        assert_eq!(h.ts_resolution, TsResolution::Nano);
        assert_eq!(h.version_major, 2);
        assert_eq!(h.snaplen, 65535);
    }

    #[test]
    fn header_rejects_unknown_magic() {
        let err = parse_pcap_header(&header_bytes([0xde, 0xad, 0xbe, 0xef])).unwrap_err();
        assert!(matches!(err, PcapError::UnknownMagic(0xdeadbeef)));
    }

    #[test]
    fn header_rejects_pcapng() {
        let err = parse_pcap_header(&header_bytes([0x0a, 0x0d, 0x0d, 0x0a])).unwrap_err();
        assert!(matches!(err, PcapError::PcapngUnsupported));
    }

    #[test]
    fn header_rejects_non_ethernet() {
        let mut bytes = header_bytes([0xd4, 0xc3, 0xb2, 0xa1]);
        bytes[20..24].copy_from_slice(&101u32.to_le_bytes()); // raw IP linktype
        let err = parse_pcap_header(&bytes).unwrap_err();
        assert!(matches!(err, PcapError::UnsupportedLinktype(101)));
    }

    fn ipv4_frame(src: [u8; 4], dst: [u8; 4]) -> Vec<u8> {
        let mut frame = vec![0u8; 34];
        frame[12] = 0x08;
        frame[13] = 0x00;
        frame[14] = 0x45; // version 4, IHL 5
        frame[22] = 64; // ttl
        frame[26..30].copy_from_slice(&src);
        frame[30..34].copy_from_slice(&dst);
        frame
    }

    fn record_bytes(frame: &[u8]) -> Vec<u8> {
        let mut rec = Vec::with_capacity(16 + frame.len());
        rec.extend_from_slice(&7u32.to_le_bytes()); // ts_sec
        rec.extend_from_slice(&9u32.to_le_bytes()); // ts_frac
        rec.extend_from_slice(&(frame.len() as u32).to_le_bytes());
        rec.extend_from_slice(&(frame.len() as u32).to_le_bytes());
        rec.extend_from_slice(frame);
        rec
    }

    fn le_header() -> PcapHeader {
        parse_pcap_header(&header_bytes([0xd4, 0xc3, 0xb2, 0xa1])).unwrap()
    }

    #[test]
    fn parse_packet_ipv4() {
        let rec = record_bytes(&ipv4_frame([10, 0, 0, 1], [10, 0, 0, 2]));
        let got = parse_packet(&le_header(), &rec).unwrap();
        assert_eq!(
            got,
            PacketOutcome::Record(PacketRecord {
                ts_sec: 7,
                ts_frac: 9,
                src: Ipv4Addr::new(10, 0, 0, 1),
                dst: Ipv4Addr::new(10, 0, 0, 2),
            })
        );
    }

    #[test]
    fn parse_packet_ipv6_is_invalid() {
        let mut frame = ipv4_frame([10, 0, 0, 1], [10, 0, 0, 2]);
        frame[12] = 0x86;
        frame[13] = 0xdd;
        let got = parse_packet(&le_header(), &record_bytes(&frame)).unwrap();
        assert_eq!(got, PacketOutcome::Invalid(InvalidReason::NonIpv4));
    }

    #[test]
    fn parse_packet_short_frame_is_truncated() {
        let frame = vec![0u8; 10]; // shorter than an Ethernet header
        let got = parse_packet(&le_header(), &record_bytes(&frame)).unwrap();
        assert_eq!(got, PacketOutcome::Invalid(InvalidReason::Truncated));
    }

    #[test]
    fn parse_packet_short_ip_header_is_truncated() {
        let mut frame = ipv4_frame([10, 0, 0, 1], [10, 0, 0, 2]);
        frame.truncate(14 + 12);
        let got = parse_packet(&le_header(), &record_bytes(&frame)).unwrap();
        assert_eq!(got, PacketOutcome::Invalid(InvalidReason::Truncated));
    }

    #[test]
    fn parse_packet_bad_ip_version_is_malformed() {
        let mut frame = ipv4_frame([10, 0, 0, 1], [10, 0, 0, 2]);
        frame[14] = 0x65; // version 6 in an 0x0800 frame
        let got = parse_packet(&le_header(), &record_bytes(&frame)).unwrap();
        assert_eq!(got, PacketOutcome::Invalid(InvalidReason::Malformed));
    }

    #[test]
    fn parse_packet_vlan_unwrapped_once() {
        let inner = ipv4_frame([192, 168, 0, 1], [192, 168, 0, 2]);
        let mut frame = Vec::new();
        frame.extend_from_slice(&inner[0..12]);
        frame.extend_from_slice(&[0x81, 0x00, 0x00, 0x2a]); // VLAN 42
        frame.extend_from_slice(&inner[12..]);
        let got = parse_packet(&le_header(), &record_bytes(&frame)).unwrap();
        match got {
            PacketOutcome::Record(r) => {
                assert_eq!(r.src, Ipv4Addr::new(192, 168, 0, 1));
                assert_eq!(r.dst, Ipv4Addr::new(192, 168, 0, 2));
            }
            other => panic!("expected record, got {other:?}"),
        }

        // A doubly tagged frame is not unwrapped further.
        let mut doubled = Vec::new();
        doubled.extend_from_slice(&inner[0..12]);
        doubled.extend_from_slice(&[0x81, 0x00, 0x00, 0x2a]);
        doubled.extend_from_slice(&[0x81, 0x00, 0x00, 0x2b]);
        doubled.extend_from_slice(&inner[12..]);
        let got = parse_packet(&le_header(), &record_bytes(&doubled)).unwrap();
        assert_eq!(got, PacketOutcome::Invalid(InvalidReason::NonIpv4));
    }

    #[test]
    fn parse_packet_record_overrun_is_fatal() {
        let mut rec = record_bytes(&ipv4_frame([1, 1, 1, 1], [2, 2, 2, 2]));
        rec.truncate(rec.len() - 5);
        let err = parse_packet(&le_header(), &rec).unwrap_err();
        assert!(matches!(err, PcapError::TruncatedFile { .. }));
    }

    #[test]
    fn stream_counts_and_skips_invalid() {
        let mut file = header_bytes([0xd4, 0xc3, 0xb2, 0xa1]).to_vec();
        file.extend_from_slice(&record_bytes(&ipv4_frame([10, 0, 0, 1], [10, 0, 0, 2])));
        let mut v6 = ipv4_frame([9, 9, 9, 9], [8, 8, 8, 8]);
        v6[12] = 0x86;
        v6[13] = 0xdd;
        file.extend_from_slice(&record_bytes(&v6));
        file.extend_from_slice(&record_bytes(&[0u8; 10])); // truncated frame
        file.extend_from_slice(&record_bytes(&ipv4_frame([10, 0, 0, 2], [10, 0, 0, 1])));

        let mut reader = PcapReader::from_reader(&file[..]).unwrap();
        let records: Vec<_> = (&mut reader).collect::<Result<_, _>>().unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].src, Ipv4Addr::new(10, 0, 0, 1));
        assert_eq!(records[1].src, Ipv4Addr::new(10, 0, 0, 2));
        let stats = reader.stats();
        assert_eq!(stats.valid_packets, 2);
        assert_eq!(stats.invalid_packets, 2);
        assert_eq!(stats.truncated_packets, 1);
        assert_eq!(stats.bytes_read, file.len() as u64);
    }

    #[test]
    fn stream_truncated_file_is_fatal() {
        let mut file = header_bytes([0xd4, 0xc3, 0xb2, 0xa1]).to_vec();
        let rec = record_bytes(&ipv4_frame([10, 0, 0, 1], [10, 0, 0, 2]));
        file.extend_from_slice(&rec[..rec.len() - 3]);
        let mut reader = PcapReader::from_reader(&file[..]).unwrap();
        let first = reader.next().unwrap();
        assert!(matches!(first, Err(PcapError::TruncatedFile { .. })));
        assert!(reader.next().is_none());
    }

    #[test]
    fn stream_header_only_file_is_empty() {
        let file = header_bytes([0xa1, 0xb2, 0xc3, 0xd4]).to_vec();
        let mut reader = PcapReader::from_reader(&file[..]).unwrap();
        assert!(reader.next().is_none());
        let stats = reader.stats();
        assert_eq!(stats.valid_packets, 0);
        assert_eq!(stats.invalid_packets, 0);
        assert_eq!(stats.truncated_packets, 0);
        assert_eq!(stats.bytes_read, 24);
    }

    #[test]
    fn stream_oversized_incl_len_is_rejected() {
        let mut file = header_bytes([0xd4, 0xc3, 0xb2, 0xa1]).to_vec();
        file.extend_from_slice(&0u32.to_le_bytes());
        file.extend_from_slice(&0u32.to_le_bytes());
        file.extend_from_slice(&(MAX_INCL_LEN + 1).to_le_bytes());
        file.extend_from_slice(&0u32.to_le_bytes());
        let mut reader = PcapReader::from_reader(&file[..]).unwrap();
        let first = reader.next().unwrap();
        assert!(matches!(first, Err(PcapError::PacketTooLarge { .. })));
    }

    /// A reader that hands out at most `chunk` bytes per read call.
    struct Chunked<'a> {
        data: &'a [u8],
        pos: usize,
        chunk: usize,
    }

    impl Read for Chunked<'_> {
        fn read(&mut self, buf: &mut [u8]) -> std::io::Result<usize> {
            let n = buf.len().min(self.chunk).min(self.data.len() - self.pos);
            buf[..n].copy_from_slice(&self.data[self.pos..self.pos + n]);
            self.pos += n;
            Ok(n)
        }
    }

    #[test]
    fn chunk_boundaries_do_not_change_the_stream() {
        let mut file = header_bytes([0xd4, 0xc3, 0xb2, 0xa1]).to_vec();
        for i in 0..50u8 {
            if i % 7 == 3 {
                let mut junk = ipv4_frame([i, 0, 0, 1], [i, 0, 0, 2]);
                junk[13] = 0x06; // unknown ethertype
                file.extend_from_slice(&record_bytes(&junk));
            } else {
                file.extend_from_slice(&record_bytes(&ipv4_frame([10, 0, 0, i], [10, 1, 0, i])));
            }
        }
        let baseline: Vec<_> = PcapReader::from_reader(&file[..])
            .unwrap()
            .collect::<Result<_, _>>()
            .unwrap();
        for chunk in [1, 2, 3, 5, 7, 16, 31, 64, 1000] {
            let reader = Chunked {
                data: &file,
                pos: 0,
                chunk,
            };
            let got: Vec<_> = PcapReader::from_reader(reader)
                .unwrap()
                .collect::<Result<_, _>>()
                .unwrap();
            assert_eq!(got, baseline, "chunk size {chunk}");
        }
    }
}
