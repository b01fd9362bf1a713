//! Edge table interchange: CSV and the NSEG binary format.
//!
//! CSV is the human-readable form. The mandatory header line is
//! `src_ip,dst_ip,n_packets` and every body line is
//! `<dotted-quad>,<dotted-quad>,<count>`. Addresses are stored, not
//! dense ids, so a reader rebuilds the dictionary in first-appearance
//! order.
//!
//! The binary format is a fixed header followed by contiguous
//! little-endian column blocks and the dictionary, laid out for
//! sequential reads:
//!
//! ```text
//! offset  size  field
//! 0       4     magic "NSEG"
//! 4       2     format version, u16 LE, currently 1
//! 6       1     form: 0 = raw, 1 = aggregated
//! 7       1     reserved, must be 0
//! 8       8     row count R, u64 LE
//! 16      4*R   src column, u32 LE ids
//! ..      4*R   dst column, u32 LE ids
//! ..      8*R   n_packets column, u64 LE
//! ..      8     vertex count V, u64 LE
//! ..      4*V   dictionary: address for id 0..V, IPv4 as u32 LE
//! ```
//!
//! The IPv4-as-u32 encoding is the numeric address value (octets in
//! big-endian order), then written little-endian like every other field.
//! `read_edges` distinguishes the two formats by the 4-byte magic.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::net::Ipv4Addr;
use std::path::Path;

use thiserror::Error;

use super::{EdgeTable, EdgeTableError, TableForm, VertexDictionary};

/// On-disk representation of an edge table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeFileFormat {
    Csv,
    Binary,
}

pub const BINARY_MAGIC: [u8; 4] = *b"NSEG";
pub const BINARY_VERSION: u16 = 1;
pub const CSV_HEADER: &str = "src_ip,dst_ip,n_packets";

#[derive(Debug, Error)]
pub enum EdgeIoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("csv header must be `{CSV_HEADER}`, found `{found}`")]
    CsvHeader { found: String },
    #[error("csv line {line}: {problem}")]
    CsvRow { line: u64, problem: String },
    #[error("csv line {line}: duplicate (src,dst) pair in a table with aggregated counts")]
    CsvDuplicatePair { line: u64 },
    #[error("bad magic {found:02x?}; not an NSEG edge file")]
    BinaryMagic { found: [u8; 4] },
    #[error("unsupported NSEG format version {found} (expected {BINARY_VERSION})")]
    BinaryVersion { found: u16 },
    #[error("bad form byte {found} (expected 0 or 1)")]
    BinaryForm { found: u8 },
    #[error("edge file ends inside the {section} section")]
    BinaryTruncated { section: &'static str },
    #[error("trailing bytes after the dictionary section")]
    BinaryTrailing,
    #[error("dictionary has {dict} addresses but the table declares {table} vertices")]
    DictionaryMismatch { dict: usize, table: u32 },
    #[error(transparent)]
    Table(#[from] EdgeTableError),
}

struct CountingWriter<W: Write> {
    inner: W,
    bytes: u64,
}

impl<W: Write> Write for CountingWriter<W> {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.bytes += n as u64;
        Ok(n)
    }

    fn flush(&mut self) -> std::io::Result<()> {
        self.inner.flush()
    }
}

/// Writes `table` to `path` in the given format. Returns bytes written.
pub fn write_edges(
    table: &EdgeTable,
    dict: &VertexDictionary,
    path: impl AsRef<Path>,
    format: EdgeFileFormat,
) -> Result<u64, EdgeIoError> {
    let file = File::create(path)?;
    let mut writer = CountingWriter {
        inner: BufWriter::with_capacity(1 << 20, file),
        bytes: 0,
    };
    match format {
        EdgeFileFormat::Csv => write_csv(table, dict, &mut writer)?,
        EdgeFileFormat::Binary => write_binary(table, dict, &mut writer)?,
    }
    writer.flush()?;
    Ok(writer.bytes)
}

/// Reads an edge file, detecting CSV vs binary from the leading bytes.
pub fn read_edges(path: impl AsRef<Path>) -> Result<(VertexDictionary, EdgeTable), EdgeIoError> {
    let file = File::open(path)?;
    let mut reader = BufReader::with_capacity(1 << 20, file);
    match sniff_format(&mut reader)? {
        EdgeFileFormat::Binary => read_binary(&mut reader),
        EdgeFileFormat::Csv => read_csv(&mut reader),
    }
}

/// Detects the on-disk format of an edge file from its leading bytes.
pub fn detect_format(path: impl AsRef<Path>) -> Result<EdgeFileFormat, EdgeIoError> {
    let file = File::open(path)?;
    sniff_format(&mut BufReader::new(file))
}

/// Peeks at the first bytes without consuming them.
pub fn sniff_format<R: BufRead>(reader: &mut R) -> Result<EdgeFileFormat, EdgeIoError> {
    let buf = reader.fill_buf()?;
    if buf.len() >= 4 && buf[..4] == BINARY_MAGIC {
        Ok(EdgeFileFormat::Binary)
    } else {
        Ok(EdgeFileFormat::Csv)
    }
}

pub fn write_csv<W: Write>(
    table: &EdgeTable,
    dict: &VertexDictionary,
    writer: &mut W,
) -> Result<(), EdgeIoError> {
    check_dict(table, dict)?;
    writeln!(writer, "{CSV_HEADER}")?;
    for (src, dst, n) in table.ip_rows(dict) {
        writeln!(writer, "{src},{dst},{n}")?;
    }
    Ok(())
}

pub fn read_csv<R: BufRead>(reader: &mut R) -> Result<(VertexDictionary, EdgeTable), EdgeIoError> {
    let mut lines = reader.lines();
    let header = match lines.next() {
        Some(line) => line?,
        None => String::new(),
    };
    if header.trim_end_matches('\r') != CSV_HEADER {
        return Err(EdgeIoError::CsvHeader { found: header });
    }
    let mut dict = VertexDictionary::new();
    let mut src = Vec::new();
    let mut dst = Vec::new();
    let mut n_packets = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        let lineno = idx as u64 + 2;
        if line.is_empty() {
            return Err(EdgeIoError::CsvRow {
                line: lineno,
                problem: "empty line".into(),
            });
        }
        let mut fields = line.split(',');
        let (a, b, c) = match (fields.next(), fields.next(), fields.next(), fields.next()) {
            (Some(a), Some(b), Some(c), None) => (a, b, c),
            _ => {
                return Err(EdgeIoError::CsvRow {
                    line: lineno,
                    problem: format!("expected 3 comma-separated fields, found `{line}`"),
                })
            }
        };
        let parse_ip = |field: &str, which: &str| {
            field.parse::<Ipv4Addr>().map_err(|_| EdgeIoError::CsvRow {
                line: lineno,
                problem: format!("bad {which} address `{field}`"),
            })
        };
        let src_ip = parse_ip(a, "source")?;
        let dst_ip = parse_ip(b, "destination")?;
        let n: u64 = c.parse().map_err(|_| EdgeIoError::CsvRow {
            line: lineno,
            problem: format!("bad packet count `{c}`"),
        })?;
        if n == 0 {
            return Err(EdgeIoError::CsvRow {
                line: lineno,
                problem: "packet count must be >= 1".into(),
            });
        }
        src.push(dict.intern(src_ip));
        dst.push(dict.intern(dst_ip));
        n_packets.push(n);
    }
    // CSV does not carry a form flag: unit counts mean a raw table,
    // anything else must be a deduplicated aggregated table.
    let form = if n_packets.iter().all(|&n| n == 1) {
        TableForm::Raw
    } else {
        let mut seen = HashSet::with_capacity(src.len());
        for (row, (&s, &d)) in src.iter().zip(&dst).enumerate() {
            if !seen.insert(((s as u64) << 32) | d as u64) {
                return Err(EdgeIoError::CsvDuplicatePair {
                    line: row as u64 + 2,
                });
            }
        }
        TableForm::Aggregated
    };
    let vertex_count = dict.len() as u32;
    let table = EdgeTable::from_columns(src, dst, n_packets, vertex_count, form)?;
    Ok((dict, table))
}

fn form_byte(form: TableForm) -> u8 {
    match form {
        TableForm::Raw => 0,
        TableForm::Aggregated => 1,
    }
}

pub fn write_binary<W: Write>(
    table: &EdgeTable,
    dict: &VertexDictionary,
    writer: &mut W,
) -> Result<(), EdgeIoError> {
    check_dict(table, dict)?;
    writer.write_all(&BINARY_MAGIC)?;
    writer.write_all(&BINARY_VERSION.to_le_bytes())?;
    writer.write_all(&[form_byte(table.form()), 0])?;
    writer.write_all(&(table.len() as u64).to_le_bytes())?;
    for &id in table.src() {
        writer.write_all(&id.to_le_bytes())?;
    }
    for &id in table.dst() {
        writer.write_all(&id.to_le_bytes())?;
    }
    for &n in table.n_packets() {
        writer.write_all(&n.to_le_bytes())?;
    }
    writer.write_all(&(dict.len() as u64).to_le_bytes())?;
    for &ip in dict.addresses() {
        writer.write_all(&u32::from(ip).to_le_bytes())?;
    }
    Ok(())
}

pub fn read_binary<R: Read>(reader: &mut R) -> Result<(VertexDictionary, EdgeTable), EdgeIoError> {
    let mut magic = [0u8; 4];
    read_section(reader, &mut magic, "magic")?;
    if magic != BINARY_MAGIC {
        return Err(EdgeIoError::BinaryMagic { found: magic });
    }
    let mut two = [0u8; 2];
    read_section(reader, &mut two, "version")?;
    let version = u16::from_le_bytes(two);
    if version != BINARY_VERSION {
        return Err(EdgeIoError::BinaryVersion { found: version });
    }
    read_section(reader, &mut two, "form")?;
    let form = match two[0] {
        0 => TableForm::Raw,
        1 => TableForm::Aggregated,
        found => return Err(EdgeIoError::BinaryForm { found }),
    };
    let mut eight = [0u8; 8];
    read_section(reader, &mut eight, "row count")?;
    let rows = u64::from_le_bytes(eight) as usize;
    let src = read_u32_column(reader, rows, "src column")?;
    let dst = read_u32_column(reader, rows, "dst column")?;
    let n_packets = read_u64_column(reader, rows, "n_packets column")?;
    read_section(reader, &mut eight, "vertex count")?;
    let vertex_count = u64::from_le_bytes(eight) as usize;
    let raw_addrs = read_u32_column(reader, vertex_count, "dictionary")?;
    let addresses: Vec<Ipv4Addr> = raw_addrs.into_iter().map(Ipv4Addr::from).collect();
    let mut one = [0u8; 1];
    if reader.read(&mut one)? != 0 {
        return Err(EdgeIoError::BinaryTrailing);
    }
    let dict = VertexDictionary::from_addresses(addresses);
    let table = EdgeTable::from_columns(src, dst, n_packets, vertex_count as u32, form)?;
    Ok((dict, table))
}

fn check_dict(table: &EdgeTable, dict: &VertexDictionary) -> Result<(), EdgeIoError> {
    if dict.len() != table.vertex_count() as usize {
        return Err(EdgeIoError::DictionaryMismatch {
            dict: dict.len(),
            table: table.vertex_count(),
        });
    }
    Ok(())
}

fn read_section<R: Read>(
    reader: &mut R,
    buf: &mut [u8],
    section: &'static str,
) -> Result<(), EdgeIoError> {
    reader.read_exact(buf).map_err(|e| {
        if e.kind() == std::io::ErrorKind::UnexpectedEof {
            EdgeIoError::BinaryTruncated { section }
        } else {
            EdgeIoError::Io(e)
        }
    })
}

fn read_u32_column<R: Read>(
    reader: &mut R,
    count: usize,
    section: &'static str,
) -> Result<Vec<u32>, EdgeIoError> {
    let mut out = Vec::with_capacity(count);
    let mut remaining = count.checked_mul(4).expect("column size overflow");
    let mut buf = vec![0u8; remaining.min(1 << 20)];
    while remaining > 0 {
        let take = buf.len().min(remaining);
        read_section(reader, &mut buf[..take], section)?;
        out.extend(
            buf[..take]
                .chunks_exact(4)
                .map(|c| u32::from_le_bytes(c.try_into().unwrap())),
        );
        remaining -= take;
    }
    Ok(out)
}

fn read_u64_column<R: Read>(
    reader: &mut R,
    count: usize,
    section: &'static str,
) -> Result<Vec<u64>, EdgeIoError> {
    let mut out = Vec::with_capacity(count);
    let mut remaining = count.checked_mul(8).expect("column size overflow");
    let mut buf = vec![0u8; remaining.min(1 << 20)];
    while remaining > 0 {
        let take = buf.len().min(remaining);
        read_section(reader, &mut buf[..take], section)?;
        out.extend(
            buf[..take]
                .chunks_exact(8)
                .map(|c| u64::from_le_bytes(c.try_into().unwrap())),
        );
        remaining -= take;
    }
    Ok(out)
}
