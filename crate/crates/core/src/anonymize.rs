//! Vertex identity anonymization.
//!
//! A seeded uniform random permutation over the dense id space `0..N`
//! relabels every vertex: the identity sequence is shuffled in place
//! (Fisher-Yates, one or more rounds) and applied to the `src`/`dst`
//! columns as a gather. The replacement dictionary maps each new id to a
//! synthetic address derived from the id alone, so the original
//! addresses are absent from every output even if the permutation leaks.
//!
//! Permutations are fully determined by `(n, seed, rounds)` and
//! reproduce bit-for-bit across platforms; see [`crate::rng`] for the
//! pinned generator.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::net::Ipv4Addr;
use std::path::Path;

use thiserror::Error;

use crate::edge::{EdgeTable, VertexDictionary, VertexId};
use crate::rng::Rng;

/// Magic of the exported key file.
pub const KEY_MAGIC: [u8; 4] = *b"NSGK";
pub const KEY_VERSION: u16 = 1;

#[derive(Debug, Error)]
pub enum AnonymizeError {
    #[error("permutation covers {map} ids but the dictionary has {dict}")]
    LengthMismatch { map: usize, dict: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("bad magic {found:02x?}; not an NSGK key file")]
    KeyMagic { found: [u8; 4] },
    #[error("unsupported key file version {found} (expected {KEY_VERSION})")]
    KeyVersion { found: u16 },
    #[error("key file is not a bijection on 0..{n}")]
    KeyNotBijective { n: usize },
}

/// A bijection on `0..N` plus the parameters that generated it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnonymizationMap {
    permutation: Vec<VertexId>,
    seed: u64,
    rounds: u32,
}

impl AnonymizationMap {
    pub fn len(&self) -> usize {
        self.permutation.len()
    }

    pub fn is_empty(&self) -> bool {
        self.permutation.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn rounds(&self) -> u32 {
        self.rounds
    }

    /// New id for an old id. Panics if `old >= N`.
    pub fn new_id(&self, old: VertexId) -> VertexId {
        self.permutation[old as usize]
    }

    pub fn permutation(&self) -> &[VertexId] {
        &self.permutation
    }
}

/// Shuffles the identity sequence `0..n` with `rounds` Fisher-Yates
/// passes of a single seeded generator stream. `rounds` must be >= 1.
pub fn make_permutation(n: u32, seed: u64, rounds: u32) -> AnonymizationMap {
    assert!(rounds >= 1, "rounds must be >= 1");
    let mut permutation: Vec<VertexId> = (0..n).collect();
    let mut rng = Rng::from_seed(seed);
    for _ in 0..rounds {
        rng.shuffle(&mut permutation);
    }
    AnonymizationMap {
        permutation,
        seed,
        rounds,
    }
}

/// Synthetic replacement address for a new dense id: the id's own four
/// bytes. Carries no information beyond the id itself.
pub fn synthetic_addr(id: VertexId) -> Ipv4Addr {
    Ipv4Addr::from(id)
}

/// Relabels every `src`/`dst` id through the permutation and replaces
/// the dictionary with synthetic addresses. Counts, row order, form, and
/// vertex count are untouched.
pub fn apply(
    map: &AnonymizationMap,
    table: &EdgeTable,
    dict: &VertexDictionary,
) -> Result<(EdgeTable, VertexDictionary), AnonymizeError> {
    if map.len() != dict.len() {
        return Err(AnonymizeError::LengthMismatch {
            map: map.len(),
            dict: dict.len(),
        });
    }
    let src = table.src().iter().map(|&id| map.new_id(id)).collect();
    let dst = table.dst().iter().map(|&id| map.new_id(id)).collect();
    let relabeled = EdgeTable::from_columns(
        src,
        dst,
        table.n_packets().to_vec(),
        table.vertex_count(),
        table.form(),
    )
    .expect("relabeling preserves the table invariants");
    let addresses = (0..map.len() as u32).map(synthetic_addr).collect();
    Ok((relabeled, VertexDictionary::from_addresses(addresses)))
}

/// Telemetry on how far a permutation moved its elements.
#[derive(Debug, Clone, PartialEq)]
pub struct ShuffleQuality {
    pub n: usize,
    /// Ids mapped to themselves. ~Poisson(1) for a uniform permutation.
    pub fixed_points: u64,
    pub min_displacement: u64,
    pub max_displacement: u64,
    pub mean_displacement: f64,
    /// Bucket 0 counts zero displacements; bucket k counts displacements
    /// in `[2^(k-1), 2^k)`.
    pub histogram: Vec<u64>,
}

/// Fixed points and displacement statistics; purely informational.
pub fn shuffle_quality(map: &AnonymizationMap) -> ShuffleQuality {
    let n = map.len();
    let mut fixed_points = 0u64;
    let mut min_d = u64::MAX;
    let mut max_d = 0u64;
    let mut sum_d = 0u128;
    let mut histogram = Vec::new();
    for (i, &p) in map.permutation.iter().enumerate() {
        let d = (i as i64 - p as i64).unsigned_abs();
        if d == 0 {
            fixed_points += 1;
        }
        min_d = min_d.min(d);
        max_d = max_d.max(d);
        sum_d += d as u128;
        let bucket = if d == 0 {
            0
        } else {
            64 - (d.leading_zeros() as usize)
        };
        if histogram.len() <= bucket {
            histogram.resize(bucket + 1, 0);
        }
        histogram[bucket] += 1;
    }
    ShuffleQuality {
        n,
        fixed_points,
        min_displacement: if n == 0 { 0 } else { min_d },
        max_displacement: max_d,
        mean_displacement: if n == 0 { 0.0 } else { sum_d as f64 / n as f64 },
        histogram,
    }
}

/// Writes the permutation and the original dictionary to a key file for
/// audited de-anonymization. Layout, all integers little-endian:
///
/// ```text
/// offset  size  field
/// 0       4     magic "NSGK"
/// 4       2     version, u16, currently 1
/// 6       2     reserved, 0
/// 8       8     seed, u64
/// 16      4     rounds, u32
/// 20      4     reserved, 0
/// 24      8     N, u64
/// 32      4*N   permutation: new id for old id 0..N, u32
/// ..      4*N   original dictionary: address for old id 0..N, IPv4 as u32
/// ```
pub fn write_key(
    map: &AnonymizationMap,
    dict: &VertexDictionary,
    path: impl AsRef<Path>,
) -> Result<u64, AnonymizeError> {
    if map.len() != dict.len() {
        return Err(AnonymizeError::LengthMismatch {
            map: map.len(),
            dict: dict.len(),
        });
    }
    let mut w = BufWriter::new(File::create(path)?);
    let mut bytes = 0u64;
    let mut put = |w: &mut BufWriter<File>, b: &[u8]| -> std::io::Result<()> {
        bytes += b.len() as u64;
        w.write_all(b)
    };
    put(&mut w, &KEY_MAGIC)?;
    put(&mut w, &KEY_VERSION.to_le_bytes())?;
    put(&mut w, &[0, 0])?;
    put(&mut w, &map.seed.to_le_bytes())?;
    put(&mut w, &map.rounds.to_le_bytes())?;
    put(&mut w, &[0, 0, 0, 0])?;
    put(&mut w, &(map.len() as u64).to_le_bytes())?;
    for &p in &map.permutation {
        put(&mut w, &p.to_le_bytes())?;
    }
    for &ip in dict.addresses() {
        put(&mut w, &u32::from(ip).to_le_bytes())?;
    }
    w.flush()?;
    Ok(bytes)
}

/// Reads a key file back, checking that the stored map is a bijection.
pub fn read_key(
    path: impl AsRef<Path>,
) -> Result<(AnonymizationMap, VertexDictionary), AnonymizeError> {
    let mut r = BufReader::new(File::open(path)?);
    let mut four = [0u8; 4];
    r.read_exact(&mut four)?;
    if four != KEY_MAGIC {
        return Err(AnonymizeError::KeyMagic { found: four });
    }
    let mut two = [0u8; 2];
    r.read_exact(&mut two)?;
    let version = u16::from_le_bytes(two);
    if version != KEY_VERSION {
        return Err(AnonymizeError::KeyVersion { found: version });
    }
    r.read_exact(&mut two)?;
    let mut eight = [0u8; 8];
    r.read_exact(&mut eight)?;
    let seed = u64::from_le_bytes(eight);
    r.read_exact(&mut four)?;
    let rounds = u32::from_le_bytes(four);
    r.read_exact(&mut four)?;
    r.read_exact(&mut eight)?;
    let n = u64::from_le_bytes(eight) as usize;
    let mut permutation = Vec::with_capacity(n);
    for _ in 0..n {
        r.read_exact(&mut four)?;
        permutation.push(u32::from_le_bytes(four));
    }
    let mut addresses = Vec::with_capacity(n);
    for _ in 0..n {
        r.read_exact(&mut four)?;
        addresses.push(Ipv4Addr::from(u32::from_le_bytes(four)));
    }
    let mut seen = vec![false; n];
    for &p in &permutation {
        if (p as usize) >= n || seen[p as usize] {
            return Err(AnonymizeError::KeyNotBijective { n });
        }
        seen[p as usize] = true;
    }
    Ok((
        AnonymizationMap {
            permutation,
            seed,
            rounds,
        },
        VertexDictionary::from_addresses(addresses),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::all_properties;
    use crate::edge::build;
    use crate::pcap::PacketRecord;

    fn rec(src: u8, dst: u8) -> PacketRecord {
        PacketRecord {
            ts_sec: 0,
            ts_frac: 0,
            src: Ipv4Addr::new(10, 0, 0, src),
            dst: Ipv4Addr::new(10, 0, 0, dst),
        }
    }

    fn is_bijection(perm: &[VertexId]) -> bool {
        let mut sorted: Vec<_> = perm.to_vec();
        sorted.sort_unstable();
        sorted.iter().enumerate().all(|(i, &p)| i as u32 == p)
    }

    #[test]
    fn singleton_and_empty_permutations() {
        assert_eq!(make_permutation(1, 12345, 1).permutation(), &[0]);
        assert!(make_permutation(0, 9, 1).is_empty());
    }

    #[test]
    fn golden_permutations_match_reference() {
        // Frozen from the independent reference implementation.
        assert_eq!(
            make_permutation(10, 42, 1).permutation(),
            &[7, 3, 8, 9, 5, 6, 4, 1, 0, 2]
        );
        assert_eq!(
            make_permutation(10, 42, 2).permutation(),
            &[0, 1, 7, 4, 9, 5, 8, 2, 3, 6]
        );
        assert_eq!(make_permutation(5, 123, 3).permutation(), &[2, 4, 0, 1, 3]);
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        let a = make_permutation(10_000, 77, 1);
        let b = make_permutation(10_000, 77, 1);
        assert_eq!(a, b);
        let c = make_permutation(10_000, 78, 1);
        assert_ne!(a.permutation(), c.permutation());
    }

    #[test]
    fn permutations_are_bijections() {
        for n in [0u32, 1, 2, 10, 1000, 65_537] {
            for seed in [0u64, 1, 99] {
                for rounds in [1u32, 2, 3] {
                    let map = make_permutation(n, seed, rounds);
                    assert!(is_bijection(map.permutation()), "n={n} seed={seed}");
                }
            }
        }
    }

    #[test]
    fn apply_identity_is_noop() {
        let (dict, table) = build([rec(1, 2), rec(2, 3)]);
        let identity = AnonymizationMap {
            permutation: (0..dict.len() as u32).collect(),
            seed: 0,
            rounds: 1,
        };
        let (table2, dict2) = apply(&identity, &table, &dict).unwrap();
        assert_eq!(table2.src(), table.src());
        assert_eq!(table2.dst(), table.dst());
        assert_eq!(table2.n_packets(), table.n_packets());
        // the dictionary is always replaced with synthetic addresses
        assert_eq!(dict2.addr(0), Ipv4Addr::new(0, 0, 0, 0));
    }

    #[test]
    fn apply_swap_relabels() {
        let (dict, table) = build([rec(1, 2), rec(1, 2), rec(1, 2), rec(1, 2), rec(1, 2)]);
        let swap = AnonymizationMap {
            permutation: vec![1, 0],
            seed: 0,
            rounds: 1,
        };
        let agg = crate::edge::aggregate(&table);
        let (out, _) = apply(&swap, &agg, &dict).unwrap();
        assert_eq!(out.row(0), (1, 0, 5));
    }

    #[test]
    fn apply_checks_length() {
        let (dict, table) = build([rec(1, 2)]);
        let short = make_permutation(1, 0, 1);
        let err = apply(&short, &table, &dict).unwrap_err();
        assert!(matches!(
            err,
            AnonymizeError::LengthMismatch { map: 1, dict: 2 }
        ));
    }

    #[test]
    fn apply_hides_original_addresses() {
        let (dict, table) = build([rec(1, 2), rec(3, 4)]);
        let map = make_permutation(dict.len() as u32, 5, 1);
        let (_, dict2) = apply(&map, &table, &dict).unwrap();
        for &ip in dict.addresses() {
            assert!(dict2.id(ip).is_none(), "original address {ip} leaked");
        }
    }

    #[test]
    fn scalar_properties_survive_anonymization() {
        let mut rng = Rng::from_seed(1234);
        let records: Vec<PacketRecord> = (0..5_000)
            .map(|_| rec(rng.next_below(40) as u8, rng.next_below(40) as u8))
            .collect();
        let (dict, table) = build(records);
        let map = make_permutation(dict.len() as u32, 999, 2);
        let (table2, _) = apply(&map, &table, &dict).unwrap();
        assert_eq!(all_properties(&table), all_properties(&table2));
    }

    #[test]
    fn composition_matches_sequential_application() {
        let (dict, table) = build([rec(1, 2), rec(2, 3), rec(3, 1), rec(1, 3)]);
        let m1 = make_permutation(dict.len() as u32, 10, 1);
        let m2 = make_permutation(dict.len() as u32, 20, 1);
        let (t1, d1) = apply(&m1, &table, &dict).unwrap();
        let (t12, _) = apply(&m2, &t1, &d1).unwrap();
        let composed = AnonymizationMap {
            permutation: m1.permutation().iter().map(|&p| m2.new_id(p)).collect(),
            seed: 0,
            rounds: 1,
        };
        let (tc, _) = apply(&composed, &table, &dict).unwrap();
        assert_eq!(t12, tc);
    }

    #[test]
    fn quality_of_identity_map() {
        let identity = AnonymizationMap {
            permutation: (0..100).collect(),
            seed: 0,
            rounds: 1,
        };
        let q = shuffle_quality(&identity);
        assert_eq!(q.fixed_points, 100);
        assert_eq!(q.min_displacement, 0);
        assert_eq!(q.max_displacement, 0);
        assert_eq!(q.mean_displacement, 0.0);
        assert_eq!(q.histogram, vec![100]);

        let single = make_permutation(1, 11, 1);
        assert_eq!(shuffle_quality(&single).fixed_points, 1);
    }

    #[test]
    fn fixed_points_follow_poisson_one() {
        // A uniform permutation of n elements has ~Poisson(1) fixed
        // points; the total over 100 seeds is ~Poisson(100). [50, 160]
        // is a generous +-5 sigma band.
        let mut total = 0u64;
        for seed in 0..100u64 {
            let map = make_permutation(100_000, seed, 1);
            total += shuffle_quality(&map).fixed_points;
        }
        assert!((50..=160).contains(&total), "total fixed points {total}");
    }

    #[test]
    fn key_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("perm.key");
        let (dict, _) = build([rec(1, 2), rec(2, 3), rec(3, 4)]);
        let map = make_permutation(dict.len() as u32, 31337, 2);
        let bytes = write_key(&map, &dict, &path).unwrap();
        assert_eq!(bytes, std::fs::metadata(&path).unwrap().len());
        let (map2, dict2) = read_key(&path).unwrap();
        assert_eq!(map2, map);
        assert_eq!(dict2, dict);
    }

    #[test]
    fn key_file_rejects_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("perm.key");
        let (dict, _) = build([rec(1, 2), rec(2, 3)]);
        let map = make_permutation(dict.len() as u32, 1, 1);
        write_key(&map, &dict, &path).unwrap();

        let mut bytes = std::fs::read(&path).unwrap();
        bytes[0] = b'Z';
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(
            read_key(&path).unwrap_err(),
            AnonymizeError::KeyMagic { .. }
        ));

        let mut bytes = std::fs::read(&path).unwrap();
        bytes[0..4].copy_from_slice(&KEY_MAGIC);
        bytes[32..36].copy_from_slice(&9u32.to_le_bytes()); // duplicate id
        bytes[36..40].copy_from_slice(&9u32.to_le_bytes());
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(
            read_key(&path).unwrap_err(),
            AnonymizeError::KeyNotBijective { .. }
        ));
    }
}
