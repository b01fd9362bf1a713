//! End-to-end tests of the `nseg` binary: subcommand behavior, exit
//! codes, and pipeline consistency.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

use nseg_core::anonymize::read_key;
use nseg_core::edge::io::read_edges;

fn nseg() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nseg"))
}

fn run_ok(cmd: &mut Command) -> Value {
    let output = cmd.output().expect("spawn nseg");
    assert!(
        output.status.success(),
        "command failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_slice(&output.stdout).expect("json stdout")
}

fn run_raw(cmd: &mut Command) -> Output {
    cmd.output().expect("spawn nseg")
}

fn gen_edges(dir: &Path, packets: u64, vertices: u32, seed: u64, format: &str) -> (String, Value) {
    let path = dir.join(format!("edges-{seed}.{format}"));
    let summary = run_ok(nseg().args([
        "gen",
        "-o",
        path.to_str().unwrap(),
        "--packets",
        &packets.to_string(),
        "--vertices",
        &vertices.to_string(),
        "--seed",
        &seed.to_string(),
        "--format",
        format,
    ]));
    (path.to_str().unwrap().to_string(), summary)
}

#[test]
fn gen_then_analyze_reports_ground_truth() {
    let dir = tempfile::tempdir().unwrap();
    let (edges, summary) = gen_edges(dir.path(), 1000, 50, 3, "csv");
    let report = run_ok(nseg().args(["analyze", &edges]));
    assert_eq!(report["properties"]["valid_packets"], 1000);
    assert_eq!(report["properties"], summary["properties"]);
    assert_eq!(report["unique_ips"], summary["unique_ips"]);
    assert_eq!(report["input"]["format"], "csv");
    assert_eq!(report["input"]["form"], "raw");
}

#[test]
fn analyze_empty_edge_file_is_all_zero() {
    let dir = tempfile::tempdir().unwrap();
    let (edges, _) = gen_edges(dir.path(), 0, 0, 0, "binary");
    let report = run_ok(nseg().args(["analyze", &edges]));
    for (key, value) in report["properties"].as_object().unwrap() {
        assert_eq!(value.as_u64(), Some(0), "property {key}");
    }
    assert_eq!(report["unique_ips"]["total"], 0);
}

#[test]
fn csv_and_binary_forms_agree() {
    let dir = tempfile::tempdir().unwrap();
    let (csv, _) = gen_edges(dir.path(), 5000, 40, 9, "csv");
    let (bin, _) = gen_edges(dir.path(), 5000, 40, 9, "binary");
    let a = run_ok(nseg().args(["analyze", &csv]));
    let b = run_ok(nseg().args(["analyze", &bin]));
    assert_eq!(a["properties"], b["properties"]);
    assert_eq!(a["unique_ips"], b["unique_ips"]);
}

#[test]
fn pcap_pipeline_matches_generator_truth() {
    let dir = tempfile::tempdir().unwrap();
    let pcap = dir.path().join("t.pcap");
    let edges = dir.path().join("t.bin");
    let gen_summary = run_ok(nseg().args([
        "gen",
        "-o",
        pcap.to_str().unwrap(),
        "--packets",
        "1000000",
        "--vertices",
        "5000",
        "--model",
        "skewed",
        "--seed",
        "11",
        "--pcap",
        "--invalid-fraction",
        "0.05",
    ]));
    let ingest = run_ok(nseg().args([
        "ingest",
        pcap.to_str().unwrap(),
        "-o",
        edges.to_str().unwrap(),
    ]));
    assert_eq!(ingest["valid_packets"], 1_000_000);
    assert_eq!(ingest["invalid_packets"], 50_000); // round(0.05 * 10^6)
    assert_eq!(ingest["truncated_packets"], 0);

    let report = run_ok(nseg().args(["analyze", edges.to_str().unwrap()]));
    assert_eq!(report["properties"], gen_summary["properties"]);
    assert_eq!(report["unique_ips"], gen_summary["unique_ips"]);

    // The hidden oracle path produces the same numbers.
    let oracle = run_ok(nseg().args(["analyze", edges.to_str().unwrap(), "--oracle"]));
    assert_eq!(oracle["properties"], report["properties"]);
}

#[test]
fn anonymize_commutes_with_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let (edges, _) = gen_edges(dir.path(), 8000, 120, 21, "binary");
    let anon = dir.path().join("anon.bin");
    let key = dir.path().join("perm.key");
    let summary = run_ok(nseg().args([
        "anonymize",
        &edges,
        "-o",
        anon.to_str().unwrap(),
        "--seed",
        "77",
        "--rounds",
        "2",
        "--key-out",
        key.to_str().unwrap(),
    ]));
    assert_eq!(summary["seed"], 77);
    assert_eq!(summary["rounds"], 2);

    let before = run_ok(nseg().args(["analyze", &edges]));
    let after = run_ok(nseg().args(["analyze", anon.to_str().unwrap()]));
    assert_eq!(before["properties"], after["properties"]);
    assert_eq!(before["unique_ips"], after["unique_ips"]);

    // The key file supports full de-anonymization: mapping each
    // anonymized id back through the permutation and the stored
    // dictionary reproduces the original address-level rows.
    let (map, original_dict) = read_key(&key).unwrap();
    let (_, original_table) = read_edges(&edges).unwrap();
    let (anon_dict, anon_table) = read_edges(&anon).unwrap();
    let mut inverse = vec![0u32; map.len()];
    for (old, &new) in map.permutation().iter().enumerate() {
        inverse[new as usize] = old as u32;
    }
    for (row, (s, d, n)) in anon_table.rows().enumerate() {
        let (os, od, on) = original_table.row(row);
        assert_eq!(
            original_dict.addr(inverse[s as usize]),
            original_dict.addr(os)
        );
        assert_eq!(
            original_dict.addr(inverse[d as usize]),
            original_dict.addr(od)
        );
        assert_eq!(n, on);
    }
    // Anonymized addresses are synthetic, derived from ids alone.
    for id in 0..anon_dict.len() as u32 {
        assert_eq!(anon_dict.addr(id), std::net::Ipv4Addr::from(id));
    }
}

#[test]
fn bench_reports_repeats_and_consistency() {
    let dir = tempfile::tempdir().unwrap();
    let (edges, _) = gen_edges(dir.path(), 2000, 30, 5, "binary");
    let output = run_raw(nseg().args(["bench", &edges, "--repeats", "3"]));
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    let data_rows = stdout
        .lines()
        .filter(|l| l.trim_start().starts_with(['1', '2', '3']))
        .count();
    assert_eq!(data_rows, 3, "stdout:\n{stdout}");
    assert!(
        stdout.contains("identical across 3 run(s): true"),
        "stdout:\n{stdout}"
    );
}

#[test]
fn report_file_and_distributions_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let (edges, _) = gen_edges(dir.path(), 3000, 25, 13, "binary");
    let report_path = dir.path().join("report.json");
    let dists = dir.path().join("dists");
    let output = run_raw(nseg().args([
        "analyze",
        &edges,
        "--report",
        report_path.to_str().unwrap(),
        "--distributions",
        dists.to_str().unwrap(),
    ]));
    assert!(output.status.success());
    assert!(output.stdout.is_empty(), "report goes to the file");
    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    let files: Vec<String> = report["distributions"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    assert_eq!(files.len(), 5);
    for name in &files {
        let path = dists.join(name);
        assert!(path.exists(), "missing sidecar {name}");
        let body = std::fs::read_to_string(path).unwrap();
        let header = body.lines().next().unwrap();
        assert!(
            header == "vertex,ip,value" || header == "src_ip,dst_ip,n_packets",
            "unexpected header {header}"
        );
    }
}

#[test]
fn exit_codes_distinguish_usage_and_data_errors() {
    let dir = tempfile::tempdir().unwrap();

    // data errors: exit 1
    let missing = run_raw(nseg().args(["analyze", "/nonexistent/edges.bin"]));
    assert_eq!(missing.status.code(), Some(1));
    assert!(!String::from_utf8_lossy(&missing.stderr).is_empty());

    let not_pcap = dir.path().join("not.pcap");
    std::fs::write(&not_pcap, b"plainly not a capture file").unwrap();
    let out = dir.path().join("o.bin");
    let bad = run_raw(nseg().args([
        "ingest",
        not_pcap.to_str().unwrap(),
        "-o",
        out.to_str().unwrap(),
    ]));
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("magic"));

    // usage errors: exit 2
    let unknown = run_raw(nseg().args(["frobnicate"]));
    assert_eq!(unknown.status.code(), Some(2));

    let bad_fraction = run_raw(nseg().args([
        "gen",
        "-o",
        dir.path().join("x.bin").to_str().unwrap(),
        "--packets",
        "10",
        "--vertices",
        "2",
        "--invalid-fraction",
        "0.5",
    ]));
    assert_eq!(bad_fraction.status.code(), Some(2));

    let (edges, _) = gen_edges(dir.path(), 10, 2, 1, "binary");
    let bad_rounds = run_raw(nseg().args([
        "anonymize",
        &edges,
        "-o",
        dir.path().join("y.bin").to_str().unwrap(),
        "--rounds",
        "0",
    ]));
    assert_eq!(bad_rounds.status.code(), Some(2));
}

#[test]
fn pcapng_input_is_rejected_with_a_clear_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("capture.pcapng");
    let mut bytes = vec![0x0a, 0x0d, 0x0d, 0x0a];
    bytes.extend_from_slice(&[0u8; 28]);
    std::fs::write(&path, bytes).unwrap();
    let out = dir.path().join("o.bin");
    let result = run_raw(nseg().args([
        "ingest",
        path.to_str().unwrap(),
        "-o",
        out.to_str().unwrap(),
    ]));
    assert_eq!(result.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&result.stderr).contains("pcapng"));
}
