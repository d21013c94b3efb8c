use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn blocknet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blocknet"))
        .args(args)
        .env_remove("BLOCKNET_DEBUG_CHECKS")
        .output()
        .expect("failed to run blocknet")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Deterministic shuffled keys without pulling in an RNG.
fn scrambled(n: u64) -> Vec<i64> {
    (0..n)
        .map(|i| ((i.wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 17) as i64) - (1 << 45))
        .collect()
}

fn write_bin(p: &Path, keys: &[i64]) {
    let mut buf = (keys.len() as u64).to_le_bytes().to_vec();
    for k in keys {
        buf.extend(k.to_le_bytes());
    }
    fs::write(p, buf).unwrap();
}

fn read_bin(p: &Path) -> Vec<i64> {
    let buf = fs::read(p).unwrap();
    let n = u64::from_le_bytes(buf[..8].try_into().unwrap()) as usize;
    assert_eq!(buf.len(), 8 + 8 * n);
    buf[8..]
        .chunks(8)
        .map(|c| i64::from_le_bytes(c.try_into().unwrap()))
        .collect()
}

#[test]
fn dump_network_matches_generator() {
    let out = blocknet(&["dump-network", "--network", "bitonic", "--order", "1"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "width=2 stages=1\n0:1:A\n");

    let out = blocknet(&["dump-network", "--network", "oddeven", "--order", "2"]);
    let text = stdout(&out);
    assert!(text.starts_with("width=4 stages=3\n"), "{text}");
    let comparators: usize = text.lines().skip(1).map(|l| l.split_whitespace().count()).sum();
    assert_eq!(comparators, 5);
}

#[test]
fn dumped_network_verifies_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("b3.net");
    let out = blocknet(&[
        "dump-network",
        "--network",
        "bitonic",
        "--order",
        "3",
        "-o",
        path(&file),
    ]);
    assert!(out.status.success());
    let out = blocknet(&["verify", "--network-file", path(&file), "--budget", "2000"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
}

#[test]
fn verify_bitonic_passes() {
    let out = blocknet(&["verify", "--network", "bitonic", "--order", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("PASS 0/1 width 8: 256 cases"), "{text}");
    assert!(!text.contains("FAIL"));
}

#[test]
fn verify_naive_swap_prints_witness() {
    let out = blocknet(&[
        "verify",
        "--network",
        "bitonic",
        "--order",
        "2",
        "--comparator",
        "naive-swap",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("FAIL naive-swap"), "{text}");
    assert!(text.contains("smallest witness: [[],[1],[],[0]]"), "{text}");
}

#[test]
fn verify_broken_golden_fails() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("report.csv");
    let out = blocknet(&[
        "verify",
        "--network-file",
        path(&golden("broken.net")),
        "--csv",
        path(&csv),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("FAIL 0/1 width 4"));
    let csv = fs::read_to_string(csv).unwrap();
    assert!(csv.contains("case_id,verdict,clause,witness"));
    assert!(csv.contains(",fail,sorted,"));
    assert!(csv.contains("*,fail,"));
}

#[test]
fn verify_with_relation_suite() {
    let out = blocknet(&["verify", "--order", "2", "--relations", "500", "--seed", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("3000 cases"));
}

#[test]
fn usage_and_io_errors_exit_2() {
    assert_eq!(blocknet(&["verify", "--network", "heap"]).status.code(), Some(2));
    assert_eq!(
        blocknet(&["verify", "--network-file", "/nonexistent/net"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        blocknet(&["sort", "/nonexistent/in.bin", "-o", "/tmp/x.bin"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        blocknet(&["bench", "--reps", "0", "--sizes", "10"]).status.code(),
        Some(2)
    );
    assert_eq!(blocknet(&[]).status.code(), Some(2));
}

#[test]
fn malformed_network_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.net");
    fs::write(&file, "width=4 stages=1\n0:0:A\n").unwrap();
    let out = blocknet(&["verify", "--network-file", path(&file)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sort_large_binary_file_matches_reference() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.bin");
    let output = dir.path().join("out.bin");
    let reference = dir.path().join("ref.bin");
    let keys = scrambled(1_000_000);
    write_bin(&input, &keys);
    let mut sorted = keys.clone();
    sorted.sort();
    write_bin(&reference, &sorted);

    let out = blocknet(&[
        "sort",
        path(&input),
        "-o",
        path(&output),
        "--lanes",
        "8",
        "--workers",
        "4",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(fs::read(&output).unwrap(), fs::read(&reference).unwrap());
}

#[test]
fn sort_empty_files() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["empty.txt", "empty.bin"] {
        let input = dir.path().join(name);
        let output = dir.path().join(format!("out-{name}"));
        fs::write(&input, "").unwrap();
        let out = blocknet(&["sort", path(&input), "-o", path(&output)]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let written = fs::read(&output).unwrap();
        if name.ends_with(".bin") {
            assert_eq!(written, 0u64.to_le_bytes());
        } else {
            assert!(written.is_empty());
        }
    }
}

#[test]
fn sort_text_floats_and_reject_nan() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.txt");
    let output = dir.path().join("out.txt");
    fs::write(&input, "2.5\n-1\n1e3\n0\n").unwrap();
    let out = blocknet(&[
        "sort",
        path(&input),
        "-o",
        path(&output),
        "--keys",
        "f64",
        "--lanes",
        "2",
    ]);
    assert!(out.status.success());
    assert_eq!(fs::read_to_string(&output).unwrap(), "-1\n0\n2.5\n1000\n");

    fs::write(&input, "1\nNaN\n").unwrap();
    let out = blocknet(&["sort", path(&input), "-o", path(&output), "--keys", "f64"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn distributed_sort_keeps_one_file_per_lane() {
    let dir = tempfile::tempdir().unwrap();
    let keys = scrambled(10_000);
    let mut args = vec![
        "sort".to_string(),
        "--distributed".into(),
        "--workers".into(),
        "4".into(),
    ];
    let mut outputs = Vec::new();
    for (lane, chunk) in keys.chunks(2500).enumerate() {
        let input = dir.path().join(format!("in{lane}.bin"));
        write_bin(&input, chunk);
        args.push(path(&input).to_string());
        outputs.push(dir.path().join(format!("out{lane}.bin")));
    }
    args.push("-o".into());
    args.extend(outputs.iter().map(|p| path(p).to_string()));
    let metrics = dir.path().join("metrics.csv");
    args.extend(["--metrics-csv".to_string(), path(&metrics).to_string()]);

    let out = blocknet(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let lanes: Vec<Vec<i64>> = outputs.iter().map(|p| read_bin(p)).collect();
    assert!(lanes.iter().all(|l| l.len() == 2500));
    let mut expected = keys;
    expected.sort();
    assert_eq!(lanes.concat(), expected);
    let csv = fs::read_to_string(metrics).unwrap();
    assert!(csv.starts_with("stage,comparators,wall_ns,keys_crossed,max_block\n"));
    assert_eq!(csv.lines().count(), 1 + 3);
}

#[test]
fn single_lane_distributed_equals_plain_sort() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.txt");
    fs::write(&input, "5\n-3\n9\n0\n").unwrap();
    let plain = dir.path().join("plain.txt");
    let lane = dir.path().join("lane.txt");
    assert!(blocknet(&["sort", path(&input), "-o", path(&plain)]).status.success());
    assert!(blocknet(&["sort", "--distributed", path(&input), "-o", path(&lane)])
        .status
        .success());
    assert_eq!(fs::read(&plain).unwrap(), fs::read(&lane).unwrap());
    assert_eq!(fs::read_to_string(&lane).unwrap(), "-3\n0\n5\n9\n");
}

#[test]
fn distributed_needs_matching_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    fs::write(&a, "1\n").unwrap();
    fs::write(&b, "2\n").unwrap();
    let out = blocknet(&["sort", "--distributed", path(&a), path(&b), "-o", path(&a)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn debug_checks_env_is_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.txt");
    let output = dir.path().join("out.txt");
    fs::write(&input, "3\n1\n2\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_blocknet"))
        .args(["sort", path(&input), "-o", path(&output)])
        .env("BLOCKNET_DEBUG_CHECKS", "1")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(fs::read_to_string(&output).unwrap(), "1\n2\n3\n");
}

#[test]
fn bench_writes_csv_and_table() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bench.csv");
    let summary = dir.path().join("summary.csv");
    let out = blocknet(&[
        "bench",
        "--sizes",
        "2^10,3000",
        "--lanes",
        "2,4",
        "--workers",
        "1,2",
        "--reps",
        "2",
        "--csv",
        path(&csv),
        "--summary-csv",
        path(&summary),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = stdout(&out);
    assert!(table.contains("n = 1024") && table.contains("n = 3000"), "{table}");
    for name in [
        "hybrid-bitonic",
        "hybrid-oddeven",
        "par-mergesort",
        "psrs",
        "sequential",
    ] {
        assert!(table.contains(name), "{name} missing");
    }
    let records = fs::read_to_string(csv).unwrap();
    let mut lines = records.lines();
    assert_eq!(
        lines.next(),
        Some("algorithm,n,lanes,workers,repetition,local_sort_ns,merge_ns,total_ns,keys_exchanged")
    );
    // Two sizes x (4 algorithms x 2 lanes x 2 workers + sequential) x 2 reps.
    assert_eq!(lines.count(), 2 * 17 * 2);
    assert!(fs::read_to_string(summary)
        .unwrap()
        .starts_with("algorithm,n,lanes,workers,min_ns"));
}

#[test]
fn bench_distributed_flag() {
    let out = blocknet(&[
        "bench",
        "--sizes",
        "4096",
        "--lanes",
        "4",
        "--workers",
        "2",
        "--reps",
        "1",
        "--algorithms",
        "hybrid-bitonic,sequential",
        "--distributed",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
