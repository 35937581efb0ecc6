//! End-to-end checks of the `tpc` binary: configuration handling, exit
//! codes, and byte-level reproducibility of the emitted tables.

use std::path::PathBuf;
use std::process::{Command, Output};

fn tpc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tpc"))
        .args(args)
        .output()
        .expect("spawn tpc")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("tpc-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn config_subcommand_round_trips_a_file() {
    let path = scratch("roundtrip.cfg");
    std::fs::write(
        &path,
        "# pilot point\nk = 5\neb_n0_db = 2.0, 2.25\nscheme = bw\nmode = bit\n",
    )
    .unwrap();
    let out = tpc(&["config", "--config", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("k = 5"));
    assert!(text.contains("eb_n0_db = 2.0,2.25"));
    assert!(text.contains("scheme = bw"));

    // The resolved dump is itself a valid config describing the same run.
    let resolved = scratch("resolved.cfg");
    std::fs::write(&resolved, &text).unwrap();
    let again = tpc(&["config", "--config", resolved.to_str().unwrap()]);
    assert_eq!(String::from_utf8(again.stdout).unwrap(), text);
}

#[test]
fn bad_configuration_exits_with_2() {
    let path = scratch("bad.cfg");
    std::fs::write(&path, "frobnicate = 1\n").unwrap();
    let out = tpc(&["bler", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("configuration error"));

    // Valid syntax, invalid semantics: bler without any Eb/N0 points.
    let out = tpc(&["bler"]);
    assert_eq!(out.status.code(), Some(2));

    let out = tpc(&["decode", "--set", "b=1", "--set", "llrs=1.0,2.0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_with_3() {
    let out = tpc(&[
        "encode",
        "--out",
        "/nonexistent-dir/never/table.csv",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8(out.stderr).unwrap().contains("cannot write"));
}

#[test]
fn reruns_and_worker_counts_give_byte_identical_tables() {
    let args = [
        "bler",
        "--set",
        "k=4",
        "--set",
        "eb_n0_db=2.0",
        "--set",
        "max_trials=256",
        "--set",
        "min_errors=1",
    ];
    let first = tpc(&args);
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    let second = tpc(&args);
    let mut with_workers: Vec<&str> = args.to_vec();
    with_workers.extend_from_slice(&["--workers", "4"]);
    let third = tpc(&with_workers);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(first.stdout, third.stdout);
}

#[test]
fn tables_have_the_documented_shape() {
    let out = tpc(&[
        "bler",
        "--set",
        "k=5",
        "--set",
        "eb_n0_db=8.0",
        "--set",
        "max_trials=256",
        "--set",
        "min_errors=1000000",
        "--seed",
        "3",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("# tpc "));
    assert!(lines[0].contains(" bler | "));
    assert!(lines[0].contains("seed=3"));
    assert_eq!(
        lines[1],
        "scheme,mode,eb_n0_db,trials,block_errors,bler,avg_half_iters,avg_queries,std_err"
    );
    let fields: Vec<&str> = lines[2].split(',').collect();
    assert_eq!(fields.len(), 9);
    assert_eq!(fields[0], "gw");
    assert_eq!(fields[1], "group");
    assert_eq!(fields[2], "8.000");
    assert_eq!(fields[3], "256");
    // A quiet channel decodes every block.
    assert_eq!(fields[4], "0");
}

#[test]
fn output_file_matches_stdout() {
    let path = scratch("point.csv");
    let base = [
        "bler",
        "--set",
        "k=5",
        "--set",
        "eb_n0_db=7.0",
        "--set",
        "max_trials=256",
        "--set",
        "min_errors=1",
    ];
    let streamed = tpc(&base);
    assert!(streamed.status.success());
    let mut to_file: Vec<&str> = base.to_vec();
    to_file.extend_from_slice(&["--out", path.to_str().unwrap()]);
    let written = tpc(&to_file);
    assert!(written.status.success());
    assert!(written.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), streamed.stdout);
}

#[test]
fn encode_and_decode_cooperate() {
    let enc = tpc(&[
        "encode",
        "--set",
        "family=rlc",
        "--set",
        "b=1",
        "--set",
        "n=16",
        "--set",
        "k=11",
        "--seed",
        "5",
    ]);
    assert!(enc.status.success());
    let text = String::from_utf8(enc.stdout).unwrap();
    let (_, codeword) = text.lines().last().unwrap().split_once(',').unwrap();
    assert_eq!(codeword.len(), 16);

    // Feed confident LLRs for that codeword back through the list decoder.
    let llrs: Vec<String> = codeword
        .chars()
        .map(|c| if c == '0' { "7.0".into() } else { "-7.0".into() })
        .collect();
    let dec = tpc(&[
        "decode",
        "--set",
        "family=rlc",
        "--set",
        "b=1",
        "--set",
        "n=16",
        "--set",
        "k=11",
        "--set",
        &format!("llrs={}", llrs.join(",")),
    ]);
    assert!(dec.status.success());
    let text = String::from_utf8(dec.stdout).unwrap();
    let best = text.lines().find(|l| l.starts_with("0,")).unwrap();
    assert!(best.contains(codeword));
}
