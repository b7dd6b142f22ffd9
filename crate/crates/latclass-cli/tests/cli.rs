use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_latclass")).current_dir(dir).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn queries() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["shortvec", "E8", "--bound", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "r2 240\nr4 2160\n");
    let o = run(dir.path(), &["iso", "A3", "D3"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(dir.path(), &["aut", "gram:2,-1;-1,2"]);
    assert!(stdout(&o).contains("12"), "{}", stdout(&o));
    assert!(dir.path().join("latclass-aut.manifest").exists());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // cap exceeded
    let o = run(dir.path(), &["shortvec", "E8", "--bound", "4", "--vector-cap", "10"]);
    assert_eq!(o.status.code(), Some(2));
    // malformed input
    let o = run(dir.path(), &["shortvec", "gram:1,2;2,1", "--bound", "2"]);
    assert_eq!(o.status.code(), Some(3));
    let o = run(dir.path(), &["frobnicate"]);
    assert_eq!(o.status.code(), Some(3));
    fs::write(dir.path().join("bad.lst"), "#latclass-list 9\n").unwrap();
    let o = run(dir.path(), &["audit", "--input", "bad.lst"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
    let o = run(dir.path(), &["--help"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn pipeline_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let o = run(p, &["classify-unimodular", "--max-rank", "9", "--output-dir", "out"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("8 2 137/1393459200"));
    assert!(p.join("out/latclass-classify-unimodular.manifest").exists());

    let o = run(p, &["audit", "--input", "out/X8.lst", "--expected-count", "2"]);
    assert_eq!(o.status.code(), Some(0));
    // a wrong expectation is a mismatch
    let o = run(p, &["audit", "--input", "out/X8.lst", "--expected-count", "3"]);
    assert_eq!(o.status.code(), Some(1));

    let o = run(p, &["extend", "--input", "out/X6.lst", "--output", "x8.lst"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(p.join("x8.lst")).unwrap();
    assert!(text.starts_with("#latclass-list 1\n#rank 8\n"));
    let classes: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(classes.len(), 1);
    assert!(classes[0].starts_with("E8 1/696729600 1/1 "), "{}", classes[0]);

    let o = run(p, &["orbitmethod", "--input", "out/II8.lst", "--type", "2", "--target", "G(7,1)", "--output", "e7.lst"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let e7 = fs::read_to_string(p.join("e7.lst")).unwrap();
    assert!(e7.contains("\nE7 1/2903040 1/1 "));
    let manifest = fs::read_to_string(p.join("e7.lst.manifest")).unwrap();
    for key in ["tool latclass", "format-version 1", "hash-version 1", "command orbitmethod", "seed 1", "input out/II8.lst sha256 ", "output e7.lst sha256 ", "exit 0"] {
        assert!(manifest.contains(key), "{key}\n{manifest}");
    }

    // list entries are accepted as lattice specs and survive a round trip
    let o = run(p, &["iso", "e7.lst@1", "E7"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(p, &["audit", "--input", "e7.lst", "--expected-count", "1", "--expected-mass", "1/2903040"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn neighbors_and_genera() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let o = run(p, &["neighbor", "I8", "--d", "2", "--x", "1,1,1,1,1,1,1,1", "--output", "n.lst"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(p, &["iso", "n.lst@1", "E8"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(p, &["classify-genus", "9", "5", "--output", "g95.lst"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(p.join("g95.lst")).unwrap();
    assert!(text.contains("#genus G(9,5)"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 3);
}
