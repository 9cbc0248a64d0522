use std::path::PathBuf;
use std::process::Command;

fn ie(args: &[&str]) -> (Option<i32>, String) {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..");
    let out = Command::new(env!("CARGO_BIN_EXE_ie")).args(args).current_dir(root).output().unwrap();
    (out.status.code(), String::from_utf8_lossy(&out.stderr).into_owned())
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(ie(&["frobnicate"]).0, Some(1));
    assert_eq!(ie(&["extract", "resources/default.conf"]).0, Some(1));
    assert_eq!(ie(&["extract", "no-such.conf", "fixtures/extended_example.txt"]).0, Some(1));
    assert_eq!(ie(&["localize", "fixtures/extended_example.gold", "xx"]).0, Some(1));
    assert_eq!(ie(&["--help"]).0, Some(0));
}

#[test]
fn bad_inputs_exit_two() {
    let (code, stderr) = ie(&["score", "no-such.records", "fixtures/extended_example.gold"]);
    assert_eq!(code, Some(2));
    assert_eq!(stderr.matches("os error").count(), 1, "{stderr}");
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.records");
    std::fs::write(&bad, "x\n    id: ENTITY-1\n    type: nonsense\n").unwrap();
    let (code, stderr) = ie(&["score", bad.to_str().unwrap(), "fixtures/extended_example.gold"]);
    assert_eq!(code, Some(2));
    assert!(stderr.contains("line 3"), "{stderr}");
}

#[test]
fn unreadable_document_is_skipped() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = ie(&[
        "extract",
        "resources/default.conf",
        "fixtures/extended_example.txt",
        "missing.txt",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, Some(2));
    assert!(dir.path().join("extended_example.records").exists());
}
