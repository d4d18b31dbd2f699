//! The size guard is process-global, so it gets its own test binary.

use commacat::cli::run;

#[test]
fn size_guard_rejects_large_generation() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(["commacat", "--size-guard", "100", "gen", "finset", "abc"], &mut out, &mut err);
    assert_eq!(code, 2);
    let v: serde_json::Value = serde_json::from_slice(&err).unwrap();
    assert_eq!(v["error"]["kind"], "size_guard_exceeded");
    assert_eq!(v["error"]["guard"], 100);
}
