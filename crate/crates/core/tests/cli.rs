use std::process::Command;

fn invflow(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_invflow")).args(args).output().unwrap()
}

#[test]
fn loxodrome_writes_figures() {
    let dir = tempfile::tempdir().unwrap();
    let out = invflow(&["loxodrome", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["spirals.svg", "windings.svg", "spiral_a0.15.svg", "winding_n2.svg", "loxodrome.txt"] {
        assert!(dir.path().join(f).exists(), "{f} missing");
    }
}

#[test]
fn short_run_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = invflow(&["run", "--out", d, "--n-grid", "64", "--t-end", "0.5", "--", "--init", "noise", "--amplitude", "0.2", "--max-mode", "4"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert!(summary.starts_with("t,ell,normQ2,normQs2,dissipation_residual"));
    assert!(summary.lines().count() > 2);
}

#[test]
fn bad_input_exits_nonzero_with_code() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    for args in [
        vec!["run", "--out", d, "--n-grid", "100"],
        vec!["run", "--out", d, "--", "--no-such-key", "1"],
        vec!["analyze", "--out", d, "--", "--input", "/nonexistent/curve.csv"],
    ] {
        let out = invflow(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error["), "{args:?}");
    }
}

#[test]
fn roundtrip_generic_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = invflow(&["roundtrip", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("roundtrip.txt").exists());
}
