//! Acceptance criterion 9: every CSV artifact is bit-identical under replay
//! with the same version and seed. Exercises the installed binary end to end.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gauss-ot"))
}

fn run_ok(args: &[&str]) -> std::process::Output {
    let out = bin().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn replay_status(summary: &Path) -> (i32, String, String) {
    let out = bin().arg("replay").arg(summary).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn criterion_9_replay() {
    let dir = tempfile::tempdir().unwrap();
    let commands =
        ["solve", "rays", "glue", "verify-evolution", "jacobian-sweep", "ladder"];
    for (k, cmd) in commands.iter().enumerate() {
        let out = dir.path().join(cmd);
        run_ok(&[cmd, "--seed", &(900 + k as u64).to_string(), "--out", out.to_str().unwrap()]);
        let (code, stdout, stderr) = replay_status(&out.join("summary.json"));
        assert_eq!(code, 0, "{cmd} replay failed: {stdout}{stderr}");
        assert!(stdout.contains("replay: pass"), "{cmd}: {stdout}");
    }
    println!(
        "acceptance criterion 9 (artifact replay): PASS — {} commands bit-identical on replay",
        commands.len()
    );
}

#[test]
fn replay_flags_tampered_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("solve");
    run_ok(&["solve", "--seed", "77", "--out", out.to_str().unwrap()]);

    let plan = out.join("plan.csv");
    let mut bytes = std::fs::read(&plan).unwrap();
    let k = bytes.len() / 2;
    bytes[k] = if bytes[k] == b'3' { b'4' } else { b'3' };
    std::fs::write(&plan, &bytes).unwrap();

    let (code, _, stderr) = replay_status(&out.join("summary.json"));
    assert_eq!(code, 2, "tampered replay should exit 2: {stderr}");
    assert!(stderr.contains("differing row"), "{stderr}");
}

#[test]
fn invalid_config_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "seed = 1\n[instance]\nn = 1\n").unwrap();
    let out = bin()
        .args(["solve", "--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}
