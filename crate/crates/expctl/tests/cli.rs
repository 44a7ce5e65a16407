use extamen_cli::record::read_jsonl;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_extamen"))
}

fn experiments() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../experiments")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).env_remove("EXTAMEN_THREADS").output().unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

const Z_SMALL: &str = r#"
[experiment]
id = "z"
kind = "oracle-crosscheck"
oracle_n = 4

[action]
kind = "integer-line"

[walk]
horizon = 4
trajectories = 2000
seed = 7
"#;

#[test]
fn malformed_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", "[experiment]\nid = \"x\"\nkind = \"nope\"\n");
    let out = run(&["run", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());

    let cfg = write(dir.path(), "unknown.toml", &format!("{Z_SMALL}\nbogus = 1\n"));
    let out = run(&["run", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_config_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["run", "/nonexistent/x.toml", "--out", dir.path().to_str().unwrap()]);
    assert_ne!(out.status.code(), Some(0));
}

#[test]
fn budget_overflow_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let body = Z_SMALL.replace("oracle_n = 4", "oracle_n = 4\nbudget = 10");
    let cfg = write(dir.path(), "z.toml", &body);
    let out = run(&["run", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn rerun_gives_identical_records_and_appends() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "z.toml", Z_SMALL);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for (out, threads) in [(&a, "1"), (&b, "4")] {
        let o = run(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--threads", threads]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let ra = std::fs::read(a.join("records.jsonl")).unwrap();
    let rb = std::fs::read(b.join("records.jsonl")).unwrap();
    assert_eq!(ra, rb);
    assert!(a.join("z.csv").exists());
    assert!(a.join("z.toml").exists());
    assert!(a.join("timings.jsonl").exists());

    let o = run(&["run", cfg.to_str().unwrap(), "--out", a.to_str().unwrap()]);
    assert!(o.status.success());
    let twice = std::fs::read(a.join("records.jsonl")).unwrap();
    assert_eq!(twice.len(), 2 * ra.len());
    assert_eq!(&twice[..ra.len()], &ra[..]);
}

#[test]
fn seed_override_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "z.toml", Z_SMALL);
    let o = run(&["run", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap(), "--seed", "99"]);
    assert!(o.status.success());
    let recs = read_jsonl(&dir.path().join("records.jsonl")).unwrap();
    assert!(recs.iter().all(|r| r.seed == 99));
}

#[test]
fn oracle_prints_three_sixteenths() {
    let cfg = experiments().join("z_crosscheck.toml");
    let o = run(&["oracle", cfg.to_str().unwrap(), "--n", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let line = text.lines().find(|l| l.split_whitespace().next() == Some("2")).unwrap();
    assert!(line.contains("3/16"), "{text}");
}

#[test]
fn report_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "z.toml", Z_SMALL);
    assert!(run(&["run", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]).status.success());
    let o = run(&["report", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("== z [oracle-crosscheck]"), "{text}");
    assert!(dir.path().join("report/z__orbit_oracle.csv").exists());
}

#[test]
fn report_on_empty_records() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("records.jsonl"), "").unwrap();
    let o = run(&["report", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    assert!(String::from_utf8(o.stdout).unwrap().trim().is_empty());

    let missing = tempfile::tempdir().unwrap();
    let o = run(&["report", missing.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn report_rejects_mixed_configs() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.toml", Z_SMALL);
    let b = write(
        dir.path(),
        "b.toml",
        &Z_SMALL.replace("seed = 7", "seed = 7\nthreads = 2").replace("trajectories = 2000", "trajectories = 1000"),
    );
    for c in [&a, &b] {
        assert!(run(&["run", c.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]).status.success());
    }
    let o = run(&["report", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn shipped_configs_parse() {
    for e in std::fs::read_dir(experiments()).unwrap() {
        let p = e.unwrap().path();
        if p.extension().and_then(|s| s.to_str()) != Some("toml") {
            continue;
        }
        let (cfg, _) = extamen_cli::ExperimentConfig::load(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        assert_eq!(format!("{}.toml", cfg.experiment.id.replace('-', "_")), p.file_name().unwrap().to_str().unwrap());
    }
}
