use std::process::Command;

use qaffine::evalrep::EvalRep;
use qaffine::qadm::cache;
use qaffine::rootdata::{AffineType, Family};
use qaffine::rsolver::solve_theta;
use qaffine::Error;

fn qadm(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_qadm")).args(args).env_remove("QADM_CACHE_DIR").output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap())
}

fn line_ok(line: &str) -> bool {
    let parts: Vec<&str> = line.splitn(7, ' ').collect();
    parts.len() >= 6
        && parts[0] == "CHECK"
        && parts[2].starts_with("type=")
        && parts[3].starts_with("K=")
        && parts[4].strip_prefix("certified_order=").is_some_and(|v| v.parse::<i64>().is_ok())
        && ["status=PASS", "status=FAIL", "status=SKIPPED"].contains(&parts[5])
}

#[test]
fn every_type_round_trips() {
    for f in Family::ALL {
        let rep = EvalRep::build(AffineType::new(f, f.min_rank()).unwrap()).unwrap();
        let art = solve_theta(&rep, 1).unwrap();
        let text = cache::to_string(&art).unwrap();
        let back = cache::from_str(&text).unwrap();
        assert_eq!(back, art, "{f:?}");
        assert_eq!(cache::to_string(&back).unwrap(), text);
    }
}

#[test]
fn damaged_files_are_told_apart() {
    let rep = EvalRep::build(AffineType::new(Family::C1, 2).unwrap()).unwrap();
    let text = cache::to_string(&solve_theta(&rep, 1).unwrap()).unwrap();
    let body = text.lines().filter(|l| !l.starts_with("CHECKSUM")).collect::<Vec<_>>().join("\n") + "\n";
    assert!(matches!(cache::from_str(&body), Err(Error::Parse(_))));
    let flipped = text.replacen("THETA 0,0,1", "THETA 0,1,0", 1);
    assert!(matches!(cache::from_str(&flipped), Err(Error::CacheChecksum)));
    let version = text.replacen("QADM-CACHE 1", "QADM-CACHE 2", 1);
    let e = cache::from_str(&version).unwrap_err();
    assert!(matches!(e, Error::CacheVersion { .. }));
    assert_ne!(e.exit_code(), Error::CacheChecksum.exit_code());
}

#[test]
fn cli_a1_all_checks() {
    let (code, out) = qadm(&["--family", "A", "--rank", "1", "--order", "3", "--checks", "all", "--jobs", "2"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.lines().all(line_ok), "{out}");
    assert!(out.lines().all(|l| !l.contains("status=FAIL")));
    assert!(out.contains("CHECK drinfeld_c type=A1 K=3 certified_order=3 status=PASS"));
}

#[test]
fn cli_twisted_drinfeld_is_out_of_scope() {
    let (code, out) = qadm(&["--family", "D2", "--rank", "2", "--checks", "drinfeld"]);
    assert_ne!(code, 0);
    assert!(out.lines().all(line_ok));
    assert!(out.contains("status=FAIL out of scope"), "{out}");
}

#[test]
fn cli_out_file_reloads_identically() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cache.qaf");
    let p = path.to_str().unwrap();
    let (code, _) = qadm(&["--family", "C", "--rank", "2", "--order", "2", "--checks", "solve", "--out", p]);
    assert_eq!(code, 0);
    let bytes = std::fs::read_to_string(&path).unwrap();
    let art = cache::load(&path).unwrap();
    assert_eq!(cache::to_string(&art).unwrap(), bytes);
    let (_, again) = qadm(&["--family", "C", "--rank", "2", "--order", "2", "--checks", "solve", "--out", p]);
    assert!(again.contains("CHECK solve type=C2 K=2"));
    assert_eq!(std::fs::read_to_string(&path).unwrap(), bytes);
}

#[test]
fn cli_rejects_bad_configs() {
    let (code, _) = qadm(&["--family", "C", "--rank", "2", "--checks", "qdet"]);
    assert_eq!(code, 2);
    let (code, _) = qadm(&["--family", "B", "--rank", "1"]);
    assert_eq!(code, 2);
    let (code, _) = qadm(&["--family", "A", "--rank", "1", "--checks", "nonsense"]);
    assert_eq!(code, 3);
}

#[test]
fn cli_cache_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_qadm"))
            .args(["--family", "A", "--rank", "2", "--order", "1", "--checks", "solve,rll"])
            .env("QADM_CACHE_DIR", dir.path())
            .output()
            .unwrap()
    };
    let first = run();
    assert!(dir.path().join("A2-K1.qaf").exists());
    let second = run();
    assert_eq!(first.stdout, second.stdout);
}
