use std::path::Path;
use std::process::{Command, Output};

use bbf::{default_registry, run_suite, ConfigError, Record, Registry, RegistryError, Report, RunConfig, Suite};
use proptest::prelude::*;

fn bbf(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_bbf"));
    c.args(args).env_remove("BBF_THREADS").env_remove("SOURCE_DATE_EPOCH");
    for (k, v) in envs {
        c.env(k, v);
    }
    c.output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn list_is_stable_and_complete() {
    let a = bbf(&["list"], &[]);
    let b = bbf(&["list"], &[]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    for s in ["lie", "quantization", "hodge", "kernels", "bf-limits", "fa-axioms"] {
        assert!(text.lines().any(|l| l.starts_with(s)), "{s} missing");
    }
    assert!(text.contains("claim:"));
}

#[test]
fn reports_are_byte_identical() {
    let d = tempfile::tempdir().unwrap();
    let (o1, o2) = (d.path().join("a"), d.path().join("b"));
    let env = [("SOURCE_DATE_EPOCH", "1700000000")];
    for o in [&o1, &o2] {
        let r = bbf(&["run", "kernels", "--out", o.to_str().unwrap()], &env);
        assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    }
    for f in ["kernels.json", "kernels.csv"] {
        assert_eq!(std::fs::read(o1.join(f)).unwrap(), std::fs::read(o2.join(f)).unwrap(), "{f}");
    }
    let rep: Report = serde_json::from_str(&std::fs::read_to_string(o1.join("kernels.json")).unwrap()).unwrap();
    assert_eq!(rep.suite, "kernels");
    assert_eq!(rep.timestamp, Some(1_700_000_000));
    assert_eq!(rep.config_hash, RunConfig::default().hash());
    assert!(rep.passed && !rep.records.is_empty());
    assert_eq!(rep.notes, [bbf::suites::REMAINDER_NOTE]);
    let csv = std::fs::read_to_string(o1.join("kernels.csv")).unwrap();
    assert_eq!(csv.lines().count(), rep.records.len() + 1);
}

#[test]
fn thread_count_does_not_change_reports() {
    let d = tempfile::tempdir().unwrap();
    let (o1, o3) = (d.path().join("t1"), d.path().join("t3"));
    assert_eq!(bbf(&["run", "hodge", "--out", o1.to_str().unwrap()], &[("BBF_THREADS", "1")]).status.code(), Some(0));
    assert_eq!(bbf(&["run", "hodge", "--out", o3.to_str().unwrap()], &[("BBF_THREADS", "3")]).status.code(), Some(0));
    assert_eq!(std::fs::read(o1.join("hodge.json")).unwrap(), std::fs::read(o3.join("hodge.json")).unwrap());
}

#[test]
fn config_errors_exit_two() {
    let d = tempfile::tempdir().unwrap();
    let out = d.path().join("o");
    let out = out.to_str().unwrap();
    let neg = write(d.path(), "neg.json", r#"{"tolerance": {"abs": -1.0, "rel": 1e-9}}"#);
    let junk = write(d.path(), "junk.json", "{ not json");
    let unknown = write(d.path(), "unknown.json", r#"{"colour": "red"}"#);
    let other = write(d.path(), "other.json", r#"{"suite": "hodge"}"#);
    let noalg = write(d.path(), "noalg.json", r#"{"algebra": "/nonexistent/alg.txt"}"#);
    for cfg in [&neg, &junk, &unknown, &other, &noalg] {
        let r = bbf(&["run", "kernels", "--config", cfg, "--out", out], &[]);
        assert_eq!(r.status.code(), Some(2), "{cfg}");
    }
    assert_eq!(bbf(&["run", "no-such-suite", "--out", out], &[]).status.code(), Some(2));
    assert_eq!(bbf(&["run", "kernels", "--out", out], &[("BBF_THREADS", "0")]).status.code(), Some(2));
    assert_eq!(bbf(&["run", "kernels", "--out", out], &[("BBF_THREADS", "many")]).status.code(), Some(2));
}

#[test]
fn config_file_is_honoured() {
    let d = tempfile::tempdir().unwrap();
    let out = d.path().join("from-config");
    let cfg = write(
        d.path(),
        "c.json",
        &format!(r#"{{"suite": "lie", "algebra": "heisenberg3", "truncation": 2, "output": {:?}}}"#, out.to_str().unwrap()),
    );
    let r = bbf(&["run", "lie", "--config", &cfg], &[]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let rep: Report = serde_json::from_str(&std::fs::read_to_string(out.join("lie.json")).unwrap()).unwrap();
    assert!(rep.records.iter().any(|r| r.id == "clifford/heisenberg3/T2"));
    assert!(!rep.records.iter().any(|r| r.id.ends_with("/T3")));
    assert_ne!(rep.config_hash, RunConfig::default().hash());
}

#[test]
fn failing_checks_exit_one() {
    let d = tempfile::tempdir().unwrap();
    // [e0,e1] = e2, [e1,e2] = e1: antisymmetric, fails Jacobi
    let bad = write(d.path(), "bad.txt", "3\n0 1 2 1\n1 0 2 -1\n1 2 1 1\n2 1 1 -1\n");
    let cfg = write(d.path(), "c.json", &format!(r#"{{"algebra": {bad:?}}}"#));
    let r = bbf(&["run", "lie", "--config", &cfg, "--out", d.path().join("o").to_str().unwrap()], &[]);
    assert_eq!(r.status.code(), Some(1), "{}", String::from_utf8_lossy(&r.stdout));
    let rep: Report = serde_json::from_str(&std::fs::read_to_string(d.path().join("o/lie.json")).unwrap()).unwrap();
    assert!(!rep.passed);
    assert!(rep.records.iter().any(|r| !r.pass && r.error.is_some()));
}

#[test]
fn check_algebra_exit_codes() {
    let d = tempfile::tempdir().unwrap();
    let good = write(d.path(), "heis.txt", &bbf_core::lie::LieAlgebra::heisenberg3().to_text());
    let r = bbf(&["check-algebra", &good], &[]);
    assert_eq!(r.status.code(), Some(0));
    let text = String::from_utf8(r.stdout).unwrap();
    assert!(text.contains("jacobi        true") && text.contains("unimodular    true"));
    let lopsided = write(d.path(), "lop.txt", "2\n0 1 1 1\n");
    let r = bbf(&["check-algebra", &lopsided], &[]);
    assert_eq!(r.status.code(), Some(1));
    assert!(String::from_utf8(r.stdout).unwrap().contains("antisymmetric false"));
    let garbage = write(d.path(), "g.txt", "2\n0 1 x 1\n");
    assert_eq!(bbf(&["check-algebra", &garbage], &[]).status.code(), Some(2));
    assert_eq!(bbf(&["check-algebra", "/nonexistent"], &[]).status.code(), Some(2));
}

fn nothing(_: &bbf::Context) -> Vec<Record> {
    Vec::new()
}

#[test]
fn registry_rules() {
    let mut r = Registry::empty();
    assert!(r.is_empty());
    assert!(matches!(run_suite(&r, "lie", RunConfig::default(), Some(1)), Err(ConfigError::UnknownSuite(_))));
    let s = Suite { name: "z", description: "", claim: "", notes: &[], run: nothing };
    r.register(s).unwrap();
    r.register(Suite { name: "a", ..s }).unwrap();
    assert_eq!(r.register(s), Err(RegistryError::Duplicate("z".into())));
    assert_eq!(r.list().iter().map(|s| s.name).collect::<Vec<_>>(), ["a", "z"]);
    // an empty suite trivially passes
    assert!(run_suite(&r, "a", RunConfig::default(), Some(1)).unwrap().passed);
    assert!(default_registry().is_ok());
}

#[test]
fn config_defaults_and_hash() {
    let c = RunConfig::from_json("{}").unwrap();
    assert_eq!(c, RunConfig::default());
    let mut d = c.clone();
    d.output = Some("elsewhere".into());
    assert_eq!(c.hash(), d.hash());
    d.truncation = 3;
    assert_ne!(c.hash(), d.hash());
    assert_eq!(c.hash().len(), 64);
    assert!(RunConfig::from_json(r#"{"eps": [1e-3, 1e-2]}"#).is_err());
    assert!(RunConfig::from_json(r#"{"cutoff": {"plateau": 2.0, "support": 1.0, "order": 5}}"#).is_err());
    assert!(RunConfig::from_json(r#"{"eps": [1e-2, 1e-3], "l": 0.1}"#).is_ok());
}

proptest! {
    #[test]
    fn float_record_pass_rule(e in -1e3f64..1e3, c in -1e3f64..1e3, t in 0.0f64..10.0) {
        let r = Record::float("x", "", e, c, t);
        prop_assert_eq!(r.pass, (c - e).abs() <= t);
        let n = Record::float("x", "", e, f64::NAN, t);
        prop_assert!(!n.pass);
    }

    #[test]
    fn report_passes_iff_all_records_pass(flags in prop::collection::vec(any::<bool>(), 0..8)) {
        let recs: Vec<Record> = flags.iter().map(|&f| Record::exact("x", "", true, f)).collect();
        let rep = Report::new("s", String::new(), &["note"], recs);
        prop_assert_eq!(rep.passed, flags.iter().all(|&f| f));
        let back: Report = serde_json::from_str(&rep.to_json()).unwrap();
        prop_assert_eq!(back, rep);
    }
}
