use serde_json::Value;
use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};
use std::sync::OnceLock;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_mertens"));
    c.env_remove("MERTENS_DATA_DIR");
    c
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("mertens-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&d);
    fs::create_dir_all(&d).unwrap();
    d
}

/// Zeros to 300, shared by the tests that need a table.
fn small_zeros() -> &'static PathBuf {
    static P: OnceLock<PathBuf> = OnceLock::new();
    P.get_or_init(|| {
        let d = scratch("shared");
        let p = d.join("zeros.txt");
        let o = bin().args(["zeros-generate", "--t-max", "300", "--out"]).arg(&p).output().unwrap();
        assert!(o.status.success());
        p
    })
}

fn report(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn help_and_usage_errors() {
    assert_eq!(code(&bin().arg("--help").output().unwrap()), 0);
    assert_eq!(code(&bin().args(["sieve", "--limit", "10", "--bogus"]).output().unwrap()), 2);
    assert_eq!(code(&bin().arg("nonsense").output().unwrap()), 2);
    assert_eq!(code(&bin().args(["sieve", "--limit", "ten"]).output().unwrap()), 2);
}

#[test]
fn invalid_ranges_exit_three() {
    for args in [
        vec!["sieve", "--limit", "0"],
        vec!["perron", "--n", "100", "--t", "200"],
        vec!["report", "--limit", "10"],
        vec!["selberg-check", "--pair", "1:-2"],
        vec!["lemmas", "--threads", "0"],
    ] {
        let o = bin().args(&args).output().unwrap();
        assert_eq!(code(&o), 3, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn missing_and_malformed_inputs() {
    let d = scratch("inputs");
    let o = bin().args(["zeros-import", "--input"]).arg(d.join("absent.txt")).output().unwrap();
    assert_eq!(code(&o), 4);
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "missing-file");
    let bad = d.join("bad.txt");
    fs::write(&bad, "14.13\n12.0\n").unwrap();
    let o = bin().args(["zeros-import", "--input"]).arg(&bad).arg("--out").arg(d.join("o.txt")).output().unwrap();
    assert_eq!(code(&o), 6);
    let o = bin().args(["classify", "--t-scale", "100", "--v", "3", "--t", "150"]).current_dir(&d).output().unwrap();
    assert_eq!(code(&o), 4, "default zero table is missing");
}

#[test]
fn assertion_failure_reports_a_witness() {
    let o = bin().args(["perron", "--n", "100", "--guard", "1e-6"]).output().unwrap();
    assert_eq!(code(&o), 5);
    let rep = report(&o);
    assert_eq!(rep["passed"], false);
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "assertion");
    assert_eq!(err["assertion"], "line-within-guard-N100");
    assert!(err["witness"]["ratio"].as_f64().unwrap() > 1e-6);
}

#[test]
fn sieve_example() {
    let d = scratch("sieve");
    let out = d.join("m.csv");
    let o = bin().args(["sieve", "--limit", "1000", "--verify", "--out"]).arg(&out).output().unwrap();
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,mu,lambda,mertens"));
    let last = text.lines().last().unwrap();
    assert!(last.starts_with("1000,0,") && last.ends_with(",2"), "{last}");
    assert_eq!(report(&o)["result"]["mertens_at_limit"], 2);
}

#[test]
fn perron_example() {
    let o = bin().args(["perron", "--n", "1000", "--t", "1000"]).output().unwrap();
    assert_eq!(code(&o), 0);
    let rep = report(&o);
    let line = &rep["result"]["line"][0];
    assert_eq!(line["N"], 1000);
    assert_eq!(line["mertens_exact"], 2);
    let a = line["integral"][0].as_f64().unwrap();
    assert!((a - 2.0).abs() <= 5.0 * line["error_budget"].as_f64().unwrap());
}

#[test]
fn lemmas_example() {
    let o = bin().arg("lemmas").output().unwrap();
    assert_eq!(code(&o), 0);
    assert!(report(&o)["result"]["total_points"].as_u64().unwrap() >= 10_000);
}

#[test]
fn data_dir_comes_from_the_environment() {
    let d = scratch("env");
    let o = bin().env("MERTENS_DATA_DIR", &d).args(["zeros-generate", "--t-max", "300"]).output().unwrap();
    assert_eq!(code(&o), 0);
    assert!(d.join("zeros.txt").exists());
    let o = bin()
        .env("MERTENS_DATA_DIR", &d)
        .args(["classify", "--t-scale", "100", "--v", "3", "--t", "150"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(report(&o)["config"]["global"]["data_dir"], d.to_str().unwrap());
}

#[test]
fn seed_is_recorded_and_used() {
    let z = small_zeros();
    let run = |seed: &str| {
        let o = bin()
            .args(["classify", "--t-scale", "100", "--v", "3", "--random", "4", "--seed", seed, "--zeros"])
            .arg(z)
            .output()
            .unwrap();
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        report(&o)
    };
    let a = run("1");
    let b = run("2");
    assert_eq!(a["seed"], 1);
    assert_eq!(b["seed"], 2);
    assert_ne!(a["result"]["verdicts"], b["result"]["verdicts"]);
    assert_eq!(run("1"), a);
    let default = bin().arg("lemmas").output().unwrap();
    assert_eq!(report(&default)["seed"], 0);
}

#[test]
fn import_round_trip() {
    let d = scratch("import");
    let copy = d.join("copy.txt");
    let o = bin().args(["zeros-import", "--input"]).arg(small_zeros()).arg("--out").arg(&copy).output().unwrap();
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read(&copy).unwrap(), fs::read(small_zeros()).unwrap());
    assert_eq!(report(&o)["result"]["count"], 138);
}

#[test]
fn contour_without_coverage_names_k() {
    let o = bin().args(["contour", "--n", "100000", "--no-cap", "--zeros"]).arg(small_zeros()).output().unwrap();
    assert_eq!(code(&o), 1);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("achievable K = 8"), "{err}");
    let o = bin().args(["contour", "--n", "100000", "--zeros"]).arg(small_zeros()).output().unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(report(&o)["result"]["contour"]["K"], 8);
}

#[test]
fn census_and_explicit_csv_outputs() {
    let d = scratch("csv");
    let z = small_zeros();
    let c = d.join("census.csv");
    let o = bin().args(["census", "--t-scale", "100", "--v", "2", "--zeros"]).arg(z).arg("--out").arg(&c).output().unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = fs::read_to_string(&c).unwrap();
    assert!(rows.starts_with("t,typical,failed_criterion,margin_i,margin_ii,margin_iii"));
    assert_eq!(rows.lines().count() as u64 - 1, report(&o)["result"]["atypical_count"].as_u64().unwrap());
    let e = d.join("gw.csv");
    let o = bin()
        .args(["explicit-formula", "--pair", "1:2", "--t-center", "100", "--zeros"])
        .arg(z)
        .arg("--out")
        .arg(&e)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read_to_string(&e).unwrap().lines().count(), 3);
}
