use std::fs;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use recip_core::LawReport;

fn recip(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_recip"))
        .args(args)
        .env_remove("RECIP_PMAX")
        .env_remove("RECIP_CACHE_DIR")
        .output()
        .expect("spawn recip")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn np_single_primes() {
    let o = recip(&["np", "--poly", "T^3-T-1", "--p", "59"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "59,3\n");
    let o = recip(&["np", "--poly", "T^2+1", "--p", "2"]);
    assert_eq!(stdout(&o), "2,1\n");
}

#[test]
fn np_range_matches_horner_count() {
    let o = recip(&["np", "--poly", "T^3 - 2", "--pmax", "60"]);
    assert_eq!(o.status.code(), Some(0));
    for line in stdout(&o).lines() {
        let (p, n) = line.split_once(',').unwrap();
        let p: i64 = p.parse().unwrap();
        let n: usize = n.parse().unwrap();
        let brute = (0..p).filter(|x| (x * x * x - 2).rem_euclid(p) == 0).count();
        assert_eq!(n, brute, "p = {p}");
    }
}

#[test]
fn np_rejects_bad_input() {
    assert_eq!(recip(&["np", "--poly", "T^2"]).status.code(), Some(2));
    assert_eq!(recip(&["np", "--poly", "T^2", "--p", "5"]).status.code(), Some(2));
    assert_eq!(recip(&["np", "--poly", "T^2+1", "--p", "9"]).status.code(), Some(2));
    let o = recip(&["np", "--poly", "T^3 + * 2", "--p", "5"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("position"), "{err}");
    assert!(err.contains('^'), "{err}");
}

#[test]
fn eta_expansion() {
    let o = recip(&["eta", "--spec", "1^1 23^1", "--terms", "25"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut rows = text.lines();
    assert_eq!(rows.next(), Some("n,c_n"));
    let c: Vec<i64> = rows
        .map(|r| r.split_once(',').unwrap().1.parse().unwrap())
        .collect();
    let mut want = vec![0i64; 25];
    for (n, v) in [(1, 1), (2, -1), (3, -1), (6, 1), (8, 1), (13, -1), (16, -1), (23, 1), (24, -1)] {
        want[n] = v;
    }
    assert_eq!(c, want);
}

#[test]
fn eta_tau_values() {
    let o = recip(&["eta", "--spec", "1^24", "--terms", "18"]);
    let text = stdout(&o);
    let c: Vec<i64> = text
        .lines()
        .skip(1)
        .map(|r| r.split_once(',').unwrap().1.parse().unwrap())
        .collect();
    for (p, tau) in [(2, -24), (3, 252), (5, 4830), (7, -16744), (11, 534612), (13, -577738), (17, -6905934)] {
        assert_eq!(c[p], tau);
    }
}

#[test]
fn eta_to_file_and_empty_spec() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let o = recip(&["eta", "--spec", "1^2 11^2", "--terms", "12", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).is_empty());
    assert!(fs::read_to_string(&path).unwrap().starts_with("n,c_n\n0,0\n1,1\n2,-2\n"));
    assert_eq!(recip(&["eta", "--spec", "", "--terms", "5"]).status.code(), Some(2));
}

#[test]
fn verify_exit_codes() {
    assert_eq!(recip(&["verify", "cubic23", "--pmax", "10000"]).status.code(), Some(0));
    let o = recip(&["verify", "nosuchlaw"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("torsion-split"));
    let o = recip(&["verify", "sato-tate", "--pmax", "2000", "--tolerance", "0.0001"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn json_round_trips_byte_for_byte() {
    let o = recip(&["verify", "modularity-11", "--pmax", "500", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let report = LawReport::from_json(text.trim_end()).unwrap();
    assert_eq!(report.to_json(), text.trim_end());
    assert!(report.passed);
}

#[test]
fn torsion_split_list() {
    let o = recip(&[
        "verify",
        "torsion-split",
        "--curve",
        "y^2+y=x^3-x^2",
        "--l",
        "7",
        "--pmax",
        "30000",
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let report = LawReport::from_json(stdout(&o).trim_end()).unwrap();
    assert_eq!(report.summary["split"], serde_json::json!([4831, 22051]));
}

#[test]
fn cache_is_transparent_and_survives_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let args = ["verify", "theta11", "--pmax", "400", "--format", "csv"];
    let plain = recip(&args);
    let mut with_cache: Vec<&str> = args.to_vec();
    with_cache.extend(["--cache-dir", d]);
    let cold = recip(&with_cache);
    let warm = recip(&with_cache);
    assert_eq!(plain.stdout, cold.stdout);
    assert_eq!(plain.stdout, warm.stdout);
    assert_eq!(warm.status.code(), Some(0));

    for entry in fs::read_dir(dir.path()).unwrap() {
        fs::write(entry.unwrap().path(), "not a cache file\n").unwrap();
    }
    let broken = recip(&with_cache);
    assert_eq!(broken.status.code(), Some(0));
    assert!(stderr(&broken).contains("warning"));
    assert_eq!(broken.stdout, plain.stdout);

    with_cache.push("--verify-cache");
    let checked = recip(&with_cache);
    assert_eq!(checked.status.code(), Some(0));
    assert_eq!(checked.stdout, plain.stdout);
}

#[test]
fn config_file_and_environment() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("recip.conf");
    fs::write(&conf, "# quick\npmax = 50\nformat = json\n").unwrap();
    let o = recip(&["verify", "qr", "--config", conf.to_str().unwrap()]);
    let report = LawReport::from_json(stdout(&o).trim_end()).unwrap();
    assert_eq!(report.prime_range.1, 50);

    let o = Command::new(env!("CARGO_BIN_EXE_recip"))
        .args(["verify", "qr", "--config", conf.to_str().unwrap(), "--format", "table"])
        .env("RECIP_PMAX", "70")
        .output()
        .unwrap();
    assert!(stdout(&o).contains("[3, 70]"), "{}", stdout(&o));

    fs::write(&conf, "colour = blue\n").unwrap();
    assert_eq!(recip(&["verify", "qr", "--config", conf.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn group_law_is_seeded() {
    let a = recip(&["verify", "group-law", "--seed", "7", "--json"]);
    let b = recip(&["verify", "group-law", "--seed", "7", "--json"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn jobs_do_not_change_output() {
    let one = recip(&["verify", "cyclotomic", "--pmax", "3000", "--jobs", "1", "--json"]);
    let four = recip(&["verify", "cyclotomic", "--pmax", "3000", "--jobs", "4", "--json"]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn quick_all() {
    let start = Instant::now();
    let o = recip(&["all", "--pmax", "100"]);
    let elapsed = start.elapsed();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(elapsed < Duration::from_secs(1), "{elapsed:?}");
    let text = stdout(&o);
    for id in ["qr", "cubic23", "torsion-split", "L-compare"] {
        assert!(text.lines().any(|l| l.starts_with(id) && l.contains("PASS")), "{id}");
    }
}
