use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn gsag(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gsag")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("gsag-cli-{name}-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn p(d: &Path, f: &str) -> String {
    d.join(f).to_str().unwrap().to_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn params_report() {
    let o = gsag(&["params", "--q", "4", "--n", "2", "--k", "2", "--K", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["N"], 192);
    assert_eq!(v["Dstar"], 46);
    assert_eq!(v["degG_bound"], 144);
    for key in ["q", "n", "k", "K", "rate", "delta_bound", "gv_verdict"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn empty_admissible_range_is_a_usage_error() {
    let o = gsag(&["params", "--q", "3", "--n", "2", "--k", "2", "--K", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("q^n(q²−q−kq−k+1)"));
    assert_eq!(gsag(&["params", "--q", "4"]).status.code(), Some(2));
    assert_eq!(gsag(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn gv_smallest_q() {
    let o = gsag(&["gv", "--k", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["smallest_beating_q"], 19);
    assert_eq!(json(&gsag(&["gv", "--k", "3"]))["smallest_beating_q"], 32);
}

#[test]
fn pipeline_exit_codes_and_determinism() {
    let d = scratch("pipe");
    let (t, m, c) = (p(&d, "t.bin"), p(&d, "m.bin"), p(&d, "c.bin"));
    let o = gsag(&["precompute", "--q", "4", "--n", "2", "--k", "2", "--K", "3", "--out", &t, "--optimistic-d", "20"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(&o)["decoder"]["B"], 385);
    std::fs::write(&m, [1u8, 0, 5, 0, 15, 0]).unwrap();
    assert_eq!(gsag(&["encode", "--tables", &t, "--in", &m, "--out", &c]).status.code(), Some(0));
    assert_eq!(std::fs::metadata(&c).unwrap().len(), 384);

    let (y1, y2) = (p(&d, "y1.bin"), p(&d, "y2.bin"));
    for y in [&y1, &y2] {
        let o = gsag(&["corrupt", "--tables", &t, "--in", &c, "--out", y, "--errors", "30", "--seed", "11"]);
        assert_eq!(o.status.code(), Some(0));
    }
    let (a, b, cw) = (std::fs::read(&y1).unwrap(), std::fs::read(&y2).unwrap(), std::fs::read(&c).unwrap());
    assert_eq!(a, b);
    let diff = a.chunks(2).zip(cw.chunks(2)).filter(|(x, y)| x != y).count();
    assert_eq!(diff, 30);
    let o = gsag(&["corrupt", "--q", "4", "--in", &c, "--out", &y1, "--errors", "193"]);
    assert_eq!(o.status.code(), Some(2));

    // With B = 385 > N = 192 no word can verify, so decoding declines.
    let r = p(&d, "r.json");
    let o = gsag(&["decode", "--tables", &t, "--in", &c, "--out", &r]);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(std::fs::read_to_string(&r).unwrap().trim(), "[]");

    let mut bytes = std::fs::read(&t).unwrap();
    bytes[200] ^= 0x40;
    let bad = p(&d, "bad.bin");
    std::fs::write(&bad, &bytes).unwrap();
    assert_eq!(gsag(&["encode", "--tables", &bad, "--in", &m, "--out", &c]).status.code(), Some(3));
    std::fs::write(&m, [1u8, 0, 99, 0, 15, 0]).unwrap();
    assert_eq!(gsag(&["encode", "--tables", &t, "--in", &m, "--out", &c]).status.code(), Some(3));
    std::fs::write(&m, [1u8, 0]).unwrap();
    assert_eq!(gsag(&["encode", "--tables", &t, "--in", &m, "--out", &c]).status.code(), Some(2));
    std::fs::write(&y1, [0u8; 10]).unwrap();
    assert_eq!(gsag(&["decode", "--tables", &t, "--in", &y1, "--out", &r]).status.code(), Some(3));
    std::fs::remove_dir_all(d).ok();
}

#[test]
fn precompute_is_byte_identical_across_runs() {
    let d = scratch("det");
    let (a, b) = (p(&d, "a.bin"), p(&d, "b.bin"));
    for f in [&a, &b] {
        let o = gsag(&["precompute", "--q", "4", "--n", "2", "--k", "2", "--K", "3", "--out", f, "--optimistic-d", "12", "--seed", "4"]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let o = gsag(&["precompute", "--q", "4", "--n", "2", "--k", "2", "--K", "3", "--out", &a, "--ell", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = gsag(&["precompute", "--q", "4", "--n", "2", "--k", "2", "--K", "3", "--out", &a, "--ell", "1", "--B", "300"]);
    assert_eq!(o.status.code(), Some(2));
    std::fs::remove_dir_all(d).ok();
}

#[test]
fn selftest_single_criteria_and_fault_injection() {
    let o = gsag(&["selftest", "--level", "ci", "--criterion", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("[PASS] 5"));
    let o = gsag(&["selftest", "--criterion", "T"]);
    assert_eq!(o.status.code(), Some(0));
    let o = gsag(&["selftest", "--criterion", "T", "--inject-fault", "g-table"]);
    assert_eq!(o.status.code(), Some(1));
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(out.contains("[FAIL] T") && out.contains("g-table digest mismatch"), "{out}");
    assert!(String::from_utf8_lossy(&o.stderr).contains("failed: T"));
    assert_eq!(gsag(&["selftest", "--criterion", "42"]).status.code(), Some(2));
}

#[test]
fn bench_reports_timings() {
    let o = gsag(&["bench", "--q", "4", "--n", "2", "--k", "2", "--K", "48", "--reps", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!(v["encode_s"].as_f64().unwrap() >= 0.0);
    assert_eq!(v["table_entries"], 192);
}
