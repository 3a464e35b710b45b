use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fibdomain")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Column `col` of a CSV body, header skipped.
fn column(text: &str, col: usize) -> Vec<String> {
    text.lines().skip(1).map(|l| l.split(',').nth(col).unwrap().to_string()).collect()
}

const SINGLE_ROW: &str = r#"{"kind":"rows","rows":[["1"]]}"#;

#[test]
fn transform_of_t_is_all_ones() {
    let out = run(&["transform", "--x", "witness:t", "--lambda", "linear:1,1", "-N", "8"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(column(&stdout(&out), 2), vec!["1"; 8]);
}

#[test]
fn inverse_of_unit_zero() {
    let out = run(&["transform", "--inverse", "--y", "unit:0", "--lambda", "linear:1,1", "-N", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(column(&stdout(&out), 2), ["1", "2", "9/2", "25/2"]);
}

#[test]
fn transform_of_zero() {
    let out = run(&["transform", "--x", "zero", "-N", "4"]);
    assert_eq!(column(&stdout(&out), 2), vec!["0"; 4]);
}

#[test]
fn json_reports_carry_a_schema_version() {
    for args in [
        &["transform", "--x", "ones", "-N", "3", "--json"][..],
        &["opnorm", "--A", SINGLE_ROW, "--json"],
        &["verify-paper", "--only", "fibonacci", "--json"],
    ] {
        let out = run(args);
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["schema_version"], 1, "{args:?}");
        assert_eq!(v["command"], args[0]);
    }
}

#[test]
fn parallelogram_at_p_four() {
    let out = run(&["verify-paper", "--only", "parallelogram", "--p", "4", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let d = &v["checks"][0]["details"][0];
    assert_eq!(d["lhs"], 8.0);
    assert!((d["rhs"].as_f64().unwrap() - 4.0 * 2f64.sqrt()).abs() < 1e-12);
    assert_eq!(d["verdict"], "not-equal");
}

#[test]
fn inverse_identity_at_64() {
    let out = run(&["verify-paper", "--only", "inverse-identity", "-N", "64"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("PASS inverse-identity"));
}

#[test]
fn exit_codes() {
    // verification failure: 16 bits cannot certify the power-law image to 2^-128
    assert_eq!(run(&["verify-paper", "--only", "witnesses", "--precision", "16"]).status.code(), Some(1));
    // input errors
    for args in [
        &["transform", "--x", "bogus"][..],
        &["transform", "--x", "witness:power-law"],
        &["transform", "--inverse", "--x", "ones"],
        &["verify-paper", "--only", "nope"],
        &["class", "--A", "/nonexistent/a.json"],
        &["plot-data", "--input", "/nonexistent/sweep.json"],
        &["frobnicate"],
        &["transform", "--x", "ones", "--mode", "approximate"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
    // domain errors
    for args in [
        &["class", "--A", "E", "--X", "lp:2", "--Y", "lp:3"][..],
        &["transform", "--x", "ones", "--lambda", "explicit:2,1"],
        &["opnorm", "--A", SINGLE_ROW, "--Y", "lp:3"],
        &["transform", "--x", "ones", "--p", "1/2"],
    ] {
        assert_eq!(run(args).status.code(), Some(3), "{args:?}");
    }
}

#[test]
fn same_seed_same_bytes() {
    let dense = r#"{"kind":"dense","entries":[["1","-2","3"],["1/2","0","7"],["-1","4","1/3"]]}"#;
    let args = ["class", "--A", dense, "--X", "lp:3/2", "--Y", "l1", "--seed", "7", "--json"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let mut seq = args.to_vec();
    seq.push("--sequential");
    assert_eq!(run(&seq).stdout, a.stdout);
}

#[test]
fn plot_data_sweeps() {
    let mnc = run(&["plot-data", "--A", SINGLE_ROW, "--rmax", "6"]);
    let s = column(&stdout(&mnc), 1);
    assert_eq!(s.len(), 7);
    assert!(s[1..].iter().all(|v| v == "0"));

    let norm = run(&["plot-data", "--sweep", "norm", "--x", "witness:t", "--p", "2", "-N", "12"]);
    let v: Vec<f64> = column(&stdout(&norm), 1).iter().map(|s| s.parse().unwrap()).collect();
    assert_eq!(v.len(), 12);
    assert!(v.windows(2).all(|w| w[1] > w[0]));

    let empty = run(&["plot-data", "--sweep", "norm", "--x", "witness:t", "-N", "0"]);
    assert_eq!(stdout(&empty), "N,norm\n");
}

#[test]
fn plot_data_reads_saved_reports() {
    let dir = tempfile::tempdir().unwrap();
    let saved = dir.path().join("mnc.json");
    let out = run(&["mnc", "--A", SINGLE_ROW, "--rmax", "4", "--json", "--output", saved.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let plot = run(&["plot-data", "--input", saved.to_str().unwrap()]);
    assert_eq!(stdout(&plot), "r,s\n0,1\n1,0\n2,0\n3,0\n4,0\n");

    let empty = dir.path().join("empty.json");
    std::fs::write(&empty, r#"{"sweep": []}"#).unwrap();
    assert_eq!(stdout(&run(&["plot-data", "--input", empty.to_str().unwrap()])), "r,s\n");
}

#[test]
fn mnc_reports_compactness() {
    let single = stdout(&run(&["mnc", "--A", SINGLE_ROW, "--rmax", "6"]));
    assert!(single.contains("compactness: compact"));
    let e = stdout(&run(&["mnc", "--A", "E", "--rmax", "6", "-N", "16"]));
    assert!(e.contains("compactness: evidence-noncompact"));
}

#[test]
fn dual_and_class_text() {
    let d = stdout(&run(&["dual", "--a", "unit:0", "--space", "lp:2", "--kind", "beta", "-N", "16"]));
    assert!(d.starts_with("unit:0 in beta-dual of lp:2: holds-exactly"), "{d}");
    let c = stdout(&run(&["class", "--A", SINGLE_ROW, "--X", "lp:2", "--Y", "linf", "-N", "8"]));
    assert!(c.contains("row-q-norms: holds-exactly (value 1 ± 0)"), "{c}");
}

#[test]
fn invert_and_basis() {
    let inv = stdout(&run(&["invert", "-N", "3"]));
    assert_eq!(inv, "n,k0,k1,k2\n0,1,0,0\n1,2,4,0\n2,9/2,6,9/2\n");
    let b = stdout(&run(&["basis", "--k", "1", "-N", "3"]));
    assert_eq!(b, "n,b\n0,0\n1,4\n2,6\n");
    let upper = r#"{"kind":"dense","entries":[["1","1"],["0","1"]]}"#;
    assert_eq!(run(&["invert", "--A", upper, "-N", "2"]).status.code(), Some(3));
}

#[test]
fn float_mode_tracks_exact_mode() {
    let exact = stdout(&run(&["transform", "--x", "witness:alternating", "-N", "12"]));
    let float = stdout(&run(&["transform", "--x", "witness:alternating", "-N", "12", "--mode", "float"]));
    for (e, f) in column(&exact, 2).iter().zip(column(&float, 2)) {
        let f: f64 = f.parse().unwrap();
        assert!((e.parse::<f64>().unwrap() - f).abs() < 1e-6);
    }
}
