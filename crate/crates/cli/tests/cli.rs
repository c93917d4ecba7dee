use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn hsd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hsd"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = hsd(args);
    assert!(
        out.status.success(),
        "hsd {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hsd-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn analyze_builtins() {
    let d = json(&["analyze", "bspline-2"]);
    assert_eq!(d["sum_rules"]["order"], 2);
    assert_eq!(d["smoothness"]["sm_estimate"], 1.0);
    assert_eq!(d["hermite"]["is_hermite_mask"], true);
    assert_eq!(d["r"], 1);

    let d = json(&["analyze", "dirac"]);
    assert_eq!(d["sum_rules"]["order"], 0);
    assert_eq!(d["decision"]["verdict"], "FailsNecessaryCondition");

    let d = json(&["analyze", "hermite-cubic"]);
    assert_eq!(d["sum_rules"]["order"], 4);
    assert_eq!(d["r"], 2);
    assert_eq!(d["hermite"]["is_hermite_mask"], true);
    assert_eq!(d["decision"]["verdict"], "ConvergentInC^1");
    assert_eq!(d["smoothness"]["rho"].as_array().unwrap().len(), 10);
}

#[test]
fn analyze_flags() {
    let d = json(&[
        "analyze",
        "bspline-3",
        "--levels",
        "4",
        "--p",
        "2",
        "--m-target",
        "1",
    ]);
    assert_eq!(d["smoothness"]["rho"].as_array().unwrap().len(), 4);
    assert_eq!(d["smoothness"]["p"], "2");
    assert_eq!(d["decision"]["m_target"], 1);
    let d = json(&["analyze", "bspline-4", "--max-order", "2"]);
    assert_eq!(d["sum_rules"]["order"], 2);
}

#[test]
fn construct_examples() {
    let out = stdout(&["construct", "--r", "1", "--m", "1", "--support", "0:2"]);
    let d: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(d["offset"], 0);
    assert_eq!(
        d["coeffs"],
        serde_json::json!([[["1/4"]], [["1/2"]], [["1/4"]]])
    );

    let out = hsd(&[
        "construct",
        "--r",
        "2",
        "--m",
        "3",
        "--support",
        "-1:1",
        "--interpolatory",
    ]);
    assert!(out.status.success());
    let d: Value = serde_json::from_slice(&out.stdout).unwrap();
    let builtin: Value =
        serde_json::from_str(include_str!("../../core/masks/hermite-cubic.json")).unwrap();
    assert_eq!(d["coeffs"], builtin["coeffs"]);
    assert_eq!(d["offset"], builtin["offset"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("matching jet"));
}

#[test]
fn construct_infeasible_exits_2() {
    let out = hsd(&["construct", "--r", "2", "--m", "3", "--support", "0:0"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("infeasible"), "{err}");
    assert!(err.contains("equations"), "{err}");
}

#[test]
fn construct_output_analyzes_to_requested_accuracy() {
    let dir = scratch("construct");
    for (r, m, support) in [("1", "3", "-2:2"), ("2", "3", "-1:1"), ("1", "2", "0:3")] {
        let path = dir.join(format!("r{r}m{m}.json"));
        let p = path.to_str().unwrap();
        let out = hsd(&[
            "construct",
            "--r",
            r,
            "--m",
            m,
            "--support",
            support,
            "--output",
            p,
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(String::from_utf8_lossy(&out.stdout).contains("matching jet"));
        let d = json(&["analyze", p, "--levels", "4"]);
        let want: u64 = m.parse::<u64>().unwrap() + 1;
        assert!(
            d["sum_rules"]["order"].as_u64().unwrap() >= want,
            "r={r} m={m}"
        );
    }
}

#[test]
fn subdivide_delta_gives_hat_samples() {
    let csv = stdout(&[
        "subdivide",
        "bspline-2",
        "--levels",
        "8",
        "--input",
        "delta",
    ]);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,v_1_1"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2 * 256 + 1);
    // Samples 2ⁿa_n(k) trace the hat on [0, 2] one grid step behind.
    for (k, row) in rows.iter().enumerate() {
        let (_, v) = row.split_once(',').unwrap();
        let t = (k as i64 + 1).min(512 - k as i64 - 1).max(0);
        let want = if t == 256 {
            "1".to_string()
        } else {
            simplify(t, 256)
        };
        assert_eq!(v, want, "row {k}");
    }
}

fn simplify(n: i64, d: i64) -> String {
    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    if n == 0 {
        return "0".into();
    }
    let g = gcd(n, d);
    if d / g == 1 {
        format!("{}", n / g)
    } else {
        format!("{}/{}", n / g, d / g)
    }
}

#[test]
fn subdivide_from_file_and_float() {
    let dir = scratch("subdivide");
    let w0 = dir.join("w0.json");
    std::fs::write(
        &w0,
        r#"{"name":"w0","rows":1,"cols":2,"offset":0,"coeffs":[[["0","1"]],[["1","1"]]]}"#,
    )
    .unwrap();
    let csv = stdout(&[
        "subdivide",
        "hermite-cubic",
        "--levels",
        "1",
        "--input",
        w0.to_str().unwrap(),
    ]);
    // The line x = t with (value, slope) data is reproduced at the midpoint.
    assert!(csv.lines().any(|l| l == "1/2,1/2,1"), "{csv}");
    let csv = stdout(&["subdivide", "bspline-2", "--levels", "2", "--float"]);
    assert!(csv.contains("2.5000000000000000e-1"), "{csv}");
}

#[test]
fn cascade_matches_subdivision() {
    let cascade = stdout(&["cascade", "hermite-cubic", "--levels", "6"]);
    let subdivide = stdout(&[
        "subdivide",
        "hermite-cubic",
        "--levels",
        "6",
        "--window",
        "-2:2",
    ]);
    assert_eq!(cascade, subdivide);
    let fine = stdout(&[
        "cascade",
        "hermite-cubic",
        "--levels",
        "3",
        "--sample-level",
        "1",
        "--correction",
    ]);
    assert_eq!(fine.lines().count(), 1 + 4 * 16 + 1);
}

#[test]
fn factor_bspline() {
    let d = json(&["factor", "bspline-2", "--order", "2"]);
    assert_eq!(
        d["V"]["coeffs"],
        serde_json::json!([[["1"]], [["-2"]], [["1"]]])
    );
    assert_eq!(d["b"]["coeffs"], serde_json::json!([[["1/4"]]]));
    for (_, ok) in d["verification"].as_object().unwrap() {
        assert_eq!(ok, true);
    }
    let dir = scratch("factor");
    let out = hsd(&[
        "factor",
        "hermite-cubic",
        "--order",
        "4",
        "--output-dir",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    for f in ["U", "U_inv", "a_ring", "V", "b", "report"] {
        assert!(dir.join(format!("{f}.json")).exists(), "{f}");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(hsd(&["analyze", "no-such-mask"]).status.code(), Some(2));
    assert_eq!(
        hsd(&["factor", "bspline-2", "--order", "3"]).status.code(),
        Some(3)
    );
    assert_eq!(hsd(&["bogus"]).status.code(), Some(2));
    let dir = scratch("bad");
    let bad = dir.join("bad.json");
    std::fs::write(
        &bad,
        r#"{"name":"x","rows":1,"cols":1,"offset":0,"coeffs":[[["1/0"]]]}"#,
    )
    .unwrap();
    assert_eq!(
        hsd(&["analyze", bad.to_str().unwrap()]).status.code(),
        Some(2)
    );
    // â(0) = I₂ has 1 as a double eigenvalue.
    let id = dir.join("id.json");
    std::fs::write(
        &id,
        r#"{"name":"id","rows":2,"cols":2,"offset":0,"coeffs":[[["1","0"],["0","1"]]]}"#,
    )
    .unwrap();
    assert_eq!(
        hsd(&["factor", id.to_str().unwrap(), "--order", "1"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn deterministic_output() {
    for args in [
        &["analyze", "hermite-cubic"][..],
        &["subdivide", "bspline-3", "--levels", "5"],
        &["cascade", "bspline-2", "--levels", "4", "--float"],
        &["factor", "hermite-cubic", "--order", "4"],
        &[
            "construct",
            "--r",
            "2",
            "--m",
            "3",
            "--support",
            "-1:1",
            "--interpolatory",
        ],
    ] {
        assert_eq!(stdout(args), stdout(args), "{args:?}");
    }
}
