use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_lclab"));
    c.env_remove("LCLAB_CATALOG");
    c
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lclab-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    dir
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn perimeter_row_matches_surface_ratio() {
    let dir = scratch("perimeter");
    let out = run(&["perimeter", "--measure", "cube-exp", "--n", "5", "--samples", "20000", "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let mut rdr = csv::Reader::from_path(dir.join("rows.csv")).unwrap();
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), ["n", "quantity", "estimate", "std_error", "paper_bound", "ratio"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    let identity = rows.iter().find(|r| &r[1] == "functional_perimeter_identity").expect("identity row");
    // isotropic cube of half-width w: S/(n vol) = 1/w
    let w = (3.0f64 / (6.0 * 7.0)).sqrt();
    let est: f64 = identity[2].parse().unwrap();
    assert!((est - 1.0 / w).abs() < 1e-9, "{est}");
    let ratio: f64 = identity[5].parse().unwrap();
    assert!((ratio - 1.0).abs() < 1e-9);
}

#[test]
fn conjectured_exponent_holds_for_gaussian_plane() {
    let out = run(&["bm-check", "--measure", "gaussian", "--n", "2", "--exponent", "conjecture", "--samples", "20000"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["exponent"], 0.5);
    assert_eq!(v["all_bounds_hold"], true);
}

#[test]
fn violated_bound_exits_with_status_two() {
    let k = r#"{"variant":"ball","parameters":{"radius":0.5}}"#;
    let l = r#"{"variant":"ball","parameters":{"radius":2.0}}"#;
    let out = run(&["bm-check", "--measure", "gaussian", "--n", "2", "--exponent", "20", "--bodies", k, l, "--samples", "20000"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bound violated: dimensional Brunn-Minkowski"), "{err}");
}

#[test]
fn usage_and_numeric_errors_exit_with_status_one() {
    let out = run(&["perimeter", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--measure"));
    let out = run(&["radial", "--measure", "cube-exp"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("UnsupportedVariant"));
    let out = run(&["calculus", "--op", "legendre"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn manifest_replay_is_byte_identical() {
    let dir = scratch("replay");
    let out = run(&["moment-measure", "--measure", "pexp-4", "--n", "3", "--samples", "20000", "--keep", "3", "--seed", "5", "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest = json(&dir.join("manifest.json"));
    assert_eq!(manifest["seed"], 5);
    assert_eq!(manifest["outputs"], serde_json::json!(["report.json", "rows.csv"]));
    let again = dir.join("again");
    let out = run(&["replay", dir.join("manifest.json").to_str().unwrap(), "--out", again.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["report.json", "rows.csv"] {
        assert_eq!(fs::read(dir.join(f)).unwrap(), fs::read(again.join(f)).unwrap(), "{f}");
    }

    fs::write(dir.join("rows.csv"), "tampered\n").unwrap();
    let out = run(&["replay", dir.to_str().unwrap(), "--out", dir.join("third").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("rows.csv"));
}

#[test]
fn thread_count_does_not_change_results() {
    let a = scratch("threads-1");
    let b = scratch("threads-3");
    for (dir, t) in [(&a, "1"), (&b, "3")] {
        let out = run(&["max-perimeter", "--measure", "gaussian", "--n", "2", "--samples", "5000", "--threads", t, "--out", dir.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for f in ["report.json", "rows.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn catalog_from_environment() {
    let dir = scratch("catalog");
    fs::create_dir_all(&dir).unwrap();
    let path = dir.join("catalog.json");
    fs::write(
        &path,
        r#"{"measures": {"wide": {"variant": "gaussian", "parameters": {"variance": 4.0}}},
            "bodies": {"slab": {"variant": "box", "parameters": {"half_widths": [0.5, 3.0]}}}}"#,
    )
    .unwrap();
    let out = bin().env("LCLAB_CATALOG", &path).args(["perimeter", "--measure", "wide", "--body", "slab"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["body"], "Box");
    let out = run(&["perimeter", "--measure", "wide"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn grid_pipeline_writes_header_and_values() {
    let src = scratch("grid-src");
    let dst = scratch("grid-dst");
    let out = run(&["calculus", "--op", "export", "--measure", "gaussian", "--n", "1", "--half-width", "4", "--resolution", "401", "--out", src.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let header = json(&src.join("grid.json"));
    assert_eq!(header["dim"], 1);
    assert_eq!(header["box"], 4.0);
    assert_eq!(fs::read(src.join("grid.bin")).unwrap().len(), 8 * 401);
    let out = run(&["calculus", "--op", "legendre", "--input", src.join("grid.json").to_str().unwrap(), "--out", dst.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    // ψ(x) = x²/2 + c has conjugate y²/2 − c
    let bytes = fs::read(dst.join("grid.bin")).unwrap();
    let vals: Vec<f64> = bytes.chunks(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    let c = 0.5 * (2.0 * std::f64::consts::PI).ln();
    let h = 0.02;
    for (i, v) in vals.iter().enumerate() {
        let y = -4.0 + i as f64 * h;
        if y.abs() <= 2.0 {
            assert!((v - (0.5 * y * y - c)).abs() <= h * h, "y = {y}: {v}");
        }
    }
}
