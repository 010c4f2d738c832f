use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn epdyn(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_epdyn"))
        .arg("--out-dir")
        .arg(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = epdyn(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

/// Header and rows, comment lines skipped.
fn table(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let split = |l: &str| l.split(',').map(str::to_string).collect::<Vec<_>>();
    let header = split(lines.next().unwrap());
    (header, lines.map(split).collect())
}

fn f(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn spectrum_collapses_at_qubit_ep2b() {
    let dir = TempDir::new().unwrap();
    let g: f64 = 0.5;
    let v = 1.0 - (1.0 - g * g).sqrt();
    let gamma_half = ((g.powi(4) - (2.0 - g * g) * v * v) / (2.0 * (1.0 - g * g))).sqrt();
    let range = format!("{v}:{v}:1");
    ok(dir.path(), &["spectrum", "--family", "hq", "--g", "0.5", "--param-range", &range]);
    let (_, rows) = table(&dir.path().join("spectrum.csv"));
    let near: Vec<_> = rows.iter().filter(|r| (f(&r[1]).abs() + (f(&r[2]) + gamma_half).abs()) < 1e-5).collect();
    assert_eq!(near.len(), 2, "{rows:?}");
    assert!(near.iter().all(|r| r[5] == "resonance"));
}

#[test]
fn end_dot_search_matches_closed_form() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["ep", "locate", "--family", "hd", "--g", "0.3"]);
    let (header, rows) = table(&dir.path().join("ep.csv"));
    assert_eq!(header[3], "param");
    let expect = 2.0 * (1.0_f64 - 0.09).sqrt();
    let mut found: Vec<f64> = rows.iter().map(|r| f(&r[3])).collect();
    found.sort_by(f64::total_cmp);
    assert_eq!(found.len(), 2);
    assert!((found[0] + expect).abs() < 1e-8 && (found[1] - expect).abs() < 1e-8, "{found:?}");
}

#[test]
fn locate3_finds_one_triple() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["ep", "locate3", "--n", "4"]);
    let (_, rows) = table(&dir.path().join("ep3.csv"));
    assert_eq!(rows.len(), 1);
    let r = &rows[0];
    assert_eq!((r[0].as_str(), r[6].as_str(), r[7].as_str()), ("hn", "3", "A"));
    assert!((f(&r[2]) - 0.0914).abs() < 1e-3 && (f(&r[3]) + 1.9581).abs() < 1e-3, "{r:?}");
}

#[test]
fn decoupled_qubit_oscillates() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["survival", "--family", "hq", "--g", "0", "--v", "0.7", "--tmax", "10", "--points", "41", "--method", "lattice"]);
    let (_, rows) = table(&dir.path().join("survival.csv"));
    assert_eq!(rows.len(), 41);
    for r in &rows {
        let t = f(&r[0]);
        assert!((f(&r[1]) - (0.7 * t).cos().powi(2)).abs() < 1e-10, "{r:?}");
    }
}

#[test]
fn survival_overlays_approximants() {
    let dir = TempDir::new().unwrap();
    ok(
        dir.path(),
        &["survival", "--family", "hd", "--g", "0.2", "--at-ep", "0", "--tmax", "20", "--points", "21", "--approximant", "zeno-d", "--plot"],
    );
    let (header, rows) = table(&dir.path().join("survival.csv"));
    assert_eq!(header, ["t", "P", "method", "model_family", "g", "param"]);
    let zeno: Vec<_> = rows.iter().filter(|r| r[2] == "ZENO_D").collect();
    assert_eq!(zeno.len(), 20, "t = 0 is skipped");
    for r in zeno {
        let t = f(&r[0]);
        assert!((f(&r[1]) - (1.0 - 0.04 * t * t)).abs() < 1e-12, "{r:?}");
    }
    assert!(dir.path().join("survival.py").exists());
}

#[test]
fn fit_recovers_half_powers() {
    let dir = TempDir::new().unwrap();
    let mut text = String::from("t,P,method,model_family,g,param\n");
    for i in 0..=200 {
        let t = 0.1 * i as f64;
        let p = 1.0 - 0.01 * t.sqrt() + 0.002 * t;
        text.push_str(&format!("{t},{p},lattice,hd,0.1,-1.9\n"));
    }
    fs::write(dir.path().join("input.csv"), text).unwrap();
    let input = dir.path().join("input.csv");
    ok(dir.path(), &["fit", "--input", input.to_str().unwrap(), "--terms", "3"]);
    let (header, rows) = table(&dir.path().join("fit.csv"));
    assert_eq!(header, ["exponent", "coefficient"]);
    let coeff: Vec<f64> = rows[..3].iter().map(|r| f(&r[1])).collect();
    assert!((coeff[0] + 0.01).abs() < 1e-9 && (coeff[1] - 0.002).abs() < 1e-9 && coeff[2].abs() < 1e-9, "{coeff:?}");
    assert_eq!(rows[3], ["rms", "t_min", "t_max", "condition"]);
    assert!(f(&rows[4][0]) < 1e-10);
    assert_eq!(f(&rows[4][2]), 20.0);
    assert!(dir.path().join("fit.residuals.csv").exists());
}

#[test]
fn manifest_rerun_is_byte_identical() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["survival", "--family", "hd", "--g", "0.1", "--eps", "-1.5", "--tmax", "5", "--points", "11"]);
    let first = fs::read(dir.path().join("survival.csv")).unwrap();
    let manifest = dir.path().join("survival.csv.manifest.json");
    let again = TempDir::new().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_epdyn"))
        .arg("--manifest")
        .arg(&manifest)
        .arg("--out-dir")
        .arg(again.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(first, fs::read(again.path().join("survival.csv")).unwrap());
    let m: serde_json::Value = serde_json::from_slice(&fs::read(&manifest).unwrap()).unwrap();
    let digest = m["config_sha256"].as_str().unwrap();
    assert!(String::from_utf8_lossy(&first).starts_with(&format!("# manifest-sha256: {digest}\n")));
}

#[test]
fn plot_scripts_follow_schema() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["sweep", "--n", "4", "--g-range", "0.05:0.1:0.05", "--eps-range=-2:-1.9:0.1"]);
    let sweep = dir.path().join("sweep.csv");
    ok(dir.path(), &["plot", "--input", sweep.to_str().unwrap()]);
    let script = fs::read_to_string(dir.path().join("sweep.py")).unwrap();
    assert!(script.contains("read(\"sweep.csv\")") && script.contains("triple spread"));

    let bogus = dir.path().join("bogus.csv");
    fs::write(&bogus, "a,b\n1,2\n").unwrap();
    let out = epdyn(dir.path(), &["plot", "--input", bogus.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(!dir.path().join("bogus.py").exists());
}

#[test]
fn failures_exit_nonzero_with_one_line() {
    let dir = TempDir::new().unwrap();
    for args in [
        &["survival", "--family", "hd", "--g=-1", "--tmax", "10"][..],
        &["ep", "locate", "--family", "hd", "--g", "1.5", "--closed-form"][..],
        &["spectrum", "--g", "0.1", "--param-range", "0:1:0.5"][..],
    ] {
        let out = epdyn(dir.path(), args);
        assert!(!out.status.success(), "{args:?}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert_eq!(err.trim_end().lines().count(), 1, "{err}");
        assert!(err.starts_with("error: "), "{err}");
    }
}
