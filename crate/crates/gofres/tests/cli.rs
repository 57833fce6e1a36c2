//! End-to-end runs of the `gofres` binary: exit codes, report contents and
//! byte-for-byte golden outputs under `fixtures/golden/`.

mod common;

use std::process::{Command, Output};

fn gofres(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gofres")).args(args).output().expect("binary runs")
}

fn fx(name: &str) -> String {
    common::fixture(name).to_str().unwrap().to_string()
}

fn ok(args: &[&str]) -> String {
    let out = gofres(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> (i32, String) {
    let out = gofres(args);
    (out.status.code().unwrap(), String::from_utf8(out.stderr).unwrap())
}

/// `(re, im, multiplicity)` rows of a resonance CSV.
fn rows(csv: &str) -> Vec<(f64, f64, usize)> {
    csv.lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect()
}

#[test]
fn resonances_of_model_graphs() {
    let s2 = 2f64.sqrt();
    for (file, expected) in [("parabolic.json", 1.0), ("modular_q2.json", s2), ("tree_q2.json", 1.0 / s2)] {
        let csv = ok(&["resonances", &fx(file)]);
        let r = rows(&csv);
        assert_eq!(r.len(), 2, "{file}");
        assert!((r[0].0 + expected).abs() < 1e-12 && (r[1].0 - expected).abs() < 1e-12, "{file}: {r:?}");
        assert!(r.iter().all(|x| x.1 == 0.0 && x.2 == 1));
        common::check_golden(&format!("golden/resonances_{}", file.replace(".json", ".csv")), &csv);
    }
}

#[test]
fn resonances_golden_elliptic() {
    let json = ok(&["resonances", &fx("elliptic_f2.json"), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    // (l^2 - 4)(l^2 + 2)^2 (l^4 - 2 l^2 + 2), with the l^2 factor split off
    assert_eq!(v["polynomial"], "lambda^10 - 2*lambda^8 - 10*lambda^6 + 8*lambda^4 + 8*lambda^2 - 32");
    assert_eq!(v["mu_power"], 2);
    common::check_golden("golden/resonances_elliptic_f2.json", &json);
    let csv = ok(&["resonances", &fx("elliptic_f3.json")]);
    let total: usize = rows(&csv).iter().map(|r| r.2).sum();
    assert_eq!(total, 14);
    common::check_golden("golden/resonances_elliptic_f3.csv", &csv);
}

#[test]
fn states_reports() {
    let s = ok(&["states", &fx("modular_q2.json"), "--mu", "1.4142135623730951,0"]);
    assert!(s.contains("kernel_dim 1\n") && s.contains("  l2 true\n"), "{s}");
    assert!(s.contains("    vertex 0 1.000000000000e+00 0.000000000000e+00\n"), "{s}");
    common::check_golden("golden/states_modular_q2.txt", &s);

    let s = ok(&["states", &fx("elliptic_f3.json"), "--mu", "1,0"]);
    assert!(s.contains("  l2 false\n") && !s.contains("  l2 true\n"), "{s}");
    common::check_golden("golden/states_elliptic_f3_mu1.txt", &s);

    let (c, err) = code(&["states", &fx("modular_q2.json"), "--mu", "2,0"]);
    assert_eq!(c, 4);
    assert!(err.contains("not a resonance") && err.contains("nearest resonance 1.414"), "{err}");
}

#[test]
fn random_clouds() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("a.csv");
    let svg = dir.path().join("a.svg");
    let args = |c: &std::path::Path, s: &std::path::Path| {
        vec![
            "random".to_string(),
            "--n".into(),
            "50".into(),
            "--q".into(),
            "6".into(),
            "--f".into(),
            "175".into(),
            "--seed".into(),
            "3".into(),
            "--csv".into(),
            c.to_str().unwrap().into(),
            "--svg".into(),
            s.to_str().unwrap().into(),
        ]
    };
    let a = args(&csv, &svg);
    ok(&a.iter().map(String::as_str).collect::<Vec<_>>());
    let text = std::fs::read_to_string(&csv).unwrap();
    let r = rows(&text);
    assert_eq!(r.len(), 2);
    let s = 1.0 / 6f64.sqrt();
    assert!((r[0].0 + s).abs() < 1e-12 && (r[1].0 - s).abs() < 1e-12 && r[0].2 == 50 && r[1].2 == 50);
    let picture = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(picture.matches("fill=\"red\"").count(), 2);

    let (csv2, svg2) = (dir.path().join("b.csv"), dir.path().join("b.svg"));
    let b = args(&csv2, &svg2);
    ok(&b.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(std::fs::read(&csv).unwrap(), std::fs::read(&csv2).unwrap());
    assert_eq!(std::fs::read(&svg).unwrap(), std::fs::read(&svg2).unwrap());

    let mixed = ok(&["random", "--n", "20", "--q", "2", "--c", "5", "--f", "5", "--seed", "11"]);
    assert!(mixed.starts_with("re,im,multiplicity,n,q,c,f,seed\n"));
    common::check_golden("golden/random_n20_q2_c5_f5_seed11.csv", &mixed);

    let (c, err) = code(&["random", "--n", "3", "--q", "2"]);
    assert_eq!(c, 3, "{err}");
    assert!(err.contains("cannot build the random graph"));
}

#[test]
fn zeta_reports() {
    let s = ok(&["zeta", &fx("curve_f2.json")]);
    assert!(s.contains("N1 1\n") && s.contains("P(T) 2*T^2 - 2*T + 1\n") && s.contains("weil_rh pass"), "{s}");
    common::check_golden("golden/zeta_f2.txt", &s);

    let s = ok(&["zeta", &fx("curve_f3.json"), "--link", &fx("elliptic_f3.json")]);
    assert!(s.contains("P(T) 3*T^2 + 1\n") && s.contains("divides true\n"), "{s}");
    common::check_golden("golden/zeta_f3_link.txt", &s);

    let s = ok(&["zeta", &fx("curve_f2.json"), "--link", &fx("modular_q2.json")]);
    assert!(s.contains("divides false\n"));

    let s = ok(&["zeta", &fx("projective_line_q2.json")]);
    assert!(s.contains("genus 0\n") && s.contains("P(T) 1\n") && s.contains("N1 3\n"), "{s}");
}

#[test]
fn kernel_reports() {
    let s = ok(&["kernel", "--model", "tree", "--q", "2", "--mu", "0.9,0.3", "--d", "2", "--verify-depth", "6"]);
    let residual: f64 = s.lines().find_map(|l| l.strip_prefix("tree_identity_residual ")).unwrap().parse().unwrap();
    assert!(residual < 1e-12, "{s}");
    common::check_golden("golden/kernel_tree.txt", &s);
    let s = ok(&["kernel", "--model", "cusp", "--q", "3", "--mu", "0.7,-0.2", "--k1", "-2", "--k2", "3"]);
    common::check_golden("golden/kernel_cusp.txt", &s);
    let (c, _) = code(&["kernel", "--model", "cusp", "--q", "3", "--mu", "1,0"]);
    assert_eq!(c, 3);
}

#[test]
fn validation_and_exit_codes() {
    assert_eq!(ok(&["validate", &fx("elliptic_f3.json")]), "valid\n");
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"q": 2, "vertices": [{"id": 0, "stab": "1/1"}], "edges": [], "cusps": [{"vertex": 0, "weight": "1/1"}]}"#)
        .unwrap();
    let out = gofres(&["validate", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stdout).contains("degree"));
    assert_eq!(code(&["resonances", bad.to_str().unwrap()]).0, 3);

    let malformed = dir.path().join("malformed.json");
    std::fs::write(&malformed, "{\"q\": 2,\n  \"vertices\": [{\"id\": 0, \"stab\": \"2/2\"}], \"edges\": []}").unwrap();
    let (c, err) = code(&["resonances", malformed.to_str().unwrap()]);
    assert_eq!(c, 2);
    assert!(err.contains("line 2") && err.contains("lowest terms"), "{err}");

    assert_eq!(code(&["resonances", &fx("tree_q2.json"), "--bogus"]).0, 2);
    assert_eq!(code(&["resonances", &fx("tree_q2.json"), "--format", "xml"]).0, 2);
    assert_eq!(code(&["resonances", "/nonexistent/graph.json"]).0, 1);
}
