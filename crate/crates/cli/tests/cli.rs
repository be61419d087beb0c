use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_c3tr"))
        .args(args)
        .env("C3TR_CACHE_DIR", cache)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn terms(v: &Value) -> Vec<(Vec<u64>, String)> {
    v["terms"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| {
            let n = t["n"]
                .as_array()
                .unwrap()
                .iter()
                .map(|x| x.as_u64().unwrap())
                .collect();
            (n, t["c"].as_str().unwrap().to_string())
        })
        .collect()
}

#[test]
fn correlator_examples() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["correlator", "--f", "1", "--g", "1", "--h", "1"],
        dir.path(),
    );
    assert!(out.status.success());
    assert!(out.stdout.ends_with(b"\n"));
    let v = json(&out);
    assert_eq!(
        terms(&v["correlators"][0]),
        vec![(vec![0], "1/8".to_string()), (vec![1], "-1/12".to_string())]
    );
    assert_eq!(
        v["conventions"]["line"],
        "conventions: σ_K=-1, σ_Ψrec=+1, ε=-1"
    );

    let out = run(
        &["correlator", "--f", "2", "--g", "0", "--h", "3"],
        dir.path(),
    );
    assert_eq!(
        terms(&json(&out)["correlators"][0]),
        vec![(vec![0, 0, 0], "-36".to_string())]
    );

    let out = run(&["correlator", "--g", "0", "--h", "2"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not representable"));
}

#[test]
fn hodge_examples() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["hodge", "--g", "2"], dir.path());
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["tables"][0]["f"], 1);
    assert_eq!(
        terms_of(&v["tables"][0], "bracket")[0],
        (vec![1], "-1/1440".to_string())
    );
    let dil: Vec<_> = v["tables"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t["normalized_dilaton"].clone())
        .collect();
    assert_eq!(dil.len(), 3);
    assert!(dil.iter().all(|d| *d == dil[0]));
    assert_eq!(v["dilaton_matches"], true);

    let out = run(&["hodge", "--g", "1", "--f", "2"], dir.path());
    let v = json(&out);
    assert_eq!(
        terms_of(&v["tables"][0], "bracket")[0],
        (vec![0], "7/24".to_string())
    );

    let out = run(&["hodge", "--g", "0"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

fn terms_of(v: &Value, key: &str) -> Vec<(Vec<u64>, String)> {
    terms(&serde_json::json!({ "terms": v[key] }))
}

#[test]
fn free_energy_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["free-energy", "--f", "1,2", "--g-max", "3"], dir.path());
    assert!(out.status.success());
    let v = json(&out);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    let abs = |i: usize| rows[i]["report"]["abs_f"].as_str().unwrap().to_string();
    assert_eq!(abs(0), "1/5760");
    assert_eq!(abs(2), "1/1451520");
    assert_eq!(rows[0]["report"]["f_direct"], rows[1]["report"]["f_direct"]);
    assert_eq!(v["global_epsilon"], -1);

    let out = run(&["free-energy", "--g-max", "1"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_exit_codes_and_cache_soundness() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["verify", "--f", "1,2", "--g-max", "2"];
    let cold = run(&args, dir.path());
    assert!(
        cold.status.success(),
        "{}",
        String::from_utf8_lossy(&cold.stdout)
    );
    let warm = run(&args, dir.path());
    assert_eq!(cold.stdout, warm.stdout);
    let v = json(&cold);
    assert_eq!(v["all_pass"], true);
    assert_eq!(
        v["conventions_line"],
        "conventions: σ_K=-1, σ_Ψrec=+1, ε=-1"
    );

    let text = run(
        &["verify", "--f", "1", "--g-max", "2", "--format", "text"],
        dir.path(),
    );
    let s = String::from_utf8(text.stdout).unwrap();
    assert!(s.starts_with("conventions: σ_K=-1, σ_Ψrec=+1, ε=-1\n"));
    assert!(s.contains("x-star-display"));

    let wrong = run(
        &[
            "verify",
            "--f",
            "1",
            "--g-max",
            "2",
            "--override-sign-kernel",
            "+1",
        ],
        dir.path(),
    );
    assert_eq!(wrong.status.code(), Some(1));
    let v = json(&wrong);
    let w03 = v["records"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["name"] == "golden" && r["params"] == "f=1 g=0 h=3")
        .unwrap();
    assert_eq!(w03["status"], "fail");
}

#[test]
fn corrupted_cache_is_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["correlator", "--f", "1", "--g", "1", "--h", "1"];
    let first = run(&args, dir.path());
    let file = dir.path().join("w_f1_g1_h1_km_rp.json");
    let text = std::fs::read_to_string(&file).unwrap();
    std::fs::write(&file, text.replace("\"1/8\"", "\"1/9\"")).unwrap();
    let second = run(&args, dir.path());
    assert!(second.status.success());
    assert_eq!(first.stdout, second.stdout);
    assert!(String::from_utf8_lossy(&second.stderr).contains("recomputed"));
    assert_eq!(std::fs::read_to_string(&file).unwrap(), text);
}

#[test]
fn genus_cap_is_enforced() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["verify", "--g-max", "7"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["correlator", "--g", "7", "--h", "1"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}
