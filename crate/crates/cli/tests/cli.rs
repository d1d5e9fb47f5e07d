use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn cdc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cdc"))
        .args(args)
        .env("CDC_THREADS", "2")
        .output()
        .expect("spawn cdc")
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn construct(dir: &TempDir, parity: &str) -> PathBuf {
    let path = dir.path().join(format!("{parity}.json"));
    let out = cdc(&[
        "construct",
        "--q",
        "2",
        "--k",
        "2",
        "--r",
        "2",
        "--parity",
        parity,
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    path
}

#[test]
fn constructed_codes_verify() {
    let dir = TempDir::new().unwrap();
    for (parity, gens, size) in [("odd", 33, "33759"), ("even", 4, "1020")] {
        let path = construct(&dir, parity);
        assert_eq!(
            read_json(&path)["generators"].as_array().unwrap().len(),
            gens
        );
        for mode in ["exact", "criterion"] {
            let out = cdc(&["verify", "--code", path.to_str().unwrap(), "--mode", mode]);
            assert_eq!(out.status.code(), Some(0));
            let r = stdout_json(&out);
            assert_eq!(r["verified_size"], size);
            assert_eq!(r["min_distance"], 2);
        }
    }
}

#[test]
fn corrupted_generator_is_named() {
    let dir = TempDir::new().unwrap();
    let path = construct(&dir, "odd");
    let mut code = read_json(&path);
    // span{1, ξ} is the subfield GF(4), linear over more than GF(2)
    let mut rows = vec![vec![0u32; 10], vec![0u32; 10]];
    rows[0][0] = 1;
    rows[1][1] = 1;
    code["generators"][7]["basis"] = serde_json::json!(rows);
    std::fs::write(&path, serde_json::to_vec(&code).unwrap()).unwrap();
    let out = cdc(&["verify", "--code", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("generator 7 is not a Sidon space"), "{err}");
    let out = cdc(&["sidon-check", "--code", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let r = stdout_json(&out);
    assert_eq!(r["generators"][7]["sidon"], false);
    assert_eq!(r["generators"][7]["orbit_size"], "341");
}

#[test]
fn subfield_orbit_has_distance_two_k() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("subfield.json");
    let out = cdc(&[
        "construct",
        "--q",
        "2",
        "--k",
        "2",
        "--subfield",
        "5",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(read_json(&path)["claimed_min_distance"], 4);
    let out = cdc(&[
        "verify",
        "--code",
        path.to_str().unwrap(),
        "--mode",
        "exact",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = stdout_json(&out);
    assert_eq!(r["min_distance"], 4);
    assert_eq!(r["verified_size"], "341");
}

#[test]
fn exhausted_budget_exits_three() {
    let dir = TempDir::new().unwrap();
    let path = construct(&dir, "odd");
    let out = cdc(&[
        "verify",
        "--code",
        path.to_str().unwrap(),
        "--mode",
        "exact",
        "--budget",
        "1000",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let out = cdc(&[
        "construct",
        "--q",
        "2",
        "--k",
        "2",
        "--r",
        "2",
        "--parity",
        "odd",
        "--max-generators",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn polynomial_pipeline() {
    let file = data("three_polys_gf4.json");
    let out = cdc(&["poly", "--file", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = stdout_json(&out);
    assert_eq!(r["big_n"], 14);
    assert_eq!(r["size"], "49149");
    assert_eq!(r["min_distance"], 4);
    assert_eq!(r["conditions"]["rank_condition"], true);
    assert_eq!(r["binary_conditions"]["coefficient_condition"], true);
}

#[test]
fn polynomial_rank_failure_prints_witness() {
    let file = data("rank_failure_gf4.json");
    let out = cdc(&["poly", "--file", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("rank condition fails"));
    let r = stdout_json(&out);
    assert_eq!(r["big_n"], 6);
    assert_eq!(r["conditions"]["rank_condition"], false);
    assert!(r["conditions"]["rank_witness"]["alpha"].is_array());
}

#[test]
fn polynomial_bad_s_is_input_error() {
    let file = data("three_polys_gf4.json");
    for s in ["0", "2"] {
        let out = cdc(&["poly", "--file", file.to_str().unwrap(), "--s", s]);
        assert_eq!(out.status.code(), Some(4));
    }
}

#[test]
fn bounds_and_table() {
    let out = cdc(&["bounds", "--q", "2", "--n", "20", "--k", "5", "--d", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let r = stdout_json(&out);
    assert_eq!(r["bounds"][0]["exact"], r["bounds"][1]["exact"]);
    assert_eq!(r["ratio_to_bound"], "223200/524287");
    let out = cdc(&["bounds", "--q", "2", "--n", "20", "--k", "5", "--d", "7"]);
    assert_eq!(out.status.code(), Some(4));
    let out = cdc(&["bounds", "--q", "2"]);
    assert_eq!(out.status.code(), Some(4));

    let out = cdc(&[
        "table", "--row", "odd", "--row", "five-k", "--q", "3", "--k", "3", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[1].starts_with("odd,3,3,2,15,"), "{}", lines[1]);
    assert!(lines[1].ends_with(",0.488,0.480"), "{}", lines[1]);
    assert!(lines[2].starts_with("five-k,3,3,2,15,"), "{}", lines[2]);
    assert!(lines[2].ends_with(",0.488,0.474"), "{}", lines[2]);
}

#[test]
fn simulation_and_manifest_digest() {
    let dir = TempDir::new().unwrap();
    let path = construct(&dir, "odd");
    let mut digests = Vec::new();
    for run in 0..2 {
        let manifest = dir.path().join(format!("m{run}.json"));
        let out = cdc(&[
            "simulate",
            "--code",
            path.to_str().unwrap(),
            "--orbits",
            "1",
            "--trials",
            "1000",
            "--seed",
            "5",
            "--manifest",
            manifest.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        let r = stdout_json(&out);
        assert_eq!(r["codebook_size"], 1023);
        assert_eq!(r["successes"], 1000);
        assert_eq!(r["guarantee_active"], true);
        let m = read_json(&manifest);
        assert_eq!(m["command"], "simulate");
        assert_eq!(m["tower"]["t"], 5);
        digests.push(m["result_sha256"].as_str().unwrap().to_string());
    }
    assert_eq!(digests[0], digests[1]);

    let out = cdc(&[
        "simulate",
        "--code",
        path.to_str().unwrap(),
        "--orbits",
        "1",
        "--erasures",
        "1",
        "--trials",
        "200",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = stdout_json(&out);
    assert_eq!(r["guarantee_active"], false);
}
