use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::NamedTempFile;

const BIN: &str = env!("CARGO_BIN_EXE_tbell");

fn tbell(args: &[&str]) -> Output {
    tbell_env(args, &[])
}

fn tbell_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_clear()
        .envs(env.iter().copied())
        .output()
        .expect("tbell runs")
}

fn json(args: &[&str]) -> Value {
    let out = tbell(args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("JSON document")
}

fn toml_file(body: &str) -> NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(".toml").tempfile().unwrap();
    f.write_all(body.as_bytes()).unwrap();
    f
}

fn path(f: &NamedTempFile) -> &str {
    f.path().to_str().unwrap()
}

fn close(v: &Value, expected: f64, tol: f64) {
    let x = v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"));
    assert!((x - expected).abs() <= tol, "{x} vs {expected}");
}

#[test]
fn manifest_is_complete() {
    let doc = json(&["lhv", "--target", "chsh", "--seed", "4", "--shards", "3"]);
    let m = &doc["manifest"];
    assert_eq!(m["command"], "lhv");
    assert_eq!(m["seed"], 4);
    assert_eq!(m["shards"], 3);
    assert_eq!(m["tool_version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(m["parameters"]["target"], "chsh");
}

#[test]
fn default_seed_and_shards_are_echoed() {
    let doc = json(&["lhv", "--target", "game"]);
    assert_eq!(doc["manifest"]["seed"], 0);
    assert!(doc["manifest"]["shards"].as_u64().unwrap() >= 1);
}

#[test]
fn correlate_equal_settings() {
    let f =
        toml_file("[[steps]]\nsetting = [0.0, 0.0, 1.0]\n[[steps]]\nsetting = [0.0, 0.0, 1.0]\n");
    let doc = json(&["correlate", path(&f), "--exact"]);
    assert_eq!(doc["results"]["exact"]["value"], 1.0);
    assert_eq!(doc["results"]["sampled"], Value::Null);
    assert_eq!(
        doc["results"]["pairwise_decomposition"]["pair_product"],
        1.0
    );
}

#[test]
fn correlate_first_and_third_of_three() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let f = toml_file(&format!(
        "[[steps]]\nsetting = [1.0, 0.0, 0.0]\n[[steps]]\nsetting = [{h}, 0.0, {h}]\n[[steps]]\nsetting = [0.0, 0.0, 1.0]\n"
    ));
    let doc = json(&[
        "correlate",
        path(&f),
        "--select",
        "1,3",
        "--trials",
        "200000",
    ]);
    close(&doc["results"]["exact"]["value"], 0.5, 1e-9);
    let sampled = &doc["results"]["sampled"];
    let stderr = sampled["stderr"].as_f64().unwrap();
    close(&sampled["value"], 0.5, 5.0 * stderr);
    assert_eq!(sampled["trials"], 200_000);
    assert_eq!(doc["results"]["pairwise_decomposition"], Value::Null);
}

#[test]
fn correlate_four_steps_decomposes() {
    let f = toml_file(
        "[[steps]]\nsetting = [0.6, 0.0, 0.8]\n\
         [[steps]]\nsetting = [0.0, 1.0, 0.0]\nunitary = { axis = [1.0, 0.0, 0.0], angle = 1.0 }\n\
         [[steps]]\nsetting = [0.0, 0.6, 0.8]\n\
         [[steps]]\nsetting = [1.0, 0.0, 0.0]\n",
    );
    let doc = json(&["correlate", path(&f), "--exact", "--initial", "0,0,-1"]);
    let d = &doc["results"]["pairwise_decomposition"];
    close(
        &d["full_chain_exact"],
        d["pair_product"].as_f64().unwrap(),
        2e-9,
    );
    assert_eq!(
        doc["manifest"]["parameters"]["initial"],
        serde_json::json!([0.0, 0.0, -1.0])
    );
}

#[test]
fn chsh_optimize_and_sum() {
    let doc = json(&[
        "chsh",
        "--b1",
        "1,0,0",
        "--b2",
        "0,0,1",
        "--optimize",
        "--sum",
        "--trials",
        "20000",
    ]);
    let r = &doc["results"];
    close(&r["analytic"]["value"], 2.0 * 2f64.sqrt(), 5e-9);
    close(&r["search"]["value"], 2.0 * 2f64.sqrt(), 1e-6);
    close(&r["sum"]["value"], 4.0 * 2f64.sqrt(), 1e-8);
    assert_eq!(r["sum"]["exceeds_spatial_bound"], true);
    assert_eq!(r["references"]["classical_bound"], 2.0);
    let stderr = r["montecarlo"]["stderr"].as_f64().unwrap();
    close(&r["montecarlo"]["value"], 2.0 * 2f64.sqrt(), 5.0 * stderr);
}

#[test]
fn chsh_equal_settings_give_two() {
    let doc = json(&[
        "chsh", "--a1", "0,1,0", "--a2", "0,1,0", "--b1", "0,1,0", "--b2", "0,1,0", "--trials",
        "1000",
    ]);
    assert_eq!(doc["results"]["analytic"]["value"], 2.0);
    assert_eq!(doc["results"]["search"], Value::Null);
}

#[test]
fn game_optimal_and_all_z() {
    let doc = json(&["game", "--optimal", "--trials", "200000"]);
    let r = &doc["results"];
    close(
        &r["success_rate"],
        0.853553391,
        4.0 * r["stderr"].as_f64().unwrap(),
    );
    assert_eq!(r["classical_bound"], 0.75);
    assert_eq!(r["classical_witness"]["strategy"]["name"], "output y");
    assert_eq!(r["per_input"].as_array().unwrap().len(), 4);

    let f = toml_file("a1 = [0, 0, 1]\na2 = [0, 0, 1]\nb1 = [0, 0, 1]\nb2 = [0, 0, 1]\n");
    let doc = json(&["game", "--quad", path(&f), "--trials", "1000"]);
    assert_eq!(doc["results"]["analytic_rate"], 0.75);
}

#[test]
fn lhv_targets() {
    let chsh = json(&["lhv", "--target", "chsh"]);
    assert_eq!(chsh["results"]["maximum"], 2.0);
    assert_eq!(chsh["results"]["enumeration_size"], 16);
    assert_eq!(
        chsh["results"]["witness"],
        serde_json::json!({"a1": 1, "a2": 1, "b1": 1, "b2": 1})
    );
    let game = json(&["lhv", "--target", "game"]);
    assert_eq!(game["results"]["maximum"], 0.75);
    assert_eq!(game["results"]["enumeration_size"], 1024);
    assert_eq!(game["results"]["witness"]["name"], "output y");
    assert_eq!(game["results"]["two_bit_memory"]["success"], 1.0);
}

#[test]
fn spatial_states() {
    let ghz = json(&["spatial", "--state", "ghz"]);
    assert_eq!(ghz["results"]["report"]["sum"], 4.0);
    let sx = json(&["spatial", "--state", "singlet-x"]);
    close(&sx["results"]["report"]["b12"], 2.0 * 2f64.sqrt(), 5e-9);
    assert_eq!(sx["results"]["report"]["b23"], 0.0);
    let sweep = json(&["spatial", "--samples", "300"]);
    assert!(sweep["results"]["max_sum"].as_f64().unwrap() <= 4.0 + 1e-9);
    assert_eq!(sweep["results"]["samples"], 300);
    assert_eq!(sweep["results"]["references"]["spatial_sum_bound"], 4.0);
}

#[test]
fn csv_has_manifest_header_and_rows() {
    let out = tbell(&["chsh", "--optimize", "--trials", "1000", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let header: Vec<&str> = text.lines().take_while(|l| l.starts_with('#')).collect();
    assert_eq!(header[0], "# command: chsh");
    let params = header[1].strip_prefix("# parameters: ").unwrap();
    let params: Value = serde_json::from_str(params).unwrap();
    assert_eq!(params["trials"], 1000);
    let rows: Vec<&str> = text.lines().skip(header.len()).collect();
    assert_eq!(rows[0], "quantity,value");
    let analytic = rows
        .iter()
        .find(|r| r.starts_with("analytic.value,"))
        .unwrap();
    let v: f64 = analytic.split(',').nth(1).unwrap().parse().unwrap();
    assert!((v - 2.0 * 2f64.sqrt()).abs() < 5e-9);
    assert!(rows.contains(&"references.tsirelson_bound,2.82842712"));
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("lhv.json");
    let out = tbell(&[
        "lhv",
        "--target",
        "chsh",
        "--shards",
        "1",
        "--output",
        target.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let written = std::fs::read(&target).unwrap();
    assert_eq!(
        written,
        tbell(&["lhv", "--target", "chsh", "--shards", "1"]).stdout
    );
}

#[test]
fn environment_variables_set_flags() {
    let out = tbell_env(
        &["chsh"],
        &[
            ("TBELL_OPTIMIZE", "true"),
            ("TBELL_TRIALS", "500"),
            ("TBELL_SEED", "11"),
            ("TBELL_SHARDS", "2"),
            ("TBELL_FORMAT", "json"),
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["manifest"]["seed"], 11);
    assert_eq!(doc["manifest"]["shards"], 2);
    assert_eq!(doc["manifest"]["parameters"]["trials"], 500);
    assert_eq!(doc["manifest"]["parameters"]["optimize"], true);
}

#[test]
fn seed_changes_sampled_payload() {
    let a = tbell(&[
        "game",
        "--optimal",
        "--trials",
        "1000",
        "--seed",
        "1",
        "--shards",
        "1",
    ])
    .stdout;
    let b = tbell(&[
        "game",
        "--optimal",
        "--trials",
        "1000",
        "--seed",
        "2",
        "--shards",
        "1",
    ])
    .stdout;
    assert_ne!(a, b);
}

fn exit_code(args: &[&str]) -> i32 {
    let out = tbell(args);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(!stderr.trim().is_empty(), "no diagnostic for {args:?}");
    out.status.code().unwrap()
}

#[test]
fn input_errors_exit_2() {
    assert_eq!(exit_code(&["chsh", "--optimize", "--b1", "1,0"]), 2);
    assert_eq!(exit_code(&["chsh", "--optimize", "--trials", "0"]), 2);
    assert_eq!(exit_code(&["game"]), 2);
    assert_eq!(exit_code(&["lhv", "--target", "poker"]), 2);
    assert_eq!(exit_code(&["correlate", "/nonexistent/chain.toml"]), 2);
    let bad = toml_file("[[steps]]\nsetting = \"up\"\n");
    assert_eq!(exit_code(&["correlate", path(&bad)]), 2);
    let ok = toml_file("[[steps]]\nsetting = [0.0, 0.0, 1.0]\n");
    assert_eq!(exit_code(&["correlate", path(&ok), "--select", "0"]), 2);
}

#[test]
fn invariant_violations_exit_3() {
    assert_eq!(
        exit_code(&["chsh", "--optimize", "--b1", "1,0,0", "--b2", "1,0,0"]),
        3
    );
    assert_eq!(
        exit_code(&["chsh", "--optimize", "--b1", "0,0,1", "--b2", "0,0,-1"]),
        3
    );
    assert_eq!(exit_code(&["chsh", "--optimize", "--b1", "1,1,0"]), 3);
    let long: String = (0..17)
        .map(|_| "[[steps]]\nsetting = [0.0, 0.0, 1.0]\n")
        .collect();
    let f = toml_file(&long);
    assert_eq!(exit_code(&["correlate", path(&f), "--exact"]), 3);
    let ok = toml_file("[[steps]]\nsetting = [0.0, 0.0, 1.0]\n");
    assert_eq!(
        exit_code(&["correlate", path(&ok), "--initial", "1,1,1"]),
        3
    );
    assert_eq!(exit_code(&["correlate", path(&ok), "--select", "2"]), 3);
}
