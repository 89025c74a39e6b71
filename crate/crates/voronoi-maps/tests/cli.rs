//! End-to-end checks of the command-line surface: flags, formats,
//! determinism, and the exit-code contract (0 ok, 1 verification failure,
//! 2 input error).

use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_voronoi-maps"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn law_csv_small_size() {
    let out = run(&["law", "--n", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("# schema: voronoi-maps/law/1"));
    assert!(text.contains("# normalization: 11/2"));
    assert!(text.contains("p,n,weight,probability,scaled_deviation"));
    // mass 4/11, 3/11, 4/11 on the interior
    assert!(text.contains("1,0.5,2,3.6363636363636365e-1"));
    // byte-identical on the second run
    let again = run(&["law", "--n", "2"]);
    assert_eq!(text, stdout(&again));
}

#[test]
fn law_n1_puts_all_mass_in_the_middle() {
    let out = run(&["law", "--n", "1", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[1]["probability"], 1.0);
    assert_eq!(rows[0]["probability"], 0.0);
}

#[test]
fn law_float_backend_matches_exact() {
    let exact = run(&["law", "--n", "6", "--format", "json"]);
    let float = run(&["law", "--n", "6", "--backend", "float", "--format", "json"]);
    let ve: serde_json::Value = serde_json::from_str(&stdout(&exact)).unwrap();
    let vf: serde_json::Value = serde_json::from_str(&stdout(&float)).unwrap();
    for (re, rf) in ve["rows"]
        .as_array()
        .unwrap()
        .iter()
        .zip(vf["rows"].as_array().unwrap())
    {
        let pe = re["probability"].as_f64().unwrap();
        let pf = rf["probability"].as_f64().unwrap();
        assert!((pe - pf).abs() < 1e-10, "{pe} vs {pf}");
    }
}

#[test]
fn mgf_rows_and_limit() {
    let out = run(&["mgf", "--n", "4", "--mu", "0,1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("mu,expectation,limit,relative_gap"));
    assert!(text.contains("1.7182818284590451e0")); // e - 1
}

#[test]
fn verify_recursions_passes() {
    let out = run(&["verify", "recursions", "--order", "10", "--smax", "12"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["passed"], true);
}

#[test]
fn verify_oracle_and_parity_pass() {
    for target in ["oracle", "parity"] {
        let out = run(&["verify", target, "--edges", "3"]);
        assert!(out.status.success(), "{target} failed");
        let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        assert_eq!(v["passed"], true);
    }
}

#[test]
fn verify_bijections_respects_thread_env() {
    let out = bin()
        .args(["verify", "bijections", "--edges", "3"])
        .env("VORONOI_MAPS_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
}

#[test]
fn verify_scaling_passes() {
    let out = run(&["verify", "scaling", "--grid", "default"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["passed"], true);
    // residuals and tolerances are reported per check
    assert!(v["checks"][0]["residual"].is_number());
}

#[test]
fn bijection_demo_and_file_round_trip() {
    let out = run(&["bijection", "--demo", "path3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("# cell areas: 1/2 1/2"));
    assert!(text.contains("# parity: odd s=1"));
    assert!(text.contains("# roundtrip identity: true"));

    // feed a map document from a file
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("square.map");
    std::fs::write(
        &path,
        "map/1\n\
         darts 8\n\
         edge 0 1\nedge 2 3\nedge 4 5\nedge 6 7\n\
         vertex 0 : 0 7\nvertex 1 : 1 2\nvertex 2 : 3 4\nvertex 3 : 5 6\n\
         mark v1 0\nmark v2 2\n\
         end\n",
    )
    .unwrap();
    let out = run(&["bijection", "--input", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("# general mark distance: 1"));
    assert!(text.contains("# roundtrip identity: true"));
}

#[test]
fn exit_codes_for_bad_input() {
    // malformed map file: input error, exit 2
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.map");
    std::fs::write(&path, "map/1\ndarts 2\nedge 0 0\nvertex 0 : 0 1\nend\n").unwrap();
    let out = run(&["bijection", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    // law beyond the built order: input error, exit 2
    let out = run(&["law", "--n", "5", "--order", "3"]);
    assert_eq!(out.status.code(), Some(2));

    // unknown verify target
    let out = run(&["verify", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("law.csv");
    let out = run(&["law", "--n", "2", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("# schema: voronoi-maps/law/1"));
}
