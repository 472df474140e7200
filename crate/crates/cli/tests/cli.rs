use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bianchi")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn invalid_m_exits_2() {
    for m in ["1", "3", "4", "0", "-7"] {
        let out = run(&["compute", "-m", m]);
        assert_eq!(out.status.code(), Some(2), "m = {m}");
        assert!(!out.stderr.is_empty());
    }
    assert_eq!(run(&["compute"]).status.code(), Some(2));
    assert_eq!(run(&["fixture-check", "-m", "5"]).status.code(), Some(2));
    assert_eq!(run(&["compute", "-m", "2", "--out", "x.svg"]).status.code(), Some(2));
}

#[test]
fn compute_m6_json() {
    let r = json(&["compute", "-m", "6", "--format", "json"]);
    assert_eq!(r["cusps"], 2);
    assert_eq!(r["edge_orbits"], 15);
    assert_eq!(r["H1_rank"], 2);
    assert_eq!(r["H2_rank"], 1);
    assert_eq!(r["H3_rank"], 0);
    assert_eq!(r["tori"][1]["cusp"], "1/2*sqrt(-6)");
}

#[test]
fn checks_pass_for_m2() {
    let t = json(&["verify-theorem", "-m", "2", "--format", "json"]);
    assert_eq!(t["holds"], true);
    assert_eq!(t["x_infinity_bounds"], true);
    let a = json(&["alpha", "-m", "2", "--format", "json"]);
    assert_eq!(a["degrees"][1]["kernel_rank"], 1);
    let l = json(&["les", "-m", "2", "--format", "json"]);
    assert_eq!(l["holds"], true);
}

#[test]
fn text_output_names_the_checks() {
    let out = run(&["verify-theorem", "-m", "7"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("PASS"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn fixture_check_passes() {
    let r = json(&["fixture-check", "--format", "json"]);
    assert_eq!(r["ker_d1_rank"], 8);
    assert_eq!(r["im_d2_rank"], 6);
    assert_eq!(r["h1_rank"], 2);
}

#[test]
fn dump_and_load_cells() {
    let dir = tempfile::tempdir().unwrap();
    let cells = dir.path().join("m2.json");
    let cells = cells.to_str().unwrap();
    let direct = json(&["compute", "-m", "2", "--format", "json", "--dump-cells", cells]);
    let loaded = json(&["compute", "--load-cells", cells, "--format", "json"]);
    assert_eq!(direct, loaded);
    // -m disagreeing with the file is an input error
    assert_eq!(run(&["compute", "-m", "5", "--load-cells", cells]).status.code(), Some(2));
    // unknown schema
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(cells).unwrap()).unwrap();
    v["schema"] = "other".into();
    std::fs::write(cells, v.to_string()).unwrap();
    assert_eq!(run(&["compute", "--load-cells", cells]).status.code(), Some(2));
}

#[test]
fn figures_are_written() {
    let dir = tempfile::tempdir().unwrap();
    for fig in ["imaginary-plane", "bottom-facets"] {
        let path = dir.path().join(format!("{fig}.svg"));
        let out = run(&["compute", "-m", "2", "--figure", fig, "--out", path.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let svg = std::fs::read_to_string(&path).unwrap();
        assert!(svg.contains("<svg") && svg.trim_end().ends_with("</svg>"));
    }
}

#[test]
fn failed_verification_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let cells = dir.path().join("m6.json");
    let cells = cells.to_str().unwrap();
    assert!(run(&["compute", "-m", "6", "--dump-cells", cells]).status.success());
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(cells).unwrap()).unwrap();
    // flip the sign of the second torus in the boundary of the 3-cell
    let torus = v["compactified"]["tori"][1]["cell2"].as_u64().unwrap();
    let entries = v["compactified"]["complex"]["boundaries"][2]["entries"].as_array_mut().unwrap();
    let e = entries.iter_mut().find(|e| e[0].as_u64() == Some(torus)).unwrap();
    e[2] = "-1".into();
    std::fs::write(cells, v.to_string()).unwrap();
    let out = run(&["verify-theorem", "--load-cells", cells]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("boundary"));
}
