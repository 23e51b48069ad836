use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mgopt::report::Report;

fn mgopt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mgopt"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn problem(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

const TWO_PINS: &str = r#"{"dimension":2,"pins":[[-0.5,0.0],[0.5,0.0]],"total_length":2.0,"functional":"energy"}"#;

#[test]
fn two_pins_give_the_t_graph() {
    let dir = tempfile::tempdir().unwrap();
    let p = problem(dir.path(), "two.json", TWO_PINS);
    let out = mgopt(&[p.to_str().unwrap(), "--functional", "energy"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("d0(k(d1()n()))"), "{text}");
    assert!(text.contains("-4.58333333333e-1"), "{text}");
}

#[test]
fn json_report_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let p = problem(dir.path(), "two.json", TWO_PINS);
    let mut reports = Vec::new();
    for name in ["a.json", "b.json"] {
        let out = dir.path().join(name);
        let status = mgopt(&[p.to_str().unwrap(), "--oracle-check", "32", "--out", out.to_str().unwrap()]).status;
        assert!(status.success());
        reports.push(fs::read(out).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
    let report = Report::from_json(std::str::from_utf8(&reports[0]).unwrap()).unwrap();
    assert_eq!(report.optimum.topology.code(), "d0(k(d1()n()))");
    let oracle = report.oracle.unwrap();
    assert_eq!(oracle.elements_per_edge, 32);
    assert!((3.5..=4.5).contains(&oracle.richardson_ratio));
    // every float carries 17 significant digits
    let value: serde_json::Value = serde_json::from_slice(&reports[0]).unwrap();
    let text = String::from_utf8(reports[0].clone()).unwrap();
    assert!(text.contains(&format!("{:.16e}", value["optimum"]["energy"].as_f64().unwrap())));
}

#[test]
fn oracle_check_defaults_to_128_elements() {
    let dir = tempfile::tempdir().unwrap();
    let p = problem(dir.path(), "two.json", TWO_PINS);
    let out = mgopt(&[p.to_str().unwrap(), "--oracle-check"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("128 per edge"));
}

#[test]
fn svg_is_well_formed_with_one_element_per_vertex_and_edge() {
    let dir = tempfile::tempdir().unwrap();
    let p = problem(
        dir.path(),
        "tri.json",
        r#"{"dimension":2,"pins":[[0.0,0.8660254037844386],[-0.5,0.0],[0.5,0.0]],"total_length":2.2,"functional":"energy"}"#,
    );
    let svg = dir.path().join("tri.svg");
    let json = dir.path().join("tri.json.out");
    let out = mgopt(&[
        p.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
        "--out",
        json.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = fs::read_to_string(svg).unwrap();
    let doc = roxmltree::Document::parse(&text).expect("well-formed XML");
    let root = doc.root_element();
    assert_eq!(root.tag_name().name(), "svg");
    assert_eq!(root.attribute("version"), Some("1.1"));
    let count = |tag: &str| root.children().filter(|n| n.tag_name().name() == tag).count();
    let report = Report::from_json(&fs::read_to_string(json).unwrap()).unwrap();
    let t = &report.optimum.topology;
    assert_eq!(count("circle"), t.vertex_count());
    assert_eq!(count("line") + count("path"), t.edge_count());
    assert_eq!(count("text"), usize::from(t.has_neumann()));
}

#[test]
fn infeasible_length_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = problem(dir.path(), "two.json", TWO_PINS);
    let out = mgopt(&[p.to_str().unwrap(), "--length", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_problem_names_the_location() {
    let dir = tempfile::tempdir().unwrap();
    let p = problem(dir.path(), "bad.json", "{\"dimension\":2,\n\"pins\":[[0.0,0.0]],\n\"functional\":\"energy\"}");
    let out = mgopt(&[p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("total_length") && err.contains("line 3"), "{err}");
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = mgopt(&["--frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("Usage"));
}

#[test]
fn topology_listing_is_deterministic() {
    let a = mgopt(&["--list-topologies", "3"]);
    let b = mgopt(&["--list-topologies", "3"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(String::from_utf8(a.stdout).unwrap().lines().count(), 26);
}

#[test]
fn single_topology_search() {
    let dir = tempfile::tempdir().unwrap();
    let p = problem(dir.path(), "two.json", TWO_PINS);
    let out = mgopt(&[p.to_str().unwrap(), "--topology", "d0(d1())", "--seeds", "2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("-3.33333333333e-1"), "{text}");
    let out = mgopt(&[p.to_str().unwrap(), "--topology", "d0(k(d1()d2()))"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn graph_file_evaluation() {
    let dir = tempfile::tempdir().unwrap();
    let p = problem(
        dir.path(),
        "seg.json",
        r#"{"vertices":[{"id":0,"role":"dirichlet","pin":0},{"id":1,"role":"free"}],"edges":[{"id":0,"u":0,"v":1,"length":1.0}]}"#,
    );
    let out = mgopt(&["--graph", p.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("-1.66666666667e-1"), "{text}");
    assert!(text.contains("2.46740110027e0"), "{text}");
}
