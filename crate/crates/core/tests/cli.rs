mod common;

use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_jordan-ext"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().unwrap()
}

fn write_domain(dir: &Path, name: &str, domain: &jordan_ext::geometry::JordanDomain) {
    std::fs::write(dir.join(name), serde_json::to_string(&domain.to_file()).unwrap()).unwrap();
}

fn json_file(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn disk_dir() -> TempDir {
    let dir = TempDir::new().unwrap();
    write_domain(dir.path(), "disk.json", &common::disk(512, 1.0));
    dir
}

#[test]
fn criterion_example_matches_closed_form() {
    let dir = disk_dir();
    let out = run_in(
        dir.path(),
        &["criterion", "--domain", "disk.json", "--z0", "0,0", "--q", "1", "--h", "0.004", "--report", "c.json"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json_file(&dir.path().join("c.json"));
    let est = v["estimate"].as_f64().unwrap();
    assert!((est - 4.71).abs() < 0.02, "{est}");
    for key in ["q", "h", "refinement", "rel_diff"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["config"]["subcommand"], "criterion");
    assert_eq!(v["config"]["h"], 0.004);
    let stdout: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(stdout, v);
}

#[test]
fn extend_on_the_disk_converges() {
    let dir = disk_dir();
    let out = run_in(
        dir.path(),
        &["extend", "--domain", "disk.json", "--p", "1.5", "--nmax", "10", "--mesh", "mesh.csv", "--report", "e.json", "--assert"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json_file(&dir.path().join("e.json"));
    assert_eq!(v["series"]["verdict"], "convergent");
    assert_eq!(v["degenerate_cells"], 0);
    assert_eq!(v["config"]["n_max"], 10);
    let mesh = std::fs::read_to_string(dir.path().join("mesh.csv")).unwrap();
    assert!(mesh.starts_with("disk_x,disk_y,image_x,image_y,level,cell_id,jacobian_min\n"));
    assert_eq!(mesh.lines().count(), 1 + 4 * v["cells"].as_u64().unwrap() as usize);
}

#[test]
fn counterexample_artifacts_validate() {
    let dir = TempDir::new().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "counterexample", "--depth", "4", "--emit", "domain.json", "--emit-phi", "phi.json", "--report",
            "report.json", "--svg", "picture.svg", "--assert",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json_file(&dir.path().join("report.json"));
    assert!(report["blowup"]["certified_min"].as_f64().unwrap() >= 3.0);
    let domain = json_file(&dir.path().join("domain.json"));
    assert_eq!(domain["schema_version"], 1);
    assert_eq!(domain["config"]["depth"], 4);
    let file: jordan_ext::geometry::DomainFile = serde_json::from_value(domain).unwrap();
    assert!(file.offsets.is_some());
    let reloaded = jordan_ext::geometry::JordanDomain::from_file(&file).unwrap();
    assert_eq!(reloaded.len(), report["vertices"].as_u64().unwrap() as usize);
    let phi = json_file(&dir.path().join("phi.json"));
    assert_eq!(phi["anchors"].as_array().unwrap().len(), 1 + 60);
    let svg = std::fs::read_to_string(dir.path().join("picture.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("<path"));

    // The emitted domain feeds back into the metric pipeline.
    let out = run_in(
        dir.path(),
        &["metric", "--domain", "domain.json", "--z0", "0.5,0.5", "--h", "0.002", "--out", "field.csv"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("field.csv")).unwrap();
    assert!(csv.starts_with("x,y,d_boundary,k_value,reached\n"));
}

#[test]
fn reports_are_byte_identical_across_runs_and_thread_counts() {
    let dir = disk_dir();
    let run = |threads: &str, report: &str| {
        let out = bin()
            .current_dir(dir.path())
            .env("JORDAN_EXT_THREADS", threads)
            .args(["riemann", "--domain", "disk.json", "--pairs", "200", "--seed", "7", "--report", report])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        std::fs::read(dir.path().join(report)).unwrap()
    };
    let a = run("1", "a.json");
    let b = run("4", "b.json");
    let strip = |bytes: Vec<u8>| {
        let mut v: Value = serde_json::from_slice(&bytes).unwrap();
        v["config"]["outputs"]["report"] = Value::Null;
        serde_json::to_vec(&v).unwrap()
    };
    assert_eq!(strip(a.clone()), strip(b));
    assert_eq!(a, run("2", "a.json"));
}

#[test]
fn riemann_writes_the_correspondence_table() {
    let dir = disk_dir();
    let out = run_in(dir.path(), &["riemann", "--domain", "disk.json", "--out", "map.json", "--assert"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_file(&dir.path().join("map.json"));
    assert_eq!(v["schema_version"], 1);
    assert!(v["correspondence"].as_array().unwrap().len() >= 512);
    let file: jordan_ext::conformal::MapFile = serde_json::from_value(v).unwrap();
    jordan_ext::conformal::RiemannMap::from_file(&file).unwrap();
}

#[test]
fn validation_failures_exit_with_two() {
    let dir = disk_dir();
    for args in [
        vec!["criterion", "--domain", "disk.json", "--q", "0.5", "--h", "0.1"],
        vec!["criterion", "--domain", "disk.json", "--h", "-1"],
        vec!["extend", "--domain", "disk.json", "--p", "2"],
        vec!["criterion", "--domain", "missing.json", "--h", "0.1"],
        vec!["criterion", "--domain", "disk.json", "--z0", "3,0", "--h", "0.1"],
        vec!["metric", "--domain", "disk.json", "--h", "10"],
        vec!["counterexample", "--depth", "9"],
        vec!["criterion", "--domain", "disk.json", "--z0", "1;2", "--h", "0.1"],
        vec!["nonsense"],
    ] {
        let out = run_in(dir.path(), &args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
    let out = run_in(dir.path(), &["counterexample", "--depth", "0"]);
    let diag: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(diag["exit_code"], 2);
    assert_eq!(diag["error"], "validation");
}

#[test]
fn bad_thread_count_is_rejected() {
    let out = bin()
        .env("JORDAN_EXT_THREADS", "zero")
        .args(["counterexample", "--depth", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn inconclusive_verdict_exits_with_four_only_when_asserted() {
    let dir = disk_dir();
    // Too few levels for a ratio-based verdict.
    let args = ["extend", "--domain", "disk.json", "--p", "1.5", "--nmax", "5"];
    let out = run_in(dir.path(), &args);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["series"]["verdict"], "inconclusive");
    let mut asserted = args.to_vec();
    asserted.push("--assert");
    assert_eq!(run_in(dir.path(), &asserted).status.code(), Some(4));
}

#[test]
fn negative_coordinates_parse() {
    let dir = disk_dir();
    let out = run_in(dir.path(), &["criterion", "--domain", "disk.json", "--z0", "-0.25,0.1", "--h", "0.05"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["config"]["z0"][0], -0.25);
}
