//! On-disk formats: round trips, column layouts and the library entry point.

mod common;

use jordan_ext::cli::{run, Exit, Outputs, RunConfig};
use jordan_ext::counterexample::{assemble_domain, phi_file, PhiFile};
use jordan_ext::crosscut::BoundaryParam;
use jordan_ext::geometry::{DomainFile, JordanDomain, Point};
use jordan_ext::metrics::{quasihyperbolic_field, MetricGrid};
use serde_json::Value;
use tempfile::TempDir;

#[test]
fn domain_json_round_trips_with_offsets() {
    let cd = assemble_domain(2, None).unwrap();
    let text = serde_json::to_string(&cd.domain.to_file()).unwrap();
    let file: DomainFile = serde_json::from_str(&text).unwrap();
    let back = JordanDomain::from_file(&file).unwrap();
    assert_eq!(back.split_vertices(), cd.domain.split_vertices());
    assert_eq!(back.resolution_hint(), cd.domain.resolution_hint());
}

#[test]
fn plain_domain_json_is_accepted_and_bad_ones_rejected() {
    let ok: DomainFile =
        serde_json::from_str(r#"{"vertices":[[0,0],[1,0],[1,1],[0,1]],"resolution_hint":0.1}"#).unwrap();
    assert!(ok.offsets.is_none());
    assert_eq!(JordanDomain::from_file(&ok).unwrap().area(), 1.0);
    let bowtie: DomainFile =
        serde_json::from_str(r#"{"vertices":[[0,0],[1,1],[1,0],[0,1]],"resolution_hint":0.1}"#).unwrap();
    assert!(JordanDomain::from_file(&bowtie).is_err());
    assert!(serde_json::from_str::<DomainFile>(r#"{"vertices":[[0,0]]}"#).is_err());
}

#[test]
fn field_csv_has_the_documented_columns() {
    let g = MetricGrid::build(common::square(), 0.1).unwrap();
    let f = quasihyperbolic_field(&g, Point::ORIGIN).unwrap();
    let mut buf = Vec::new();
    f.write_csv(&mut buf).unwrap();
    let mut rdr = csv::Reader::from_reader(buf.as_slice());
    assert_eq!(rdr.headers().unwrap(), vec!["x", "y", "d_boundary", "k_value", "reached"]);
    let rows: Vec<(f64, f64, f64, f64, bool)> = rdr.deserialize().map(Result::unwrap).collect();
    assert_eq!(rows.len(), g.len());
    for (x, y, d, k, reached) in rows {
        assert!(reached && k >= 0.0);
        assert!((d - (1.0 - x.abs()).min(1.0 - y.abs())).abs() < 1e-12);
    }
}

#[test]
fn phi_file_round_trips() {
    let cd = assemble_domain(3, None).unwrap();
    let phi = phi_file(&cd);
    let back: PhiFile = serde_json::from_str(&serde_json::to_string(&phi).unwrap()).unwrap();
    assert_eq!(back, phi);
    for a in &phi.anchors {
        let p = cd.points[a.vertex];
        assert_eq!([a.x, a.y, a.offset[0], a.offset[1]], [p.hi.x, p.hi.y, p.lo.x, p.lo.y]);
    }
}

fn write(dir: &TempDir, name: &str, v: &impl serde::Serialize) -> std::path::PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, serde_json::to_string(v).unwrap()).unwrap();
    path
}

#[test]
fn extend_accepts_a_parametrization_file() {
    let dir = TempDir::new().unwrap();
    let domain = common::rectangle(2.0, 1.0);
    let dpath = write(&dir, "rect.json", &domain.to_file());
    let ppath = write(&dir, "phi.json", &BoundaryParam::uniform(domain).to_file());
    let cfg = RunConfig {
        subcommand: "extend".into(),
        domain: Some(dpath),
        phi: Some(ppath),
        n_max: 8,
        outputs: Outputs {
            mesh: Some(dir.path().join("mesh.csv")),
            ..Default::default()
        },
        ..Default::default()
    };
    let out = run(&cfg).unwrap();
    assert_eq!(out.exit, Exit::Success);
    assert_eq!(out.report["series"]["schema_version"], 1);
    assert_eq!(out.report["boundary_vertex_error"], 0.0);
    assert!(out.report["energy"]["energy"].as_f64().unwrap() > 0.0);
    let mesh = std::fs::read_to_string(dir.path().join("mesh.csv")).unwrap();
    let mut rdr = csv::Reader::from_reader(mesh.as_bytes());
    assert_eq!(
        rdr.headers().unwrap(),
        vec!["disk_x", "disk_y", "image_x", "image_y", "level", "cell_id", "jacobian_min"]
    );
}

#[test]
fn every_report_embeds_config_and_schema() {
    let dir = TempDir::new().unwrap();
    let dpath = write(&dir, "sq.json", &common::square().to_file());
    let base = RunConfig {
        domain: Some(dpath),
        h: Some(0.05),
        pairs: 50,
        ..Default::default()
    };
    for sub in ["metric", "criterion", "riemann"] {
        let cfg = RunConfig {
            subcommand: sub.into(),
            ..base.clone()
        };
        let v: Value = run(&cfg).unwrap().report;
        assert_eq!(v["schema_version"], 1, "{sub}");
        assert_eq!(v["config"]["subcommand"], sub);
        assert_eq!(v["config"]["seed"], 1);
    }
    let cfg = RunConfig {
        subcommand: "nonsense".into(),
        ..base
    };
    assert_eq!(run(&cfg).unwrap_err().exit, Exit::Validation);
}
