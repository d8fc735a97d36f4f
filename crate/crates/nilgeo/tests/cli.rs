use std::process::{Command, Output};

use nilgeo::config::parse_config;
use nilgeo::state::{format_state, parse_state};
use nilgeo_core::TangentState;
use proptest::prelude::*;

fn nilgeo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nilgeo"))
        .args(args)
        .output()
        .expect("spawn nilgeo")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn end_state(o: &Output) -> TangentState {
    parse_state(stdout(o).trim(), 5, 3).expect("flow prints a state record")
}

const GENERIC: &str = "v: 0.1 0.2 -0.1 0.3 0; z: 0 0 0; V: 0.3 -0.2 0.4 0.1 0.2; Z: 0.4 0.2 0.4";

#[test]
fn unknown_suite_is_usage_error() {
    assert_eq!(
        nilgeo(&["verify", "--suite", "bogus"]).status.code(),
        Some(2)
    );
    assert_eq!(nilgeo(&["verify", "--no-such-flag"]).status.code(), Some(2));
}

#[test]
fn spectral_suite_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = nilgeo(&[
        "verify",
        "--suite",
        "spectral",
        "--seed",
        "42",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    let names: Vec<&str> = json["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(names.contains(&"gw_certificate"));
    assert_eq!(json["pass"], true);
    assert!(text.trim_end().ends_with('}') && text.contains("\"wall_time\""));
}

#[test]
fn unwritable_output_is_io_error() {
    let o = nilgeo(&[
        "verify",
        "--suite",
        "algebra",
        "--out",
        "/nonexistent-dir/r.json",
    ]);
    assert_eq!(o.status.code(), Some(3));
    let o = nilgeo(&[
        "--config",
        "/nonexistent-dir/c.toml",
        "verify",
        "--suite",
        "algebra",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn straight_line_when_center_vanishes() {
    let o = nilgeo(&[
        "flow",
        "--manifold",
        "M",
        "--method",
        "rk4",
        "--t",
        "1",
        "--state",
        "v: 0 0 0 0 0; z: 0 0 0; V: 1 2 3 4 5; Z: 0 0 0",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let s = end_state(&o);
    for (a, b) in s.base.v.iter().zip([1.0, 2.0, 3.0, 4.0, 5.0]) {
        assert!((a - b).abs() < 1e-12);
    }
    // z(1) = ½∫[sV, V] = 0.
    assert!(s.base.z.iter().all(|x| x.abs() < 1e-12));
}

#[test]
fn exact_and_rk4_flows_agree() {
    for m in ["M", "Mprime"] {
        let e = end_state(&nilgeo(&[
            "flow",
            "--manifold",
            m,
            "--method",
            "exact",
            "--t",
            "10",
            "--state",
            GENERIC,
        ]));
        let r = end_state(&nilgeo(&[
            "flow",
            "--manifold",
            m,
            "--method",
            "rk4",
            "--t",
            "10",
            "--state",
            GENERIC,
        ]));
        let d = e
            .base
            .v
            .iter()
            .chain(&e.fiber_v)
            .zip(r.base.v.iter().chain(&r.fiber_v))
            .fold(0.0f64, |d, (a, b)| d.max((a - b).abs()));
        assert!(d < 1e-8, "{m}: {d}");
        assert!(e.distance(&r) < 1e-6, "{m}: full state");
    }
}

#[test]
fn exact_flow_rejects_degenerate_center() {
    let o = nilgeo(&[
        "flow",
        "--manifold",
        "M",
        "--method",
        "exact",
        "--t",
        "1",
        "--state",
        "v: 0 0 0 0 0; z: 0 0 0; V: 1 0 0 0 0; Z: 0 0 1",
    ]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("rk4"));
}

#[test]
fn deformation_flow_and_bad_inputs() {
    let rec = "v: 0 0 0 0; z: 0 0; V: 1 0 0 1; Z: 0.5 0";
    assert_eq!(
        nilgeo(&[
            "flow",
            "--manifold",
            "defo:0.5",
            "--method",
            "rk4",
            "--t",
            "1",
            "--state",
            rec
        ])
        .status
        .code(),
        Some(0)
    );
    assert_eq!(
        nilgeo(&[
            "flow",
            "--manifold",
            "N",
            "--method",
            "rk4",
            "--t",
            "1",
            "--state",
            rec
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        nilgeo(&["flow", "--manifold", "M", "--t", "1", "--state", rec])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn closed_geodesic_from_seed() {
    for m in ["M", "Mprime"] {
        let o = nilgeo(&[
            "closed-geodesic",
            "--manifold",
            m,
            "--seed",
            "1",
            "--epsilon",
            "0.1",
        ]);
        assert_eq!(o.status.code(), Some(0), "{m}");
        let out = stdout(&o);
        assert!(out.contains("a_in_gamma: exact_pass"), "{out}");
        assert!(out.contains("rotation: exact_pass"));
        assert!(out.lines().any(|l| l.starts_with("tau_over_pi: ")));
    }
}

#[test]
fn closed_geodesic_on_cone_fails() {
    let target = "v: 0 0 0 0 0; z: 0 0 0; V: 0.3 0.1 0.2 0.1 0.4; Z: 0 0 1";
    let o = nilgeo(&[
        "closed-geodesic",
        "--manifold",
        "M",
        "--state",
        target,
        "--epsilon",
        "1e-9",
    ]);
    assert_eq!(o.status.code(), Some(5));
    assert_eq!(
        nilgeo(&["closed-geodesic", "--epsilon", "0"]).status.code(),
        Some(2)
    );
}

#[test]
fn integrals_and_brackets_at_a_state() {
    let o = nilgeo(&["integrals", "--state", GENERIC]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 8);
    let o = nilgeo(&["poisson", "--state", GENERIC]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 29);
}

#[test]
fn criteria_and_cih_commands() {
    let o = nilgeo(&["criteria", "--manifold", "Mprime", "--samples", "200"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("butler_fraction: 1.0"));
    assert_eq!(
        nilgeo(&["criteria", "--manifold", "defo:0.25", "--samples", "50"])
            .status
            .code(),
        Some(0)
    );
    let o = nilgeo(&["cih", "--manifold", "M", "--bound", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("pass: true"));
}

#[test]
fn config_overrides() {
    let t = parse_config("fd_step = 1e-5\nbracket_tol = 2e-6\n").unwrap();
    assert_eq!((t.fd_step, t.bracket_tol), (1e-5, 2e-6));
    assert!(parse_config("fd_stp = 1e-5").is_err());
    assert!(parse_config("bracket_tol = -1.0").is_err());
}

#[test]
fn state_record_errors() {
    assert!(parse_state("v: 1 2 3 4 5; z: 0 0 0; V: 1 2 3 4 5", 5, 3).is_err());
    assert!(parse_state("v: 1 2 3 4; z: 0 0 0; V: 1 2 3 4 5; Z: 0 0 0", 5, 3).is_err());
    assert!(parse_state("v: 1 2 3 4 x; z: 0 0 0; V: 1 2 3 4 5; Z: 0 0 0", 5, 3).is_err());
    assert!(parse_state(
        "v: 1 2 3 4 5; v: 0 0 0 0 0; z: 0 0 0; V: 1 2 3 4 5; Z: 0 0 0",
        5,
        3
    )
    .is_err());
}

proptest! {
    #[test]
    fn state_record_roundtrip(x in prop::collection::vec(-1e6f64..1e6, 16)) {
        let st = TangentState::from_vec(&x, 5, 3);
        prop_assert_eq!(parse_state(&format_state(&st), 5, 3).unwrap(), st);
    }
}
