//! Scenario round-trip, verify hermeticity, emitted files, and exit codes.

use std::process::Command;

use oscsync_cli::config::{
    emit_scenario, parse_scenario, InitialSection, ScenarioConfig, ZoomSection,
};
use oscsync_cli::{output, report};
use proptest::prelude::*;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_oscsync"))
}

fn config_strategy() -> impl Strategy<Value = ScenarioConfig> {
    (
        1u32..400,                // tau in units of 1e-2
        1u32..2000,               // horizon multiple of tau
        0.01f64..2.0,             // delta
        2.5f64..50.0,             // m over delta
        0.1f64..4.0,              // omega
        0u64..=(i64::MAX as u64), // seed
        0usize..6,                // dense substeps
        prop::bool::ANY,          // adjustable?
        0.001f64..0.2,            // eps_slack
        prop::bool::ANY,          // seeded?
        prop::bool::ANY,          // zero_average
    )
        .prop_filter_map(
            "tau off the sampling boundary",
            |(t, h, delta, mrel, omega, seed, dense, adjustable, eps, seeded, zavg)| {
                let tau = t as f64 * 1e-2;
                if (omega * tau).sin().abs() < 1e-6 {
                    return None;
                }
                let m = delta * mrel;
                if adjustable && m <= 2.0 * delta {
                    return None;
                }
                let initial = if seeded {
                    InitialSection {
                        mode: "seeded".into(),
                        scale: 0.5,
                        gamma0: 0.1,
                        nu0: -0.2,
                        zero_average: zavg,
                        r: None,
                        v: None,
                    }
                } else {
                    InitialSection {
                        mode: "explicit".into(),
                        scale: 0.8,
                        gamma0: 0.0,
                        nu0: 0.0,
                        zero_average: false,
                        r: Some(vec![0.25, -0.5, 1.5]),
                        v: Some(vec![0.0, 0.125, -1.0]),
                    }
                };
                Some(ScenarioConfig {
                    graph: "graphs/standin10.txt".into(),
                    omega,
                    tau,
                    delta,
                    m,
                    horizon: h as f64 * tau,
                    dense_substeps: dense,
                    seed,
                    allow_infeasible: false,
                    zoom: ZoomSection {
                        mode: if adjustable { "adjustable" } else { "fixed" }.into(),
                        mu: if adjustable { None } else { Some(1.25) },
                        eps_slack: eps,
                        eps_norm: None,
                    },
                    initial,
                })
            },
        )
        .prop_filter("self-consistent horizon", |c| c.violations().is_empty())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parse_emit_round_trip(cfg in config_strategy()) {
        let text = emit_scenario(&cfg);
        let back = parse_scenario(&text).expect("canonical emission parses");
        prop_assert_eq!(cfg, back);
    }
}

#[test]
fn verify_is_hermetic() {
    let a = report::verify_published_tables();
    let b = report::verify_published_tables();
    assert!(a.all_pass());
    for (x, y) in a.rows.iter().zip(b.rows.iter()) {
        assert_eq!(x.computed.to_bits(), y.computed.to_bits());
        assert_eq!(x.name, y.name);
    }
}

#[test]
fn empty_trace_gives_header_only_files() {
    use oscsync::{DirectedGraph, ReferenceOrbit, SimulationTrace};
    let trace = SimulationTrace {
        samples: vec![],
        dense: vec![],
        k0: None,
        dwell_boundaries: vec![],
        saturated_samples: vec![],
        certificate: None,
        orbit: ReferenceOrbit {
            gamma0: 0.0,
            nu0: 0.0,
            omega: 1.0,
        },
        xi: nalgebra_vec(),
        feasible_tau: true,
        warnings: vec![],
    };
    let _ = DirectedGraph::standin10();
    let files = output::plot_files(&trace, 10);
    for (name, contents) in files {
        assert_eq!(contents.lines().count(), 1, "{name} should be header-only");
    }
    assert_eq!(output::trace_csv(&trace, 10).lines().count(), 1);
    assert_eq!(output::events_csv(&trace).lines().count(), 1);
}

fn nalgebra_vec() -> oscsync::nalgebra::DVector<f64> {
    oscsync::nalgebra::DVector::from_element(10, 0.1)
}

#[test]
fn exit_codes() {
    // verify: success -> 0
    let st = bin().arg("verify").status().unwrap();
    assert_eq!(st.code(), Some(0));

    // configuration error -> 2
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "graph = \"x\"\nomega = -1.0\ntau = 0.1\ndelta = 0.5\nM = 10.0\nhorizon = 1.0\n[zoom]\nmode = \"fixed\"\nmu = 1.0\n").unwrap();
    let st = bin()
        .args(["simulate", "--scenario"])
        .arg(&bad)
        .args(["--out"])
        .arg(dir.path().join("out"))
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(2));
}

#[test]
fn simulate_writes_expected_files() {
    let dir = tempfile::tempdir().unwrap();
    let root = env!("CARGO_MANIFEST_DIR");
    let scenario = format!("{root}/../../scenarios/case1_fixed.toml");
    // short horizon override through a copied scenario
    let text = std::fs::read_to_string(&scenario).unwrap();
    let text = text.replace("horizon = 1000.0", "horizon = 5.0");
    let text = text.replace(
        "../graphs/standin10.txt",
        &format!("{root}/../../graphs/standin10.txt"),
    );
    let file = dir.path().join("short.toml");
    std::fs::write(&file, text).unwrap();
    let out = dir.path().join("out");
    let st = bin()
        .args(["simulate", "--scenario"])
        .arg(&file)
        .arg("--out")
        .arg(&out)
        .args(["--dense", "4"])
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));
    for name in [
        "trace.csv",
        "events.csv",
        "positions.csv",
        "velocities.csv",
        "error.csv",
        "dense.csv",
    ] {
        let p = out.join(name);
        assert!(p.exists(), "{name} missing");
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.lines().count() >= 1);
    }
    // trace has 51 sampled rows + header; dense has the interior points too
    let trace_lines = std::fs::read_to_string(out.join("trace.csv"))
        .unwrap()
        .lines()
        .count();
    assert_eq!(trace_lines, 52);
    let dense_lines = std::fs::read_to_string(out.join("dense.csv"))
        .unwrap()
        .lines()
        .count();
    assert_eq!(dense_lines, 52 + 50 * 3);
}

#[test]
fn verify_csv_written() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("verify.csv");
    let st = bin().args(["verify", "--csv"]).arg(&path).status().unwrap();
    assert_eq!(st.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 21); // header + 20 checks
    assert!(text.starts_with("name,expected,computed,tolerance,pass"));
}
