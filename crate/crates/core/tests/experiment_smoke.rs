//! End-to-end runs of each experiment kind at quick parameters: the goal
//! here is wiring (validation, dispatch, file output, assertion plumbing),
//! not the asymptotics; the acceptance suite runs the real sweeps.

use snls::experiments::{run_scenario, RunOptions};
use snls::scenario::Scenario;

fn opts(dir: &tempfile::TempDir) -> RunOptions {
    RunOptions::new(dir.path())
}

#[test]
fn linearizability_schwartz_end_to_end() {
    let toml = r#"
name = "smoke-lin-schwartz"
[params]
n = 1
sigma = 3.0
t_final = 1.0
[grid]
length = 32.0
[sweep]
eps = [0.16, 0.08, 0.04]
[[data]]
kind = "gaussian"
width = 1.0
amplitude = 0.75
[experiment]
kind = "linearizability"
"#;
    let s = Scenario::from_toml_str(toml).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let summary = run_scenario(&s, &opts(&dir)).unwrap();
    assert!(summary.pass, "assertions: {:#?}", summary.assertions);
    assert!(dir.path().join("report.json").exists());
    assert!(dir.path().join("trend_functional.dat").exists());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["experiment"], "linearizability");
}

#[test]
fn linearizability_quadratic_end_to_end() {
    let toml = r#"
name = "smoke-lin-quadratic"
[params]
n = 1
sigma = 3.0
t_final = 1.5
[grid]
length = 32.0
[sweep]
eps = [0.16, 0.08, 0.04]
[[data]]
kind = "quadratic"
t_focus = 1.0
x_focus = [0.0]
[experiment]
kind = "linearizability"
"#;
    let s = Scenario::from_toml_str(toml).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let summary = run_scenario(&s, &opts(&dir)).unwrap();
    assert!(summary.pass, "assertions: {:#?}", summary.assertions);
}

#[test]
fn superposition_two_foci_end_to_end() {
    let toml = r#"
name = "smoke-superposition"
[params]
n = 1
sigma = 3.0
t_final = 1.3
[grid]
length = 32.0
[sweep]
eps = [0.16, 0.08, 0.04]
[[data]]
kind = "quadratic"
t_focus = 1.0
x_focus = [-2.0]
[[data]]
kind = "quadratic"
t_focus = 1.2
x_focus = [2.0]
[experiment]
kind = "superposition"
"#;
    let s = Scenario::from_toml_str(toml).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let summary = run_scenario(&s, &opts(&dir)).unwrap();
    assert!(summary.pass, "assertions: {:#?}", summary.assertions);
}

#[test]
fn superposition_single_component_defect_vanishes() {
    let toml = r#"
name = "smoke-superposition-single"
[params]
n = 1
sigma = 3.0
t_final = 1.2
[grid]
length = 32.0
[sweep]
eps = [0.16, 0.08, 0.04]
[[data]]
kind = "quadratic"
t_focus = 1.0
x_focus = [0.0]
[experiment]
kind = "superposition"
"#;
    let s = Scenario::from_toml_str(toml).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let summary = run_scenario(&s, &opts(&dir)).unwrap();
    assert!(summary.pass, "assertions: {:#?}", summary.assertions);
}

#[test]
fn wigner_screen_end_to_end() {
    let toml = r#"
name = "smoke-wigner"
[params]
n = 1
sigma = 3.0
t_final = 1.5
[grid]
length = 32.0
[sweep]
eps = [0.08, 0.04, 0.02]
[[data]]
kind = "quadratic"
t_focus = 1.0
x_focus = [0.5]
[experiment]
kind = "wigner_screen"
"#;
    let s = Scenario::from_toml_str(toml).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let summary = run_scenario(&s, &opts(&dir)).unwrap();
    assert!(summary.pass, "assertions: {:#?}", summary.assertions);
    assert!(dir.path().join("wigner_heatmap.dat").exists());
    assert!(dir.path().join("wigner_table.swig").exists());
}

#[test]
fn simulate_end_to_end_with_snapshots() {
    let toml = r#"
name = "smoke-simulate"
[params]
n = 1
sigma = 3.0
t_final = 0.5
[grid]
length = 32.0
[sweep]
eps = [0.08]
[[data]]
kind = "gaussian"
width = 1.0
[experiment]
kind = "simulate"
"#;
    let s = Scenario::from_toml_str(toml).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let mut o = opts(&dir);
    o.emit_snapshots = true;
    let summary = run_scenario(&s, &o).unwrap();
    assert!(summary.pass, "assertions: {:#?}", summary.assertions);
    assert!(dir.path().join("series.csv").exists());
    let snaps: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .filter(|e| {
            e.as_ref()
                .unwrap()
                .file_name()
                .to_string_lossy()
                .ends_with(".snls")
        })
        .collect();
    assert!(!snaps.is_empty(), "no snapshots written");
}

#[test]
fn validation_rejects_before_compute() {
    let toml = r#"
name = "smoke-invalid"
[params]
n = 1
sigma = 1.0
t_final = 1.0
[grid]
length = 32.0
[sweep]
eps = []
[experiment]
kind = "superposition"
"#;
    let s = Scenario::from_toml_str(toml).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let err = run_scenario(&s, &opts(&dir)).unwrap_err();
    let msg = err.to_string();
    // every failure listed at once
    assert!(msg.contains("sigma"), "{msg}");
    assert!(msg.contains("sweep"), "{msg}");
    assert!(msg.contains("quadratic datum"), "{msg}");
}

#[test]
fn determinism_bit_identical_csv() {
    let toml = r#"
name = "smoke-determinism"
[params]
n = 1
sigma = 3.0
t_final = 0.6
[grid]
length = 32.0
[sweep]
eps = [0.08, 0.06, 0.04]
[[data]]
kind = "gaussian"
width = 1.0
[experiment]
kind = "linearizability"
seed = 7
"#;
    let s = Scenario::from_toml_str(toml).unwrap();
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    run_scenario(&s, &opts(&d1)).unwrap();
    run_scenario(&s, &opts(&d2)).unwrap();
    for name in ["series_eps0.08.csv", "trend_functional.dat", "report.json"] {
        let a = std::fs::read(d1.path().join(name)).unwrap();
        let b = std::fs::read(d2.path().join(name)).unwrap();
        assert_eq!(a, b, "{name} not bit-identical");
    }
}
