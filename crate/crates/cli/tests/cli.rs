use std::path::Path;
use std::process::{Command, Output};

use sbc_lab::config::{ModeName, RunSpec};
use sbc_lab::output::{Metrics, Table};
use sbc_lab::scenario::{scenario, SCENARIOS};
use serde_json::Value;

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sbc-lab")).args(args).output().unwrap()
}

fn error_line(out: &Output) -> Value {
    serde_json::from_str(String::from_utf8_lossy(&out.stderr).lines().last().unwrap()).unwrap()
}

#[test]
fn config_round_trips() {
    for name in SCENARIOS {
        let spec = scenario(name).unwrap();
        let back = RunSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(back, spec);
    }
    let minimal = r#"{
        "model": {"n": 2, "subsystems": [
            {"theta": [2, 0.5], "regressors": ["sin(x1)"], "gain": "1 + x1^2"},
            {"theta": [1], "gain": "2"}]},
        "controller": {"mode": "adaptive", "lambda": [3, 4], "delta": [2],
            "adapt": [{"subsystem": 1, "param": 2, "rho": 5, "sigma": 1,
                       "lower": 0.2, "upper": 1, "activation_c": 0.1, "initial": 0.4}]},
        "trajectory": "0.5 * sin(t)"
    }"#;
    let spec = RunSpec::from_json(minimal).unwrap();
    assert_eq!(spec.sim.dt, 1e-5);
    assert_eq!(spec.sim.record_stride, 100);
    assert!(spec.controller.adapt[0].enabled);
    assert_eq!(spec.controller.mode, ModeName::Adaptive);
    let again = RunSpec::from_json(&spec.to_json()).unwrap();
    assert_eq!(again, spec);
    let p = again.prepare().unwrap();
    assert_eq!(p.sim.x0, vec![0.0, 0.0]);
    assert_eq!(p.controller.model().n(), 2);
}

#[test]
fn invalid_specs_are_config_errors() {
    let base = scenario("c2").unwrap();
    let mut wrong_n = base.clone();
    wrong_n.model.n = 4;
    let mut bad_gain = base.clone();
    bad_gain.controller.lambda.pop();
    let mut bad_bounds = base.clone();
    bad_bounds.controller.adapt[0].activation_c = 2.0;
    let mut state_in_ref = base.clone();
    state_in_ref.trajectory = "x1 + t".into();
    let mut future_state = base.clone();
    future_state.model.subsystems[0].regressors[0] = "x2".into();
    for spec in [wrong_n, bad_gain, bad_bounds, state_in_ref, future_state] {
        assert!(matches!(spec.prepare(), Err(sbc_lab::LabError::Config(_))));
    }
}

#[test]
fn short_run_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c3");
    let o = lab(&["run", "--scenario", "c3", "--duration", "0.2", "--out", out.to_str().unwrap(), "--plots"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["trace.csv", "metrics.json", "spec.json", "tracking.svg", "errors.svg", "estimates.svg"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let table = Table::from_csv(&std::fs::read_to_string(out.join("trace.csv")).unwrap()).unwrap();
    assert_eq!(
        table.columns.join(","),
        "t,x1,x2,x3,x1d,x2d,x3d,e1,e2,e3,u,theta_1_2,theta_2_2,s1,s2,nu_tot"
    );
    assert_eq!(table.rows.len(), 201);
    assert_eq!(table.rows[0][11], 0.1);
    assert_eq!(table.rows[0][12], 9.9);
    let metrics: Metrics = serde_json::from_str(&std::fs::read_to_string(out.join("metrics.json")).unwrap()).unwrap();
    assert_eq!(metrics.max_abs_e.len(), 3);
    assert!(metrics.theta_hat_terminal["theta_1_2"] > 0.1);

    let spec = RunSpec::from_json(&std::fs::read_to_string(out.join("spec.json")).unwrap()).unwrap();
    assert_eq!(spec.sim.duration, 0.2);

    let trace = out.join("trace.csv");
    let c = lab(&["compare", trace.to_str().unwrap(), trace.to_str().unwrap(), "--from", "0.1"]);
    assert!(c.status.success());
    let report: Value = serde_json::from_slice(&c.stdout).unwrap();
    assert_eq!(report["samples"], 101);
    assert!(report["max_abs_diff"].as_object().unwrap().values().all(|v| v.as_f64() == Some(0.0)));
}

#[test]
fn parallel_runs_use_separate_directories() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_sbc-lab"))
        .args(["run", "--scenario", "c1", "--scenario", "c2", "--duration", "0.05", "--out"])
        .arg(dir.path())
        .env("SBC_LAB_THREADS", "2")
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 2);
    for name in ["c1", "c2"] {
        assert!(dir.path().join(name).join("trace.csv").exists());
    }
    let c1 = std::fs::read_to_string(dir.path().join("c1/trace.csv")).unwrap();
    assert!(!c1.lines().next().unwrap().contains("theta"));
}

#[test]
fn exit_codes_and_error_lines() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    let mut spec = scenario("c1").unwrap().to_value();
    spec["model"]["subsystems"][0]["regressors"][0] = Value::String("x1^^3".into());
    std::fs::write(&bad, spec.to_string()).unwrap();
    let o = lab(&["run", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = error_line(&o);
    assert_eq!(err["error"], "config");
    assert!(err["message"].as_str().unwrap().contains("offset 3"), "{err}");

    let o = lab(&["run", "--scenario", "c9"]);
    assert_eq!(o.status.code(), Some(2));
    let o = lab(&["run", "--scenario", "c2", "--set", "sim.nope=1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = lab(&["run", "--config", Path::new("/nonexistent/spec.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(error_line(&o)["error"], "io");

    let out = dir.path().join("blowup");
    let o = lab(&["run", "--scenario", "c2", "--dt", "1", "--duration", "5", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(error_line(&o)["error"], "numerical");

    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    std::fs::write(&a, "t,e1\n0,1\n1,2\n").unwrap();
    std::fs::write(&b, "t,e1\n0,1\n2,2\n").unwrap();
    let o = lab(&["compare", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_line(&o)["error"], "compare");
}

#[test]
fn scenario_command_prints_a_loadable_spec() {
    let o = lab(&["scenario", "c2"]);
    assert!(o.status.success());
    let spec = RunSpec::from_json(&String::from_utf8_lossy(&o.stdout)).unwrap();
    assert_eq!(spec, scenario("c2").unwrap());
}
