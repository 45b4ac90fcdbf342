//! Closed-loop runs of the third-order benchmark.

use std::sync::OnceLock;

use sbc_core::analysis::{
    error_dynamics_residual, metrics, monotonicity_report, telescoping_residual, virtual_stability_residual,
};
use sbc_core::controller::{Controller, ControllerConfig, Mode};
use sbc_core::expr::{parse, Expr};
use sbc_core::plant::{SffModel, SubsystemSpec};
use sbc_core::sim::{reference_jet, simulate, Integrator, SimConfig, Trace, VALIDATION_REFERENCE};

fn reference() -> Expr {
    parse(VALIDATION_REFERENCE).unwrap()
}

fn controller(mode: Mode, t12: f64, t22: f64) -> Controller<f64> {
    Controller::new(SffModel::validation(5.0, 5.0), ControllerConfig::validation(mode, t12, t22)).unwrap()
}

fn run(ctrl: &Controller<f64>, dt: f64, duration: f64, integrator: Integrator, stride: usize) -> Trace<f64> {
    let cfg = SimConfig { dt, duration, integrator, x0: vec![0.0; 3], record_stride: stride };
    simulate(ctrl, &reference(), &cfg).unwrap()
}

/// C2 at the nominal step, recorded every 10 steps.
fn c2() -> &'static Trace<f64> {
    static TRACE: OnceLock<Trace<f64>> = OnceLock::new();
    TRACE.get_or_init(|| run(&controller(Mode::Adaptive, 6.0, 4.0), 1e-5, 10.0, Integrator::Rk4, 10))
}

#[test]
fn c2_is_converged_in_the_step_size() {
    let coarse = metrics(c2()).max_abs_e[0];
    let fine = metrics(&run(&controller(Mode::Adaptive, 6.0, 4.0), 5e-6, 10.0, Integrator::Rk4, 1000)).max_abs_e[0];
    assert!((coarse - fine).abs() / fine < 0.01, "{coarse} vs {fine}");
}

#[test]
fn c2_euler_agrees_with_rk4() {
    let rk4 = metrics(c2()).max_abs_e;
    let euler = metrics(&run(&controller(Mode::Adaptive, 6.0, 4.0), 1e-5, 10.0, Integrator::Euler, 10)).max_abs_e;
    for k in 0..2 {
        assert!((rk4[k] - euler[k]).abs() / rk4[k] < 0.005, "{rk4:?} vs {euler:?}");
    }
    // e3 peaks in a fast transient where Euler's first-order error is 0.8 %
    assert!((rk4[2] - euler[2]).abs() / rk4[2] < 0.01, "{rk4:?} vs {euler:?}");
}

#[test]
fn euler_error_is_first_order() {
    let ctrl = controller(Mode::Adaptive, 6.0, 4.0);
    let peak = |integrator, dt: f64| {
        let stride = (1e-4 / dt).round() as usize;
        metrics(&run(&ctrl, dt, 1.5, integrator, stride)).max_abs_e[2]
    };
    let exact = peak(Integrator::Rk4, 1e-5);
    let coarse = exact - peak(Integrator::Euler, 1e-5);
    let fine = exact - peak(Integrator::Euler, 5e-6);
    let ratio = coarse / fine;
    assert!((1.8..2.2).contains(&ratio), "{coarse} / {fine} = {ratio}");
}

#[test]
fn c2_lyapunov_checks() {
    let ctrl = controller(Mode::Adaptive, 6.0, 4.0);
    let tr = c2();
    assert!(monotonicity_report(tr).is_empty());
    assert_eq!(tr.step_violations, 0);
    let ed = error_dynamics_residual(&ctrl, &reference(), tr).unwrap();
    assert!(ed.worst < 1e-3, "{ed:?}");
    let vs = virtual_stability_residual(&ctrl, &reference(), tr);
    assert!(vs.worst < 1e-3, "{vs:?}");
    let tele = telescoping_residual(&ctrl, &reference(), tr);
    assert!(tele.samples > 0 && tele.worst < 1e-3, "{tele:?}");
    let m = metrics(tr);
    assert!(m.final_abs_e.iter().all(|e| *e < 1e-3));
    for (_, v) in &m.theta_hat_terminal {
        assert!((4.0..=6.0).contains(v));
    }
}

#[test]
fn frozen_wrong_parameters_break_monotonicity() {
    let tr = run(&controller(Mode::Fixed, 6.0, 4.0), 1e-5, 2.0, Integrator::Rk4, 100);
    assert!(!monotonicity_report(&tr).is_empty());
    assert!(tr.step_violations > 0);
}

#[test]
fn runs_are_deterministic() {
    let ctrl = controller(Mode::Adaptive, 0.1, 9.9);
    let a = run(&ctrl, 1e-5, 0.3, Integrator::Rk4, 7);
    let b = run(&ctrl, 1e-5, 0.3, Integrator::Rk4, 7);
    assert_eq!(a.rows.len(), b.rows.len());
    for (ra, rb) in a.rows.iter().zip(&b.rows) {
        let bits = |r: &sbc_core::sim::TraceRow<f64>| {
            let mut v: Vec<u64> = r.x.iter().chain(&r.e).chain(&r.estimates).map(|x| x.to_bits()).collect();
            v.push(r.u.to_bits());
            v.push(r.lyapunov.nu_tot.to_bits());
            v
        };
        assert_eq!(bits(ra), bits(rb));
    }
}

#[test]
fn equilibrium_stays_at_rest() {
    let ctrl = controller(Mode::Fixed, 5.0, 5.0);
    let cfg = SimConfig { dt: 1e-3, duration: 1.0, integrator: Integrator::Rk4, x0: vec![0.0; 3], record_stride: 10 };
    let tr = simulate(&ctrl, &parse("0").unwrap(), &cfg).unwrap();
    for r in &tr.rows {
        assert!(r.x.iter().chain(&r.e).chain([&r.u, &r.lyapunov.nu_tot]).all(|v| *v == 0.0));
    }
}

#[test]
fn exact_feedforward_tracks() {
    let ctrl = controller(Mode::Fixed, 5.0, 5.0);
    let r = reference();
    let x0 = ctrl.consistent_state(0.0, &[], &reference_jet(&r, 0.0, 3).unwrap()).unwrap();
    let cfg = SimConfig { dt: 1e-5, duration: 1.0, integrator: Integrator::Rk4, x0, record_stride: 10 };
    let tr = simulate(&ctrl, &r, &cfg).unwrap();
    assert!(metrics(&tr).max_abs_e[0] < 1e-6);
}

#[test]
fn appended_integrator_leaves_prior_stages_bit_identical() {
    let base = SffModel::validation(5.0, 5.0);
    let ext = base.with_appended(SubsystemSpec::integrator()).unwrap();
    let cfg3 = ControllerConfig::validation(Mode::Adaptive, 6.0, 4.0);
    let mut cfg4 = cfg3.clone();
    cfg4.lambda.push(80.0);
    cfg4.delta.push(40.0);
    cfg4.fixed_theta.push(vec![1.0]);
    let c3 = Controller::new(base, cfg3).unwrap();
    let c4 = Controller::new(ext, cfg4).unwrap();
    let r = reference();
    for (i, t) in [0.3, 1.7, 4.2, 6.1].into_iter().enumerate() {
        let x = [0.2 * i as f64 - 0.3, 0.5, -0.4 + 0.1 * i as f64];
        let est = [1.2 + 2.0 * i as f64, 8.8 - 2.5 * i as f64];
        let o3 = c3.step(t, &x, &est, &reference_jet(&r, t, 3).unwrap()).unwrap();
        let o4 = c4.step(t, &[x[0], x[1], x[2], 0.9], &est, &reference_jet(&r, t, 4).unwrap()).unwrap();
        for k in 0..3 {
            let a: Vec<u64> = o3.desired[k].coeffs().iter().map(|v| v.to_bits()).collect();
            let b: Vec<u64> = o4.desired[k].coeffs()[..a.len()].iter().map(|v| v.to_bits()).collect();
            assert_eq!(a, b, "x{}d at t = {t}", k + 1);
        }
        assert_eq!(o3.u.to_bits(), o4.desired[3].value().to_bits());
    }
}

#[test]
fn single_precision_runs() {
    let ctrl = Controller::<f32>::new(
        SffModel::validation(5.0, 5.0),
        ControllerConfig::validation(Mode::Adaptive, 6.0, 4.0),
    )
    .unwrap();
    let cfg = SimConfig { dt: 1e-4, duration: 1.0, integrator: Integrator::Rk4, x0: vec![0.0; 3], record_stride: 100 };
    let tr = simulate(&ctrl, &reference(), &cfg).unwrap();
    let m = metrics(&tr);
    assert!(m.max_abs_e[0] < 0.05, "{m:?}");
}
