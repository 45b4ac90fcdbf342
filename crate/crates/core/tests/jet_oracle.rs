//! Jet evaluation against finite differences of real evaluation.

use proptest::prelude::*;
use sbc_core::expr::{eval, eval_jet, parse, EvalEnv, Expr, JetEnv};
use sbc_core::jet::Jet;

/// Random smooth expressions in `t`, `x1`, `x2` as source text.
fn expr_text() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        Just("t".to_string()),
        Just("x1".to_string()),
        Just("x2".to_string()),
        (-2.0f64..2.0).prop_map(|c| format!("({c:.3})")),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} + {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} - {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} * {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} / (2 + ({b})^2))")),
            (inner.clone(), 2u8..4).prop_map(|(a, n)| format!("({a})^{n}")),
            inner.clone().prop_map(|a| format!("(1 + ({a})^2)^1.5")),
            inner.clone().prop_map(|a| format!("-({a})")),
            (inner.clone(), prop_oneof![Just("sin"), Just("cos"), Just("tanh")]).prop_map(|(a, f)| format!("{f}({a})")),
            inner.clone().prop_map(|a| format!("exp(tanh({a}))")),
            inner.prop_map(|a| format!("sqrt(1 + ({a})^2)")),
        ]
    })
}

/// States move linearly in time: `x_i(t) = a_i + b_i (t - t0)`.
fn value_at(e: &Expr, t: f64, t0: f64, a: [f64; 2], b: [f64; 2]) -> f64 {
    let x = [a[0] + b[0] * (t - t0), a[1] + b[1] * (t - t0)];
    eval(e, EvalEnv { t, x: &x }).unwrap()
}

/// A tenth of `min(|f| / |f'|, sqrt(|f| / |f''|))`, from probes refined until
/// they sit below that scale.
fn first_step(f: &impl Fn(f64) -> f64, t: f64) -> f64 {
    let mut h: f64 = 1e-4;
    for _ in 0..8 {
        let (fm, f0, fp) = (f(t - h), f(t), f(t + h));
        let scale = f0.abs().max(1.0);
        let d1 = ((fp - fm) / (2.0 * h)).abs();
        let d2 = ((fp - 2.0 * f0 + fm) / (h * h)).abs();
        let tau = (scale / d1).min((scale / d2).sqrt());
        if tau >= 10.0 * h {
            return (0.1 * tau).min(2e-3);
        }
        h = 0.1 * tau;
    }
    h
}

/// Central difference of order 1 or 2 by Ridders' extrapolation, starting
/// from a step well below the local time scale of `f`. Returns the estimate
/// and an error bound: the extrapolation error plus rounding of `f` over `h^order`.
fn finite_difference(f: impl Fn(f64) -> f64, t: f64, order: u8) -> (f64, f64) {
    let base = |h: f64| match order {
        1 => (f(t + h) - f(t - h)) / (2.0 * h),
        _ => (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h),
    };
    let (con2, safe) = (1.4f64 * 1.4, 2.0);
    let mut best = (f64::INFINITY, f64::NAN, 0.0);
    let mut h = first_step(&f, t);
    let mut prev = vec![base(h)];
    for i in 1..12 {
        h /= 1.4;
        let mut row = vec![base(h)];
        let mut fac = con2;
        for j in 1..=i {
            row.push((row[j - 1] * fac - prev[j - 1]) / (fac - 1.0));
            fac *= con2;
            let err = (row[j] - row[j - 1]).abs().max((row[j] - prev[j - 1]).abs());
            if err <= best.0 {
                best = (err, row[j], h);
            }
        }
        if (row[i] - prev[i - 1]).abs() >= safe * best.0 {
            break;
        }
        prev = row;
    }
    let rounding = 10.0 * f64::EPSILON * f(t).abs().max(1.0) / best.2.powi(order as i32);
    (best.1, best.0 + rounding)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 10_000, max_global_rejects: 100_000, ..ProptestConfig::default() })]

    #[test]
    fn first_and_second_coefficients_match_finite_differences(
        text in expr_text(),
        t0 in 0.0f64..2.0,
        a in prop::array::uniform2(-1.0f64..1.0),
        b in prop::array::uniform2(-1.0f64..1.0),
    ) {
        let e = parse(&text).unwrap();
        let xs = [Jet::from_coeffs(&[a[0], b[0], 0.0]).unwrap(), Jet::from_coeffs(&[a[1], b[1], 0.0]).unwrap()];
        let j = eval_jet(&e, JetEnv { t: Jet::variable(t0, 2), x: &xs }, 2).unwrap();
        let f = |t: f64| value_at(&e, t, t0, a, b);
        prop_assert_eq!(j.value().to_bits(), f(t0).to_bits());
        let (d1, err1) = finite_difference(f, t0, 1);
        let (d2, err2) = finite_difference(f, t0, 2);
        // skip inputs the difference quotient cannot resolve to a tenth of the tolerance
        prop_assume!(err1 <= 1e-7 * d1.abs().max(1.0) && err2 <= 1e-5 * d2.abs().max(1.0));
        prop_assert!(rel(j.coeff(1), d1) < 1e-6, "{}: jet {} fd {}", text, j.coeff(1), d1);
        prop_assert!(rel(j.coeff(2), d2) < 1e-4, "{}: jet {} fd {}", text, j.coeff(2), d2);
    }

    #[test]
    fn division_undoes_multiplication(
        m in 0usize..8,
        a in prop::collection::vec(-3.0f64..3.0, 9),
        b in prop::collection::vec(-1.0f64..1.0, 9),
        b0 in prop_oneof![0.5f64..3.0, -3.0f64..-0.5],
    ) {
        let ja = Jet::from_coeffs(&a[..=m]).unwrap();
        let mut bc = b[..=m].to_vec();
        bc[0] = b0;
        let jb = Jet::from_coeffs(&bc).unwrap();
        let q = (ja * jb).checked_div(&jb).unwrap();
        // compared as Taylor coefficients c_i / i!, the scale raw derivatives grow at
        let mut fact = 1.0;
        for (i, (x, y)) in q.coeffs().iter().zip(ja.coeffs()).enumerate() {
            if i > 0 {
                fact *= i as f64;
            }
            prop_assert!((x - y).abs() / fact < 1e-12, "{:?} vs {:?}", q, ja);
        }
    }

    #[test]
    fn compose_agrees_with_expression_jets(
        c in prop::collection::vec(-1.0f64..1.0, 6),
        m in 1usize..6,
    ) {
        // tanh(u(t)) for a polynomial u, once through eval_jet and once through compose
        let u = Jet::from_coeffs(&c[..=m]).unwrap();
        let e = parse("tanh(x1)").unwrap();
        let direct = eval_jet(&e, JetEnv { t: Jet::variable(0.0, m), x: &[u] }, m).unwrap();
        // P_0(y) = y, P_(k+1)(y) = P_k'(y) (1 - y^2); tanh^(k)(u0) = P_k(tanh u0)
        let th = u.value().tanh();
        let mut poly = vec![0.0, 1.0];
        let mut d = Vec::new();
        for _ in 0..=m {
            d.push(poly.iter().enumerate().map(|(i, p)| p * th.powi(i as i32)).sum::<f64>());
            let deriv: Vec<f64> = (1..poly.len()).map(|i| i as f64 * poly[i]).collect();
            let mut next = vec![0.0; deriv.len() + 2];
            for (i, p) in deriv.iter().enumerate() {
                next[i] += p;
                next[i + 2] -= p;
            }
            poly = next;
        }
        let composed = u.compose(&d[..=m]).unwrap();
        for (x, y) in composed.coeffs().iter().zip(direct.coeffs()) {
            prop_assert!((x - y).abs() < 1e-10 * y.abs().max(1.0), "{:?} vs {:?}", composed, direct);
        }
    }
}

#[test]
fn trajectory_jet_examples() {
    let r = parse("piecewise(t <= 5: sin(2*pi*t)*tanh(t^3), t > 5: sin(2*pi*t)*tanh(t^3)*(1 - tanh((t-5)^3)))").unwrap();
    let at0 = sbc_core::sim::reference_jet(&r, 0.0, 3).unwrap();
    assert_eq!(at0.coeffs(), &[0.0, 0.0, 0.0, 0.0]);
    let v = sbc_core::sim::reference_jet(&r, 0.25, 0).unwrap().value();
    assert!((v - 0.015625f64.tanh()).abs() < 1e-15);
    assert!((v - 0.015624).abs() < 1e-6);
    let late = sbc_core::sim::reference_jet(&r, 9.0, 3).unwrap();
    assert!(late.max_abs() < 1e-12);
}
