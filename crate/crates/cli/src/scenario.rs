//! The three cases of the third-order benchmark.

use sbc_core::sim::VALIDATION_REFERENCE;

use crate::config::{AdaptEntry, ControllerSpec, ModeName, ModelSpec, OutputSpec, RunSpec, SimSpec, SubsystemEntry};
use crate::LabError;

pub const SCENARIOS: [&str; 3] = ["c1", "c2", "c3"];

/// `c1`: fixed parameters off the truth. `c2`: adaptive from the same
/// values. `c3`: adaptive from values near the bounds.
pub fn scenario(name: &str) -> Result<RunSpec, LabError> {
    let (mode, t12, t22) = match name {
        "c1" => (ModeName::Fixed, 6.0, 4.0),
        "c2" => (ModeName::Adaptive, 6.0, 4.0),
        "c3" => (ModeName::Adaptive, 0.1, 9.9),
        _ => return Err(LabError::Config(format!("unknown scenario `{name}` (expected one of c1, c2, c3)"))),
    };
    let entry = |subsystem, rho, sigma, initial| AdaptEntry {
        subsystem,
        param: 2,
        rho,
        sigma,
        lower: 1.0,
        upper: 9.0,
        activation_c: 0.5,
        initial,
        enabled: true,
    };
    // sigma = 1000 / rho
    let adapt = match mode {
        ModeName::Fixed => vec![],
        ModeName::Adaptive => vec![entry(1, 1000.0, 1.0, t12), entry(2, 2.0, 500.0, t22)],
    };
    Ok(RunSpec {
        model: ModelSpec {
            n: 3,
            subsystems: vec![
                SubsystemEntry { theta: vec![1.0, 5.0], regressors: vec!["x1^3".into()], gain: "1".into() },
                SubsystemEntry { theta: vec![1.0, 5.0], regressors: vec!["x1^2 + x2^2".into()], gain: "1".into() },
                SubsystemEntry { theta: vec![1.0], regressors: vec![], gain: "1".into() },
            ],
        },
        controller: ControllerSpec {
            mode,
            lambda: vec![10.0, 20.0, 40.0],
            delta: vec![10.0, 20.0],
            fixed_theta: Some(vec![vec![1.0, t12], vec![1.0, t22], vec![1.0]]),
            adapt,
        },
        trajectory: VALIDATION_REFERENCE.into(),
        sim: SimSpec::default(),
        output: OutputSpec { dir: format!("out/{name}"), plots: false },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenarios_validate() {
        for name in SCENARIOS {
            scenario(name).unwrap().prepare().unwrap();
        }
        assert!(matches!(scenario("c4"), Err(LabError::Config(_))));
    }

    #[test]
    fn scenario_fields() {
        assert_eq!(scenario("c2").unwrap().adapt_entry(1, 2).unwrap().rho, 1000.0);
        assert_eq!(scenario("c1").unwrap().controller.mode, ModeName::Fixed);
        assert_eq!(scenario("c3").unwrap().adapt_entry(1, 2).unwrap().initial, 0.1);
        let c3 = scenario("c3").unwrap();
        let e22 = c3.adapt_entry(2, 2).unwrap();
        assert_eq!((e22.rho, e22.sigma, e22.initial), (2.0, 500.0, 9.9));
        assert!(c3.adapt_entry(1, 1).is_none());
    }
}
