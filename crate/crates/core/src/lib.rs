//! Adaptive subsystem-based control (SBC) for nth-order strict-feedback
//! nonlinear systems.
//!
//! The crate is organised bottom-up:
//!
//! - [`jet`]: truncated Taylor jets carrying a signal and its time derivatives.
//! - [`expr`]: a small expression language for regressors, input gains and
//!   reference trajectories, evaluated over reals or jets.
//! - [`plant`]: the strict-feedback plant and its state-jet oracle.
//! - [`projection`]: the smooth parameter projection with switching zones.
//! - [`controller`]: the modular SBC cascade, fixed or adaptive.
//! - [`analysis`]: Lyapunov bookkeeping, stability-connector checks and metrics.
//! - [`sim`]: fixed-step integration of plant + estimator, producing a [`sim::Trace`].
//!
//! Numerical code is generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases below are what the CLI and the validation scenarios use.

pub mod analysis;
pub mod controller;
pub mod expr;
pub mod jet;
pub mod plant;
pub mod projection;
pub mod sim;

mod scalar;

pub use scalar::Scalar;

pub type Jet64 = jet::Jet<f64>;
pub type Jet32 = jet::Jet<f32>;
pub type SffModel64 = plant::SffModel<f64>;
pub type ProjectionConfig64 = projection::ProjectionConfig<f64>;
pub type ControllerConfig64 = controller::ControllerConfig<f64>;
pub type SimConfig64 = sim::SimConfig<f64>;
pub type Trace64 = sim::Trace<f64>;
