//! Online jump optimization for a quadruped, without `std`.
//!
//! The crate is organised bottom-up:
//!
//! - [`kinematics`]: 3-DOF leg forward/inverse kinematics and the foot Jacobian.
//! - [`profile`]: the two-frequency phase oscillator and half-sine foot forces.
//! - [`controller`]: feedforward, Cartesian impedance and virtual model control torques.
//! - [`sim`]: a trunk + point-foot simulator with spring-damper contact over a heightfield.
//! - [`tpe`]: a Tree-structured Parzen Estimator with an ask/tell interface.
//! - [`harness`]: episodes, jump objectives, fall detection and the ask/run/tell study loop.
//!
//! Everything here is deterministic given its inputs and seeds; file formats and
//! the command line live in the `jumpopt` companion crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod controller;
pub mod error;
pub mod harness;
pub mod kinematics;
pub mod profile;
pub mod sim;
pub mod tpe;

pub use error::{Error, Result};

/// Column vector used for positions, velocities and forces.
pub type Vec3 = nalgebra::Vector3<f64>;
/// 3x3 matrix used for Jacobians, rotations and gains.
pub type Mat3 = nalgebra::Matrix3<f64>;

/// Standard gravity, m/s².
pub const GRAVITY: f64 = 9.81;
