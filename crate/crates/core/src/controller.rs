//! Per-leg joint torques: Jacobian-transpose feedforward, Cartesian impedance
//! and virtual model control (VMC), summed and clamped.

use nalgebra::Matrix3x4;
use serde::{Deserialize, Serialize};

use crate::kinematics::{JointAngles, JointVelocities, LegGeometry, LegId};
use crate::profile::{foot_force, JumpType, ProfileParams};
use crate::{Error, Mat3, Result, Vec3};

/// Go1-class actuator limit, N·m.
pub const DEFAULT_TAU_MAX: f64 = 23.7;
/// Height of the nominal foot target below the hip, m.
pub const NOMINAL_STANCE_HEIGHT: f64 = 0.27;

/// Controller gains. Matrices are stored by their diagonals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gains {
    pub kp: [f64; 3],
    pub kd: [f64; 3],
    pub kd_joint: [f64; 3],
    /// Virtual spring gain; zero disables VMC.
    pub k_att: f64,
}

impl Default for Gains {
    fn default() -> Self {
        Self {
            kp: [400.0; 3],
            kd: [8.0; 3],
            kd_joint: [0.8; 3],
            k_att: 200.0,
        }
    }
}

impl Gains {
    pub fn validate(&self) -> Result<()> {
        let all = self
            .kp
            .iter()
            .chain(&self.kd)
            .chain(&self.kd_joint)
            .chain(core::iter::once(&self.k_att));
        for g in all {
            if !(g.is_finite() && *g >= 0.0) {
                return Err(Error::Config("gains must be finite and non-negative".into()));
            }
        }
        Ok(())
    }

    pub fn without_vmc(mut self) -> Self {
        self.k_att = 0.0;
        self
    }
}

fn diag(d: &[f64; 3]) -> Mat3 {
    Mat3::from_diagonal(&Vec3::from(*d))
}

/// 12 joint torques ordered (FR, FL, RR, RL) x (abduction, hip, knee).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TorqueCommand {
    pub tau: [f64; 12],
}

impl TorqueCommand {
    pub const ZERO: Self = Self { tau: [0.0; 12] };

    pub fn from_legs(legs: &[Vec3; 4]) -> Self {
        let mut tau = [0.0; 12];
        for (i, leg) in legs.iter().enumerate() {
            tau[3 * i..3 * i + 3].copy_from_slice(leg.as_slice());
        }
        Self { tau }
    }

    pub fn leg(&self, leg: LegId) -> Vec3 {
        let i = 3 * leg.index();
        Vec3::new(self.tau[i], self.tau[i + 1], self.tau[i + 2])
    }

    /// Elementwise saturation to `±tau_max`.
    pub fn clamped(mut self, tau_max: f64) -> Self {
        for t in &mut self.tau {
            *t = t.clamp(-tau_max, tau_max);
        }
        self
    }
}

/// Measured state of one leg, everything in its hip frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegMeasurement {
    pub foot_position: Vec3,
    pub foot_velocity: Vec3,
    pub q: JointAngles,
    pub qdot: JointVelocities,
    pub jacobian: Mat3,
    pub contact: bool,
}

/// Everything the controller reads in one tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerInputs {
    pub legs: [LegMeasurement; 4],
    /// Body orientation, world from body.
    pub rotation: Mat3,
    /// Oscillator phase; `None` disables the feedforward profile.
    pub theta: Option<f64>,
    pub params: ProfileParams,
    pub jump: JumpType,
    /// Nominal foot targets `p_d`, hip frame.
    pub targets: [Vec3; 4],
}

/// Nominal foot target below the hip of the given leg.
pub fn nominal_target(geom: &LegGeometry) -> Vec3 {
    Vec3::new(0.0, geom.side_sign() * geom.hip_offset, -NOMINAL_STANCE_HEIGHT)
}

pub fn feedforward_torque(jacobian: &Mat3, force: &Vec3) -> Vec3 {
    jacobian.transpose() * force
}

#[allow(clippy::too_many_arguments)]
pub fn impedance_torque(
    jacobian: &Mat3,
    target: &Vec3,
    position: &Vec3,
    velocity: &Vec3,
    qdot: &JointVelocities,
    gains: &Gains,
) -> Vec3 {
    let cartesian = diag(&gains.kp) * (target - position) - diag(&gains.kd) * velocity;
    jacobian.transpose() * cartesian - diag(&gains.kd_joint) * qdot.as_vec()
}

/// Corners of the virtual body plane, columns FR, FL, RR, RL.
pub fn corner_matrix() -> Matrix3x4<f64> {
    Matrix3x4::new(
        1.0, 1.0, -1.0, -1.0, //
        -1.0, 1.0, -1.0, 1.0, //
        0.0, 0.0, 0.0, 0.0,
    )
}

pub fn check_rotation(rotation: &Mat3) -> Result<()> {
    let ortho = (rotation.transpose() * rotation - Mat3::identity()).amax();
    let det = rotation.determinant();
    let err = ortho.max((det - 1.0).abs());
    if err.is_finite() && err <= 1e-6 {
        Ok(())
    } else {
        Err(Error::NotOrthonormal(err))
    }
}

/// Virtual spring forces, one column per leg. Only the z row is nonzero.
pub fn vmc_forces(rotation: &Mat3, k_att: f64) -> Result<Matrix3x4<f64>> {
    check_rotation(rotation)?;
    let corners = rotation * corner_matrix();
    let mut forces = Matrix3x4::zeros();
    for c in 0..4 {
        forces[(2, c)] = k_att * corners[(2, c)];
    }
    Ok(forces)
}

pub fn vmc_torque(jacobian: &Mat3, force: &Vec3) -> Vec3 {
    jacobian.transpose() * force
}

/// The three torque contributions of one leg before summation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegTorques {
    pub feedforward: Vec3,
    pub impedance: Vec3,
    pub vmc: Vec3,
}

impl LegTorques {
    pub fn sum(&self) -> Vec3 {
        self.feedforward + self.impedance + self.vmc
    }
}

/// Unclamped contributions for every leg. Feedforward and VMC are only applied
/// to legs in contact.
pub fn torque_terms(inputs: &ControllerInputs, gains: &Gains) -> Result<[LegTorques; 4]> {
    let vmc = vmc_forces(&inputs.rotation, gains.k_att)?;
    Ok(LegId::ALL.map(|leg| {
        let m = &inputs.legs[leg.index()];
        let impedance = impedance_torque(
            &m.jacobian,
            &inputs.targets[leg.index()],
            &m.foot_position,
            &m.foot_velocity,
            &m.qdot,
            gains,
        );
        let (feedforward, vmc) = if m.contact {
            let ff = inputs
                .theta
                .map(|theta| foot_force(&inputs.params, inputs.jump, leg, theta))
                .unwrap_or_else(Vec3::zeros);
            let col: Vec3 = vmc.column(leg.index()).into_owned();
            (feedforward_torque(&m.jacobian, &ff), vmc_torque(&m.jacobian, &col))
        } else {
            (Vec3::zeros(), Vec3::zeros())
        };
        LegTorques {
            feedforward,
            impedance,
            vmc,
        }
    }))
}

/// Full torque command, clamped to `±tau_max`.
pub fn total_torque(inputs: &ControllerInputs, gains: &Gains, tau_max: f64) -> Result<TorqueCommand> {
    let terms = torque_terms(inputs, gains)?;
    Ok(TorqueCommand::from_legs(&terms.map(|t| t.sum())).clamped(tau_max))
}

/// Contact estimate from measured normal force, for studies that do not use
/// the simulator's geometric flags.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForceThresholdContact {
    pub threshold: f64,
}

impl Default for ForceThresholdContact {
    fn default() -> Self {
        Self { threshold: 5.0 }
    }
}

impl ForceThresholdContact {
    pub fn estimate(&self, normal_force: f64) -> bool {
        normal_force > self.threshold
    }
}
