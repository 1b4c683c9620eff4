//! Trunk + point-foot quadruped simulator.
//!
//! The trunk is a floating rigid body. Each foot is a point mass connected to
//! its hip by a massless 3-DOF leg: joint torques become a foot force through
//! the quasi-static relation `τ = Jᵀ F`, and the trunk receives `-F` at the foot
//! point. Legs that leave their reachable band are pulled back by a stiff radial
//! spring-damper acting between foot and trunk. Feet touch a heightfield through
//! spring-damper normal contact with regularized Coulomb friction.
//!
//! Integration is semi-implicit Euler: velocities first, then positions from the
//! new velocities. The stiff foot-local damping terms (contact normal, viscous
//! friction, workspace damper) are taken implicitly in the velocity update.

mod contact;
mod terrain;

pub use contact::contact_force;
pub use terrain::{make_block_terrain, ContactParams, Terrain, TerrainShape};

use nalgebra::{Rotation3, UnitQuaternion};
use serde::{Deserialize, Serialize};

use crate::controller::{LegMeasurement, TorqueCommand, DEFAULT_TAU_MAX, NOMINAL_STANCE_HEIGHT};
use crate::kinematics::{forward_kinematics, inverse_kinematics, jacobian, JointVelocities, LegGeometry, LegId};
use crate::{Error, Mat3, Result, Vec3, GRAVITY};

/// Tikhonov damping used by every Jacobian solve.
pub const JACOBIAN_DAMPING: f64 = 1e-3;
/// States with any magnitude above this are treated as diverged.
pub const DIVERGENCE_LIMIT: f64 = 1e6;
const MIDPOINT_ITERATIONS: usize = 50;

/// Masses, inertia and leg geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobotModel {
    pub trunk_mass: f64,
    /// Principal inertia of the trunk about its COM, body frame, kg·m².
    pub trunk_inertia: [f64; 3],
    pub foot_mass: f64,
    /// Hip (abduction axis) positions in the body frame, order FR, FL, RR, RL.
    pub hip_offsets: [[f64; 3]; 4],
    pub legs: [LegGeometry; 4],
    pub tau_max: f64,
}

impl Default for RobotModel {
    fn default() -> Self {
        let (hx, hy) = (0.1881, 0.04675);
        Self {
            trunk_mass: 12.0,
            trunk_inertia: [0.10, 0.25, 0.30],
            foot_mass: 0.2,
            hip_offsets: [[hx, -hy, 0.0], [hx, hy, 0.0], [-hx, -hy, 0.0], [-hx, hy, 0.0]],
            legs: LegId::ALL.map(LegGeometry::go1_like),
            tau_max: DEFAULT_TAU_MAX,
        }
    }
}

impl RobotModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.trunk_mass > 0.0 && self.foot_mass > 0.0) {
            return Err(Error::Model("masses must be positive"));
        }
        if !self.trunk_inertia.iter().all(|i| *i > 0.0) {
            return Err(Error::Model("inertia entries must be positive"));
        }
        if self.tau_max.is_nan() || self.tau_max <= 0.0 {
            return Err(Error::Model("torque limit must be positive"));
        }
        for (leg, geom) in LegId::ALL.iter().zip(&self.legs) {
            geom.validate()?;
            if geom.leg_id != *leg {
                return Err(Error::Model("leg geometry order must be FR, FL, RR, RL"));
            }
        }
        Ok(())
    }

    pub fn total_mass(&self) -> f64 {
        self.trunk_mass + 4.0 * self.foot_mass
    }

    pub fn hip(&self, leg: LegId) -> Vec3 {
        Vec3::from(self.hip_offsets[leg.index()])
    }

    pub fn geometry(&self, leg: LegId) -> &LegGeometry {
        &self.legs[leg.index()]
    }
}

/// Integrator options.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimSettings {
    pub dt: f64,
    /// Physics substeps per control tick; torques are held across substeps.
    pub substeps: u32,
    /// Workspace spring stiffness, N/m.
    pub k_w: f64,
    /// Workspace damping, N·s/m.
    pub d_w: f64,
}

impl Default for SimSettings {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            substeps: 1,
            k_w: 50_000.0,
            d_w: 200.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FootState {
    pub position: Vec3,
    pub velocity: Vec3,
    pub contact: bool,
}

/// Full simulator state. Angular velocity is expressed in the body frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobotState {
    pub position: Vec3,
    pub orientation: UnitQuaternion<f64>,
    pub linear_velocity: Vec3,
    pub angular_velocity: Vec3,
    pub feet: [FootState; 4],
}

impl RobotState {
    /// Level trunk with every foot resting on the terrain under its nominal
    /// target. The trunk sits `NOMINAL_STANCE_HEIGHT` above the highest foot.
    pub fn standing(model: &RobotModel, terrain: &Terrain, x: f64, y: f64) -> Self {
        let nominal = LegId::ALL.map(|leg| model.hip(leg) + crate::controller::nominal_target(model.geometry(leg)));
        let ground = nominal.map(|p| terrain.height(x + p.x, y + p.y));
        let top = ground.iter().cloned().fold(f64::MIN, f64::max);
        let z = top + NOMINAL_STANCE_HEIGHT;
        let feet = LegId::ALL.map(|leg| {
            let p = nominal[leg.index()];
            FootState {
                position: Vec3::new(x + p.x, y + p.y, ground[leg.index()]),
                velocity: Vec3::zeros(),
                contact: false,
            }
        });
        Self {
            position: Vec3::new(x, y, z),
            orientation: UnitQuaternion::identity(),
            linear_velocity: Vec3::zeros(),
            angular_velocity: Vec3::zeros(),
            feet,
        }
    }

    pub fn rotation(&self) -> Mat3 {
        *self.orientation.to_rotation_matrix().matrix()
    }

    /// (roll, pitch, yaw), intrinsic Z-Y-X.
    pub fn roll_pitch_yaw(&self) -> (f64, f64, f64) {
        self.orientation.euler_angles()
    }

    pub fn hip_world(&self, model: &RobotModel, leg: LegId) -> Vec3 {
        self.position + self.orientation * model.hip(leg)
    }

    pub fn any_contact(&self) -> bool {
        self.feet.iter().any(|f| f.contact)
    }

    pub fn is_finite_within(&self, limit: f64) -> bool {
        let vecs = [self.position, self.linear_velocity, self.angular_velocity];
        let feet = self.feet.iter().flat_map(|f| [f.position, f.velocity]);
        vecs.into_iter()
            .chain(feet)
            .all(|v| v.iter().all(|c| c.is_finite() && c.abs() <= limit))
            && self.orientation.coords.iter().all(|c| c.is_finite())
    }

    /// Linear momentum of trunk plus feet.
    pub fn momentum(&self, model: &RobotModel) -> Vec3 {
        let feet: Vec3 = self.feet.iter().map(|f| f.velocity).sum();
        self.linear_velocity * model.trunk_mass + feet * model.foot_mass
    }

    /// Center of mass of trunk plus feet.
    pub fn center_of_mass(&self, model: &RobotModel) -> Vec3 {
        let feet: Vec3 = self.feet.iter().map(|f| f.position).sum();
        (self.position * model.trunk_mass + feet * model.foot_mass) / model.total_mass()
    }
}

fn damped_normal(j: &Mat3) -> Mat3 {
    j.transpose() * j + Mat3::identity() * (JACOBIAN_DAMPING * JACOBIAN_DAMPING)
}

fn spd_solve(a: &Mat3, b: &Vec3) -> Vec3 {
    match a.cholesky() {
        Some(ch) => ch.solve(b),
        None => Vec3::zeros(),
    }
}

/// Foot force produced by joint torques through a massless leg, hip frame:
/// `F = J (JᵀJ + λ²I)⁻¹ τ`.
pub fn leg_transmission(tau: &Vec3, j: &Mat3) -> Vec3 {
    j * spd_solve(&damped_normal(j), tau)
}

/// Damped least-squares joint velocity for a foot velocity: `(JᵀJ + λ²I)⁻¹ Jᵀ v`.
pub fn joint_velocity(j: &Mat3, foot_velocity: &Vec3) -> JointVelocities {
    spd_solve(&damped_normal(j), &(j.transpose() * foot_velocity)).into()
}

/// Output of one control tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutput {
    pub state: RobotState,
    /// Ground reaction on each foot, world frame, from the last substep.
    pub contact_forces: [Vec3; 4],
}

/// Advance one control tick of `settings.dt`.
pub fn step(
    state: &RobotState,
    torques: &TorqueCommand,
    model: &RobotModel,
    terrain: &Terrain,
    settings: &SimSettings,
) -> Result<RobotState> {
    step_detailed(state, torques, model, terrain, settings, 0.0).map(|o| o.state)
}

/// [`step`], also returning contact forces. `time` is only used in errors.
pub fn step_detailed(
    state: &RobotState,
    torques: &TorqueCommand,
    model: &RobotModel,
    terrain: &Terrain,
    settings: &SimSettings,
    time: f64,
) -> Result<StepOutput> {
    let substeps = settings.substeps.max(1);
    let h = settings.dt / f64::from(substeps);
    let mut s = *state;
    let mut contact_forces = [Vec3::zeros(); 4];
    for _ in 0..substeps {
        contact_forces = substep(&mut s, torques, model, terrain, settings, h);
    }
    for foot in s.feet.iter_mut() {
        foot.contact = terrain.height(foot.position.x, foot.position.y) - foot.position.z > 0.0;
    }
    if !s.is_finite_within(DIVERGENCE_LIMIT) {
        return Err(Error::Diverged { time });
    }
    Ok(StepOutput {
        state: s,
        contact_forces,
    })
}

fn substep(
    s: &mut RobotState,
    torques: &TorqueCommand,
    model: &RobotModel,
    terrain: &Terrain,
    settings: &SimSettings,
    h: f64,
) -> [Vec3; 4] {
    let gravity = Vec3::new(0.0, 0.0, -GRAVITY);
    let rot = s.rotation();
    let com = s.position;
    let omega_world = rot * s.angular_velocity;
    let m_f = model.foot_mass;

    let mut trunk_force = gravity * model.trunk_mass;
    let mut trunk_torque = Vec3::zeros();
    let mut contact_forces = [Vec3::zeros(); 4];

    for leg in LegId::ALL {
        let i = leg.index();
        let geom = model.geometry(leg);
        let foot = s.feet[i];
        let hip = com + rot * model.hip(leg);
        let local = rot.transpose() * (foot.position - hip);
        let ik = inverse_kinematics(&local, geom);
        let j = jacobian(&ik.angles, geom);
        let leg_force = rot * leg_transmission(&torques.leg(leg), &j);

        let mut v = foot.velocity + (leg_force / m_f + gravity) * h;
        let mut band_force = Vec3::zeros();
        if ik.clamped {
            let boundary = hip + rot * forward_kinematics(&ik.angles, geom);
            let gap = boundary - foot.position;
            let spring = gap * settings.k_w;
            v += spring * (h / m_f);
            let anchor_velocity = s.linear_velocity + omega_world.cross(&(boundary - com));
            let before = v;
            if let Some(n) = gap.try_normalize(1e-12) {
                let c = h * settings.d_w / m_f;
                let rel = (v - anchor_velocity).dot(&n);
                v -= n * (rel * c / (1.0 + c));
            }
            band_force = spring + (v - before) * (m_f / h);
        }

        contact_forces[i] = contact::resolve_contact(&foot.position, &mut v, terrain, m_f, h);

        let internal = leg_force + band_force;
        trunk_force -= internal;
        trunk_torque += (foot.position - com).cross(&(-internal));

        s.feet[i].velocity = v;
        s.feet[i].position = foot.position + v * h;
    }

    integrate_trunk(s, &trunk_force, &trunk_torque, model, h);
    contact_forces
}

/// Advance trunk velocities then pose under a world-frame wrench about the COM.
///
/// Body angular momentum takes an implicit-midpoint step of Euler's equations,
/// which keeps rotational energy and momentum magnitude exact under zero
/// torque; the attitude then turns by the midpoint rate.
pub(crate) fn integrate_trunk(s: &mut RobotState, force: &Vec3, torque: &Vec3, model: &RobotModel, h: f64) {
    let inertia = Vec3::from(model.trunk_inertia);
    let torque_body = s.orientation.inverse() * torque;
    let p0 = inertia.component_mul(&s.angular_velocity);
    let mut p1 = p0;
    for _ in 0..MIDPOINT_ITERATIONS {
        let mid = (p0 + p1) * 0.5;
        let next = p0 + (mid.cross(&mid.component_div(&inertia)) + torque_body) * h;
        let done = (next - p1).norm() <= 1e-15 * (1.0 + next.norm());
        p1 = next;
        if done {
            break;
        }
    }
    let spin = ((p0 + p1) * 0.5).component_div(&inertia);
    let delta = UnitQuaternion::from_scaled_axis(spin * h);
    s.orientation = UnitQuaternion::new_normalize((s.orientation * delta).into_inner());
    s.angular_velocity = p1.component_div(&inertia);
    s.linear_velocity += force * (h / model.trunk_mass);
    s.position += s.linear_velocity * h;
}

/// Per-leg sensor values in hip frames, plus the body rotation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorReadout {
    pub legs: [LegMeasurement; 4],
    pub rotation: Mat3,
}

/// Extract controller measurements from a state.
pub fn observe(state: &RobotState, model: &RobotModel) -> SensorReadout {
    let rot = state.rotation();
    let omega = state.angular_velocity;
    let legs = LegId::ALL.map(|leg| {
        let geom = model.geometry(leg);
        let foot = &state.feet[leg.index()];
        let hip_body = model.hip(leg);
        let hip = state.position + rot * hip_body;
        let p = rot.transpose() * (foot.position - hip);
        let v = rot.transpose() * (foot.velocity - state.linear_velocity) - omega.cross(&(hip_body + p));
        let q = inverse_kinematics(&p, geom).angles;
        let j = jacobian(&q, geom);
        LegMeasurement {
            foot_position: p,
            foot_velocity: v,
            q,
            qdot: joint_velocity(&j, &v),
            jacobian: j,
            contact: foot.contact,
        }
    });
    SensorReadout { legs, rotation: rot }
}

/// Rotation of a trunk pose by yaw only, for tests and initial conditions.
pub fn yaw_rotation(yaw: f64) -> UnitQuaternion<f64> {
    UnitQuaternion::from_rotation_matrix(&Rotation3::from_axis_angle(&Vec3::z_axis(), yaw))
}

/// Owns one simulation: state, clock and last contact forces.
#[derive(Debug, Clone)]
pub struct Simulator {
    pub model: RobotModel,
    pub terrain: Terrain,
    pub settings: SimSettings,
    pub state: RobotState,
    pub time: f64,
    pub contact_forces: [Vec3; 4],
}

impl Simulator {
    pub fn new(model: RobotModel, terrain: Terrain, settings: SimSettings, state: RobotState) -> Self {
        Self {
            model,
            terrain,
            settings,
            state,
            time: 0.0,
            contact_forces: [Vec3::zeros(); 4],
        }
    }

    pub fn observe(&self) -> SensorReadout {
        observe(&self.state, &self.model)
    }

    pub fn advance(&mut self, torques: &TorqueCommand) -> Result<()> {
        let out = step_detailed(
            &self.state,
            torques,
            &self.model,
            &self.terrain,
            &self.settings,
            self.time,
        )?;
        self.state = out.state;
        self.contact_forces = out.contact_forces;
        self.time += self.settings.dt;
        Ok(())
    }

    pub fn normal_force_sum(&self) -> f64 {
        self.contact_forces.iter().map(|f| f.z).sum()
    }
}
