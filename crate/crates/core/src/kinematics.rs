//! Kinematics of a 3-DOF quadruped leg (hip abduction, hip flexion, knee).
//!
//! Conventions, all in the hip frame (body-aligned, origin on the abduction axis,
//! x forward, y left, z up):
//!
//! - `q = (0, 0, 0)` is the straight leg pointing along −z, with the thigh offset
//!   laterally by `side * hip_offset`.
//! - Abduction rotates about +x. Hip flexion and knee rotate about the leg's
//!   lateral axis so that positive angles swing the distal link forward.
//! - The knee is kept in `(0, π)`: the foot sits ahead of the knee, i.e. the knee
//!   points backward as on Go1-class robots.
//!
//! "Leg length" below is the distance from the hip-flexion joint to the foot.
//! The reachable band used for clamping is `[0.05, 0.95] * (thigh + calf)`.

use core::f64::consts::PI;

use num_traits::Euclid;
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::{Error, Mat3, Result, Vec3};

/// Lower edge of the leg-length band, as a fraction of `thigh + calf`.
pub const WORKSPACE_MIN_FRACTION: f64 = 0.05;
/// Upper edge of the leg-length band, as a fraction of `thigh + calf`.
pub const WORKSPACE_MAX_FRACTION: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LegId {
    FR,
    FL,
    RR,
    RL,
}

impl LegId {
    /// Leg order used for every per-leg array and the 12-element torque vector.
    pub const ALL: [LegId; 4] = [LegId::FR, LegId::FL, LegId::RR, LegId::RL];

    pub fn index(self) -> usize {
        match self {
            LegId::FR => 0,
            LegId::FL => 1,
            LegId::RR => 2,
            LegId::RL => 3,
        }
    }

    pub fn side(self) -> Side {
        match self {
            LegId::FL | LegId::RL => Side::Left,
            LegId::FR | LegId::RR => Side::Right,
        }
    }

    pub fn is_front(self) -> bool {
        matches!(self, LegId::FR | LegId::FL)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    /// `+1` for left legs, `-1` for right legs.
    pub fn sign(self) -> f64 {
        match self {
            Side::Left => 1.0,
            Side::Right => -1.0,
        }
    }

    pub fn mirrored(self) -> Self {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// Link lengths of one leg.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LegGeometry {
    /// Lateral offset from the abduction axis to the thigh, m.
    pub hip_offset: f64,
    pub thigh_len: f64,
    pub calf_len: f64,
    pub side: Side,
    pub leg_id: LegId,
}

impl LegGeometry {
    pub fn new(leg_id: LegId, hip_offset: f64, thigh_len: f64, calf_len: f64) -> Result<Self> {
        let geom = Self {
            hip_offset,
            thigh_len,
            calf_len,
            side: leg_id.side(),
            leg_id,
        };
        geom.validate()?;
        Ok(geom)
    }

    /// Go1-like link lengths: 0.08 m hip offset, 0.213 m thigh and calf.
    pub fn go1_like(leg_id: LegId) -> Self {
        Self {
            hip_offset: 0.08,
            thigh_len: 0.213,
            calf_len: 0.213,
            side: leg_id.side(),
            leg_id,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let lengths = [self.hip_offset, self.thigh_len, self.calf_len];
        if lengths.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return Err(Error::Geometry("link lengths must be finite and positive"));
        }
        Ok(())
    }

    pub fn side_sign(&self) -> f64 {
        self.side.sign()
    }

    pub fn max_reach(&self) -> f64 {
        self.thigh_len + self.calf_len
    }

    pub fn min_leg_length(&self) -> f64 {
        let floor = (self.thigh_len - self.calf_len).abs();
        (WORKSPACE_MIN_FRACTION * self.max_reach()).max(floor)
    }

    pub fn max_leg_length(&self) -> f64 {
        WORKSPACE_MAX_FRACTION * self.max_reach()
    }
}

/// Joint positions (abduction, hip flexion, knee), rad.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointAngles(pub [f64; 3]);

impl JointAngles {
    pub const ZERO: Self = Self([0.0; 3]);

    pub fn new(abduction: f64, hip: f64, knee: f64) -> Self {
        Self([abduction, hip, knee])
    }

    pub fn as_vec(&self) -> Vec3 {
        Vec3::from(self.0)
    }
}

/// Joint velocities, rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointVelocities(pub [f64; 3]);

impl JointVelocities {
    pub const ZERO: Self = Self([0.0; 3]);

    pub fn as_vec(&self) -> Vec3 {
        Vec3::from(self.0)
    }
}

impl From<Vec3> for JointVelocities {
    fn from(v: Vec3) -> Self {
        Self([v.x, v.y, v.z])
    }
}

/// Result of [`inverse_kinematics`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IkSolution {
    pub angles: JointAngles,
    /// The target was outside the reachable band and was moved onto it.
    pub clamped: bool,
    /// Leg length of the original target projected onto the leg plane.
    pub raw_leg_length: f64,
}

/// Foot position in the leg plane (after abduction is undone): (forward, downward-negative).
fn sagittal(q: &JointAngles, geom: &LegGeometry) -> (f64, f64) {
    let [_, hip, knee] = q.0;
    let x = geom.thigh_len * hip.sin() + geom.calf_len * (hip + knee).sin();
    let z = -geom.thigh_len * hip.cos() - geom.calf_len * (hip + knee).cos();
    (x, z)
}

fn abduct(q0: f64, v: Vec3) -> Vec3 {
    let (s, c) = q0.sin_cos();
    Vec3::new(v.x, c * v.y - s * v.z, s * v.y + c * v.z)
}

/// Foot position in the hip frame.
pub fn forward_kinematics(q: &JointAngles, geom: &LegGeometry) -> Vec3 {
    let (x, z) = sagittal(q, geom);
    abduct(q.0[0], Vec3::new(x, geom.side_sign() * geom.hip_offset, z))
}

/// Position of the hip-flexion joint in the hip frame for a given abduction angle.
pub fn thigh_origin(abduction: f64, geom: &LegGeometry) -> Vec3 {
    abduct(abduction, Vec3::new(0.0, geom.side_sign() * geom.hip_offset, 0.0))
}

/// Foot Jacobian `d(foot)/dq` in the hip frame.
pub fn jacobian(q: &JointAngles, geom: &LegGeometry) -> Mat3 {
    let [q0, hip, knee] = q.0;
    let l2 = geom.calf_len;
    let (x, z) = sagittal(q, geom);
    let y = geom.side_sign() * geom.hip_offset;
    let (s0, c0) = q0.sin_cos();

    let d_abd = Vec3::new(0.0, -s0 * y - c0 * z, c0 * y - s0 * z);
    let d_hip = abduct(q0, Vec3::new(-z, 0.0, x));
    let d_knee = abduct(q0, Vec3::new(l2 * (hip + knee).cos(), 0.0, l2 * (hip + knee).sin()));
    Mat3::from_columns(&[d_abd, d_hip, d_knee])
}

fn wrap_pi(a: f64) -> f64 {
    let w = Euclid::rem_euclid(&(a + PI), &(2.0 * PI)) - PI;
    if w <= -PI {
        w + 2.0 * PI
    } else {
        w
    }
}

/// Joint angles placing the foot at `p` (hip frame), knee-backward branch.
///
/// Targets whose leg length falls outside `[min_leg_length, max_leg_length]` are
/// moved radially (about the hip-flexion joint) onto the nearest edge, and
/// `clamped` is set. Targets inside the lateral offset cylinder are projected
/// onto it and also flagged.
pub fn inverse_kinematics(p: &Vec3, geom: &LegGeometry) -> IkSolution {
    let d = geom.hip_offset;
    let y_off = geom.side_sign() * d;
    let mut clamped = false;

    let r_yz_sq = p.y * p.y + p.z * p.z;
    let below_sq = r_yz_sq - d * d;
    let z_plane = if below_sq > 0.0 {
        -below_sq.sqrt()
    } else {
        clamped = true;
        0.0
    };
    let abduction = wrap_pi(p.z.atan2(p.y) - z_plane.atan2(y_off));

    let mut x = p.x;
    let mut z = z_plane;
    let raw = (x * x + z * z).sqrt();
    let (lo, hi) = (geom.min_leg_length(), geom.max_leg_length());
    let len = if raw > hi {
        hi
    } else if raw < lo {
        lo
    } else {
        raw
    };
    if len != raw {
        clamped = true;
        if raw > 0.0 {
            x *= len / raw;
            z *= len / raw;
        } else {
            x = 0.0;
            z = -len;
        }
    }

    let (l1, l2) = (geom.thigh_len, geom.calf_len);
    let cos_knee = ((len * len - l1 * l1 - l2 * l2) / (2.0 * l1 * l2)).clamp(-1.0, 1.0);
    let knee = cos_knee.acos();
    let hip = x.atan2(-z) - (l2 * knee.sin()).atan2(l1 + l2 * knee.cos());

    IkSolution {
        angles: JointAngles([abduction, wrap_pi(hip), knee]),
        clamped,
        raw_leg_length: raw,
    }
}

/// Distance from the hip-flexion joint to the foot for a hip-frame foot position.
pub fn leg_length(p: &Vec3, geom: &LegGeometry) -> f64 {
    let d = geom.hip_offset;
    let below = (p.y * p.y + p.z * p.z - d * d).max(0.0);
    (p.x * p.x + below).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Matrix4, Vector4};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn geom(side: LegId) -> LegGeometry {
        LegGeometry::go1_like(side)
    }

    // Homogeneous transform chain, written independently of the closed form.
    fn fk_transform_chain(q: &JointAngles, g: &LegGeometry) -> Vec3 {
        let rot_x = |a: f64| {
            let (s, c) = a.sin_cos();
            Matrix4::new(
                1.0, 0.0, 0.0, 0.0, //
                0.0, c, -s, 0.0, //
                0.0, s, c, 0.0, //
                0.0, 0.0, 0.0, 1.0,
            )
        };
        // Flexion joints rotate about -y.
        let rot_neg_y = |a: f64| {
            let (s, c) = a.sin_cos();
            Matrix4::new(
                c, 0.0, -s, 0.0, //
                0.0, 1.0, 0.0, 0.0, //
                s, 0.0, c, 0.0, //
                0.0, 0.0, 0.0, 1.0,
            )
        };
        let trans = |x: f64, y: f64, z: f64| {
            let mut m = Matrix4::identity();
            m[(0, 3)] = x;
            m[(1, 3)] = y;
            m[(2, 3)] = z;
            m
        };
        let chain = rot_x(q.0[0])
            * trans(0.0, g.side_sign() * g.hip_offset, 0.0)
            * rot_neg_y(q.0[1])
            * trans(0.0, 0.0, -g.thigh_len)
            * rot_neg_y(q.0[2])
            * trans(0.0, 0.0, -g.calf_len);
        let foot = chain * Vector4::new(0.0, 0.0, 0.0, 1.0);
        Vec3::new(foot.x, foot.y, foot.z)
    }

    fn random_q(rng: &mut ChaCha8Rng) -> JointAngles {
        JointAngles([
            rng.random_range(-0.8..0.8),
            rng.random_range(-1.5..1.5),
            rng.random_range(0.2..2.8),
        ])
    }

    #[test]
    fn straight_leg_position() {
        let p = forward_kinematics(&JointAngles::ZERO, &geom(LegId::FL));
        assert!((p - Vec3::new(0.0, 0.08, -0.426)).norm() < 1e-15);
    }

    #[test]
    fn folded_leg_position() {
        let p = forward_kinematics(&JointAngles::new(0.0, 0.0, PI), &geom(LegId::FL));
        assert!((p - Vec3::new(0.0, 0.08, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn fk_matches_transform_chain() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for leg in LegId::ALL {
            for _ in 0..100 {
                let q = random_q(&mut rng);
                let g = geom(leg);
                let err = (forward_kinematics(&q, &g) - fk_transform_chain(&q, &g)).norm();
                assert!(err < 1e-12, "err {err}");
            }
        }
    }

    #[test]
    fn jacobian_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let h = 1e-6;
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let q = random_q(&mut rng);
            let g = geom(LegId::RR);
            let j = jacobian(&q, &g);
            for k in 0..3 {
                let mut plus = q;
                let mut minus = q;
                plus.0[k] += h;
                minus.0[k] -= h;
                let fd = (forward_kinematics(&plus, &g) - forward_kinematics(&minus, &g)) / (2.0 * h);
                worst = worst.max((j.column(k) - fd).amax());
            }
        }
        assert!(worst < 1e-5, "worst {worst}");
    }

    #[test]
    fn straight_leg_is_singular() {
        let j = jacobian(&JointAngles::ZERO, &geom(LegId::FR));
        assert_eq!(j[(2, 2)], 0.0);
        let sv = j.singular_values();
        assert!(sv.min() < 1e-12);
    }

    #[test]
    fn bent_stance_has_full_rank() {
        let j = jacobian(&JointAngles::new(0.0, -0.5, 1.0), &geom(LegId::FR));
        let sv = j.singular_values();
        assert!(sv.min() > 1e-3);
        assert!((sv.max() / sv.min()).is_finite());
    }

    #[test]
    fn ik_roundtrip_on_reachable_interior() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut worst = 0.0f64;
        let mut n = 0;
        while n < 1000 {
            let q = random_q(&mut rng);
            let leg = LegId::ALL[n % 4];
            let g = geom(leg);
            let (_, z) = sagittal(&q, &g);
            let len = leg_length(&forward_kinematics(&q, &g), &g);
            // IK returns the branch with the foot below the abduction plane.
            if z > -1e-3 || len < g.min_leg_length() || len > g.max_leg_length() {
                continue;
            }
            let sol = inverse_kinematics(&forward_kinematics(&q, &g), &g);
            assert!(!sol.clamped);
            for k in 0..3 {
                worst = worst.max((sol.angles.0[k] - q.0[k]).abs());
            }
            n += 1;
        }
        assert!(worst < 1e-9, "worst {worst}");
    }

    #[test]
    fn straight_leg_target_is_clamped_onto_same_ray() {
        let g = geom(LegId::FL);
        let target = Vec3::new(0.0, 0.08, -0.426);
        let sol = inverse_kinematics(&target, &g);
        assert!(sol.clamped);
        assert!(sol.angles.0[0].abs() < 1e-12);
        let foot = forward_kinematics(&sol.angles, &g);
        assert!(foot.x.abs() < 1e-12);
        assert!((foot.y - 0.08).abs() < 1e-12);
        assert!((leg_length(&foot, &g) - g.max_leg_length()).abs() < 1e-12);
    }

    #[test]
    fn far_target_is_clamped_to_max_reach() {
        let g = geom(LegId::RL);
        let sol = inverse_kinematics(&Vec3::new(0.05, 0.08, -0.6), &g);
        assert!(sol.clamped);
        let foot = forward_kinematics(&sol.angles, &g);
        assert!((leg_length(&foot, &g) - 0.95 * 0.426).abs() < 1e-12);
        assert!(sol.angles.0[2] > 0.0 && sol.angles.0[2] < PI);
    }

    #[test]
    fn near_target_is_clamped_to_min_reach() {
        let g = geom(LegId::FR);
        let sol = inverse_kinematics(&Vec3::new(0.0, -0.08, -0.005), &g);
        assert!(sol.clamped);
        let foot = forward_kinematics(&sol.angles, &g);
        assert!((leg_length(&foot, &g) - g.min_leg_length()).abs() < 1e-12);
    }

    #[test]
    fn mirror_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let q = random_q(&mut rng);
            let mirrored = JointAngles([-q.0[0], q.0[1], q.0[2]]);
            let left = forward_kinematics(&q, &geom(LegId::FL));
            let right = forward_kinematics(&mirrored, &geom(LegId::FR));
            assert!((left.x - right.x).abs() < 1e-15);
            assert!((left.y + right.y).abs() < 1e-15);
            assert!((left.z - right.z).abs() < 1e-15);
        }
    }

    #[test]
    fn jacobian_velocity_matches_time_differenced_fk() {
        let g = geom(LegId::FL);
        let q_of = |t: f64| JointAngles([0.2 * t.sin(), -0.5 + 0.3 * (2.0 * t).cos(), 1.2 + 0.4 * t.sin()]);
        let qd_of = |t: f64| Vec3::new(0.2 * t.cos(), -0.6 * (2.0 * t).sin(), 0.4 * t.cos());
        let dt = 1e-5;
        let mut t = 0.0;
        while t < 1.0 {
            let v = jacobian(&q_of(t), &g) * qd_of(t);
            let fd = (forward_kinematics(&q_of(t + dt), &g) - forward_kinematics(&q_of(t), &g)) / dt;
            assert!((v - fd).amax() < 1e-4);
            t += 0.01;
        }
    }

    #[test]
    fn rejects_non_positive_lengths() {
        assert!(LegGeometry::new(LegId::FR, 0.08, 0.0, 0.2).is_err());
        assert!(LegGeometry::new(LegId::FR, 0.08, 0.2, 0.2).is_ok());
    }
}
