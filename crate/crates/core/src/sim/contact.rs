#[allow(unused_imports)]
use num_traits::Float;

use super::terrain::Terrain;
use crate::Vec3;

/// Ground reaction on a point foot, world frame.
///
/// Normal: `max(0, k_n δ - d_n ż)` for penetration `δ > 0`. Tangential:
/// `-min(k_t |v_t|, μ F_n) v̂_t` with `k_t = μ F_n / v_slip`, i.e. viscous
/// below the slip speed and Coulomb-capped above it.
pub fn contact_force(foot_pos: &Vec3, foot_vel: &Vec3, terrain: &Terrain) -> Vec3 {
    let c = &terrain.contact;
    let depth = terrain.height(foot_pos.x, foot_pos.y) - foot_pos.z;
    if depth <= 0.0 {
        return Vec3::zeros();
    }
    let normal = (c.k_n * depth - c.d_n * foot_vel.z).max(0.0);
    let (vx, vy) = (foot_vel.x, foot_vel.y);
    let speed = (vx * vx + vy * vy).sqrt();
    if speed == 0.0 || normal == 0.0 {
        return Vec3::new(0.0, 0.0, normal);
    }
    let cap = c.mu * normal;
    let magnitude = (cap / c.v_slip * speed).min(cap);
    Vec3::new(-magnitude * vx / speed, -magnitude * vy / speed, normal)
}

/// Normal and friction force for one foot over a step of length `h`, with the
/// normal damping and the viscous friction branch taken implicitly.
///
/// `velocity` is the foot velocity after all other forces of the step have been
/// applied; it is overwritten with the post-contact velocity. The returned force
/// is the one consistent with that velocity change.
pub(crate) fn resolve_contact(foot_pos: &Vec3, velocity: &mut Vec3, terrain: &Terrain, mass: f64, h: f64) -> Vec3 {
    let c = &terrain.contact;
    let depth = terrain.height(foot_pos.x, foot_pos.y) - foot_pos.z;
    if depth <= 0.0 {
        return Vec3::zeros();
    }
    let vz = (velocity.z + h * c.k_n * depth / mass) / (1.0 + h * c.d_n / mass);
    let normal = c.k_n * depth - c.d_n * vz;
    if normal <= 0.0 {
        return Vec3::zeros();
    }
    velocity.z = vz;

    let (vx, vy) = (velocity.x, velocity.y);
    let k_t = c.mu * normal / c.v_slip;
    let shrink = 1.0 / (1.0 + h * k_t / mass);
    let (lx, ly) = (vx * shrink, vy * shrink);
    let (fx, fy) = if (lx * lx + ly * ly).sqrt() <= c.v_slip {
        velocity.x = lx;
        velocity.y = ly;
        (-k_t * lx, -k_t * ly)
    } else {
        let speed = (vx * vx + vy * vy).sqrt();
        let cap = c.mu * normal;
        let (fx, fy) = (-cap * vx / speed, -cap * vy / speed);
        velocity.x += h * fx / mass;
        velocity.y += h * fy / mass;
        (fx, fy)
    };
    Vec3::new(fx, fy, normal)
}
