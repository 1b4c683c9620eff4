//! Two-frequency phase oscillator and half-sine foot force profiles.
//!
//! The phase advances at `2π f0` while `π ≤ θ < 2π` (impulse half, feet push)
//! and at `2π f1` while `0 ≤ θ < π` (flight, landing, rest). Foot forces follow
//! `(s_x Fx, s_y Fy, Fz) sin θ` during the impulse half and are zero otherwise,
//! so every component points into the ground at the peak.

use core::f64::consts::{PI, TAU};

use num_traits::Euclid;
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::kinematics::LegId;
use crate::{Error, Result, Vec3};

/// Closed intervals allowed for the optimized parameters.
pub mod bounds {
    pub const F0: (f64, f64) = (0.75, 1.75);
    pub const FX: (f64, f64) = (0.0, 150.0);
    pub const FY: (f64, f64) = (0.0, 150.0);
    pub const FZ: (f64, f64) = (150.0, 350.0);
}

/// Default off-phase frequency: 2 s between impulses.
pub const DEFAULT_F1: f64 = 0.25;

/// Force profile parameters: impulse frequency `f0`, fixed off-phase
/// frequency `f1`, and force amplitudes in newtons.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileParams {
    pub f0: f64,
    pub f1: f64,
    pub fx: f64,
    pub fy: f64,
    pub fz: f64,
}

impl ProfileParams {
    pub fn new(f0: f64, fx: f64, fy: f64, fz: f64) -> Self {
        Self {
            f0,
            f1: DEFAULT_F1,
            fx,
            fy,
            fz,
        }
    }

    pub fn with_f1(mut self, f1: f64) -> Self {
        self.f1 = f1;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let check = |name, value: f64, (lower, upper): (f64, f64)| {
            if value.is_finite() && value >= lower && value <= upper {
                Ok(())
            } else {
                Err(Error::ParamOutOfRange {
                    name,
                    value,
                    lower,
                    upper,
                })
            }
        };
        check("f0", self.f0, bounds::F0)?;
        check("fx", self.fx, bounds::FX)?;
        check("fy", self.fy, bounds::FY)?;
        check("fz", self.fz, bounds::FZ)?;
        check("f1", self.f1, (f64::MIN_POSITIVE, f64::MAX))
    }

    /// `(T_impulse, T_off)` in seconds.
    pub fn durations(&self) -> (f64, f64) {
        durations(self)
    }
}

/// Jump direction; selects the per-leg sign pattern applied to `Fx` and `Fy`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JumpType {
    Forward,
    Backward,
    LateralLeft,
    LateralRight,
    TwistCcw,
    TwistCw,
}

impl JumpType {
    pub const ALL: [JumpType; 6] = [
        JumpType::Forward,
        JumpType::Backward,
        JumpType::LateralLeft,
        JumpType::LateralRight,
        JumpType::TwistCcw,
        JumpType::TwistCw,
    ];

    /// `(s_x, s_y)` for one leg.
    ///
    /// Feet push opposite to the desired trunk motion; for twists the front and
    /// rear feet push laterally in opposite directions.
    pub fn signs(self, leg: LegId) -> (f64, f64) {
        let front = if leg.is_front() { 1.0 } else { -1.0 };
        match self {
            JumpType::Forward => (1.0, 0.0),
            JumpType::Backward => (-1.0, 0.0),
            JumpType::LateralLeft => (0.0, 1.0),
            JumpType::LateralRight => (0.0, -1.0),
            JumpType::TwistCcw => (0.0, front),
            JumpType::TwistCw => (0.0, -front),
        }
    }

    pub fn is_twist(self) -> bool {
        matches!(self, JumpType::TwistCcw | JumpType::TwistCw)
    }

    pub fn is_lateral(self) -> bool {
        matches!(self, JumpType::LateralLeft | JumpType::LateralRight)
    }

    pub fn name(self) -> &'static str {
        match self {
            JumpType::Forward => "forward",
            JumpType::Backward => "backward",
            JumpType::LateralLeft => "lateral-left",
            JumpType::LateralRight => "lateral-right",
            JumpType::TwistCcw => "twist-ccw",
            JumpType::TwistCw => "twist-cw",
        }
    }
}

impl core::str::FromStr for JumpType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        JumpType::ALL
            .into_iter()
            .find(|j| j.name() == s)
            .ok_or_else(|| Error::Config(alloc::format!("unknown jump type `{s}`")))
    }
}

/// Phase and the frequency selected by it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorState {
    pub theta: f64,
    pub frequency: f64,
}

impl OscillatorState {
    pub fn new(theta: f64, params: &ProfileParams) -> Self {
        let theta = wrap_phase(theta);
        Self {
            theta,
            frequency: select_frequency(theta, params),
        }
    }

    pub fn impulse_active(&self) -> bool {
        impulse_active(self.theta)
    }
}

pub fn wrap_phase(theta: f64) -> f64 {
    let w = Euclid::rem_euclid(&theta, &TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs.
    if w >= TAU {
        0.0
    } else {
        w
    }
}

fn select_frequency(theta: f64, params: &ProfileParams) -> f64 {
    if (PI..TAU).contains(&theta) {
        params.f0
    } else {
        params.f1
    }
}

/// One explicit Euler step of the phase.
pub fn step_phase(state: OscillatorState, params: &ProfileParams, dt: f64) -> OscillatorState {
    debug_assert!(dt > 0.0 && dt <= 0.01, "dt = {dt}");
    let f = select_frequency(state.theta, params);
    OscillatorState::new(state.theta + TAU * f * dt, params)
}

pub fn impulse_active(theta: f64) -> bool {
    theta.sin() < 0.0
}

/// Commanded foot force for one leg in the body-aligned leg frame, N.
pub fn foot_force(params: &ProfileParams, jump: JumpType, leg: LegId, theta: f64) -> Vec3 {
    let s = theta.sin();
    if s >= 0.0 {
        return Vec3::zeros();
    }
    let (sx, sy) = jump.signs(leg);
    Vec3::new(sx * params.fx, sy * params.fy, params.fz) * s
}

pub fn durations(params: &ProfileParams) -> (f64, f64) {
    (0.5 / params.f0, 0.5 / params.f1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params(f0: f64, fz: f64) -> ProfileParams {
        ProfileParams::new(f0, 0.0, 0.0, fz)
    }

    #[test]
    fn impulse_branch_step() {
        let p = params(1.25, 250.0);
        let next = step_phase(OscillatorState::new(PI, &p), &p, 0.001);
        assert!((next.theta - (PI + TAU * 1.25 * 0.001)).abs() < 1e-15);
    }

    #[test]
    fn off_branch_step() {
        let p = params(1.25, 250.0).with_f1(0.25);
        let next = step_phase(OscillatorState::new(PI / 2.0, &p), &p, 0.001);
        assert!((next.theta - (PI / 2.0 + TAU * 0.25 * 0.001)).abs() < 1e-15);
    }

    #[test]
    fn half_cycle_at_one_hertz_lasts_half_a_second() {
        let p = params(1.0, 250.0);
        let mut s = OscillatorState::new(PI, &p);
        let mut ticks = 0;
        while s.theta >= PI {
            s = step_phase(s, &p, 0.001);
            ticks += 1;
        }
        assert!((ticks as f64 * 0.001 - 0.5).abs() <= 0.001 + 1e-12, "{ticks}");
    }

    #[test]
    fn impulse_indicator() {
        assert!(impulse_active(1.5 * PI));
        assert!(!impulse_active(PI / 4.0));
        assert!(!impulse_active(0.0));
    }

    #[test]
    fn peak_and_inactive_forces() {
        let p = params(1.0, 300.0);
        let f = foot_force(&p, JumpType::Forward, LegId::FR, 1.5 * PI);
        assert!((f - Vec3::new(0.0, 0.0, -300.0)).norm() < 1e-12);
        let full = ProfileParams::new(1.3, 120.0, 90.0, 320.0);
        for jump in JumpType::ALL {
            for leg in LegId::ALL {
                assert_eq!(foot_force(&full, jump, leg, PI / 4.0), Vec3::zeros());
            }
        }
    }

    #[test]
    fn twist_flips_lateral_force_between_front_and_rear() {
        let p = ProfileParams::new(1.0, 0.0, 100.0, 200.0);
        for jump in [JumpType::TwistCcw, JumpType::TwistCw] {
            for leg in LegId::ALL {
                let (_, sy) = jump.signs(leg);
                let f = foot_force(&p, jump, leg, 1.5 * PI);
                assert!((f.y - (-100.0 * sy)).abs() < 1e-12);
            }
            assert_eq!(jump.signs(LegId::FR).1, -jump.signs(LegId::RR).1);
            assert_eq!(jump.signs(LegId::FL).1, -jump.signs(LegId::RL).1);
        }
    }

    #[test]
    fn sign_pattern_structure() {
        for leg in LegId::ALL {
            assert_eq!(JumpType::Forward.signs(leg).0, 1.0);
            assert_eq!(JumpType::LateralLeft.signs(leg).1, 1.0);
            assert_eq!(JumpType::LateralRight.signs(leg).1, -1.0);
        }
    }

    #[test]
    fn durations_from_frequencies() {
        let (t_imp, _) = durations(&params(1.0, 200.0));
        assert_eq!(t_imp, 0.5);
        let (t_imp, t_off) = durations(&params(1.75, 200.0).with_f1(0.25));
        assert!((t_imp - 0.285_714_285_714).abs() < 1e-9);
        assert_eq!(t_off, 2.0);
    }

    #[test]
    fn half_sine_area() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let p = params(rng.random_range(0.75..1.75), rng.random_range(150.0..350.0));
            let dt = 0.001;
            let mut s = OscillatorState::new(PI, &p);
            let mut area = 0.0;
            while s.theta >= PI {
                area += foot_force(&p, JumpType::Forward, LegId::FL, s.theta).z.abs() * dt;
                s = step_phase(s, &p, dt);
            }
            let (t_imp, _) = durations(&p);
            let expected = p.fz * t_imp * 2.0 / PI;
            assert!((area - expected).abs() / expected < 1e-3);
        }
    }

    #[test]
    fn force_is_continuous_at_half_cycle_boundaries() {
        let p = ProfileParams::new(1.0, 100.0, 100.0, 300.0);
        for theta in [PI, TAU - 1e-12, 1e-12] {
            assert!(foot_force(&p, JumpType::Forward, LegId::FR, theta).norm() < 1e-9);
        }
    }

    #[test]
    fn indicator_is_periodic() {
        let p = params(1.25, 200.0).with_f1(0.5);
        let (t_imp, t_off) = durations(&p);
        let period = ((t_imp + t_off) / 0.001).round() as usize;
        let mut s = OscillatorState::new(PI, &p);
        let mut trace = std::vec::Vec::new();
        let mut last = s.theta;
        let mut wraps = 0;
        for _ in 0..3 * period {
            trace.push(s.impulse_active());
            s = step_phase(s, &p, 0.001);
            if s.theta < last {
                wraps += 1;
            }
            last = s.theta;
        }
        assert!(wraps >= 2);
        let mismatches = (0..period).filter(|&i| trace[i] != trace[i + period]).count();
        // Each period may shift an edge by one tick.
        assert!(mismatches <= 2, "{mismatches}");
    }

    #[test]
    fn validates_bounds() {
        assert!(ProfileParams::new(1.0, 0.0, 0.0, 150.0).validate().is_ok());
        assert!(ProfileParams::new(2.0, 0.0, 0.0, 150.0).validate().is_err());
        assert!(ProfileParams::new(1.0, 0.0, 0.0, 360.0).validate().is_err());
        assert!(ProfileParams::new(1.0, 0.0, 0.0, 200.0)
            .with_f1(0.0)
            .validate()
            .is_err());
    }

    #[test]
    fn jump_type_names_roundtrip() {
        for j in JumpType::ALL {
            assert_eq!(j.name().parse::<JumpType>().unwrap(), j);
        }
    }
}
