use core::f64::consts::{PI, TAU};

use num_traits::Euclid;
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::config::{ContactSource, ExperimentConfig};
use crate::controller::{nominal_target, total_torque, ControllerInputs, ForceThresholdContact, TorqueCommand};
use crate::kinematics::LegId;
use crate::profile::{step_phase, JumpType, OscillatorState, ProfileParams};
use crate::sim::{RobotState, Simulator, Terrain};
use crate::{Result, Vec3};

/// Roll or pitch beyond this counts as a fall, rad.
pub const FALL_TILT: f64 = 1.05;
/// Trunk height above the local terrain below which a grounded robot has fallen, m.
pub const FALL_HEIGHT: f64 = 0.10;

/// Trunk x, y and accumulated yaw.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PlanarPose {
    pub x: f64,
    pub y: f64,
    pub yaw: f64,
}

/// Accumulates yaw across the ±π wrap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YawTracker {
    last: f64,
    total: f64,
}

impl YawTracker {
    pub fn new(yaw: f64) -> Self {
        Self { last: yaw, total: yaw }
    }

    /// Feed the next wrapped yaw sample; returns the unwrapped value.
    pub fn update(&mut self, yaw: f64) -> f64 {
        let step = Euclid::rem_euclid(&(yaw - self.last + PI), &TAU) - PI;
        self.total += step;
        self.last = yaw;
        self.total
    }

    pub fn unwrapped(&self) -> f64 {
        self.total
    }
}

/// Signed progress for a jump type between two poses.
pub fn objective(jump: JumpType, init: &PlanarPose, fin: &PlanarPose) -> f64 {
    match jump {
        JumpType::Forward => fin.x - init.x,
        JumpType::Backward => -(fin.x - init.x),
        JumpType::LateralLeft => fin.y - init.y,
        JumpType::LateralRight => -(fin.y - init.y),
        JumpType::TwistCcw => fin.yaw - init.yaw,
        JumpType::TwistCw => -(fin.yaw - init.yaw),
    }
}

/// Tilted past [`FALL_TILT`], or trunk below [`FALL_HEIGHT`] while any foot is down.
pub fn detect_fall(state: &RobotState, terrain: &Terrain) -> bool {
    let (roll, pitch, _) = state.roll_pitch_yaw();
    if roll.abs() > FALL_TILT || pitch.abs() > FALL_TILT {
        return true;
    }
    let ground = terrain.height(state.position.x, state.position.y);
    state.any_contact() && state.position.z - ground < FALL_HEIGHT
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpisodePhase {
    Settle,
    Jump,
    Landing,
}

/// One control tick, as seen by an [`EpisodeObserver`].
#[derive(Debug, Clone, Copy)]
pub struct TickRecord<'a> {
    pub time: f64,
    pub phase: EpisodePhase,
    pub theta: Option<f64>,
    pub state: &'a RobotState,
    pub torques: &'a TorqueCommand,
    pub contact_forces: &'a [Vec3; 4],
}

/// Per-tick hook used for trajectory dumps.
pub trait EpisodeObserver {
    fn on_tick(&mut self, tick: &TickRecord<'_>);
}

impl<O: EpisodeObserver + ?Sized> EpisodeObserver for &mut O {
    fn on_tick(&mut self, tick: &TickRecord<'_>) {
        (**self).on_tick(tick);
    }
}

pub struct NoObserver;

impl EpisodeObserver for NoObserver {
    fn on_tick(&mut self, _: &TickRecord<'_>) {}
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpisodeResult {
    /// Zero whenever `fell` is set.
    pub objective: f64,
    /// The objective computed from the poses, before the fall rule.
    pub raw_objective: f64,
    pub fell: bool,
    pub diverged: bool,
    pub init: PlanarPose,
    pub fin: PlanarPose,
    /// Highest trunk z after settling, m.
    pub peak_height: f64,
    /// Trunk z at the end of settling, m.
    pub standing_height: f64,
    pub duration: f64,
    pub ticks: usize,
}

struct Runner<'c, O> {
    cfg: &'c ExperimentConfig,
    sim: Simulator,
    params: ProfileParams,
    targets: [Vec3; 4],
    estimator: ForceThresholdContact,
    yaw: YawTracker,
    observer: O,
    fell: bool,
    diverged: bool,
    peak: f64,
    ticks: usize,
}

impl<O: EpisodeObserver> Runner<'_, O> {
    fn pose(&self) -> PlanarPose {
        PlanarPose {
            x: self.sim.state.position.x,
            y: self.sim.state.position.y,
            yaw: self.yaw.unwrapped(),
        }
    }

    /// One control tick. Returns false once the episode must stop.
    fn tick(&mut self, theta: Option<f64>, phase: EpisodePhase) -> Result<bool> {
        let mut readout = self.sim.observe();
        if self.cfg.contact_source == ContactSource::ForceThreshold {
            for (leg, f) in readout.legs.iter_mut().zip(&self.sim.contact_forces) {
                leg.contact = self.estimator.estimate(f.z);
            }
        }
        let inputs = ControllerInputs {
            legs: readout.legs,
            rotation: readout.rotation,
            theta,
            params: self.params,
            jump: self.cfg.jump_type,
            targets: self.targets,
        };
        let torques = total_torque(&inputs, &self.cfg.effective_gains(), self.cfg.model.tau_max)?;
        if self.sim.advance(&torques).is_err() {
            self.fell = true;
            self.diverged = true;
            return Ok(false);
        }
        self.ticks += 1;
        let state = self.sim.state;
        self.yaw.update(state.roll_pitch_yaw().2);
        if phase != EpisodePhase::Settle {
            self.peak = self.peak.max(state.position.z);
        }
        self.observer.on_tick(&TickRecord {
            time: self.sim.time,
            phase,
            theta,
            state: &state,
            torques: &torques,
            contact_forces: &self.sim.contact_forces,
        });
        if detect_fall(&state, &self.sim.terrain) {
            self.fell = true;
            return Ok(false);
        }
        Ok(true)
    }
}

/// Run one episode with the given profile parameters.
///
/// `episode_seed` only matters on block terrain, where it selects the layout.
pub fn run_episode(params: &ProfileParams, cfg: &ExperimentConfig, episode_seed: u64) -> Result<EpisodeResult> {
    run_episode_observed(params, cfg, episode_seed, NoObserver)
}

pub fn run_episode_observed<O: EpisodeObserver>(
    params: &ProfileParams,
    cfg: &ExperimentConfig,
    episode_seed: u64,
    observer: O,
) -> Result<EpisodeResult> {
    params.validate()?;
    cfg.validate()?;
    let params = params.with_f1(cfg.f1);
    let terrain = cfg.terrain_for(episode_seed);
    let state = RobotState::standing(&cfg.model, &terrain, 0.0, 0.0);
    let dt = cfg.sim.dt;
    let mut run = Runner {
        cfg,
        sim: Simulator::new(cfg.model, terrain, cfg.sim, state),
        params,
        targets: LegId::ALL.map(|leg| nominal_target(cfg.model.geometry(leg))),
        estimator: ForceThresholdContact::default(),
        yaw: YawTracker::new(state.roll_pitch_yaw().2),
        observer,
        fell: false,
        diverged: false,
        peak: f64::MIN,
        ticks: 0,
    };
    let ticks_for = |seconds: f64| (seconds / dt).round() as usize;

    let finish = |run: Runner<'_, O>, init: PlanarPose, standing: f64| {
        let fin = run.pose();
        let raw = objective(cfg.jump_type, &init, &fin);
        EpisodeResult {
            objective: if run.fell { 0.0 } else { raw },
            raw_objective: raw,
            fell: run.fell,
            diverged: run.diverged,
            init,
            fin,
            peak_height: if run.peak == f64::MIN { standing } else { run.peak },
            standing_height: standing,
            duration: run.sim.time,
            ticks: run.ticks,
        }
    };

    for _ in 0..ticks_for(cfg.timing.settle) {
        if !run.tick(None, EpisodePhase::Settle)? {
            let init = run.pose();
            return Ok(finish(run, init, state.position.z));
        }
    }
    let init = run.pose();
    let standing = run.sim.state.position.z;

    let (t_imp, t_off) = params.durations();
    let cycle_cap = ticks_for(2.0 * (t_imp + t_off)) + 10;
    let mut osc = OscillatorState::new(PI, &params);
    for _ in 0..cfg.jumps_per_episode {
        let mut wrapped = false;
        for _ in 0..cycle_cap {
            if !run.tick(Some(osc.theta), EpisodePhase::Jump)? {
                return Ok(finish(run, init, standing));
            }
            let next = step_phase(osc, &params, dt);
            wrapped |= next.theta < osc.theta;
            osc = next;
            // A cycle ends when the phase is back at π.
            if wrapped && osc.theta >= PI {
                break;
            }
        }
    }

    let all_down = |s: &RobotState| s.feet.iter().all(|f| f.contact);
    let mut waited = 0;
    while !all_down(&run.sim.state) && waited < ticks_for(cfg.timing.max_landing_wait) {
        if !run.tick(None, EpisodePhase::Landing)? {
            return Ok(finish(run, init, standing));
        }
        waited += 1;
    }
    for _ in 0..ticks_for(cfg.timing.post_landing) {
        if !run.tick(None, EpisodePhase::Landing)? {
            return Ok(finish(run, init, standing));
        }
    }
    Ok(finish(run, init, standing))
}
