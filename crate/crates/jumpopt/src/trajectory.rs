//! Line-delimited JSON trajectory dumps, one object per control tick.

use std::io::Write;

use jumpopt_core::harness::{EpisodeObserver, EpisodePhase, TickRecord};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub time: f64,
    pub phase: EpisodePhase,
    pub theta: Option<f64>,
    pub position: [f64; 3],
    /// `[w, x, y, z]`, world from body.
    pub orientation: [f64; 4],
    pub roll_pitch_yaw: [f64; 3],
    pub linear_velocity: [f64; 3],
    /// Body frame.
    pub angular_velocity: [f64; 3],
    pub foot_positions: [[f64; 3]; 4],
    pub contacts: [bool; 4],
    pub torques: [f64; 12],
    pub contact_forces: [[f64; 3]; 4],
}

impl TrajectoryRow {
    pub fn from_tick(t: &TickRecord<'_>) -> Self {
        let s = t.state;
        let q = s.orientation.quaternion();
        let (r, p, y) = s.roll_pitch_yaw();
        Self {
            time: t.time,
            phase: t.phase,
            theta: t.theta,
            position: s.position.into(),
            orientation: [q.w, q.i, q.j, q.k],
            roll_pitch_yaw: [r, p, y],
            linear_velocity: s.linear_velocity.into(),
            angular_velocity: s.angular_velocity.into(),
            foot_positions: s.feet.map(|f| f.position.into()),
            contacts: s.feet.map(|f| f.contact),
            torques: t.torques.tau,
            contact_forces: t.contact_forces.map(Into::into),
        }
    }
}

/// Writes every `stride`-th tick; keeps the first IO error.
pub struct JsonlObserver<W: Write> {
    writer: W,
    stride: usize,
    count: usize,
    pub error: Option<std::io::Error>,
}

impl<W: Write> JsonlObserver<W> {
    pub fn new(writer: W, stride: usize) -> Self {
        Self {
            writer,
            stride: stride.max(1),
            count: 0,
            error: None,
        }
    }

    pub fn finish(mut self) -> std::io::Result<W> {
        if let Some(e) = self.error.take() {
            return Err(e);
        }
        self.writer.flush()?;
        Ok(self.writer)
    }
}

impl<W: Write> EpisodeObserver for JsonlObserver<W> {
    fn on_tick(&mut self, tick: &TickRecord<'_>) {
        let keep = self.count.is_multiple_of(self.stride);
        self.count += 1;
        if !keep || self.error.is_some() {
            return;
        }
        let row = TrajectoryRow::from_tick(tick);
        let result = serde_json::to_writer(&mut self.writer, &row)
            .map_err(std::io::Error::from)
            .and_then(|_| self.writer.write_all(b"\n"));
        if let Err(e) = result {
            self.error = Some(e);
        }
    }
}
