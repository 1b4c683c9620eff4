//! Episodes and studies: settle, jump, score, and feed the optimizer.

mod config;
mod episode;
mod study;

pub use config::{ContactSource, EpisodeTiming, ExperimentConfig};
pub use episode::{
    detect_fall, objective, run_episode, run_episode_observed, EpisodeObserver, EpisodePhase, EpisodeResult,
    NoObserver, PlanarPose, TickRecord, YawTracker, FALL_HEIGHT, FALL_TILT,
};
pub use study::{
    active_dimensions, episode_seed, optimize, optimize_resume, params_from_vector, params_to_vector, search_space,
    Clock, NullClock, StudyOutcome, TrialLog, TrialRecord,
};
