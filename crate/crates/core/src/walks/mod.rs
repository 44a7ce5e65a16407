//! Random walks driven by a finitely supported measure on the generators of an
//! [`Action`], inverted-orbit statistics, exact oracles and boundary probes.

pub mod drift;
pub mod exact;
pub mod orbit;
pub mod parallel;
pub mod tau;

use crate::action::Action;
use crate::error::{config, Result};
use crate::measure::Measure;

pub use drift::{drift_probe, DriftReport};
pub use exact::{exact_orbit_oracle, exact_return_probability, exact_sws_return, OrbitLaw};
pub use orbit::{
    estimate_orbit_criteria, estimate_recurrence, sample_inverted_orbit, sample_inverted_orbit_direct,
    trace_inverted_orbit, CheckpointStats, CriteriaRow, EpsilonRow, InvertedOrbitReport, InvertedOrbitSample,
    RecurrenceReport,
};
pub use parallel::{run_trajectories, trajectory_rng, CHUNK_SIZE};
pub use tau::{tau_infinity_probe, tau_probe_points, TauProbeReport, TauProbeRow};

#[derive(Debug, Clone)]
pub struct WalkSpec<A: Action> {
    pub action: A,
    pub measure: Measure,
    pub base_point: A::Point,
    pub horizon: usize,
    pub trajectories: u64,
    pub seed: u64,
    /// Steps at which statistics are recorded; defaults to `[horizon]`.
    pub checkpoints: Vec<usize>,
    /// Claimed symmetry of the measure, verified by [`WalkSpec::validate`].
    pub symmetric: bool,
    pub threads: Option<usize>,
}

impl<A: Action> WalkSpec<A> {
    pub fn new(action: A, measure: Measure, base_point: A::Point) -> Self {
        Self {
            action,
            measure,
            base_point,
            horizon: 0,
            trajectories: 0,
            seed: 0,
            checkpoints: Vec::new(),
            symmetric: false,
            threads: None,
        }
    }

    pub fn horizon(mut self, n: usize) -> Self {
        self.horizon = n;
        self
    }

    pub fn trajectories(mut self, t: u64) -> Self {
        self.trajectories = t;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn checkpoints(mut self, cps: Vec<usize>) -> Self {
        self.checkpoints = cps;
        self
    }

    pub fn symmetric(mut self, flag: bool) -> Self {
        self.symmetric = flag;
        self
    }

    pub fn threads(mut self, threads: Option<usize>) -> Self {
        self.threads = threads;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.measure.len() != self.action.num_generators() {
            return Err(config(format!(
                "measure has {} atoms but the action has {} generators",
                self.measure.len(),
                self.action.num_generators()
            )));
        }
        if self.symmetric && !self.measure.is_symmetric(|s| self.action.inverse_generator(s)) {
            return Err(config("measure declared symmetric but weight(s) != weight(s^-1)"));
        }
        if self.checkpoints.iter().any(|&c| c > self.horizon) {
            return Err(config("checkpoint beyond the horizon"));
        }
        if self.checkpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(config("checkpoints must be strictly increasing"));
        }
        Ok(())
    }

    /// Checkpoints, or `[horizon]` when none were given.
    pub fn effective_checkpoints(&self) -> Vec<usize> {
        if self.checkpoints.is_empty() {
            vec![self.horizon]
        } else {
            self.checkpoints.clone()
        }
    }
}
