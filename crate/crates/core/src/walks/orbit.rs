//! Inverted-orbit samplers and the estimators built on them.

use super::parallel::run_trajectories;
use super::WalkSpec;
use crate::action::Action;
use crate::error::{config, Result};
use crate::measure::Measure;
use crate::stats::{Estimate, LogMeanExp, Merge, Moments, Proportion};
use rand::Rng;
use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvertedOrbitSample {
    /// `sizes[k] = |O_k|`, so `sizes[0] = 1`.
    pub sizes: Vec<u32>,
    /// First `k >= 1` with `g_k x0 = x0`; `None` when censored at the horizon.
    pub return_time: Option<usize>,
}

/// Walks `horizon` steps, calling `on_step(k, |O'_k|, T <= k)` after each.
///
/// The set grows by `w_k x0` with `w_k = h_1 ⋯ h_k`; this has the law of
/// `O'_k` for every fixed `k`. The return time is read off the left walk
/// `g_k x0 = h_k(g_{k-1} x0)` driven by the same increments.
pub fn trace_inverted_orbit<A: Action, R: Rng + ?Sized>(
    action: &A,
    measure: &Measure,
    x0: &A::Point,
    horizon: usize,
    rng: &mut R,
    seen: &mut FxHashSet<A::Point>,
    mut on_step: impl FnMut(usize, usize, bool),
) -> Result<Option<usize>> {
    seen.clear();
    seen.insert(x0.clone());
    let mut w = action.identity();
    let mut y = x0.clone();
    let mut ret = None;
    for k in 1..=horizon {
        let s = measure.sample(rng);
        action.push_right(&mut w, s)?;
        seen.insert(action.apply(&w, x0)?);
        if ret.is_none() {
            y = action.apply_generator(s, &y)?;
            if y == *x0 {
                ret = Some(k);
            }
        }
        on_step(k, seen.len(), ret.is_some());
    }
    Ok(ret)
}

pub fn sample_inverted_orbit<A: Action, R: Rng + ?Sized>(
    spec: &WalkSpec<A>,
    rng: &mut R,
) -> Result<InvertedOrbitSample> {
    let mut seen = FxHashSet::default();
    let mut sizes = Vec::with_capacity(spec.horizon + 1);
    sizes.push(1);
    let return_time = trace_inverted_orbit(
        &spec.action,
        &spec.measure,
        &spec.base_point,
        spec.horizon,
        rng,
        &mut seen,
        |_, n, _| sizes.push(n as u32),
    )?;
    Ok(InvertedOrbitSample { sizes, return_time })
}

/// `O_n = {x0, g_1^-1 x0, …, g_n^-1 x0}` computed from explicit inverse prefix
/// products `g_k^-1 = g_{k-1}^-1 h_k^-1`.
pub fn sample_inverted_orbit_direct<A: Action, R: Rng + ?Sized>(
    spec: &WalkSpec<A>,
    rng: &mut R,
) -> Result<InvertedOrbitSample> {
    let action = &spec.action;
    let x0 = &spec.base_point;
    let mut seen = FxHashSet::default();
    seen.insert(x0.clone());
    let mut sizes = vec![1];
    let mut winv = action.identity();
    let mut y = x0.clone();
    let mut return_time = None;
    for k in 1..=spec.horizon {
        let s = spec.measure.sample(rng);
        action.push_right(&mut winv, action.inverse_generator(s))?;
        seen.insert(action.apply(&winv, x0)?);
        sizes.push(seen.len() as u32);
        if return_time.is_none() {
            y = action.apply_generator(s, &y)?;
            if y == *x0 {
                return_time = Some(k);
            }
        }
    }
    Ok(InvertedOrbitSample { sizes, return_time })
}

/// Sufficient statistics at one checkpoint.
#[derive(Debug, Clone)]
pub struct CheckpointStats {
    pub n: usize,
    pub size: Moments<f64>,
    /// `log 2^{-|O_n|}` pushed per trajectory.
    pub weight: LogMeanExp<f64>,
    /// `|O_n| - |O_{n-1}|`.
    pub increment: Moments<f64>,
    /// `T > n`.
    pub survival: Proportion,
    pub small: Vec<Proportion>,
    /// `|O_n|` on the event `|O_n| < εn`.
    pub small_size: Vec<Moments<f64>>,
}

impl CheckpointStats {
    pub fn new(n: usize, eps: usize) -> Self {
        Self {
            n,
            size: Moments::new(),
            weight: LogMeanExp::new(),
            increment: Moments::new(),
            survival: Proportion::default(),
            small: vec![Proportion::default(); eps],
            small_size: vec![Moments::new(); eps],
        }
    }
}

impl Merge for CheckpointStats {
    fn merge(&mut self, other: &Self) {
        self.size.merge(&other.size);
        self.weight.merge(&other.weight);
        self.increment.merge(&other.increment);
        self.survival.merge(&other.survival);
        self.small.merge(&other.small);
        self.small_size.merge(&other.small_size);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonRow {
    pub eps: f64,
    /// `P(|O_n| < εn)`.
    pub probability: Estimate,
    /// `e^{-εn}`, the threshold of criterion (ii).
    pub threshold: f64,
    /// `-(1/n) log P(A_n)`, `None` if the event was never observed.
    pub event_rate: Option<f64>,
    /// `(1/n) E(|O_n| : A_n)`.
    pub conditional_size: Option<Estimate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriteriaRow {
    pub n: usize,
    /// `|O_n| / n`.
    pub size_over_n: Estimate,
    /// `E 2^{-|O_n|}`.
    pub return_probability: Estimate,
    /// `-(1/n) log E 2^{-|O_n|}`.
    pub rate: Estimate,
    /// Mean of `|O_n| - |O_{n-1}|`.
    pub increment: Estimate,
    /// `P(T > n)`.
    pub survival: Estimate,
    pub eps: Vec<EpsilonRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvertedOrbitReport {
    pub trajectories: u64,
    pub seed: u64,
    pub rows: Vec<CriteriaRow>,
}

pub fn default_eps_grid() -> Vec<f64> {
    vec![0.05, 0.1, 0.2, 0.5]
}

/// Raw checkpoint statistics over all trajectories.
pub fn orbit_statistics<A: Action>(spec: &WalkSpec<A>, eps: &[f64]) -> Result<Vec<CheckpointStats>> {
    spec.validate()?;
    let cps = spec.effective_checkpoints();
    let horizon = *cps.last().unwrap_or(&0);
    run_trajectories(
        spec.trajectories,
        spec.seed,
        spec.threads,
        || cps.iter().map(|&n| CheckpointStats::new(n, eps.len())).collect::<Vec<_>>(),
        FxHashSet::default,
        |_, rng, seen, stats| {
            let mut ci = 0;
            let mut prev = 1usize;
            let mut record = |k: usize, size: usize, returned: bool| {
                while ci < stats.len() && stats[ci].n == k {
                    let st = &mut stats[ci];
                    let sz = size as f64;
                    st.size.push(sz);
                    st.weight.push_log(-sz * LN_2);
                    st.increment.push((size - prev) as f64);
                    st.survival.push(!returned);
                    for (j, &e) in eps.iter().enumerate() {
                        let hit = sz < e * k as f64;
                        st.small[j].push(hit);
                        if hit {
                            st.small_size[j].push(sz);
                        }
                    }
                    ci += 1;
                }
                prev = size;
            };
            record(0, 1, false);
            trace_inverted_orbit(&spec.action, &spec.measure, &spec.base_point, horizon, rng, seen, record)?;
            Ok(())
        },
    )
}

/// The three inverted-orbit criteria, with the events of (iii) fixed to
/// `A_n = {|O_n| < εn}`.
pub fn estimate_orbit_criteria<A: Action>(spec: &WalkSpec<A>, eps: &[f64]) -> Result<InvertedOrbitReport> {
    if spec.trajectories < 100 {
        return Err(config("estimate_orbit_criteria needs at least 100 trajectories"));
    }
    let stats = orbit_statistics(spec, eps)?;
    let rows = stats.iter().map(|st| criteria_row(st, eps)).collect();
    Ok(InvertedOrbitReport { trajectories: spec.trajectories, seed: spec.seed, rows })
}

fn criteria_row(st: &CheckpointStats, eps: &[f64]) -> CriteriaRow {
    let n = st.n as f64;
    let nn = n.max(1.0);
    let size = st.size.estimate();
    let log_mean = st.weight.log_mean();
    CriteriaRow {
        n: st.n,
        size_over_n: Estimate::new(size.value / nn, size.stderr / nn),
        return_probability: Estimate::new(st.weight.mean(), st.weight.stderr()),
        rate: Estimate::new(-log_mean / nn, st.weight.log_stderr() / nn),
        increment: st.increment.estimate(),
        survival: st.survival.estimate(),
        eps: eps
            .iter()
            .enumerate()
            .map(|(j, &e)| {
                let p = st.small[j];
                let cond = &st.small_size[j];
                EpsilonRow {
                    eps: e,
                    probability: p.estimate(),
                    threshold: (-e * n).exp(),
                    event_rate: (p.hits > 0).then(|| -p.value().ln() / nn),
                    conditional_size: (cond.count() > 0).then(|| Estimate::new(cond.mean() / nn, cond.stderr() / nn)),
                }
            })
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceReport {
    pub horizon: usize,
    pub trajectories: u64,
    /// `E|O_N| / N`.
    pub size_over_n: Estimate,
    /// `(E|O_N| - E|O_{N/2}|) / (N - N/2)`, the late slope of the expected inverted orbit.
    pub slope: Estimate,
    /// Fraction of trajectories with no return by the horizon.
    pub censored: Estimate,
    pub caveat: String,
}

#[derive(Debug, Clone, Default)]
struct RecurrenceStats {
    size: Moments<f64>,
    slope: Moments<f64>,
    censored: Proportion,
}

impl Merge for RecurrenceStats {
    fn merge(&mut self, other: &Self) {
        self.size.merge(&other.size);
        self.slope.merge(&other.slope);
        self.censored.merge(&other.censored);
    }
}

/// Brackets `P(T = ∞)` between the slope of `E|O_n|` and the censored return frequency.
pub fn estimate_recurrence<A: Action>(spec: &WalkSpec<A>) -> Result<RecurrenceReport> {
    if !spec.symmetric {
        return Err(config("the recurrence estimator needs a measure declared symmetric"));
    }
    spec.validate()?;
    let n = spec.horizon;
    if n < 2 {
        return Err(config("recurrence horizon must be at least 2"));
    }
    let half = n / 2;
    let stats = run_trajectories(
        spec.trajectories,
        spec.seed,
        spec.threads,
        RecurrenceStats::default,
        FxHashSet::default,
        |_, rng, seen, st| {
            let mut at_half = 0usize;
            let mut last = 0usize;
            let ret =
                trace_inverted_orbit(&spec.action, &spec.measure, &spec.base_point, n, rng, seen, |k, size, _| {
                    if k == half {
                        at_half = size;
                    }
                    last = size;
                })?;
            st.size.push(last as f64);
            st.slope.push((last - at_half) as f64 / (n - half) as f64);
            st.censored.push(ret.is_none());
            Ok(())
        },
    )?;
    let size = stats.size.estimate();
    Ok(RecurrenceReport {
        horizon: n,
        trajectories: spec.trajectories,
        size_over_n: Estimate::new(size.value / n as f64, size.stderr / n as f64),
        slope: stats.slope.estimate(),
        censored: stats.censored.estimate(),
        caveat: format!(
            "finite horizon {n}: the censored frequency overestimates P(T=inf) and |O_n|/n converges to it from above"
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::{FinitePermAction, IntegerLine};
    use crate::walks::trajectory_rng;

    fn z_spec() -> WalkSpec<IntegerLine> {
        WalkSpec::new(IntegerLine::simple(), Measure::uniform(2).unwrap(), 0).symmetric(true)
    }

    #[test]
    fn sizes_are_unit_steps() {
        let spec = z_spec().horizon(200);
        for t in 0..50 {
            let s = sample_inverted_orbit(&spec, &mut trajectory_rng(9, t)).unwrap();
            assert_eq!(s.sizes[0], 1);
            for (k, w) in s.sizes.windows(2).enumerate() {
                assert!(w[1] == w[0] || w[1] == w[0] + 1);
                assert!(w[1] as usize <= k + 2);
            }
        }
    }

    #[test]
    fn fixed_point_orbit_is_trivial() {
        let spec = WalkSpec::new(FinitePermAction::single_point(2), Measure::uniform(2).unwrap(), 0).horizon(30);
        let s = sample_inverted_orbit(&spec, &mut trajectory_rng(1, 0)).unwrap();
        assert!(s.sizes.iter().all(|&x| x == 1));
        assert_eq!(s.return_time, Some(1));
    }

    #[test]
    fn two_steps_on_z() {
        let spec = z_spec().horizon(2).trajectories(40_000).checkpoints(vec![2]).seed(5);
        let rep = estimate_orbit_criteria(&spec, &[0.5]).unwrap();
        let r = &rep.rows[0];
        assert!(r.return_probability.within_sigmas(3.0 / 16.0, 4.0));
    }

    #[test]
    fn increment_matches_survival() {
        let spec = z_spec().horizon(64).trajectories(20_000).checkpoints(vec![1, 4, 16, 64]).seed(11);
        let rep = estimate_orbit_criteria(&spec, &default_eps_grid()).unwrap();
        for r in &rep.rows {
            let se = (r.increment.stderr.powi(2) + r.survival.stderr.powi(2)).sqrt();
            assert!((r.increment.value - r.survival.value).abs() <= 4.0 * se.max(1e-9), "{r:?}");
        }
    }

    #[test]
    fn direct_and_prime_constructions_agree() {
        let spec = z_spec().horizon(30);
        let mut a = Moments::<f64>::new();
        let mut b = Moments::<f64>::new();
        for t in 0..10_000 {
            a.push(*sample_inverted_orbit(&spec, &mut trajectory_rng(3, t)).unwrap().sizes.last().unwrap() as f64);
            b.push(
                *sample_inverted_orbit_direct(&spec, &mut trajectory_rng(4, t)).unwrap().sizes.last().unwrap() as f64
            );
        }
        let se = (a.stderr().powi(2) + b.stderr().powi(2)).sqrt();
        assert!((a.mean() - b.mean()).abs() <= 3.0 * se);
    }

    #[test]
    fn finite_orbit_is_recurrent() {
        let spec = WalkSpec::new(FinitePermAction::cycle(5), Measure::uniform(2).unwrap(), 0)
            .symmetric(true)
            .horizon(400)
            .trajectories(500);
        let rep = estimate_recurrence(&spec).unwrap();
        assert_eq!(rep.slope.value, 0.0);
        assert_eq!(rep.censored.value, 0.0);
    }

    #[test]
    fn too_few_trajectories() {
        assert!(estimate_orbit_criteria(&z_spec().horizon(3).trajectories(10), &[0.1]).is_err());
    }
}
