//! Stabilization of `τ_{g_n}(x)` along the right walk `g_n = h_1 ⋯ h_n`.
//!
//! `τ_{g_n} = τ_{g_{n-1}} ∘ (g_{n-1} τ_{h_n} g_{n-1}^-1)`, so the value at `x`
//! changes at step `n` exactly when `u_{n-1} = g_{n-1}^-1 x` lies in the support
//! of `τ_{h_n}`. The probe follows `u` and never materializes `τ_{g_n}`.

use super::parallel::run_trajectories;
use super::WalkSpec;
use crate::action::{Action, IetAction};
use crate::angles::{coordinate_ball, Angle, Point};
use crate::error::{config, Result};
use crate::iet::FinitelySupported;
use crate::stats::{Estimate, Merge, Moments, Proportion};
use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauProbeRow {
    pub n: usize,
    /// Fraction of (trajectory, point) pairs with no change in `(n, horizon]`.
    pub stabilized: Estimate,
    /// Mean number of changes up to step `n` per pair.
    pub hits: Estimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauProbeReport {
    pub horizon: usize,
    pub trajectories: u64,
    pub points: usize,
    pub rows: Vec<TauProbeRow>,
}

#[derive(Debug, Clone)]
struct TauStats {
    stabilized: Vec<Proportion>,
    hits: Vec<Moments<f64>>,
}

impl Merge for TauStats {
    fn merge(&mut self, other: &Self) {
        self.stabilized.merge(&other.stabilized);
        self.hits.merge(&other.hits);
    }
}

/// Last change step and per-checkpoint hit counts for one trajectory and one point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TauTrace {
    pub last_change: usize,
    pub hits: Vec<u32>,
}

fn generator_supports(action: &IetAction) -> Result<Vec<FxHashSet<Point>>> {
    action.generators().iter().map(|g| Ok(g.cocycle()?.support().into_iter().collect())).collect()
}

/// Follows every point along one sampled increment sequence.
pub fn trace_tau<R: rand::Rng + ?Sized>(
    spec: &WalkSpec<IetAction>,
    supports: &[FxHashSet<Point>],
    points: &[Point],
    checkpoints: &[usize],
    rng: &mut R,
) -> Result<Vec<TauTrace>> {
    let action = &spec.action;
    let mut u: Vec<Point> = points.to_vec();
    let mut out: Vec<TauTrace> =
        points.iter().map(|_| TauTrace { last_change: 0, hits: vec![0; checkpoints.len()] }).collect();
    let mut count = vec![0u32; points.len()];
    let mut ci = checkpoints.iter().take_while(|&&c| c == 0).count();
    for k in 1..=spec.horizon {
        let s = spec.measure.sample(rng);
        let sinv = action.inverse_generator(s);
        let supp = &supports[s];
        for (j, uj) in u.iter_mut().enumerate() {
            if !supp.is_empty() && supp.contains(uj) {
                out[j].last_change = k;
                count[j] += 1;
            }
            *uj = action.apply_generator(sinv, uj)?;
        }
        while ci < checkpoints.len() && checkpoints[ci] == k {
            for (j, c) in count.iter().enumerate() {
                out[j].hits[ci] = *c;
            }
            ci += 1;
        }
    }
    Ok(out)
}

pub fn tau_infinity_probe(spec: &WalkSpec<IetAction>, points: &[Point]) -> Result<TauProbeReport> {
    spec.validate()?;
    if points.is_empty() {
        return Err(config("the tau probe needs at least one sample point"));
    }
    for p in points {
        spec.action.group().validate_point(p)?;
    }
    let cps = spec.effective_checkpoints();
    let supports = generator_supports(&spec.action)?;
    let stats = run_trajectories(
        spec.trajectories,
        spec.seed,
        spec.threads,
        || TauStats { stabilized: vec![Proportion::default(); cps.len()], hits: vec![Moments::new(); cps.len()] },
        || (),
        |_, rng, _, st| {
            for tr in trace_tau(spec, &supports, points, &cps, rng)? {
                for (ci, &c) in cps.iter().enumerate() {
                    st.stabilized[ci].push(tr.last_change <= c);
                    st.hits[ci].push(tr.hits[ci] as f64);
                }
            }
            Ok(())
        },
    )?;
    let rows = cps
        .iter()
        .enumerate()
        .map(|(ci, &n)| TauProbeRow { n, stabilized: stats.stabilized[ci].estimate(), hits: stats.hits[ci].estimate() })
        .collect();
    Ok(TauProbeReport { horizon: spec.horizon, trajectories: spec.trajectories, points: points.len(), rows })
}

/// Deterministic sample points: translates of the generator cocycle supports
/// by free coordinate vectors of increasing norm. Falls back to the base point
/// when every generator is a rotation.
pub fn tau_probe_points(action: &IetAction, base: &Point, count: usize) -> Result<Vec<Point>> {
    let group = action.group();
    let m = group.m();
    let mut seeds: BTreeSet<Point> = BTreeSet::new();
    for g in action.generators() {
        seeds.extend(g.cocycle()?.support());
    }
    if seeds.is_empty() {
        seeds.insert(*base);
    }
    let d = group.rank();
    let mut out: Vec<Point> = Vec::new();
    let mut seen: BTreeSet<Point> = BTreeSet::new();
    let mut r = 0;
    while out.len() < count {
        let shell: Vec<Vec<i32>> =
            coordinate_ball(d, r).into_iter().filter(|v| v.iter().map(|x| x.abs()).sum::<i32>() == r).collect();
        for v in &shell {
            let off = Angle::new(0, v);
            for s in &seeds {
                let p = s.translate(off, m);
                if seen.insert(p) {
                    out.push(p);
                    if out.len() == count {
                        return Ok(out);
                    }
                }
            }
        }
        if d == 0 && r > 0 {
            break;
        }
        r += 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angles::AngleGroup;
    use crate::iet::{FinSuppPerm, Iet};
    use crate::measure::Measure;
    use crate::walks::trajectory_rng;

    fn rank1_action() -> IetAction {
        let g = AngleGroup::builder(4).theta("sqrt(2) - 1").build().unwrap();
        let p = |k| Point::new(0, g.torsion_angle(k));
        let swap = Iet::swap_arcs(&g, p(0), p(1), p(2)).unwrap();
        let rot = Iet::rotation(&g, g.theta(0));
        IetAction::symmetrized(&g, vec![("r".into(), rot), ("s".into(), swap)]).unwrap()
    }

    #[test]
    fn rotations_never_change() {
        let g = AngleGroup::builder(1).theta("sqrt(2) - 1").build().unwrap();
        let a = IetAction::symmetrized(&g, vec![("r".into(), Iet::rotation(&g, g.theta(0)))]).unwrap();
        let x = g.base_point(0);
        let pts = tau_probe_points(&a, &x, 5).unwrap();
        let spec =
            WalkSpec::new(a, Measure::uniform(2).unwrap(), x).horizon(100).trajectories(10).checkpoints(vec![0, 100]);
        let rep = tau_infinity_probe(&spec, &pts).unwrap();
        assert_eq!(rep.rows[0].stabilized.value, 1.0);
        assert_eq!(rep.rows[1].hits.value, 0.0);
    }

    #[test]
    fn matches_brute_force_cocycle() {
        let a = rank1_action();
        let x = a.group().base_point(0);
        let pts = tau_probe_points(&a, &x, 8).unwrap();
        let n = 12;
        let spec = WalkSpec::new(a.clone(), Measure::uniform(3).unwrap(), x).horizon(n).checkpoints(vec![n]);
        let supports = generator_supports(&a).unwrap();
        for t in 0..20 {
            let traces = trace_tau(&spec, &supports, &pts, &[n], &mut trajectory_rng(2, t)).unwrap();
            // replay the increments and compute τ_{g_k} by composing IETs
            let mut rng = trajectory_rng(2, t);
            let mut g = Iet::identity(a.group());
            let mut prev: Vec<Point> = pts.clone();
            let mut last = vec![0usize; pts.len()];
            for k in 1..=n {
                let s = spec.measure.sample(&mut rng);
                g = g.compose(&a.generators()[s]).unwrap();
                let tau: FinSuppPerm = g.cocycle().unwrap();
                for (j, p) in pts.iter().enumerate() {
                    let v = tau.apply(p);
                    if v != prev[j] {
                        last[j] = k;
                    }
                    prev[j] = v;
                }
            }
            for (j, tr) in traces.iter().enumerate() {
                assert_eq!(tr.last_change, last[j], "trajectory {t}, point {j}");
            }
        }
    }

    #[test]
    fn probe_points_are_distinct() {
        let a = rank1_action();
        let pts = tau_probe_points(&a, &a.group().base_point(0), 32).unwrap();
        assert_eq!(pts.len(), 32);
        assert_eq!(pts.iter().collect::<BTreeSet<_>>().len(), 32);
    }
}
