//! Mean displacement of `g_n x0` in free Λ-coordinates.

use super::parallel::run_trajectories;
use super::WalkSpec;
use crate::action::Displacement;
use crate::error::{invariant, Result};
use crate::stats::{Estimate, Moments};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftReport {
    pub horizon: usize,
    pub trajectories: u64,
    /// Per free coordinate, `E[coord(g_n x0 - x0)] / n`.
    pub drift: Vec<Estimate>,
}

/// Symmetry of the measure is not required.
pub fn drift_probe<A: Displacement>(spec: &WalkSpec<A>) -> Result<DriftReport> {
    spec.validate()?;
    let n = spec.horizon.max(1);
    let d = spec.action.rank();
    let stats: Vec<Moments<f64>> = run_trajectories(
        spec.trajectories,
        spec.seed,
        spec.threads,
        || vec![Moments::new(); d],
        || (),
        |_, rng, _, st| {
            let mut y = spec.base_point.clone();
            for _ in 0..spec.horizon {
                y = spec.action.apply_generator(spec.measure.sample(rng), &y)?;
            }
            let v = spec
                .action
                .displacement(&spec.base_point, &y)
                .ok_or_else(|| invariant("walk left the coset of the base point"))?;
            for (m, x) in st.iter_mut().zip(v) {
                m.push(x as f64 / n as f64);
            }
            Ok(())
        },
    )?;
    Ok(DriftReport {
        horizon: spec.horizon,
        trajectories: spec.trajectories,
        drift: stats.iter().map(|m| m.estimate()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::{IetAction, IntegerLine};
    use crate::angles::{AngleGroup, Point};
    use crate::iet::Iet;
    use crate::measure::Measure;

    #[test]
    fn symmetric_walk_has_no_drift() {
        let spec = WalkSpec::new(IntegerLine::simple(), Measure::uniform(2).unwrap(), 0)
            .horizon(100)
            .trajectories(4000)
            .seed(1);
        let r = drift_probe(&spec).unwrap();
        assert!(r.drift[0].within_sigmas(0.0, 3.0));
    }

    #[test]
    fn dirac_rotation_drifts_exactly() {
        let g = AngleGroup::builder(4).theta("sqrt(2) - 1").build().unwrap();
        let a = IetAction::symmetrized(&g, vec![("r".into(), Iet::rotation(&g, g.theta(0)))]).unwrap();
        let spec = WalkSpec::new(a, Measure::parse(&["1", "0"]).unwrap(), Point::new(0, g.torsion_angle(1)))
            .horizon(50)
            .trajectories(10);
        let r = drift_probe(&spec).unwrap();
        assert_eq!(r.drift[0], Estimate::new(1.0, 0.0));
    }

    #[test]
    fn biased_line() {
        let spec = WalkSpec::new(IntegerLine::simple(), Measure::parse(&["3/4", "1/4"]).unwrap(), 0)
            .horizon(200)
            .trajectories(2000)
            .seed(8);
        let r = drift_probe(&spec).unwrap();
        assert!(r.drift[0].within_sigmas(0.5, 3.0));
    }
}
