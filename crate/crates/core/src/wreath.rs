//! Lamplighter configurations in (Z/2Z)^(X) and the switch-walk-switch chain.

use crate::action::Action;
use crate::angles::Point;
use crate::error::Result;
use crate::iet::{FinitelySupported, Iet};
use crate::measure::Measure;
use rand::Rng;
use std::collections::BTreeSet;

/// A finitely supported configuration, identified with its set of lit points.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LampConfig<P: Ord> {
    lit: BTreeSet<P>,
}

impl<P: Ord> Default for LampConfig<P> {
    fn default() -> Self {
        Self { lit: BTreeSet::new() }
    }
}

impl<P: Ord + Clone> LampConfig<P> {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn delta(x: P) -> Self {
        Self { lit: BTreeSet::from([x]) }
    }

    pub fn from_points(points: impl IntoIterator<Item = P>) -> Self {
        let mut c = Self::empty();
        for p in points {
            c.toggle(p);
        }
        c
    }

    pub fn is_empty(&self) -> bool {
        self.lit.is_empty()
    }

    pub fn len(&self) -> usize {
        self.lit.len()
    }

    pub fn lit(&self) -> &BTreeSet<P> {
        &self.lit
    }

    pub fn is_lit(&self, x: &P) -> bool {
        self.lit.contains(x)
    }

    pub fn toggle(&mut self, x: P) {
        if !self.lit.remove(&x) {
            self.lit.insert(x);
        }
    }

    pub fn xor(&self, other: &Self) -> Self {
        Self { lit: self.lit.symmetric_difference(&other.lit).cloned().collect() }
    }

    /// `{h x : x lit}` for the generator `s` of an action.
    pub fn translate_by<A: Action<Point = P>>(&self, action: &A, s: usize) -> Result<Self> {
        Ok(Self { lit: self.lit.iter().map(|x| action.apply_generator(s, x)).collect::<Result<_>>()? })
    }
}

impl LampConfig<Point> {
    pub fn translate(&self, g: &Iet) -> Result<Self> {
        Ok(Self { lit: self.lit.iter().map(|x| g.evaluate(x)).collect::<Result<_>>()? })
    }
}

impl FinitelySupported for LampConfig<Point> {
    fn support(&self) -> BTreeSet<Point> {
        self.lit.clone()
    }
}

/// λ ∗ μ ∗ λ where λ is uniform on {0, δ_{x0}}.
#[derive(Debug, Clone)]
pub struct SwsMeasure<P> {
    pub mu: Measure,
    pub lamp_point: P,
}

/// State `(f, g)` of the chain; the group coordinate is kept as an element of the action.
#[derive(Debug, Clone)]
pub struct SwsState<A: Action> {
    pub config: LampConfig<A::Point>,
    pub element: A::Element,
}

impl<A: Action> SwsState<A> {
    pub fn start(action: &A) -> Self {
        Self { config: LampConfig::empty(), element: action.identity() }
    }
}

/// One step: randomize the lamp at x0, translate by a μ-sampled generator
/// (left multiplication), randomize the lamp at x0 again. Returns the generator used.
pub fn sws_step<A: Action, R: Rng + ?Sized>(
    action: &A,
    measure: &SwsMeasure<A::Point>,
    state: &mut SwsState<A>,
    rng: &mut R,
) -> Result<usize> {
    if rng.gen_bool(0.5) {
        state.config.toggle(measure.lamp_point.clone());
    }
    let s = measure.mu.sample(rng);
    state.config = state.config.translate_by(action, s)?;
    action.push_left(&mut state.element, s)?;
    if rng.gen_bool(0.5) {
        state.config.toggle(measure.lamp_point.clone());
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::{FinitePermAction, IntegerLine};
    use crate::angles::AngleGroup;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn xor_laws() {
        let a = LampConfig::from_points([1, 2, 3]);
        let b = LampConfig::from_points([3, 4]);
        assert_eq!(a.xor(&LampConfig::empty()), a);
        assert!(a.xor(&a).is_empty());
        assert_eq!(LampConfig::delta(1).xor(&LampConfig::from_points([1, 2])), LampConfig::delta(2));
        assert_eq!(a.xor(&b), LampConfig::from_points([1, 2, 4]));
    }

    #[test]
    fn translate_by_swap() {
        let g = AngleGroup::torsion(8).unwrap();
        let p = |k| Point::new(0, g.torsion_angle(k));
        let s = Iet::swap_arcs(&g, p(0), p(2), p(4)).unwrap();
        assert_eq!(LampConfig::delta(p(1)).translate(&s).unwrap(), LampConfig::delta(p(3)));
        let r = Iet::rotation(&g, g.torsion_angle(3));
        let a = LampConfig::from_points([p(1), p(6)]);
        let lhs = a.translate(&s.compose(&r).unwrap()).unwrap();
        let rhs = a.translate(&r).unwrap().translate(&s).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn degenerate_walk_randomizes_one_lamp() {
        let action = FinitePermAction::single_point(1);
        let m = SwsMeasure { mu: Measure::uniform(1).unwrap(), lamp_point: 0usize };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut lit = 0;
        let trials = 20_000;
        for _ in 0..trials {
            let mut st = SwsState::start(&action);
            sws_step(&action, &m, &mut st, &mut rng).unwrap();
            lit += st.config.len();
        }
        let frac = lit as f64 / trials as f64;
        assert!((frac - 0.5).abs() < 0.02);
    }

    #[test]
    fn support_stays_in_lamp_orbit() {
        let action = IntegerLine::simple();
        let m = SwsMeasure { mu: Measure::uniform(2).unwrap(), lamp_point: 0i64 };
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let mut st = SwsState::start(&action);
            // O'_n = {x0, h_n x0, h_n h_{n-1} x0, …}
            let mut prefix_points = vec![0i64];
            let mut steps = Vec::new();
            for _ in 0..12 {
                let s = sws_step(&action, &m, &mut st, &mut rng).unwrap();
                steps.push(if s == 0 { 1 } else { -1 });
                prefix_points =
                    std::iter::once(0).chain(prefix_points.iter().map(|x| x + steps.last().unwrap())).collect();
            }
            assert!(st.config.lit().iter().all(|x| prefix_points.contains(x)));
            assert_eq!(st.element, steps.iter().sum::<i64>());
        }
    }
}
