//! Exact enumeration oracles, generic over the probability scalar.

use crate::action::Action;
use crate::error::{config, Error, Result};
use crate::measure::Measure;
use crate::scalar::Probability;
use crate::wreath::LampConfig;
use std::collections::BTreeMap;

pub const DEFAULT_BUDGET: u128 = 10_000_000;

/// Law of `|O_n|` together with `E 2^{-|O_n|}`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitLaw<P> {
    pub n: usize,
    pub size_distribution: BTreeMap<usize, P>,
    pub expectation: P,
}

fn over_budget(what: &str, needed: u128, budget: u128) -> Error {
    Error::Budget { what: what.to_string(), needed, budget }
}

/// Enumerates every length-`n` increment word and builds
/// `O_n = {x0, g_1^-1 x0, …, g_n^-1 x0}` for each.
pub fn exact_orbit_oracle<A: Action, P: Probability>(
    action: &A,
    measure: &Measure,
    x0: &A::Point,
    n: usize,
    budget: u128,
) -> Result<OrbitLaw<P>> {
    if measure.len() != action.num_generators() {
        return Err(config("measure and generating set differ in size"));
    }
    let words = (measure.len() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if words > budget {
        return Err(over_budget("weighted words", words, budget));
    }
    let weights: Vec<P> = measure.weights().iter().map(P::from_ratio).collect();
    let mut dist: BTreeMap<usize, P> = BTreeMap::new();
    let mut orbit = vec![x0.clone()];
    dfs(action, &weights, x0, n, action.identity(), P::one(), &mut orbit, &mut dist)?;
    let expectation = dist.iter().fold(P::zero(), |acc, (&k, p)| acc + P::pow2_neg(k) * p.clone());
    Ok(OrbitLaw { n, size_distribution: dist, expectation })
}

#[allow(clippy::too_many_arguments)]
fn dfs<A: Action, P: Probability>(
    action: &A,
    weights: &[P],
    x0: &A::Point,
    remaining: usize,
    winv: A::Element,
    prob: P,
    orbit: &mut Vec<A::Point>,
    dist: &mut BTreeMap<usize, P>,
) -> Result<()> {
    if remaining == 0 {
        let e = dist.entry(orbit.len()).or_insert_with(P::zero);
        *e = e.clone() + prob;
        return Ok(());
    }
    for (s, w) in weights.iter().enumerate() {
        let mut next = winv.clone();
        action.push_right(&mut next, action.inverse_generator(s))?;
        let y = action.apply(&next, x0)?;
        let fresh = !orbit.contains(&y);
        if fresh {
            orbit.push(y);
        }
        dfs(action, weights, x0, remaining - 1, next, prob.clone() * w.clone(), orbit, dist)?;
        if fresh {
            orbit.pop();
        }
    }
    Ok(())
}

/// `P(f_n = f_0)` for the switch-walk-switch chain started at the empty
/// configuration. The lamp process is Markov on its own, so the convolution
/// runs over configurations only.
pub fn exact_sws_return<A: Action, P: Probability>(
    action: &A,
    measure: &Measure,
    x0: &A::Point,
    n: usize,
    budget: u128,
) -> Result<P> {
    if measure.len() != action.num_generators() {
        return Err(config("measure and generating set differ in size"));
    }
    let weights: Vec<P> = measure.weights().iter().map(P::from_ratio).collect();
    let half = P::from_ratio(&num_rational::BigRational::new(1.into(), 2.into()));
    let switch = |law: BTreeMap<LampConfig<A::Point>, P>| {
        let mut out: BTreeMap<LampConfig<A::Point>, P> = BTreeMap::new();
        for (c, p) in law {
            let mut t = c.clone();
            t.toggle(x0.clone());
            let q = p * half.clone();
            for key in [c, t] {
                let e = out.entry(key).or_insert_with(P::zero);
                *e = e.clone() + q.clone();
            }
        }
        out
    };
    let mut law: BTreeMap<LampConfig<A::Point>, P> = BTreeMap::from([(LampConfig::empty(), P::one())]);
    for _ in 0..n {
        let work = (law.len() as u128) * 2 * weights.len() as u128;
        if work > budget {
            return Err(over_budget("lamp configurations x generators", work, budget));
        }
        let switched = switch(law);
        let mut moved: BTreeMap<LampConfig<A::Point>, P> = BTreeMap::new();
        for (c, p) in switched {
            for (s, w) in weights.iter().enumerate() {
                let e = moved.entry(c.translate_by(action, s)?).or_insert_with(P::zero);
                *e = e.clone() + p.clone() * w.clone();
            }
        }
        law = switch(moved);
    }
    Ok(law.get(&LampConfig::empty()).cloned().unwrap_or_else(P::zero))
}

/// `P(X_n = x0)` for the point walk `X_k = h_k X_{k-1}`.
///
/// `keep(y, remaining)` may discard states that cannot return in the
/// remaining steps.
pub fn exact_return_probability<A: Action, P: Probability>(
    action: &A,
    measure: &Measure,
    x0: &A::Point,
    n: usize,
    budget: u128,
    keep: impl Fn(&A::Point, usize) -> bool,
) -> Result<Vec<P>> {
    if measure.len() != action.num_generators() {
        return Err(config("measure and generating set differ in size"));
    }
    let weights: Vec<P> = measure.weights().iter().map(P::from_ratio).collect();
    let mut law: BTreeMap<A::Point, P> = BTreeMap::from([(x0.clone(), P::one())]);
    let mut returns = vec![P::one()];
    for k in 1..=n {
        let work = law.len() as u128 * weights.len() as u128;
        if work > budget {
            return Err(over_budget("walk states x generators", work, budget));
        }
        let mut next: BTreeMap<A::Point, P> = BTreeMap::new();
        for (y, p) in &law {
            for (s, w) in weights.iter().enumerate() {
                let z = action.apply_generator(s, y)?;
                if !keep(&z, n - k) {
                    continue;
                }
                let e = next.entry(z).or_insert_with(P::zero);
                *e = e.clone() + p.clone() * w.clone();
            }
        }
        law = next;
        returns.push(law.get(x0).cloned().unwrap_or_else(P::zero));
    }
    Ok(returns)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::{FinitePermAction, IntegerLine};
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn z_example_values() {
        let a = IntegerLine::simple();
        let mu = Measure::uniform(2).unwrap();
        let law0: OrbitLaw<BigRational> = exact_orbit_oracle(&a, &mu, &0, 0, DEFAULT_BUDGET).unwrap();
        assert_eq!(law0.expectation, q(1, 2));
        let law1: OrbitLaw<BigRational> = exact_orbit_oracle(&a, &mu, &0, 1, DEFAULT_BUDGET).unwrap();
        assert_eq!(law1.expectation, q(1, 4));
        let law2: OrbitLaw<BigRational> = exact_orbit_oracle(&a, &mu, &0, 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(law2.expectation, q(3, 16));
        assert_eq!(law2.size_distribution, BTreeMap::from([(2, q(1, 2)), (3, q(1, 2))]));
        let sws: BigRational = exact_sws_return(&a, &mu, &0, 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(sws, q(3, 16));
        assert_eq!(exact_sws_return::<_, BigRational>(&a, &mu, &0, 0, DEFAULT_BUDGET).unwrap(), q(1, 1));
    }

    #[test]
    fn single_point_sws() {
        let a = FinitePermAction::single_point(3);
        let mu = Measure::uniform(3).unwrap();
        for n in 1..5 {
            let p: BigRational = exact_sws_return(&a, &mu, &0, n, DEFAULT_BUDGET).unwrap();
            assert_eq!(p, q(1, 2));
        }
    }

    #[test]
    fn float_and_exact_agree() {
        let a = IntegerLine::simple();
        let mu = Measure::uniform(2).unwrap();
        let e: OrbitLaw<BigRational> = exact_orbit_oracle(&a, &mu, &0, 6, DEFAULT_BUDGET).unwrap();
        let f: OrbitLaw<f64> = exact_orbit_oracle(&a, &mu, &0, 6, DEFAULT_BUDGET).unwrap();
        assert!((crate::scalar::ratio_to_f64(&e.expectation) - f.expectation).abs() < 1e-15);
    }

    #[test]
    fn srw_return_probabilities() {
        let a = IntegerLine::simple();
        let mu = Measure::uniform(2).unwrap();
        let r: Vec<BigRational> =
            exact_return_probability(&a, &mu, &0, 4, DEFAULT_BUDGET, |y, rem| y.unsigned_abs() as usize <= rem)
                .unwrap();
        assert_eq!(r, vec![q(1, 1), q(0, 1), q(1, 2), q(0, 1), q(3, 8)]);
    }

    #[test]
    fn budget_is_enforced() {
        let a = IntegerLine::simple();
        let mu = Measure::uniform(2).unwrap();
        let err = exact_orbit_oracle::<_, BigRational>(&a, &mu, &0, 30, 1000).unwrap_err();
        assert!(matches!(err, Error::Budget { .. }));
    }
}
