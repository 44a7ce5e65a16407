//! Finitely supported probability measures on generator indices, with exact
//! rational weights and exact integer sampling.

use crate::error::{config, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use rand::Rng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Measure {
    weights: Vec<BigRational>,
    cumulative: Vec<u64>,
    denom: u64,
}

impl Measure {
    pub fn new(weights: Vec<BigRational>) -> Result<Self> {
        if weights.is_empty() {
            return Err(config("a measure needs at least one atom"));
        }
        if weights.iter().any(|w| w.is_negative()) {
            return Err(config("measure weights must be non-negative"));
        }
        let total: BigRational = weights.iter().sum();
        if !total.is_one() {
            return Err(config(format!("measure weights sum to {total}, not 1")));
        }
        let denom = weights.iter().fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
        let denom_u = denom.to_u64().ok_or_else(|| config("common denominator of the weights exceeds 64 bits"))?;
        let mut acc = 0u64;
        let cumulative = weights
            .iter()
            .map(|w| {
                acc += (w.numer() * (&denom / w.denom())).to_u64().unwrap();
                acc
            })
            .collect();
        Ok(Self { weights, cumulative, denom: denom_u })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(vec![BigRational::new(BigInt::one(), BigInt::from(n)); n])
    }

    /// Parses weights written as `p/q`, integers or decimals.
    pub fn parse(weights: &[&str]) -> Result<Self> {
        let ws = weights
            .iter()
            .map(|w| {
                crate::real::RealNumber::parse(w)
                    .ok()
                    .and_then(|r| r.as_rational().cloned())
                    .ok_or_else(|| config(format!("weight {w:?} is not a rational number")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(ws)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight(&self, s: usize) -> &BigRational {
        &self.weights[s]
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        if self.cumulative.len() == 1 {
            return 0;
        }
        let u = rng.gen_range(0..self.denom);
        self.cumulative.partition_point(|&c| c <= u)
    }

    /// Whether `weight(s) == weight(inverse(s))` for every atom.
    pub fn is_symmetric(&self, inverse: impl Fn(usize) -> usize) -> bool {
        (0..self.len()).all(|s| self.weights[s] == self.weights[inverse(s)])
    }

    pub fn to_f64(&self, s: usize) -> f64 {
        self.weights[s].to_f64().unwrap_or(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rejects_bad_weights() {
        assert!(Measure::parse(&["1/2", "1/3"]).is_err());
        assert!(Measure::parse(&["1", "-1/2", "1/2"]).is_err());
        assert!(Measure::parse(&["x"]).is_err());
        assert!(Measure::parse(&["0.25", "3/4"]).is_ok());
    }

    #[test]
    fn sampling_frequencies() {
        let m = Measure::parse(&["1/6", "1/3", "1/2"]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut counts = [0u32; 3];
        for _ in 0..60_000 {
            counts[m.sample(&mut rng)] += 1;
        }
        assert!((counts[0] as f64 / 60_000.0 - 1.0 / 6.0).abs() < 0.01);
        assert!((counts[2] as f64 / 60_000.0 - 0.5).abs() < 0.01);
    }

    #[test]
    fn zero_atoms_are_never_drawn() {
        let m = Measure::parse(&["0", "1/2", "0", "1/2", "0"]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert!((0..1000).all(|_| m.sample(&mut rng) % 2 == 1));
    }

    #[test]
    fn symmetry_check() {
        let m = Measure::parse(&["1/4", "1/4", "1/2"]).unwrap();
        assert!(m.is_symmetric(|s| [1, 0, 2][s]));
        assert!(!m.is_symmetric(|s| [2, 1, 0][s]));
    }
}
