//! Scalar abstractions shared by the exact oracles and the Monte Carlo statistics.
//!
//! Oracles are written once over [`Probability`] and instantiated either with
//! exact big rationals or with machine floats. Streaming statistics are generic
//! over [`num_traits::Float`].

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, ToPrimitive, Zero};
use std::fmt::Debug;

/// A scalar able to carry probabilities through exact enumeration.
pub trait Probability: Num + Clone + Debug + Send + Sync + FromPrimitive {
    /// Converts an exact rational weight into this scalar.
    fn from_ratio(r: &BigRational) -> Self;

    /// `2^-k`.
    fn pow2_neg(k: usize) -> Self {
        let mut out = Self::one();
        let half = Self::from_ratio(&BigRational::new(BigInt::one(), BigInt::from(2)));
        for _ in 0..k {
            out = out * half.clone();
        }
        out
    }

    fn to_f64_lossy(&self) -> f64;
}

impl Probability for BigRational {
    fn from_ratio(r: &BigRational) -> Self {
        r.clone()
    }

    fn pow2_neg(k: usize) -> Self {
        BigRational::new(BigInt::one(), BigInt::one() << k)
    }

    fn to_f64_lossy(&self) -> f64 {
        ratio_to_f64(self)
    }
}

impl Probability for f64 {
    fn from_ratio(r: &BigRational) -> Self {
        ratio_to_f64(r)
    }

    fn pow2_neg(k: usize) -> Self {
        (-(k as f64)).exp2()
    }

    fn to_f64_lossy(&self) -> f64 {
        *self
    }
}

impl Probability for f32 {
    fn from_ratio(r: &BigRational) -> Self {
        ratio_to_f64(r) as f32
    }

    fn pow2_neg(k: usize) -> Self {
        (-(k as f32)).exp2()
    }

    fn to_f64_lossy(&self) -> f64 {
        *self as f64
    }
}

/// Rational to float that survives huge numerators and denominators.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift = 60 - (nb - db);
    let scaled = if shift >= 0 {
        (r.numer() << shift as usize) / r.denom()
    } else {
        r.numer() / (r.denom() << (-shift) as usize)
    };
    scaled.to_f64().unwrap_or(0.0) * (-(shift as f64)).exp2()
}
