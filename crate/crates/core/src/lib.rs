//! Exact algebra and random-walk probes for groups of interval exchange
//! transformations of the circle.

pub mod action;
pub mod angles;
pub mod colored_line;
pub mod error;
pub mod iet;
pub mod measure;
pub mod real;
pub mod scalar;
pub mod schreier;
pub mod stats;
pub mod walks;
pub mod wreath;

pub use action::{Action, Displacement, FinitePermAction, IetAction, IntegerLine, RotationAction};
pub use angles::{Angle, AngleGroup, AngleGroupBuilder, Point, MAX_RANK};
pub use error::{Error, Result};
pub use iet::{FinSuppPerm, FinitelySupported, Iet, SemidirectElement};
pub use measure::Measure;
pub use real::RealNumber;
pub use scalar::Probability;
pub use walks::WalkSpec;
pub use wreath::{LampConfig, SwsMeasure, SwsState};

/// Exact probabilities produced by the oracles.
pub type ExactProb = num_rational::BigRational;
/// Machine probabilities used by Monte Carlo estimators.
pub type Prob = f64;
