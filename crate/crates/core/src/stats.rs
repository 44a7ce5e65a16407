//! Streaming sufficient statistics for Monte Carlo aggregation.
//!
//! Every accumulator here is a monoid: `merge` is associative, and the walk
//! engine always merges chunk results in trajectory order, so aggregated
//! numbers do not depend on how many worker threads produced the chunks.

use num_traits::Float;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, StudentsT};

/// Associative combination of partial results, applied in trajectory order.
pub trait Merge {
    fn merge(&mut self, other: &Self);
}

impl<T: Merge> Merge for Vec<T> {
    fn merge(&mut self, other: &Self) {
        for (a, b) in self.iter_mut().zip(other) {
            a.merge(b);
        }
    }
}

impl<F: Float> Merge for Moments<F> {
    fn merge(&mut self, other: &Self) {
        Moments::merge(self, other)
    }
}

impl<F: Float> Merge for LogMeanExp<F> {
    fn merge(&mut self, other: &Self) {
        LogMeanExp::merge(self, other)
    }
}

impl Merge for Proportion {
    fn merge(&mut self, other: &Self) {
        Proportion::merge(self, other)
    }
}

/// A point estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn new(value: f64, stderr: f64) -> Self {
        Self { value, stderr }
    }

    pub fn exact(value: f64) -> Self {
        Self { value, stderr: 0.0 }
    }

    /// `|value - target| <= k * stderr`.
    pub fn within_sigmas(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.stderr
    }
}

/// Neumaier compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum<F> {
    sum: F,
    comp: F,
}

impl<F: Float> CompensatedSum<F> {
    pub fn new() -> Self {
        Self { sum: F::zero(), comp: F::zero() }
    }

    pub fn add(&mut self, x: F) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp = self.comp + ((self.sum - t) + x);
        } else {
            self.comp = self.comp + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &Self) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> F {
        self.sum + self.comp
    }

    fn scale(&mut self, factor: F) {
        self.sum = self.sum * factor;
        self.comp = self.comp * factor;
    }
}

/// Count, mean and variance via compensated power sums.
#[derive(Debug, Clone, Copy)]
pub struct Moments<F> {
    count: u64,
    sum: CompensatedSum<F>,
    sum_sq: CompensatedSum<F>,
}

impl<F: Float> Default for Moments<F> {
    fn default() -> Self {
        Self::new()
    }
}

impl<F: Float> Moments<F> {
    pub fn new() -> Self {
        Self { count: 0, sum: CompensatedSum::new(), sum_sq: CompensatedSum::new() }
    }

    pub fn push(&mut self, x: F) {
        self.count += 1;
        self.sum.add(x);
        self.sum_sq.add(x * x);
    }

    pub fn merge(&mut self, other: &Self) {
        self.count += other.count;
        self.sum.merge(&other.sum);
        self.sum_sq.merge(&other.sum_sq);
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> F {
        if self.count == 0 {
            return F::zero();
        }
        self.sum.value() / F::from(self.count).unwrap()
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> F {
        if self.count < 2 {
            return F::zero();
        }
        let n = F::from(self.count).unwrap();
        let mean = self.mean();
        let v = (self.sum_sq.value() - n * mean * mean) / (n - F::one());
        v.max(F::zero())
    }

    pub fn stderr(&self) -> F {
        if self.count == 0 {
            return F::zero();
        }
        (self.variance() / F::from(self.count).unwrap()).sqrt()
    }
}

impl Moments<f64> {
    pub fn estimate(&self) -> Estimate {
        Estimate::new(self.mean(), self.stderr())
    }
}

/// Mean of `exp(a_j)` for log-terms `a_j`, kept in log space so that terms like
/// `2^-10000` do not underflow.
#[derive(Debug, Clone, Copy)]
pub struct LogMeanExp<F> {
    count: u64,
    max: F,
    sum: CompensatedSum<F>,
    sum_sq: CompensatedSum<F>,
}

impl<F: Float> Default for LogMeanExp<F> {
    fn default() -> Self {
        Self::new()
    }
}

impl<F: Float> LogMeanExp<F> {
    pub fn new() -> Self {
        Self { count: 0, max: F::neg_infinity(), sum: CompensatedSum::new(), sum_sq: CompensatedSum::new() }
    }

    fn rebase(&mut self, new_max: F) {
        if self.max == F::neg_infinity() {
            self.max = new_max;
            return;
        }
        let f = (self.max - new_max).exp();
        self.sum.scale(f);
        self.sum_sq.scale(f * f);
        self.max = new_max;
    }

    pub fn push_log(&mut self, a: F) {
        if a > self.max {
            self.rebase(a);
        }
        self.count += 1;
        let e = (a - self.max).exp();
        self.sum.add(e);
        self.sum_sq.add(e * e);
    }

    pub fn merge(&mut self, other: &Self) {
        if other.count == 0 {
            return;
        }
        let mut other = *other;
        if other.max > self.max {
            self.rebase(other.max);
        } else {
            other.rebase(self.max);
        }
        self.count += other.count;
        self.sum.merge(&other.sum);
        self.sum_sq.merge(&other.sum_sq);
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// `log(mean(exp(a_j)))`.
    pub fn log_mean(&self) -> F {
        if self.count == 0 {
            return F::neg_infinity();
        }
        self.max + (self.sum.value() / F::from(self.count).unwrap()).ln()
    }

    pub fn mean(&self) -> F {
        self.log_mean().exp()
    }

    /// Standard error of `mean()`.
    pub fn stderr(&self) -> F {
        if self.count < 2 {
            return F::zero();
        }
        let n = F::from(self.count).unwrap();
        let m = self.sum.value() / n;
        let var = ((self.sum_sq.value() / n - m * m) * n / (n - F::one())).max(F::zero());
        (var / n).sqrt() * self.max.exp()
    }

    /// Standard error of `log_mean()` by the delta method.
    pub fn log_stderr(&self) -> F {
        if self.count < 2 {
            return F::zero();
        }
        let n = F::from(self.count).unwrap();
        let m = self.sum.value() / n;
        let var = ((self.sum_sq.value() / n - m * m) * n / (n - F::one())).max(F::zero());
        (var / n).sqrt() / m
    }
}

/// Successes out of trials.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Proportion {
    pub hits: u64,
    pub trials: u64,
}

impl Proportion {
    pub fn push(&mut self, hit: bool) {
        self.trials += 1;
        self.hits += hit as u64;
    }

    pub fn merge(&mut self, other: &Self) {
        self.hits += other.hits;
        self.trials += other.trials;
    }

    pub fn value(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.hits as f64 / self.trials as f64
        }
    }

    pub fn estimate(&self) -> Estimate {
        let p = self.value();
        let se = if self.trials == 0 { 0.0 } else { (p * (1.0 - p) / self.trials as f64).sqrt() };
        Estimate::new(p, se)
    }

    /// One-sided Clopper-Pearson style upper bound at confidence `1 - alpha`,
    /// via the Wilson score interval (adequate for the trial counts used here).
    pub fn upper_bound(&self, z: f64) -> f64 {
        if self.trials == 0 {
            return 1.0;
        }
        let n = self.trials as f64;
        let p = self.value();
        let denom = 1.0 + z * z / n;
        let centre = p + z * z / (2.0 * n);
        let spread = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt();
        ((centre + spread) / denom).min(1.0)
    }
}

/// Least-squares fit of `log y = a + b log x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub exponent: f64,
    pub stderr: f64,
    pub log_constant: f64,
    /// Two-sided 95% band on the exponent.
    pub band: (f64, f64),
}

pub fn fit_power_law(points: &[(f64, f64)]) -> Option<PowerFit> {
    let pts: Vec<(f64, f64)> =
        points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|&(x, y)| (x.ln(), y.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let b = sxy / sxx;
    let a = my - b * mx;
    let (se, band) = if pts.len() > 2 {
        let rss: f64 = pts.iter().map(|p| (p.1 - a - b * p.0).powi(2)).sum();
        let se = (rss / (n - 2.0) / sxx).sqrt();
        let t = StudentsT::new(0.0, 1.0, n - 2.0).map(|d| d.inverse_cdf(0.975)).unwrap_or(2.0);
        (se, (b - t * se, b + t * se))
    } else {
        (0.0, (b, b))
    };
    Some(PowerFit { exponent: b, stderr: se, log_constant: a, band })
}

/// Pearson chi-square test of `counts` against the uniform distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    pub samples: u64,
}

pub fn chi_square_uniform(counts: &[u64]) -> ChiSquareResult {
    let total: u64 = counts.iter().sum();
    let k = counts.len();
    if k < 2 || total == 0 {
        return ChiSquareResult { statistic: 0.0, dof: k.saturating_sub(1), p_value: 1.0, samples: total };
    }
    let expected = total as f64 / k as f64;
    let stat: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let dof = k - 1;
    let p = ChiSquared::new(dof as f64).map(|d| 1.0 - d.cdf(stat)).unwrap_or(0.0);
    ChiSquareResult { statistic: stat, dof, p_value: p, samples: total }
}
