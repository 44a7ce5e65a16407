//! The right random walk on `(Z/2)^Z ⋊ (Z/2 * Z/2 * Z/2)` with step law
//! `η * ν * η`, where `η = ½δ_f + ½δ_e` and `ν` is uniform on `{b, y, r}`.
//!
//! With `y_0 = x` and `y_k = s_k y_{k-1}`,
//!
//! ```text
//! t_n(x) = t(y_n) ⊕ ⊕_k [ε_k f(y_{k-1}) ⊕ ε'_k f(y_k)]
//! ```
//!
//! so a state only needs the generator sequence and the two coins per step.

use super::line::{ColoredLineAction, MarkRegistry, DEFAULT_CORE};
use super::{Color, Word};
use crate::action::Action;
use crate::error::{config, Result};
use crate::scalar::Probability;
use crate::stats::{chi_square_uniform, ChiSquareResult, Estimate, Merge, Moments, Proportion};
use crate::walks::{run_trajectories, trajectory_rng};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LampStep {
    pub gen: Color,
    /// `f` applied before the move.
    pub pre: bool,
    /// `f` applied after the move.
    pub post: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HWalkState {
    pub word: Word,
    pub log: Vec<LampStep>,
}

impl HWalkState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn steps(&self) -> usize {
        self.log.len()
    }

    /// Number of applied `f`-translates.
    pub fn lamp_records(&self) -> usize {
        self.log.iter().map(|s| s.pre as usize + s.post as usize).sum()
    }
}

/// One step; returns the change in word length.
pub fn h_walk_step<R: Rng + ?Sized>(state: &mut HWalkState, rng: &mut R) -> i64 {
    let pre = rng.gen_bool(0.5);
    let gen = Color::from_index(rng.gen_range(0..3usize));
    let post = rng.gen_bool(0.5);
    let before = state.word.len() as i64;
    let after = state.word.mul_right(gen) as i64;
    state.log.push(LampStep { gen, pre, post });
    after - before
}

/// Word coordinate only; consumes the same random draws as [`h_walk_step`].
fn word_step<R: Rng + ?Sized>(word: &mut Word, rng: &mut R) -> usize {
    let _ = rng.gen_bool(0.5);
    let gen = Color::from_index(rng.gen_range(0..3usize));
    let _ = rng.gen_bool(0.5);
    word.mul_right(gen)
}

/// `t_n(x)` by one pass along `y_k`.
pub fn eval_t_n(registry: &MarkRegistry, log: &[LampStep], x: i64, t: impl Fn(i64) -> Result<bool>) -> Result<bool> {
    let line = registry.line();
    let mut y = x;
    let mut acc = false;
    for s in log {
        if s.pre {
            acc ^= registry.eval_f(y)?;
        }
        y = line.switch(s.gen, y)?;
        if s.post {
            acc ^= registry.eval_f(y)?;
        }
    }
    Ok(acc ^ t(y)?)
}

/// `t_n(x) = t(w_n^-1 x) ⊕ ⊕_γ f(γ^-1 x)` over the applied translates `γ`.
pub fn eval_t_n_translates(
    registry: &MarkRegistry,
    log: &[LampStep],
    x: i64,
    t: impl Fn(i64) -> Result<bool>,
) -> Result<bool> {
    let act = ColoredLineAction::new(registry.line());
    let mut translates: Vec<Word> = Vec::new();
    let mut w = Word::empty();
    for s in log {
        if s.pre {
            translates.push(w.clone());
        }
        w.mul_right(s.gen);
        if s.post {
            translates.push(w.clone());
        }
    }
    let mut acc = t(act.apply(&w.inverse(), &x)?)?;
    for g in &translates {
        acc ^= registry.eval_f(act.apply(&g.inverse(), &x)?)?;
    }
    Ok(acc)
}

/// `P(|w_k| = 0)` for `k = 0..=n` from the word-length birth-death chain.
pub fn word_length_return<P: Probability>(n: usize) -> Vec<P> {
    let third = P::from_ratio(&BigRational::new(BigInt::from(1), BigInt::from(3)));
    let two_thirds = P::from_ratio(&BigRational::new(BigInt::from(2), BigInt::from(3)));
    let mut law: Vec<P> = vec![P::one()];
    let mut out = vec![P::one()];
    for _ in 0..n {
        let mut next: Vec<P> = vec![P::zero(); law.len() + 1];
        for (l, p) in law.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            if l == 0 {
                next[1] = next[1].clone() + p.clone();
            } else {
                next[l - 1] = next[l - 1].clone() + p.clone() * third.clone();
                next[l + 1] = next[l + 1].clone() + p.clone() * two_thirds.clone();
            }
        }
        law = next;
        out.push(law[0].clone());
    }
    out
}

/// `E|w_n| / n` and the increment check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftEstimate {
    pub horizon: usize,
    pub trajectories: u64,
    pub drift: Estimate,
    /// Every observed increment was ±1.
    pub unit_increments: bool,
}

#[derive(Debug, Clone)]
struct DriftStats {
    length: Moments<f64>,
    bad_increments: u64,
}

impl Merge for DriftStats {
    fn merge(&mut self, other: &Self) {
        self.length.merge(&other.length);
        self.bad_increments += other.bad_increments;
    }
}

pub fn word_length_drift(
    trajectories: u64,
    seed: u64,
    horizon: usize,
    threads: Option<usize>,
) -> Result<DriftEstimate> {
    if horizon == 0 || trajectories == 0 {
        return Err(config("word length drift needs a positive horizon and trajectory count"));
    }
    let stats = run_trajectories(
        trajectories,
        seed,
        threads,
        || DriftStats { length: Moments::new(), bad_increments: 0 },
        Word::empty,
        |_, rng, word, st| {
            *word = Word::empty();
            let mut prev = 0i64;
            for _ in 0..horizon {
                let l = word_step(word, rng) as i64;
                if (l - prev).abs() != 1 {
                    st.bad_increments += 1;
                }
                prev = l;
            }
            st.length.push(prev as f64 / horizon as f64);
            Ok(())
        },
    )?;
    Ok(DriftEstimate {
        horizon,
        trajectories,
        drift: stats.length.estimate(),
        unit_increments: stats.bad_increments == 0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayParams {
    pub line_seed: u64,
    pub seed: u64,
    pub trajectories: u64,
    pub horizon: usize,
    pub checkpoints: Vec<usize>,
    /// Word lengths for the conditional uniformity test at the last checkpoint.
    pub chi_lengths: Vec<usize>,
    pub threads: Option<usize>,
    pub core: usize,
}

impl Default for DecayParams {
    fn default() -> Self {
        Self {
            line_seed: 1,
            seed: 1,
            trajectories: 100_000,
            horizon: 40,
            checkpoints: vec![10, 20, 30, 40],
            chi_lengths: vec![2, 4, 6],
            threads: None,
            core: DEFAULT_CORE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub n: usize,
    /// Trajectories with `w_n ≠ e`.
    pub nonempty: u64,
    /// `P(t_n = t on x_0(w_n), …, x_l(w_n))` among those.
    pub agree: Estimate,
    /// `-(1/n) log agree`.
    pub rate: f64,
    /// Rate computed from the one-sided 99% upper bound on `agree`.
    pub rate_lower: f64,
    /// Agreement at the single marked point of the empty word.
    pub empty_agree: Estimate,
    pub empty: u64,
    pub mean_length: Estimate,
    /// `P(|w_n| ≥ n/4)`.
    pub long_fraction: Estimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthChiSquare {
    pub n: usize,
    pub length: usize,
    /// Cell `Σ_i t_n(x_i) 2^i`.
    pub counts: Vec<u64>,
    pub test: ChiSquareResult,
}

impl LengthChiSquare {
    pub fn passes(&self, alpha: f64) -> bool {
        self.test.samples > 0 && self.test.p_value >= alpha
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub params: DecayParams,
    pub registered_words: usize,
    pub rows: Vec<DecayRow>,
    pub chi_square: Vec<LengthChiSquare>,
}

pub const Z_99: f64 = 2.326;

#[derive(Debug, Clone)]
struct Cells(Vec<u64>);

impl Merge for Cells {
    fn merge(&mut self, other: &Self) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += b;
        }
    }
}

#[derive(Debug, Clone)]
struct DecayStats {
    agree: Vec<Proportion>,
    empty: Vec<Proportion>,
    length: Vec<Moments<f64>>,
    long: Vec<Proportion>,
    cells: Vec<Cells>,
}

impl Merge for DecayStats {
    fn merge(&mut self, other: &Self) {
        self.agree.merge(&other.agree);
        self.empty.merge(&other.empty);
        self.length.merge(&other.length);
        self.long.merge(&other.long);
        self.cells.merge(&other.cells);
    }
}

fn validate(p: &DecayParams) -> Result<Vec<usize>> {
    if p.trajectories == 0 || p.horizon == 0 {
        return Err(config("decay estimate needs positive trajectories and horizon"));
    }
    let mut cps = p.checkpoints.clone();
    if cps.is_empty() {
        cps.push(p.horizon);
    }
    if cps.windows(2).any(|w| w[0] >= w[1]) || cps.iter().any(|&c| c == 0 || c > p.horizon) {
        return Err(config("checkpoints must increase strictly within (0, horizon]"));
    }
    if p.chi_lengths.iter().any(|&l| l > 16) {
        return Err(config("chi-square word lengths above 16 are not supported"));
    }
    Ok(cps)
}

/// Registers every word the walk reaches at a checkpoint, then evaluates the
/// marked-set agreement in parallel on the frozen line.
pub fn decay_estimate(params: &DecayParams) -> Result<DecayReport> {
    let cps = validate(params)?;
    let registry = prepare_registry(params, &cps)?;
    let last = *cps.last().unwrap();
    let stats = run_trajectories(
        params.trajectories,
        params.seed,
        params.threads,
        || DecayStats {
            agree: vec![Proportion::default(); cps.len()],
            empty: vec![Proportion::default(); cps.len()],
            length: vec![Moments::new(); cps.len()],
            long: vec![Proportion::default(); cps.len()],
            cells: params.chi_lengths.iter().map(|&l| Cells(vec![0; 1 << (l + 1)])).collect(),
        },
        HWalkState::new,
        |_, rng, state, st| {
            *state = HWalkState::new();
            let mut ci = 0;
            for k in 1..=params.horizon {
                h_walk_step(state, rng);
                if cps[ci] != k {
                    continue;
                }
                let l = state.word.len();
                st.length[ci].push(l as f64);
                st.long[ci].push(4 * l >= k);
                let entry = registry
                    .entry(&state.word)
                    .ok_or_else(|| config(format!("word {} was not registered", state.word)))?;
                let mut bits = 0u64;
                let mut all_zero = true;
                for (i, &x) in entry.anchors.iter().enumerate() {
                    let b = eval_t_n(&registry, &state.log, x, |_| Ok(false))?;
                    all_zero &= !b;
                    bits |= (b as u64) << i;
                }
                if l == 0 {
                    st.empty[ci].push(all_zero);
                } else {
                    st.agree[ci].push(all_zero);
                    if k == last {
                        if let Some(j) = params.chi_lengths.iter().position(|&c| c == l) {
                            st.cells[j].0[bits as usize] += 1;
                        }
                    }
                }
                ci += 1;
                if ci == cps.len() {
                    break;
                }
            }
            Ok(())
        },
    )?;
    let rows = cps
        .iter()
        .enumerate()
        .map(|(ci, &n)| {
            let a = &stats.agree[ci];
            let p = a.value();
            DecayRow {
                n,
                nonempty: a.trials,
                agree: a.estimate(),
                rate: if p > 0.0 { -p.ln() / n as f64 } else { f64::INFINITY },
                rate_lower: -a.upper_bound(Z_99).ln() / n as f64,
                empty_agree: stats.empty[ci].estimate(),
                empty: stats.empty[ci].trials,
                mean_length: stats.length[ci].estimate(),
                long_fraction: stats.long[ci].estimate(),
            }
        })
        .collect();
    let chi_square = params
        .chi_lengths
        .iter()
        .zip(&stats.cells)
        .map(|(&length, c)| LengthChiSquare { n: last, length, counts: c.0.clone(), test: chi_square_uniform(&c.0) })
        .collect();
    Ok(DecayReport { params: params.clone(), registered_words: registry.len(), rows, chi_square })
}

/// Replays every trajectory's word coordinate and plants the reached words.
pub fn prepare_registry(params: &DecayParams, cps: &[usize]) -> Result<MarkRegistry> {
    let mut words: FxHashSet<Word> = FxHashSet::default();
    words.insert(Word::empty());
    for idx in 0..params.trajectories {
        let mut rng = trajectory_rng(params.seed, idx);
        let mut w = Word::empty();
        let mut ci = 0;
        for k in 1..=params.horizon {
            word_step(&mut w, &mut rng);
            if cps[ci] == k {
                words.insert(w.clone());
                ci += 1;
                if ci == cps.len() {
                    break;
                }
            }
        }
    }
    let mut registry = MarkRegistry::with_core(params.line_seed, params.core.max(1));
    registry.register(words.iter());
    registry.extend_margin(params.horizon + 1);
    Ok(registry)
}

impl DecayReport {
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("n,agree,stderr,rate,rate_lower,nonempty,empty_agree,empty,mean_length,long_fraction\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                r.n,
                r.agree.value,
                r.agree.stderr,
                r.rate,
                r.rate_lower,
                r.nonempty,
                r.empty_agree.value,
                r.empty,
                r.mean_length.value,
                r.long_fraction.value
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colored_line::FreeProductSelf;
    use crate::measure::Measure;
    use crate::walks::exact_return_probability;

    fn walked(seed: u64, n: usize) -> HWalkState {
        let mut rng = trajectory_rng(seed, 0);
        let mut s = HWalkState::new();
        for _ in 0..n {
            let d = h_walk_step(&mut s, &mut rng);
            assert!(d == 1 || d == -1);
        }
        s
    }

    #[test]
    fn pointwise_forms_agree() {
        let mut reg = MarkRegistry::new(4);
        reg.build_up_to(40);
        reg.extend_margin(40);
        let t = |y: i64| Ok(y.rem_euclid(3) == 0);
        for seed in 0..30 {
            let s = walked(seed, 25);
            assert!(s.lamp_records() <= 2 * s.steps());
            let (lo, hi) = reg.frontier();
            for x in [lo + 30, -3, 0, 7, hi - 30] {
                assert_eq!(eval_t_n(&reg, &s.log, x, t).unwrap(), eval_t_n_translates(&reg, &s.log, x, t).unwrap());
            }
        }
    }

    #[test]
    fn trivial_configurations() {
        let mut reg = MarkRegistry::new(2);
        reg.build_up_to(3);
        assert!(eval_t_n(&reg, &[], 5, |y| Ok(y == 5)).unwrap());
        let mark = reg.entries()[2].marks().next().unwrap();
        assert!(reg.eval_f(mark).unwrap());
        let once = [LampStep { gen: Color::Blue, pre: true, post: false }];
        assert!(eval_t_n(&reg, &once, mark, |_| Ok(false)).unwrap());
        let no_lamps = [LampStep { gen: Color::Red, pre: false, post: false }];
        let moved = reg.line().switch(Color::Red, 3).unwrap();
        assert!(eval_t_n(&reg, &no_lamps, 3, |y| Ok(y == moved)).unwrap());
    }

    #[test]
    fn word_length_chain_matches_group_convolution() {
        let chain: Vec<BigRational> = word_length_return(12);
        let mu = Measure::uniform(3).unwrap();
        let direct: Vec<BigRational> =
            exact_return_probability(&FreeProductSelf, &mu, &Word::empty(), 12, 1 << 24, |w, rem| w.len() <= rem)
                .unwrap();
        assert_eq!(chain, direct);
        assert_eq!(chain[2], BigRational::new(1.into(), 3.into()));
    }

    #[test]
    fn drift_is_thread_independent() {
        let a = word_length_drift(300, 5, 200, Some(1)).unwrap();
        let b = word_length_drift(300, 5, 200, Some(3)).unwrap();
        assert_eq!(a, b);
        assert!(a.unit_increments);
        assert!(a.drift.within_sigmas(1.0 / 3.0, 5.0) || (a.drift.value - 1.0 / 3.0).abs() < 0.02);
    }

    #[test]
    fn small_decay_run() {
        let p = DecayParams {
            trajectories: 500,
            horizon: 12,
            checkpoints: vec![6, 12],
            threads: Some(2),
            ..Default::default()
        };
        let a = decay_estimate(&p).unwrap();
        let b = decay_estimate(&DecayParams { threads: Some(1), ..p.clone() }).unwrap();
        assert_eq!((&a.rows, &a.chi_square), (&b.rows, &b.chi_square));
        assert_eq!(a.rows.len(), 2);
        for r in &a.rows {
            assert_eq!(r.nonempty + r.empty, 500);
        }
        assert!(!a.to_csv().is_empty());
    }
}
