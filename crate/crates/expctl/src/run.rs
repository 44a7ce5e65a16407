//! Executes one configured experiment into records and companion files.

use crate::config::{
    parse_angle_point, parse_int_point, parse_word_point, ActionKind, BuiltAction, ExperimentConfig, Kind,
};
use crate::error::{CliError, CliResult};
use crate::record::{blob_hash, RecordSink, ResultRecord};
use extamen::colored_line::{
    decay_estimate, prepare_registry, word_length_drift, word_length_return, ColoredLineAction, DecayParams,
};
use extamen::iet::random_angle;
use extamen::scalar::ratio_to_f64;
use extamen::schreier::{complexity_profile, schreier_ball};
use extamen::stats::{Estimate, Merge, Proportion};
use extamen::walks::exact::DEFAULT_BUDGET;
use extamen::walks::orbit::{default_eps_grid, orbit_statistics};
use extamen::walks::{
    drift_probe, estimate_orbit_criteria, estimate_recurrence, exact_orbit_oracle, exact_return_probability,
    exact_sws_return, run_trajectories, tau_infinity_probe, tau_probe_points,
};
use extamen::{Action, Displacement, ExactProb, Iet, LampConfig, SwsMeasure, SwsState, WalkSpec};
use std::fmt::Debug;
use std::time::Instant;

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub config: ExperimentConfig,
    pub records: Vec<ResultRecord>,
    /// Companion files as `(file name, contents)`.
    pub artifacts: Vec<(String, String)>,
    pub wall_clock: f64,
    pub threads: Option<usize>,
}

struct Ctx {
    cfg: ExperimentConfig,
    sink: RecordSink,
    artifacts: Vec<(String, String)>,
    threads: Option<usize>,
}

impl Ctx {
    fn budget(&self) -> u128 {
        self.cfg.experiment.budget.map_or(DEFAULT_BUDGET, u128::from)
    }

    fn id(&self) -> &str {
        &self.cfg.experiment.id
    }

    fn spec<A: Action>(&self, action: A, x0: A::Point) -> CliResult<WalkSpec<A>> {
        let w = &self.cfg.walk;
        let measure = self.cfg.measure(action.num_generators())?;
        let symmetric = w.symmetric.unwrap_or_else(|| measure.is_symmetric(|s| action.inverse_generator(s)));
        let mut spec = WalkSpec::new(action, measure, x0)
            .horizon(w.horizon)
            .trajectories(w.trajectories)
            .seed(w.seed)
            .symmetric(symmetric)
            .threads(self.threads);
        if let Some(c) = &w.checkpoints {
            spec = spec.checkpoints(c.clone());
        }
        Ok(spec)
    }
}

/// Runs the experiment; identical `(config, seed)` give identical records at any thread count.
pub fn execute(cfg: &ExperimentConfig, input: &[u8], opts: &RunOptions) -> CliResult<RunOutput> {
    let mut cfg = cfg.clone();
    if let Some(s) = opts.seed {
        cfg.walk.seed = s;
    }
    let threads = opts.threads.or(cfg.walk.threads);
    let sink = RecordSink {
        experiment: cfg.experiment.id.clone(),
        kind: cfg.experiment.kind.name().to_string(),
        config_hash: cfg.hash(),
        input_hash: blob_hash(input),
        seed: cfg.walk.seed,
        streams: cfg.walk.trajectories,
        records: Vec::new(),
    };
    let mut ctx = Ctx { cfg, sink, artifacts: Vec::new(), threads };
    let start = Instant::now();
    dispatch(&mut ctx)?;
    let csv = records_csv(&ctx.sink.records);
    let name = format!("{}.csv", ctx.id());
    ctx.artifacts.insert(0, (name, csv));
    Ok(RunOutput {
        config: ctx.cfg,
        records: ctx.sink.records,
        artifacts: ctx.artifacts,
        wall_clock: start.elapsed().as_secs_f64(),
        threads,
    })
}

fn records_csv(records: &[ResultRecord]) -> String {
    let mut out = String::from("estimator,n,estimate,stderr,trajectories,exact\n");
    for r in records {
        let est = r.estimate.map_or_else(|| "inf".to_string(), |v| v.to_string());
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.estimator,
            r.n,
            est,
            r.stderr,
            r.trajectories,
            r.exact.as_deref().unwrap_or("")
        ));
    }
    out
}

fn dispatch(ctx: &mut Ctx) -> CliResult<()> {
    let kind = ctx.cfg.experiment.kind;
    match kind {
        Kind::CocycleCheck => return cocycle_check(ctx),
        Kind::Complexity => return complexity(ctx),
        Kind::ColoredLineDecay => return colored_line_decay(ctx),
        _ => {}
    }
    let built = ctx.cfg.build_action()?;
    let bp = ctx.cfg.walk.base_point.clone();
    let bp = bp.as_deref();
    match (kind, built) {
        (Kind::TauProbe, BuiltAction::Iet(a)) => tau_probe(ctx, a),
        (Kind::TauProbe, _) => Err(CliError::config("tau-probe needs an iet action")),
        (Kind::Drift, BuiltAction::Iet(a)) => {
            let x0 = parse_angle_point(a.group(), bp)?;
            displacement_drift(ctx, a, x0)
        }
        (Kind::Drift, BuiltAction::Rotation(a)) => {
            let x0 = parse_angle_point(a.group(), bp)?;
            displacement_drift(ctx, a, x0)
        }
        (Kind::Drift, BuiltAction::Line(a)) => displacement_drift(ctx, a, parse_int_point(bp)?),
        (Kind::Drift, BuiltAction::FreeProduct(_) | BuiltAction::ColoredLine(_)) => {
            let w = &ctx.cfg.walk;
            let d = word_length_drift(w.trajectories, w.seed, w.horizon, ctx.threads)?;
            ctx.sink.estimate("word_length_drift", d.horizon, d.trajectories, d.drift);
            ctx.sink.value("unit_increments", d.horizon, d.trajectories, d.unit_increments as u8 as f64, 0.0);
            Ok(())
        }
        (Kind::Drift, BuiltAction::Perm(_)) => Err(CliError::config("drift needs an action with free coordinates")),
        (_, BuiltAction::Iet(a)) => {
            let x0 = parse_angle_point(a.group(), bp)?;
            walk_kinds(ctx, a, x0, |_, _| true)
        }
        (_, BuiltAction::Rotation(a)) => {
            let x0 = parse_angle_point(a.group(), bp)?;
            walk_kinds(ctx, a, x0, |_, _| true)
        }
        (_, BuiltAction::Line(a)) => {
            let x0 = parse_int_point(bp)?;
            let reach = ctx.cfg.generators.iter().filter_map(|g| g.step).map(|s| s.unsigned_abs()).max().unwrap_or(1);
            walk_kinds(ctx, a, x0, move |y, rem| y.abs_diff(x0) <= reach * rem as u64)
        }
        (_, BuiltAction::Perm(a)) => {
            let x0 = parse_int_point(bp)?;
            let x0 = usize::try_from(x0).map_err(|_| CliError::config("base point must be a non-negative index"))?;
            if x0 >= a.size() {
                return Err(CliError::config(format!("base point {x0} outside the permuted set of size {}", a.size())));
            }
            walk_kinds(ctx, a, x0, |_, _| true)
        }
        (_, BuiltAction::FreeProduct(a)) => {
            let x0 = parse_word_point(bp)?;
            if kind == Kind::Spectral {
                let chain: Vec<ExactProb> = word_length_return(ctx.cfg.walk.horizon);
                for (k, p) in chain.iter().enumerate() {
                    ctx.sink.exact("word_length_chain", k, ratio_to_f64(p), p.to_string());
                }
            }
            let xi = x0.inverse();
            walk_kinds(ctx, a, x0.clone(), move |y, rem| y.mul(&xi).len() <= rem)
        }
        (_, BuiltAction::ColoredLine(line)) => {
            let x0 = parse_int_point(bp)?;
            let (lo, hi) = line.vertex_range();
            if x0 - (ctx.cfg.walk.horizon as i64) < lo || x0 + ctx.cfg.walk.horizon as i64 > hi {
                return Err(CliError::config("base point too close to the edge of the colored window"));
            }
            let a = ColoredLineAction::new(&line);
            walk_kinds(ctx, a, x0, move |y, rem| y.abs_diff(x0) <= rem as u64)
        }
    }
}

fn walk_kinds<A: Action + Clone>(
    ctx: &mut Ctx,
    action: A,
    x0: A::Point,
    keep: impl Fn(&A::Point, usize) -> bool,
) -> CliResult<()>
where
    A::Point: Debug,
{
    let kind = ctx.cfg.experiment.kind;
    let spec = ctx.spec(action, x0)?;
    match kind {
        Kind::InvertedOrbit => inverted_orbit(ctx, &spec),
        Kind::Recurrence => {
            let r = estimate_recurrence(&spec)?;
            let t = r.trajectories;
            ctx.sink.estimate("size_over_n", r.horizon, t, r.size_over_n);
            ctx.sink.estimate("slope", r.horizon, t, r.slope);
            ctx.sink.estimate("censored", r.horizon, t, r.censored);
            Ok(())
        }
        Kind::SwsReturn => sws_return(ctx, &spec),
        Kind::OracleCrosscheck => oracle_crosscheck(ctx, &spec),
        Kind::Schreier => {
            let radius = ctx.cfg.experiment.radius.unwrap_or(10);
            let ball = schreier_ball(&spec.action, &spec.base_point, radius)?;
            for r in 0..=radius {
                let c = ball.distance.iter().filter(|&&d| d <= r).count();
                ctx.sink.exact("ball_size", r, c as f64, c.to_string());
            }
            ctx.sink.exact("edges", radius, ball.edges.len() as f64, ball.edges.len().to_string());
            let dot = ball.to_dot(|p| format!("{p:?}"), |s| spec.action.generator_name(s));
            ctx.artifacts.push((format!("{}.dot", ctx.id()), dot));
            Ok(())
        }
        Kind::Spectral => {
            let n = spec.horizon;
            let probs: Vec<ExactProb> =
                exact_return_probability(&spec.action, &spec.measure, &spec.base_point, n, ctx.budget(), keep)?;
            for (k, p) in probs.iter().enumerate() {
                let v = ratio_to_f64(p);
                ctx.sink.exact("return_probability", k, v, p.to_string());
                if k > 0 && v > 0.0 {
                    ctx.sink.exact("return_root", k, v.powf(1.0 / k as f64), format!("({p})^(1/{k})"));
                    ctx.sink.exact("return_rate", k, -v.ln() / k as f64, format!("-log({p})/{k}"));
                }
            }
            Ok(())
        }
        other => Err(CliError::config(format!("{} is not available for this action", other.name()))),
    }
}

fn inverted_orbit<A: Action>(ctx: &mut Ctx, spec: &WalkSpec<A>) -> CliResult<()> {
    let eps = ctx.cfg.experiment.eps.clone().unwrap_or_else(default_eps_grid);
    let rep = estimate_orbit_criteria(spec, &eps)?;
    let t = rep.trajectories;
    for row in &rep.rows {
        let n = row.n;
        ctx.sink.estimate("size_over_n", n, t, row.size_over_n);
        ctx.sink.estimate("return_probability", n, t, row.return_probability);
        ctx.sink.estimate("rate", n, t, row.rate);
        ctx.sink.estimate("increment", n, t, row.increment);
        ctx.sink.estimate("survival", n, t, row.survival);
        for e in &row.eps {
            ctx.sink.estimate(format!("small_probability_eps{}", e.eps), n, t, e.probability);
            ctx.sink.value(format!("small_threshold_eps{}", e.eps), n, t, e.threshold, 0.0);
            if let Some(r) = e.event_rate {
                let p = e.probability;
                ctx.sink.value(format!("small_rate_eps{}", e.eps), n, t, r, p.stderr / (p.value * n.max(1) as f64));
            }
            if let Some(c) = e.conditional_size {
                ctx.sink.estimate(format!("small_conditional_size_eps{}", e.eps), n, t, c);
            }
        }
    }
    Ok(())
}

fn sws_return<A: Action>(ctx: &mut Ctx, spec: &WalkSpec<A>) -> CliResult<()> {
    spec.validate()?;
    let cps = spec.effective_checkpoints();
    let sws = SwsMeasure { mu: spec.measure.clone(), lamp_point: spec.base_point.clone() };
    let horizon = *cps.last().unwrap_or(&0);
    let stats: Vec<Proportion> = run_trajectories(
        spec.trajectories,
        spec.seed,
        spec.threads,
        || vec![Proportion::default(); cps.len()],
        || (),
        |_, rng, _, st| {
            let mut state = SwsState::start(&spec.action);
            let mut ci = 0;
            while ci < cps.len() && cps[ci] == 0 {
                st[ci].push(true);
                ci += 1;
            }
            for k in 1..=horizon {
                extamen::wreath::sws_step(&spec.action, &sws, &mut state, rng)?;
                while ci < cps.len() && cps[ci] == k {
                    st[ci].push(state.config == LampConfig::empty());
                    ci += 1;
                }
            }
            Ok(())
        },
    )?;
    for (n, p) in cps.iter().zip(&stats) {
        ctx.sink.estimate("sws_return", *n, p.trials, p.estimate());
    }
    let top = ctx.cfg.experiment.oracle_n.unwrap_or(spec.horizon.min(6));
    for n in 0..=top {
        let p: ExactProb = exact_sws_return(&spec.action, &spec.measure, &spec.base_point, n, ctx.budget())?;
        ctx.sink.exact("sws_return_exact", n, ratio_to_f64(&p), p.to_string());
    }
    Ok(())
}

fn oracle_crosscheck<A: Action + Clone>(ctx: &mut Ctx, spec: &WalkSpec<A>) -> CliResult<()> {
    let top = ctx.cfg.experiment.oracle_n.unwrap_or(spec.horizon.min(8));
    let mut exact = Vec::new();
    for n in 0..=top {
        let law = exact_orbit_oracle::<_, ExactProb>(&spec.action, &spec.measure, &spec.base_point, n, ctx.budget())?;
        let sws: ExactProb = exact_sws_return(&spec.action, &spec.measure, &spec.base_point, n, ctx.budget())?;
        let v = ratio_to_f64(&law.expectation);
        ctx.sink.exact("orbit_oracle", n, v, law.expectation.to_string());
        ctx.sink.exact("sws_oracle", n, ratio_to_f64(&sws), sws.to_string());
        let same = law.expectation == sws;
        ctx.sink.exact("oracle_agreement", n, same as u8 as f64, same.to_string());
        exact.push(v);
    }
    let mut mc = spec.clone();
    if ctx.cfg.walk.checkpoints.is_none() {
        mc = mc.checkpoints((0..=top.min(spec.horizon)).collect());
    }
    let stats = orbit_statistics(&mc, &[])?;
    for st in &stats {
        let e = Estimate::new(st.weight.mean(), st.weight.stderr());
        ctx.sink.estimate("return_probability", st.n, st.weight.count(), e);
        if let Some(&x) = exact.get(st.n) {
            let z = if e.stderr > 0.0 {
                (e.value - x) / e.stderr
            } else if e.value == x {
                0.0
            } else {
                f64::INFINITY
            };
            ctx.sink.value("z_score", st.n, st.weight.count(), z, 0.0);
        }
    }
    Ok(())
}

fn displacement_drift<A: Displacement>(ctx: &mut Ctx, action: A, x0: A::Point) -> CliResult<()> {
    let spec = ctx.spec(action, x0)?;
    let rep = drift_probe(&spec)?;
    for (i, d) in rep.drift.iter().enumerate() {
        ctx.sink.estimate(format!("drift_{i}"), rep.horizon, rep.trajectories, *d);
    }
    Ok(())
}

fn tau_probe(ctx: &mut Ctx, action: extamen::IetAction) -> CliResult<()> {
    let x0 = parse_angle_point(action.group(), ctx.cfg.walk.base_point.as_deref())?;
    let count = ctx.cfg.experiment.points.unwrap_or(32);
    let points = tau_probe_points(&action, &x0, count)?;
    let spec = ctx.spec(action, x0)?;
    let rep = tau_infinity_probe(&spec, &points)?;
    for row in &rep.rows {
        ctx.sink.estimate("stabilized", row.n, rep.trajectories, row.stabilized);
        ctx.sink.estimate("hits", row.n, rep.trajectories, row.hits);
    }
    ctx.sink.value("points", spec.horizon, rep.trajectories, rep.points as f64, 0.0);
    Ok(())
}

fn complexity(ctx: &mut Ctx) -> CliResult<()> {
    let group = ctx.cfg.group()?;
    let gens = ctx.cfg.rotation_angles(&group)?;
    let n_max = ctx.cfg.experiment.n_max.unwrap_or(64);
    let fit = ctx.cfg.experiment.fit_range.map(|[a, b]| (a, b));
    let prof = complexity_profile(&group, &gens, n_max, fit)?;
    for (n, r) in prof.rho.iter().enumerate() {
        ctx.sink.exact("rho", n, *r as f64, r.to_string());
    }
    if let Some(f) = prof.fit {
        ctx.sink.value("exponent", n_max, 0, f.exponent, f.stderr);
        ctx.sink.value("exponent_band_lo", n_max, 0, f.band.0, 0.0);
        ctx.sink.value("exponent_band_hi", n_max, 0, f.band.1, 0.0);
    }
    ctx.sink.value("empirical_constant", n_max, 0, prof.empirical_constant, 0.0);
    ctx.sink.exact("bound_holds", n_max, prof.bound_holds as u8 as f64, prof.bound_holds.to_string());
    ctx.artifacts.push((format!("{}_rho.csv", ctx.id()), prof.to_csv()));
    Ok(())
}

fn colored_line_decay(ctx: &mut Ctx) -> CliResult<()> {
    if ctx.cfg.action.kind != ActionKind::ColoredLine {
        return Err(CliError::config("colored-line-decay needs action kind colored-line"));
    }
    let w = &ctx.cfg.walk;
    if w.weights.is_some() {
        return Err(CliError::config("colored-line-decay uses the uniform step law; remove walk.weights"));
    }
    let params = DecayParams {
        line_seed: ctx.cfg.line_seed(),
        seed: w.seed,
        trajectories: w.trajectories,
        horizon: w.horizon,
        checkpoints: w.checkpoints.clone().unwrap_or_else(|| vec![w.horizon]),
        chi_lengths: ctx.cfg.experiment.chi_lengths.clone().unwrap_or_else(|| vec![2, 4, 6]),
        threads: ctx.threads,
        core: ctx.cfg.core(),
    };
    let rep = decay_estimate(&params)?;
    for r in &rep.rows {
        let n = r.n;
        let p = r.agree;
        ctx.sink.estimate("agree", n, r.nonempty, p);
        ctx.sink.value("rate", n, r.nonempty, r.rate, p.stderr / (p.value * n as f64));
        ctx.sink.value("rate_lower_99", n, r.nonempty, r.rate_lower, 0.0);
        ctx.sink.estimate("empty_agree", n, r.empty, r.empty_agree);
        ctx.sink.estimate("mean_length", n, params.trajectories, r.mean_length);
        ctx.sink.estimate("long_fraction", n, params.trajectories, r.long_fraction);
    }
    for c in &rep.chi_square {
        ctx.sink.value(format!("chi_square_p_l{}", c.length), c.n, c.test.samples, c.test.p_value, 0.0);
        ctx.sink.value(format!("chi_square_stat_l{}", c.length), c.n, c.test.samples, c.test.statistic, 0.0);
    }
    ctx.sink.value("registered_words", params.horizon, params.trajectories, rep.registered_words as f64, 0.0);
    ctx.artifacts.push((format!("{}_decay.csv", ctx.id()), rep.to_csv()));
    if ctx.cfg.experiment.dump_registry.unwrap_or(false) {
        let mut cps = params.checkpoints.clone();
        cps.sort_unstable();
        let reg = prepare_registry(&params, &cps)?;
        reg.audit()?;
        ctx.artifacts.push((format!("{}_registry.tsv", ctx.id()), reg.dump()));
    }
    Ok(())
}

#[derive(Debug, Clone, Default)]
struct Counts(Vec<u64>);

impl Merge for Counts {
    fn merge(&mut self, other: &Self) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += b;
        }
    }
}

const TRIVIALITY_STREAM_OFFSET: u64 = 0x9E37_79B9_7F4A_7C15;

/// Exact checks of the cocycle identity and of rotation triviality on random IETs.
fn cocycle_check(ctx: &mut Ctx) -> CliResult<()> {
    let group = ctx.cfg.group()?;
    let pairs = ctx.cfg.experiment.pairs.unwrap_or(1000) as u64;
    let [iets, rotations] = ctx.cfg.experiment.samples.unwrap_or([10_000, 100]);
    let seed = ctx.cfg.walk.seed;
    let factors = ctx.cfg.walk.horizon.max(1);
    let bound = 3;
    let identity = run_trajectories(
        pairs,
        seed,
        ctx.threads,
        || Counts(vec![0; 2]),
        || (),
        |_, rng, _, c| {
            let g = Iet::random(&group, rng, factors, bound)?;
            let h = Iet::random(&group, rng, factors, bound)?;
            let lhs = g.compose(&h)?.cocycle()?;
            let rhs = g.cocycle()?.compose(&h.cocycle()?.conjugate(&g)?);
            c.0[0] += (lhs != rhs) as u64;
            c.0[1] += lhs.len() as u64;
            Ok(())
        },
    )?;
    let total = (iets + rotations) as u64;
    let trivial = run_trajectories(
        total,
        seed.wrapping_add(TRIVIALITY_STREAM_OFFSET),
        ctx.threads,
        || Counts(vec![0; 2]),
        || (),
        |i, rng, _, c| {
            let g = if i < iets as u64 {
                Iet::random(&group, rng, factors, bound)?
            } else {
                Iet::rotation(&group, random_angle(&group, rng, bound))
            };
            let empty = g.cocycle()?.is_identity();
            c.0[0] += (empty != g.is_rotation()) as u64;
            c.0[1] += g.is_rotation() as u64;
            Ok(())
        },
    )?;
    ctx.sink.streams = pairs + total;
    let p = pairs as usize;
    ctx.sink.exact("cocycle_identity_failures", p, identity.0[0] as f64, identity.0[0].to_string());
    let mean = identity.0[1] as f64 / pairs.max(1) as f64;
    ctx.sink.value("mean_cocycle_support", p, pairs, mean, 0.0);
    let t = total as usize;
    ctx.sink.exact("rotation_triviality_exceptions", t, trivial.0[0] as f64, trivial.0[0].to_string());
    ctx.sink.exact("rotations_seen", t, trivial.0[1] as f64, trivial.0[1].to_string());
    Ok(())
}

/// `(n, E 2^{-|O_n|}, P(f_n = f_0))` from the two exact oracles.
pub type OracleRow = (usize, ExactProb, ExactProb);

fn oracle_rows<A: Action>(cfg: &ExperimentConfig, action: &A, x0: &A::Point, n: usize) -> CliResult<Vec<OracleRow>> {
    let measure = cfg.measure(action.num_generators())?;
    let budget = cfg.experiment.budget.map_or(DEFAULT_BUDGET, u128::from);
    (0..=n)
        .map(|k| {
            let law = exact_orbit_oracle::<_, ExactProb>(action, &measure, x0, k, budget)?;
            let sws = exact_sws_return(action, &measure, x0, k, budget)?;
            Ok((k, law.expectation, sws))
        })
        .collect()
}

/// Runs both exact oracles on the configured action for `0..=n`.
pub fn oracle(cfg: &ExperimentConfig, n: usize) -> CliResult<Vec<OracleRow>> {
    let bp = cfg.walk.base_point.as_deref();
    match cfg.build_action()? {
        BuiltAction::Iet(a) => oracle_rows(cfg, &a, &parse_angle_point(a.group(), bp)?, n),
        BuiltAction::Rotation(a) => oracle_rows(cfg, &a, &parse_angle_point(a.group(), bp)?, n),
        BuiltAction::Line(a) => oracle_rows(cfg, &a, &parse_int_point(bp)?, n),
        BuiltAction::Perm(a) => {
            let x0 = usize::try_from(parse_int_point(bp)?).map_err(|_| CliError::config("negative base point"))?;
            oracle_rows(cfg, &a, &x0, n)
        }
        BuiltAction::FreeProduct(a) => oracle_rows(cfg, &a, &parse_word_point(bp)?, n),
        BuiltAction::ColoredLine(line) => oracle_rows(cfg, &ColoredLineAction::new(&line), &parse_int_point(bp)?, n),
    }
}
