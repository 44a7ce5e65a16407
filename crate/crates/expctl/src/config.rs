//! Experiment configuration files.
//!
//! ```toml
//! [experiment]
//! id = "z-line"
//! kind = "oracle-crosscheck"
//!
//! [angles]
//! m = 12
//! thetas = ["sqrt(2) - 1"]
//! bases = ["0"]
//!
//! [[generator]]
//! name = "r"
//! rotation = "[1]·θ"
//!
//! [action]
//! kind = "iet"
//!
//! [walk]
//! weights = ["1/2", "1/2"]
//! horizon = 8
//! trajectories = 100000
//! seed = 7
//! ```

use crate::error::{CliError, CliResult};
use extamen::colored_line::{Color, ColoredLine, FreeProductSelf, Word, DEFAULT_CORE};
use extamen::{Action, AngleGroup, FinitePermAction, Iet, IetAction, IntegerLine, Measure, Point, RotationAction};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    InvertedOrbit,
    Recurrence,
    SwsReturn,
    TauProbe,
    Drift,
    Schreier,
    Complexity,
    ColoredLineDecay,
    OracleCrosscheck,
    Spectral,
    CocycleCheck,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::InvertedOrbit => "inverted-orbit",
            Kind::Recurrence => "recurrence",
            Kind::SwsReturn => "sws-return",
            Kind::TauProbe => "tau-probe",
            Kind::Drift => "drift",
            Kind::Schreier => "schreier",
            Kind::Complexity => "complexity",
            Kind::ColoredLineDecay => "colored-line-decay",
            Kind::OracleCrosscheck => "oracle-crosscheck",
            Kind::Spectral => "spectral",
            Kind::CocycleCheck => "cocycle-check",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentBlock {
    pub id: String,
    pub kind: Kind,
    /// Thresholds for the `|O_n| < εn` events.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<Vec<f64>>,
    /// Sample points of the tau probe.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_range: Option<[usize; 2]>,
    /// Largest `n` handed to the exact oracles.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi_lengths: Option<Vec<usize>>,
    /// Random IET pairs for the cocycle identity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<usize>,
    /// Random IETs and rotations for the triviality check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dump_registry: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnglesBlock {
    pub m: u32,
    #[serde(default)]
    pub thetas: Vec<String>,
    #[serde(default = "default_bases")]
    pub bases: Vec<String>,
    #[serde(default = "yes")]
    pub independence_assumed: bool,
}

fn default_bases() -> Vec<String> {
    vec!["0".into()]
}

fn yes() -> bool {
    true
}

/// One named generator; exactly one of the defining fields must be set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorDef {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<String>,
    /// Arcs in the `point | angle` text format, separated by `;` or newlines.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iet: Option<String>,
    /// Exchange `[a, b)` and `[b, c)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub swap: Option<[String; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perm: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub color: Option<String>,
}

impl GeneratorDef {
    fn defined_by(&self) -> CliResult<&'static str> {
        let set = [
            ("rotation", self.rotation.is_some()),
            ("iet", self.iet.is_some()),
            ("swap", self.swap.is_some()),
            ("step", self.step.is_some()),
            ("perm", self.perm.is_some()),
            ("color", self.color.is_some()),
        ];
        let on: Vec<&str> = set.iter().filter(|s| s.1).map(|s| s.0).collect();
        match on.as_slice() {
            [one] => Ok(one),
            _ => Err(CliError::config(format!(
                "generator {:?} must set exactly one of rotation, iet, swap, step, perm, color",
                self.name
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ActionKind {
    Iet,
    Rotation,
    IntegerLine,
    FinitePerm,
    FreeProduct,
    ColoredLine,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionBlock {
    pub kind: ActionKind,
    /// Add missing inverses to the generating set.
    #[serde(default = "yes")]
    pub symmetrize: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub line_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub core: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WalkBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_point: Option<String>,
    pub horizon: usize,
    pub trajectories: u64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoints: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetric: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angles: Option<AnglesBlock>,
    #[serde(default, rename = "generator", skip_serializing_if = "Vec::is_empty")]
    pub generators: Vec<GeneratorDef>,
    pub action: ActionBlock,
    pub walk: WalkBlock,
}

impl ExperimentConfig {
    pub fn parse(src: &str) -> CliResult<Self> {
        let cfg: Self = toml::from_str(src).map_err(|e| CliError::config(format!("malformed config: {e}")))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> CliResult<(Self, Vec<u8>)> {
        let bytes =
            std::fs::read(path).map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", path.display())))?;
        let src = std::str::from_utf8(&bytes).map_err(|_| CliError::config("config is not UTF-8"))?;
        Ok((Self::parse(src)?, bytes))
    }

    fn check(&self) -> CliResult<()> {
        if self.experiment.id.is_empty() || self.experiment.id.contains(['/', '\\']) {
            return Err(CliError::config("experiment id must be a non-empty file-name-safe string"));
        }
        let mut names: Vec<&str> = Vec::new();
        for g in &self.generators {
            g.defined_by()?;
            if names.contains(&g.name.as_str()) {
                return Err(CliError::config(format!("duplicate generator name {:?}", g.name)));
            }
            names.push(&g.name);
        }
        Ok(())
    }

    /// SHA-256 of the canonical serialization with the thread count removed.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.walk.threads = None;
        let text = toml::to_string(&c).expect("configs always serialize");
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    pub fn group(&self) -> CliResult<Arc<AngleGroup>> {
        let a = self.angles.as_ref().ok_or_else(|| CliError::config("this experiment needs an [angles] block"))?;
        Ok(AngleGroup::builder(a.m)
            .thetas(&a.thetas)
            .bases(&a.bases)
            .independence_assumed(a.independence_assumed)
            .build()?)
    }

    pub fn line_seed(&self) -> u64 {
        self.action.line_seed.unwrap_or(1)
    }

    pub fn core(&self) -> usize {
        self.action.core.unwrap_or(DEFAULT_CORE)
    }

    /// Rotation angles: the `rotation` generators, or `θ_1, …, θ_d`.
    pub fn rotation_angles(&self, group: &AngleGroup) -> CliResult<Vec<extamen::Angle>> {
        let rots: Vec<extamen::Angle> = self
            .generators
            .iter()
            .filter_map(|g| g.rotation.as_ref())
            .map(|s| group.parse_angle(s).map_err(CliError::from))
            .collect::<CliResult<_>>()?;
        if rots.is_empty() {
            Ok((0..group.rank()).map(|i| group.theta(i)).collect())
        } else {
            Ok(rots)
        }
    }

    pub fn build_action(&self) -> CliResult<BuiltAction> {
        let wrong = |g: &GeneratorDef, field: &str| {
            CliError::config(format!(
                "generator {:?} uses {field}, which does not fit action kind {:?}",
                g.name, self.action.kind
            ))
        };
        let sym = self.action.symmetrize;
        Ok(match self.action.kind {
            ActionKind::Iet => {
                let group = self.group()?;
                let mut gens = Vec::new();
                for g in &self.generators {
                    let f = match g.defined_by()? {
                        "rotation" => Iet::rotation(&group, group.parse_angle(g.rotation.as_ref().unwrap())?),
                        "iet" => Iet::parse(&group, g.iet.as_ref().unwrap())?,
                        "swap" => {
                            let [a, b, c] = g.swap.as_ref().unwrap();
                            Iet::swap_arcs(&group, group.parse_point(a)?, group.parse_point(b)?, group.parse_point(c)?)?
                        }
                        other => return Err(wrong(g, other)),
                    };
                    gens.push((g.name.clone(), f));
                }
                if gens.is_empty() {
                    return Err(CliError::config("an iet action needs at least one [[generator]]"));
                }
                let action = if sym {
                    IetAction::symmetrized(&group, gens)?
                } else {
                    let (names, gens) = gens.into_iter().unzip();
                    IetAction::new(&group, gens, names)?
                };
                BuiltAction::Iet(action)
            }
            ActionKind::Rotation => {
                let group = self.group()?;
                for g in &self.generators {
                    if g.rotation.is_none() {
                        return Err(wrong(g, g.defined_by()?));
                    }
                }
                let mut angles = self.rotation_angles(&group)?;
                if sym || self.generators.is_empty() {
                    for a in angles.clone() {
                        let n = a.neg_mod(group.m());
                        if !angles.contains(&n) {
                            angles.push(n);
                        }
                    }
                }
                BuiltAction::Rotation(RotationAction::new(&group, angles)?)
            }
            ActionKind::IntegerLine => {
                let mut steps = Vec::new();
                for g in &self.generators {
                    steps.push(g.step.ok_or_else(|| wrong(g, g.defined_by().unwrap_or("?")))?);
                }
                if steps.is_empty() {
                    steps = vec![1, -1];
                }
                if sym {
                    for s in steps.clone() {
                        if !steps.contains(&-s) {
                            steps.push(-s);
                        }
                    }
                }
                BuiltAction::Line(IntegerLine::new(steps)?)
            }
            ActionKind::FinitePerm => {
                let mut perms: Vec<Vec<usize>> = Vec::new();
                for g in &self.generators {
                    perms.push(g.perm.clone().ok_or_else(|| wrong(g, g.defined_by().unwrap_or("?")))?);
                }
                if perms.is_empty() {
                    return Err(CliError::config("a finite-perm action needs at least one [[generator]]"));
                }
                if sym {
                    for p in perms.clone() {
                        let mut q = vec![0; p.len()];
                        for (i, &j) in p.iter().enumerate() {
                            if j < q.len() {
                                q[j] = i;
                            }
                        }
                        if !perms.contains(&q) {
                            perms.push(q);
                        }
                    }
                }
                BuiltAction::Perm(FinitePermAction::new(perms)?)
            }
            ActionKind::FreeProduct | ActionKind::ColoredLine => {
                if !self.generators.is_empty() {
                    let letters: Vec<String> = self
                        .generators
                        .iter()
                        .map(|g| g.color.clone().ok_or_else(|| wrong(g, g.defined_by().unwrap_or("?"))))
                        .collect::<CliResult<_>>()?;
                    let expect: Vec<String> = Color::ALL.iter().map(|c| c.letter().to_string()).collect();
                    if letters != expect {
                        return Err(CliError::config("colored generators must be listed as b, y, r"));
                    }
                }
                if self.action.kind == ActionKind::FreeProduct {
                    BuiltAction::FreeProduct(FreeProductSelf)
                } else {
                    let radius = self.core().max(self.walk.horizon + 2);
                    BuiltAction::ColoredLine(ColoredLine::new(self.line_seed(), radius))
                }
            }
        })
    }

    pub fn measure(&self, generators: usize) -> CliResult<Measure> {
        match &self.walk.weights {
            None => Ok(Measure::uniform(generators)?),
            Some(w) => {
                if w.len() != generators {
                    return Err(CliError::config(format!(
                        "walk has {} weights but the action has {generators} generators",
                        w.len()
                    )));
                }
                let refs: Vec<&str> = w.iter().map(|s| s.as_str()).collect();
                Ok(Measure::parse(&refs)?)
            }
        }
    }
}

/// The action a config describes, ready for the walk engine.
#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum BuiltAction {
    Iet(IetAction),
    Rotation(RotationAction),
    Line(IntegerLine),
    Perm(FinitePermAction),
    FreeProduct(FreeProductSelf),
    ColoredLine(ColoredLine),
}

impl BuiltAction {
    pub fn num_generators(&self) -> usize {
        match self {
            BuiltAction::Iet(a) => a.num_generators(),
            BuiltAction::Rotation(a) => a.num_generators(),
            BuiltAction::Line(a) => a.num_generators(),
            BuiltAction::Perm(a) => a.num_generators(),
            BuiltAction::FreeProduct(_) | BuiltAction::ColoredLine(_) => 3,
        }
    }
}

pub fn parse_angle_point(group: &AngleGroup, src: Option<&str>) -> CliResult<Point> {
    Ok(group.parse_point(src.unwrap_or("x0"))?)
}

pub fn parse_int_point(src: Option<&str>) -> CliResult<i64> {
    let s = src.unwrap_or("0").trim();
    s.parse().map_err(|_| CliError::config(format!("base point {s:?} is not an integer")))
}

pub fn parse_word_point(src: Option<&str>) -> CliResult<Word> {
    Ok(Word::parse(src.unwrap_or("e"))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const Z: &str = r#"
[experiment]
id = "z"
kind = "oracle-crosscheck"

[action]
kind = "integer-line"

[walk]
horizon = 4
trajectories = 1000
seed = 3
"#;

    #[test]
    fn minimal_config() {
        let c = ExperimentConfig::parse(Z).unwrap();
        assert_eq!(c.experiment.kind, Kind::OracleCrosscheck);
        assert_eq!(c.build_action().unwrap().num_generators(), 2);
        assert_eq!(c.hash().len(), 64);
    }

    #[test]
    fn hash_ignores_threads() {
        let a = ExperimentConfig::parse(Z).unwrap();
        let mut b = a.clone();
        b.walk.threads = Some(8);
        assert_eq!(a.hash(), b.hash());
        b.walk.seed = 4;
        assert_ne!(a.hash(), b.hash());
    }

    #[test]
    fn rejects_bad_input() {
        let err = ExperimentConfig::parse("[experiment\nid=").unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("line"));
        let no_seed = Z.replace("seed = 3", "");
        assert_eq!(ExperimentConfig::parse(&no_seed).unwrap_err().exit_code(), 2);
        let two = format!("{Z}\n[[generator]]\nname = \"a\"\nstep = 1\nperm = [0]\n");
        assert!(ExperimentConfig::parse(&two).is_err());
    }

    #[test]
    fn iet_generators_resolve() {
        let src = r#"
[experiment]
id = "iet"
kind = "inverted-orbit"

[angles]
m = 4
thetas = ["sqrt(2) - 1"]

[[generator]]
name = "r"
rotation = "[1]·θ"

[[generator]]
name = "s"
swap = ["x0", "x0 + 1/4", "x0 + 1/2"]

[action]
kind = "iet"

[walk]
horizon = 10
trajectories = 100
seed = 1
"#;
        let c = ExperimentConfig::parse(src).unwrap();
        match c.build_action().unwrap() {
            BuiltAction::Iet(a) => assert_eq!(a.names(), ["r", "r^-1", "s"]),
            other => panic!("{other:?}"),
        }
    }
}
