//! Schreier graphs of finitely generated actions, their Λ-coordinate embedding,
//! and the complexity of the point-doubling subshift.

use crate::action::Action;
use crate::angles::{Angle, AngleGroup, Point};
use crate::error::{config, invariant, Result};
use crate::iet::sort_points;
use crate::stats::{fit_power_law, PowerFit};
use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub struct SchreierBall<P> {
    /// BFS order from the base point.
    pub vertices: Vec<P>,
    pub distance: Vec<usize>,
    /// `(from, generator, to)` for every generator edge between ball vertices.
    pub edges: Vec<(usize, usize, usize)>,
    pub radius: usize,
}

pub fn schreier_ball<A: Action>(action: &A, x0: &A::Point, radius: usize) -> Result<SchreierBall<A::Point>> {
    for s in 0..action.num_generators() {
        if action.inverse_generator(action.inverse_generator(s)) != s {
            return Err(config("generating set is not closed under inverses"));
        }
    }
    let mut index: FxHashMap<A::Point, usize> = FxHashMap::default();
    let mut vertices = vec![x0.clone()];
    let mut distance = vec![0];
    index.insert(x0.clone(), 0);
    let mut queue = VecDeque::from([0usize]);
    let mut edges = Vec::new();
    let mut pending: Vec<(usize, usize, A::Point)> = Vec::new();
    while let Some(u) = queue.pop_front() {
        for s in 0..action.num_generators() {
            let y = action.apply_generator(s, &vertices[u])?;
            if let Some(&v) = index.get(&y) {
                edges.push((u, s, v));
            } else if distance[u] < radius {
                let v = vertices.len();
                index.insert(y.clone(), v);
                vertices.push(y);
                distance.push(distance[u] + 1);
                queue.push_back(v);
                edges.push((u, s, v));
            } else {
                pending.push((u, s, y));
            }
        }
    }
    // targets discovered after their source was expanded
    for (u, s, y) in pending {
        if let Some(&v) = index.get(&y) {
            edges.push((u, s, v));
        }
    }
    edges.sort_unstable();
    edges.dedup();
    Ok(SchreierBall { vertices, distance, edges, radius })
}

impl<P> SchreierBall<P> {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Graphviz DOT with vertex labels from `label` and edge labels from `gen_name`.
    pub fn to_dot(&self, label: impl Fn(&P) -> String, gen_name: impl Fn(usize) -> String) -> String {
        let mut out = String::from("digraph schreier {\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let _ = writeln!(out, "  v{i} [label=\"{}\"];", label(v).replace('"', "'"));
        }
        for &(u, s, v) in &self.edges {
            let _ = writeln!(out, "  v{u} -> v{v} [label=\"{}\"];", gen_name(s));
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LambdaEmbedding {
    /// `y - x0` for each vertex, in vertex order.
    pub coordinates: Vec<Angle>,
    /// Largest ℓ¹ change of free coordinates along an edge.
    pub lipschitz: u64,
}

pub fn lambda_embedding(group: &AngleGroup, ball: &SchreierBall<Point>, x0: &Point) -> Result<LambdaEmbedding> {
    let coordinates = ball
        .vertices
        .iter()
        .map(|y| {
            group
                .difference(y, x0)
                .ok_or_else(|| invariant(format!("vertex {} is outside x0 + Λ", group.render_point(y))))
        })
        .collect::<Result<Vec<_>>>()?;
    let distinct: FxHashSet<&Angle> = coordinates.iter().collect();
    if distinct.len() != coordinates.len() {
        return Err(invariant("Λ-coordinates of the ball are not injective"));
    }
    let m = group.m();
    let lipschitz =
        ball.edges.iter().map(|&(u, _, v)| coordinates[v].sub_mod(coordinates[u], m).free_norm()).max().unwrap_or(0);
    Ok(LambdaEmbedding { coordinates, lipschitz })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    Minus,
    Plus,
}

/// A point of the doubled circle; `x-` sits immediately before `x+`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DoubledPoint {
    pub point: Point,
    pub side: Side,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cutpoints {
    /// Cut points in circular order.
    pub points: Vec<Point>,
    /// Atoms `[c_i+, c_{i+1}-]` of the join partition.
    pub atoms: Vec<(DoubledPoint, DoubledPoint)>,
}

fn up_to_sign(generators: &[Angle], m: u32) -> Vec<Angle> {
    let mut out: Vec<Angle> = Vec::new();
    for g in generators {
        if !g.is_zero() && !out.contains(g) && !out.contains(&g.neg_mod(m)) {
            out.push(*g);
        }
    }
    out
}

/// `{x, x + λ : x ∈ Σ, λ ∈ S}`, with `S` taken up to sign.
pub fn subshift_cutpoints(group: &AngleGroup, generators: &[Angle]) -> Result<Cutpoints> {
    if group.rank() == 0 {
        return Err(config("the point-doubling subshift needs an infinite angle group (rank >= 1)"));
    }
    if group.num_bases() == 0 {
        return Err(config("no base points to cut at"));
    }
    for g in generators {
        group.validate_angle(g)?;
    }
    let m = group.m();
    let gens = up_to_sign(generators, m);
    let mut set: FxHashSet<Point> = FxHashSet::default();
    let mut points = Vec::new();
    for b in 0..group.num_bases() as u32 {
        let x = group.base_point(b);
        for p in std::iter::once(x).chain(gens.iter().map(|g| x.translate(*g, m))) {
            if set.insert(p) {
                points.push(p);
            }
        }
    }
    sort_points(group, &mut points)?;
    let r = points.len();
    let atoms = (0..r)
        .map(|i| {
            (
                DoubledPoint { point: points[i], side: Side::Plus },
                DoubledPoint { point: points[(i + 1) % r], side: Side::Minus },
            )
        })
        .collect();
    Ok(Cutpoints { points, atoms })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityProfile {
    pub rank: usize,
    /// `rho[n]` for `n = 0..=n_max`.
    pub rho: Vec<u64>,
    pub fit_range: (usize, usize),
    pub fit: Option<PowerFit>,
    /// `max_{n >= 1} rho(n) / n^d`.
    pub empirical_constant: f64,
    /// `rho(n) <= rho(1) n^d` for every computed `n >= 1`.
    pub bound_holds: bool,
}

impl ComplexityProfile {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,rho\n");
        for (n, r) in self.rho.iter().enumerate() {
            let _ = writeln!(out, "{n},{r}");
        }
        out
    }
}

/// `rho(n) = |{c + γ : c a cut point, |γ|_S <= n}|`, with the word metric of
/// `S ∪ -S` explored breadth-first in Λ. The exponent is fitted over
/// `fit_range`, by default the top half `[n_max/2, n_max]`.
pub fn complexity_profile(
    group: &AngleGroup,
    generators: &[Angle],
    n_max: usize,
    fit_range: Option<(usize, usize)>,
) -> Result<ComplexityProfile> {
    let cuts = subshift_cutpoints(group, generators)?;
    let m = group.m();
    let mut steps: Vec<Angle> = Vec::new();
    for g in generators {
        for s in [*g, g.neg_mod(m)] {
            if !s.is_zero() && !steps.contains(&s) {
                steps.push(s);
            }
        }
    }
    let mut seen_angles: FxHashSet<Angle> = FxHashSet::from_iter([Angle::ZERO]);
    let mut layer = vec![Angle::ZERO];
    let mut points: FxHashSet<Point> = cuts.points.iter().copied().collect();
    let mut rho = vec![points.len() as u64];
    for _ in 1..=n_max {
        let mut next = Vec::new();
        for a in &layer {
            for s in &steps {
                let b = a.add_mod(*s, m);
                if seen_angles.insert(b) {
                    next.push(b);
                }
            }
        }
        for g in &next {
            for c in &cuts.points {
                points.insert(c.translate(*g, m));
            }
        }
        rho.push(points.len() as u64);
        layer = next;
    }
    let d = group.rank();
    let (lo, hi) = fit_range.unwrap_or((n_max / 2, n_max));
    if lo < 1 || hi > n_max || lo > hi {
        return Err(config(format!("fit range [{lo}, {hi}] outside [1, {n_max}]")));
    }
    let pts: Vec<(f64, f64)> = (lo..=hi).map(|n| (n as f64, rho[n] as f64)).collect();
    let fit = fit_power_law(&pts);
    let nd = |n: usize| (n as f64).powi(d as i32);
    let empirical_constant = (1..=n_max).map(|n| rho[n] as f64 / nd(n)).fold(0.0, f64::max);
    let bound_holds = n_max == 0 || (1..=n_max).all(|n| rho[n] as f64 <= rho[1] as f64 * nd(n));
    Ok(ComplexityProfile { rank: d, rho, fit_range: (lo, hi), fit, empirical_constant, bound_holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::{IetAction, RotationAction};
    use crate::iet::Iet;

    fn group(d: usize) -> std::sync::Arc<AngleGroup> {
        let thetas = ["sqrt(2) - 1", "sqrt(3) - 1", "sqrt(5) - 2"];
        AngleGroup::builder(4).thetas(&thetas[..d]).build().unwrap()
    }

    #[test]
    fn line_and_lattice_balls() {
        let g = group(1);
        let b = schreier_ball(&RotationAction::standard(&g), &g.base_point(0), 3).unwrap();
        assert_eq!(b.len(), 7);
        let g2 = group(2);
        for n in 0..6 {
            let b = schreier_ball(&RotationAction::standard(&g2), &g2.base_point(0), n).unwrap();
            assert_eq!(b.len(), 2 * n * n + 2 * n + 1);
        }
    }

    #[test]
    fn identity_generator_ball() {
        let g = group(1);
        let a = IetAction::new(&g, vec![Iet::identity(&g)], vec!["e".into()]).unwrap();
        let b = schreier_ball(&a, &g.base_point(0), 4).unwrap();
        assert_eq!(b.len(), 1);
    }

    #[test]
    fn edges_are_symmetric() {
        let g = group(1);
        let p = |k| Point::new(0, g.torsion_angle(k));
        let swap = Iet::swap_arcs(&g, p(0), p(1), p(2)).unwrap();
        let a =
            IetAction::symmetrized(&g, vec![("r".into(), Iet::rotation(&g, g.theta(0))), ("s".into(), swap)]).unwrap();
        let b = schreier_ball(&a, &p(0), 5).unwrap();
        for &(u, s, v) in &b.edges {
            assert!(b.edges.contains(&(v, a.inverse_generator(s), u)));
        }
        let emb = lambda_embedding(&g, &b, &p(0)).unwrap();
        assert_eq!(emb.coordinates[0], Angle::ZERO);
        assert_eq!(emb.lipschitz, 1);
    }

    #[test]
    fn cutpoint_counts() {
        let g = group(1);
        let c = subshift_cutpoints(&g, &[g.theta(0)]).unwrap();
        assert_eq!(c.points.len(), 2);
        assert_eq!(c.atoms.len(), 2);
        let g2 = AngleGroup::builder(4).theta("sqrt(2) - 1").bases(&["0", "sqrt(7) - 2"]).build().unwrap();
        let c2 = subshift_cutpoints(&g2, &[g2.theta(0)]).unwrap();
        assert_eq!(c2.points.len(), 4);
        assert!(subshift_cutpoints(&AngleGroup::torsion(4).unwrap(), &[]).is_err());
    }

    #[test]
    fn rank_one_profile_is_affine() {
        let g = group(1);
        let th = g.theta(0);
        let prof = complexity_profile(&g, &[th, th.neg_mod(4)], 20, None).unwrap();
        for (n, r) in prof.rho.iter().enumerate() {
            assert_eq!(*r, 2 * n as u64 + 2);
        }
        assert!(prof.bound_holds);
    }
}
