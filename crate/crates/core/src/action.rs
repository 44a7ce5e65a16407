//! Group actions driven by the walk engine.
//!
//! An action exposes a finite generating set (indexed), a left action on points
//! and a group element type with cheap multiplication by generators.

use crate::angles::{Angle, AngleGroup, Point};
use crate::error::{config, Result};
use crate::iet::Iet;
use std::fmt::Debug;
use std::hash::Hash;
use std::sync::Arc;

pub trait Action: Send + Sync {
    type Point: Clone + Eq + Hash + Ord + Debug + Send + Sync;
    type Element: Clone + Send + Sync;

    fn num_generators(&self) -> usize;

    /// Index of the inverse of generator `s`.
    fn inverse_generator(&self, s: usize) -> usize;

    fn generator_name(&self, s: usize) -> String {
        format!("s{s}")
    }

    fn apply_generator(&self, s: usize, x: &Self::Point) -> Result<Self::Point>;

    fn identity(&self) -> Self::Element;

    /// `w ← w · s`.
    fn push_right(&self, w: &mut Self::Element, s: usize) -> Result<()>;

    /// `w ← s · w`.
    fn push_left(&self, w: &mut Self::Element, s: usize) -> Result<()>;

    fn apply(&self, w: &Self::Element, x: &Self::Point) -> Result<Self::Point>;
}

/// Actions whose points carry free Λ-coordinates relative to a base point.
pub trait Displacement: Action {
    fn rank(&self) -> usize;

    /// Free coordinates of `y - x`, if both lie in one coset.
    fn displacement(&self, x: &Self::Point, y: &Self::Point) -> Option<Vec<i64>>;
}

fn inverse_table<T: PartialEq>(items: &[T], inv: impl Fn(&T) -> T) -> Result<Vec<usize>> {
    items
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let gi = inv(g);
            items
                .iter()
                .position(|h| *h == gi)
                .ok_or_else(|| config(format!("generator {i} has no inverse in the generating set")))
        })
        .collect()
}

/// Z acting on itself by translations.
#[derive(Debug, Clone)]
pub struct IntegerLine {
    steps: Vec<i64>,
    inv: Vec<usize>,
}

impl IntegerLine {
    pub fn new(steps: Vec<i64>) -> Result<Self> {
        let inv = inverse_table(&steps, |s| -s)?;
        Ok(Self { steps, inv })
    }

    /// Generators `+1, -1`.
    pub fn simple() -> Self {
        Self::new(vec![1, -1]).unwrap()
    }
}

impl Action for IntegerLine {
    type Point = i64;
    type Element = i64;

    fn num_generators(&self) -> usize {
        self.steps.len()
    }

    fn inverse_generator(&self, s: usize) -> usize {
        self.inv[s]
    }

    fn generator_name(&self, s: usize) -> String {
        format!("{:+}", self.steps[s])
    }

    fn apply_generator(&self, s: usize, x: &i64) -> Result<i64> {
        Ok(x + self.steps[s])
    }

    fn identity(&self) -> i64 {
        0
    }

    fn push_right(&self, w: &mut i64, s: usize) -> Result<()> {
        *w += self.steps[s];
        Ok(())
    }

    fn push_left(&self, w: &mut i64, s: usize) -> Result<()> {
        *w += self.steps[s];
        Ok(())
    }

    fn apply(&self, w: &i64, x: &i64) -> Result<i64> {
        Ok(x + w)
    }
}

impl Displacement for IntegerLine {
    fn rank(&self) -> usize {
        1
    }

    fn displacement(&self, x: &i64, y: &i64) -> Option<Vec<i64>> {
        Some(vec![y - x])
    }
}

/// Λ acting on Σ + Λ by rotations. Elements are angles, so products are O(1).
#[derive(Debug, Clone)]
pub struct RotationAction {
    group: Arc<AngleGroup>,
    gens: Vec<Angle>,
    inv: Vec<usize>,
}

impl RotationAction {
    pub fn new(group: &Arc<AngleGroup>, gens: Vec<Angle>) -> Result<Self> {
        for g in &gens {
            group.validate_angle(g)?;
        }
        let m = group.m();
        let inv = inverse_table(&gens, |a| a.neg_mod(m))?;
        Ok(Self { group: group.clone(), gens, inv })
    }

    /// `±θ_1, …, ±θ_d`.
    pub fn standard(group: &Arc<AngleGroup>) -> Self {
        let m = group.m();
        let gens = (0..group.rank()).flat_map(|i| [group.theta(i), group.theta(i).neg_mod(m)]).collect();
        Self::new(group, gens).unwrap()
    }

    pub fn group(&self) -> &Arc<AngleGroup> {
        &self.group
    }
}

impl Action for RotationAction {
    type Point = Point;
    type Element = Angle;

    fn num_generators(&self) -> usize {
        self.gens.len()
    }

    fn inverse_generator(&self, s: usize) -> usize {
        self.inv[s]
    }

    fn generator_name(&self, s: usize) -> String {
        format!("rot({})", self.group.render_angle(&self.gens[s]))
    }

    #[inline]
    fn apply_generator(&self, s: usize, x: &Point) -> Result<Point> {
        Ok(x.translate(self.gens[s], self.group.m()))
    }

    fn identity(&self) -> Angle {
        Angle::ZERO
    }

    #[inline]
    fn push_right(&self, w: &mut Angle, s: usize) -> Result<()> {
        *w = w.add_mod(self.gens[s], self.group.m());
        Ok(())
    }

    fn push_left(&self, w: &mut Angle, s: usize) -> Result<()> {
        self.push_right(w, s)
    }

    #[inline]
    fn apply(&self, w: &Angle, x: &Point) -> Result<Point> {
        Ok(x.translate(*w, self.group.m()))
    }
}

impl Displacement for RotationAction {
    fn rank(&self) -> usize {
        self.group.rank()
    }

    fn displacement(&self, x: &Point, y: &Point) -> Option<Vec<i64>> {
        let d = self.group.difference(y, x)?;
        Some(d.k[..self.group.rank()].iter().map(|&v| v as i64).collect())
    }
}

/// A finitely generated group of IETs acting on points.
#[derive(Debug, Clone)]
pub struct IetAction {
    group: Arc<AngleGroup>,
    gens: Vec<Iet>,
    names: Vec<String>,
    inv: Vec<usize>,
}

impl IetAction {
    pub fn new(group: &Arc<AngleGroup>, gens: Vec<Iet>, names: Vec<String>) -> Result<Self> {
        if names.len() != gens.len() {
            return Err(config("one name per generator"));
        }
        for g in &gens {
            if !g.group().same_group(group) {
                return Err(config("generator over a different angle group"));
            }
        }
        let inv = inverse_table(&gens, |g| g.inverse())?;
        Ok(Self { group: group.clone(), gens, names, inv })
    }

    /// Adds missing inverses (named `name^-1`) so the generating set is symmetric.
    pub fn symmetrized(group: &Arc<AngleGroup>, gens: Vec<(String, Iet)>) -> Result<Self> {
        let mut all: Vec<(String, Iet)> = Vec::new();
        for (name, g) in gens {
            let gi = g.inverse();
            let has_inv = gi == g;
            all.push((name.clone(), g));
            if !has_inv {
                all.push((format!("{name}^-1"), gi));
            }
        }
        let (names, gens): (Vec<_>, Vec<_>) = all.into_iter().unzip();
        Self::new(group, gens, names)
    }

    pub fn group(&self) -> &Arc<AngleGroup> {
        &self.group
    }

    pub fn generators(&self) -> &[Iet] {
        &self.gens
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

impl Action for IetAction {
    type Point = Point;
    type Element = Iet;

    fn num_generators(&self) -> usize {
        self.gens.len()
    }

    fn inverse_generator(&self, s: usize) -> usize {
        self.inv[s]
    }

    fn generator_name(&self, s: usize) -> String {
        self.names[s].clone()
    }

    #[inline]
    fn apply_generator(&self, s: usize, x: &Point) -> Result<Point> {
        self.gens[s].evaluate(x)
    }

    fn identity(&self) -> Iet {
        Iet::identity(&self.group)
    }

    fn push_right(&self, w: &mut Iet, s: usize) -> Result<()> {
        *w = w.compose(&self.gens[s])?;
        Ok(())
    }

    fn push_left(&self, w: &mut Iet, s: usize) -> Result<()> {
        *w = self.gens[s].compose(w)?;
        Ok(())
    }

    fn apply(&self, w: &Iet, x: &Point) -> Result<Point> {
        w.evaluate(x)
    }
}

impl Displacement for IetAction {
    fn rank(&self) -> usize {
        self.group.rank()
    }

    fn displacement(&self, x: &Point, y: &Point) -> Option<Vec<i64>> {
        let d = self.group.difference(y, x)?;
        Some(d.k[..self.group.rank()].iter().map(|&v| v as i64).collect())
    }
}

/// Permutations of `{0, …, n-1}`; a one-point set gives the trivial action.
#[derive(Debug, Clone)]
pub struct FinitePermAction {
    perms: Vec<Vec<usize>>,
    inv: Vec<usize>,
}

impl FinitePermAction {
    pub fn new(perms: Vec<Vec<usize>>) -> Result<Self> {
        let n = perms.first().map_or(0, |p| p.len());
        for p in &perms {
            let mut seen = vec![false; n];
            if p.len() != n || p.iter().any(|&i| i >= n || std::mem::replace(&mut seen[i], true)) {
                return Err(config("generators must be permutations of one finite set"));
            }
        }
        let inv = inverse_table(&perms, |p| {
            let mut q = vec![0; p.len()];
            for (i, &j) in p.iter().enumerate() {
                q[j] = i;
            }
            q
        })?;
        Ok(Self { perms, inv })
    }

    /// One point, fixed by `k` generators.
    pub fn single_point(k: usize) -> Self {
        Self::new(vec![vec![0]; k]).unwrap()
    }

    /// The cycle Z/n with generators ±1.
    pub fn cycle(n: usize) -> Self {
        let plus = (0..n).map(|i| (i + 1) % n).collect();
        let minus = (0..n).map(|i| (i + n - 1) % n).collect();
        Self::new(vec![plus, minus]).unwrap()
    }

    pub fn size(&self) -> usize {
        self.perms.first().map_or(0, |p| p.len())
    }
}

impl Action for FinitePermAction {
    type Point = usize;
    type Element = Vec<usize>;

    fn num_generators(&self) -> usize {
        self.perms.len()
    }

    fn inverse_generator(&self, s: usize) -> usize {
        self.inv[s]
    }

    fn apply_generator(&self, s: usize, x: &usize) -> Result<usize> {
        Ok(self.perms[s][*x])
    }

    fn identity(&self) -> Vec<usize> {
        (0..self.size()).collect()
    }

    fn push_right(&self, w: &mut Vec<usize>, s: usize) -> Result<()> {
        let p = &self.perms[s];
        *w = p.iter().map(|&j| w[j]).collect();
        Ok(())
    }

    fn push_left(&self, w: &mut Vec<usize>, s: usize) -> Result<()> {
        let p = &self.perms[s];
        for v in w.iter_mut() {
            *v = p[*v];
        }
        Ok(())
    }

    fn apply(&self, w: &Vec<usize>, x: &usize) -> Result<usize> {
        Ok(w[*x])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_left_action<A: Action>(a: &A, x: &A::Point, word: &[usize]) {
        // apply(w, x) for w = s_1 ⋯ s_k built on the right equals s_1(s_2(⋯ s_k(x)))
        let mut w = a.identity();
        let mut v = a.identity();
        for &s in word {
            a.push_right(&mut w, s).unwrap();
        }
        for &s in word.iter().rev() {
            a.push_left(&mut v, s).unwrap();
        }
        let mut y = x.clone();
        for &s in word.iter().rev() {
            y = a.apply_generator(s, &y).unwrap();
        }
        assert_eq!(a.apply(&w, x).unwrap(), y);
        assert_eq!(a.apply(&v, x).unwrap(), y);
    }

    #[test]
    fn element_conventions_agree() {
        let g = AngleGroup::builder(4).theta("sqrt(2) - 1").build().unwrap();
        let swap = Iet::swap_arcs(
            &g,
            Point::new(0, g.torsion_angle(0)),
            Point::new(0, g.torsion_angle(1)),
            Point::new(0, g.torsion_angle(2)),
        )
        .unwrap();
        let rot = Iet::rotation(&g, g.theta(0));
        let iets = IetAction::symmetrized(&g, vec![("r".into(), rot), ("s".into(), swap)]).unwrap();
        assert_eq!(iets.num_generators(), 3);
        let x = Point::new(0, Angle::new(1, &[1]));
        check_left_action(&iets, &x, &[0, 2, 1, 2, 0, 0, 2]);
        let perms = FinitePermAction::new(vec![vec![1, 2, 0], vec![2, 0, 1], vec![1, 0, 2]]).unwrap();
        check_left_action(&perms, &0, &[0, 2, 2, 1, 2]);
        let rots = RotationAction::standard(&g);
        check_left_action(&rots, &x, &[0, 1, 1, 0, 0]);
        check_left_action(&IntegerLine::simple(), &3, &[0, 0, 1]);
    }

    #[test]
    fn missing_inverse_is_rejected() {
        assert!(IntegerLine::new(vec![1, 2, -1]).is_err());
        assert!(FinitePermAction::new(vec![vec![1, 2, 0]]).is_err());
        assert!(FinitePermAction::new(vec![vec![0, 0]]).is_err());
    }
}
