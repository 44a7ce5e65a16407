//! Right-continuous interval exchanges of the circle over (Λ, Σ), their
//! left-continuous companions, the permutation cocycle τ_g = g̃ g⁻¹, and
//! finitely supported permutations of points.

use crate::angles::{Angle, AngleGroup, Point};
use crate::error::{config, invariant, Error, Result};
use num_bigint::BigInt;
use num_traits::Zero;
use rand::Rng;
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

/// Sorts points in circle order, surfacing comparison failures.
pub fn sort_points(group: &AngleGroup, points: &mut [Point]) -> Result<()> {
    let mut err = None;
    points.sort_by(|a, b| match group.compare(a, b) {
        Ok(o) => o,
        Err(e) => {
            err.get_or_insert(e);
            a.cmp(b)
        }
    });
    err.map_or(Ok(()), Err)
}

/// A right-continuous piecewise rotation of R/Z, kept in canonical form.
///
/// Arc `i` is `[breaks[i], breaks[i+1])`, the last arc wraps through 0. A rotation
/// has no breakpoints and a single translation.
#[derive(Clone)]
pub struct Iet {
    group: Arc<AngleGroup>,
    breaks: Vec<Point>,
    trans: Vec<Angle>,
}

impl PartialEq for Iet {
    fn eq(&self, other: &Self) -> bool {
        self.group.same_group(&other.group) && self.breaks == other.breaks && self.trans == other.trans
    }
}

impl Eq for Iet {}

impl std::hash::Hash for Iet {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.breaks.hash(state);
        self.trans.hash(state);
    }
}

impl fmt::Debug for Iet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Iet[{}]", self.to_text().trim_end().replace('\n', "; "))
    }
}

impl Iet {
    pub fn identity(group: &Arc<AngleGroup>) -> Self {
        Self::rotation(group, Angle::ZERO)
    }

    pub fn rotation(group: &Arc<AngleGroup>, angle: Angle) -> Self {
        Self { group: group.clone(), breaks: Vec::new(), trans: vec![angle] }
    }

    /// Builds an IET from `(breakpoint, translation of the arc starting there)`
    /// pairs in any order; checks that the image arcs tile the circle.
    pub fn from_arcs(group: &Arc<AngleGroup>, arcs: Vec<(Point, Angle)>) -> Result<Self> {
        if arcs.is_empty() {
            return Err(config("an IET needs at least one arc"));
        }
        for (p, a) in &arcs {
            group.validate_point(p)?;
            group.validate_angle(a)?;
        }
        let mut pts: Vec<Point> = arcs.iter().map(|a| a.0).collect();
        sort_points(group, &mut pts)?;
        if pts.windows(2).any(|w| w[0] == w[1]) {
            return Err(config("duplicate breakpoint"));
        }
        let lookup: BTreeMap<Point, Angle> = arcs.into_iter().collect();
        let trans: Vec<Angle> = pts.iter().map(|p| lookup[p]).collect();
        let raw = Self { group: group.clone(), breaks: pts, trans };
        raw.check_bijective()?;
        Ok(raw.canonicalize())
    }

    /// Exchanges the adjacent arcs `[a, b)` and `[b, c)`; the three points must share
    /// a coset and follow each other counterclockwise.
    pub fn swap_arcs(group: &Arc<AngleGroup>, a: Point, b: Point, c: Point) -> Result<Self> {
        let m = group.m();
        let ab = group.difference(&b, &a).ok_or_else(|| config("swap points must share a base"))?;
        let bc = group.difference(&c, &b).ok_or_else(|| config("swap points must share a base"))?;
        if a == b || b == c || a == c {
            return Err(config("swap points must be distinct"));
        }
        Self::from_arcs(group, vec![(a, bc), (b, ab.neg_mod(m)), (c, Angle::ZERO)])
    }

    pub fn group(&self) -> &Arc<AngleGroup> {
        &self.group
    }

    pub fn breakpoints(&self) -> &[Point] {
        &self.breaks
    }

    pub fn translations(&self) -> &[Angle] {
        &self.trans
    }

    pub fn num_arcs(&self) -> usize {
        self.trans.len()
    }

    pub fn is_rotation(&self) -> bool {
        self.breaks.is_empty()
    }

    fn check_group(&self, other: &Iet) -> Result<()> {
        if self.group.same_group(&other.group) {
            Ok(())
        } else {
            Err(config("IETs over different angle groups"))
        }
    }

    fn check_bijective(&self) -> Result<()> {
        let r = self.breaks.len();
        if r <= 1 {
            return Ok(());
        }
        let m = self.group.m();
        let mut images: Vec<(Point, Point)> = (0..r)
            .map(|i| (self.breaks[i].translate(self.trans[i], m), self.breaks[(i + 1) % r].translate(self.trans[i], m)))
            .collect();
        let mut starts: Vec<Point> = images.iter().map(|x| x.0).collect();
        sort_points(&self.group, &mut starts)?;
        if starts.windows(2).any(|w| w[0] == w[1]) {
            return Err(config("image arcs overlap"));
        }
        let order: BTreeMap<Point, usize> = starts.iter().enumerate().map(|(i, p)| (*p, i)).collect();
        images.sort_by_key(|im| order[&im.0]);
        for i in 0..r {
            if images[i].1 != images[(i + 1) % r].0 {
                return Err(config(format!(
                    "image arcs do not tile the circle near {}",
                    self.group.render_point(&images[i].1)
                )));
            }
        }
        Ok(())
    }

    fn canonicalize(self) -> Self {
        let r = self.breaks.len();
        if r == 0 {
            return self;
        }
        let keep: Vec<usize> = (0..r).filter(|&i| self.trans[(i + r - 1) % r] != self.trans[i]).collect();
        if keep.is_empty() {
            return Self { group: self.group, breaks: Vec::new(), trans: vec![self.trans[0]] };
        }
        Self {
            breaks: keep.iter().map(|&i| self.breaks[i]).collect(),
            trans: keep.iter().map(|&i| self.trans[i]).collect(),
            group: self.group,
        }
    }

    /// Index of the arc containing `x`.
    pub fn arc_index(&self, x: &Point) -> Result<usize> {
        if self.breaks.is_empty() {
            return Ok(0);
        }
        // largest i with breaks[i] <= x, or the wrapping arc
        let (mut lo, mut hi) = (0usize, self.breaks.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.group.compare(&self.breaks[mid], x)? {
                Ordering::Greater => hi = mid,
                _ => lo = mid + 1,
            }
        }
        Ok(if lo == 0 { self.breaks.len() - 1 } else { lo - 1 })
    }

    pub fn translation_at(&self, x: &Point) -> Result<Angle> {
        Ok(self.trans[self.arc_index(x)?])
    }

    pub fn evaluate(&self, x: &Point) -> Result<Point> {
        self.group.validate_point(x)?;
        Ok(x.translate(self.translation_at(x)?, self.group.m()))
    }

    /// The left-continuous companion g̃.
    pub fn evaluate_left(&self, x: &Point) -> Result<Point> {
        self.group.validate_point(x)?;
        let i = self.arc_index(x)?;
        let t = if !self.breaks.is_empty() && self.breaks[i] == *x {
            self.trans[(i + self.breaks.len() - 1) % self.breaks.len()]
        } else {
            self.trans[i]
        };
        Ok(x.translate(t, self.group.m()))
    }

    pub fn inverse(&self) -> Iet {
        let m = self.group.m();
        if self.is_rotation() {
            return Self::rotation(&self.group, self.trans[0].neg_mod(m));
        }
        let mut arcs: Vec<(Point, Angle)> =
            self.breaks.iter().zip(&self.trans).map(|(b, t)| (b.translate(*t, m), t.neg_mod(m))).collect();
        let mut pts: Vec<Point> = arcs.iter().map(|a| a.0).collect();
        sort_points(&self.group, &mut pts).expect("image breakpoints were already ordered once");
        let lookup: BTreeMap<Point, Angle> = arcs.drain(..).collect();
        let trans = pts.iter().map(|p| lookup[p]).collect();
        Self { group: self.group.clone(), breaks: pts, trans }.canonicalize()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Iet) -> Result<Iet> {
        self.check_group(other)?;
        let m = self.group.m();
        if self.is_rotation() && other.is_rotation() {
            return Ok(Self::rotation(&self.group, self.trans[0].add_mod(other.trans[0], m)));
        }
        let other_inv = other.inverse();
        let mut cuts: BTreeSet<Point> = other.breaks.iter().copied().collect();
        for b in &self.breaks {
            cuts.insert(other_inv.evaluate(b)?);
        }
        let mut pts: Vec<Point> = cuts.into_iter().collect();
        sort_points(&self.group, &mut pts)?;
        let mut trans = Vec::with_capacity(pts.len());
        for p in &pts {
            let t1 = other.translation_at(p)?;
            let t2 = self.translation_at(&p.translate(t1, m))?;
            trans.push(t1.add_mod(t2, m));
        }
        Ok(Self { group: self.group.clone(), breaks: pts, trans }.canonicalize())
    }

    pub fn power(&self, n: i64) -> Result<Iet> {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut acc = Self::identity(&self.group);
        for _ in 0..n.unsigned_abs() {
            acc = acc.compose(&base)?;
        }
        Ok(acc)
    }

    /// τ_g = g̃ ∘ g⁻¹, with its support checked against the breakpoints of g⁻¹
    /// and triviality checked at probe points next to every candidate.
    pub fn cocycle(&self) -> Result<FinSuppPerm> {
        if self.is_rotation() {
            return Ok(FinSuppPerm::identity());
        }
        let inv = self.inverse();
        let m = self.group.m();
        let tau = |y: &Point| -> Result<Point> { self.evaluate_left(&inv.evaluate(y)?) };
        let mut candidates: BTreeSet<Point> = inv.breaks.iter().copied().collect();
        candidates.extend(self.breaks.iter().copied());
        let mut map = BTreeMap::new();
        for y in &candidates {
            let z = tau(y)?;
            if z != *y {
                map.insert(*y, z);
            }
        }
        let support: BTreeSet<Point> = map.keys().copied().collect();
        let expected: BTreeSet<Point> = inv.breaks.iter().copied().collect();
        if support != expected {
            return Err(invariant("cocycle support differs from the discontinuities of the inverse"));
        }
        let mut steps: Vec<Angle> = (0..self.group.rank()).map(|i| self.group.theta(i)).collect();
        if m > 1 {
            steps.push(self.group.torsion_angle(1));
        }
        for c in &candidates {
            for s in &steps {
                for probe in [c.translate(*s, m), c.translate(s.neg_mod(m), m)] {
                    if !candidates.contains(&probe) && tau(&probe)? != probe {
                        return Err(invariant(format!(
                            "cocycle moves the non-candidate point {}",
                            self.group.render_point(&probe)
                        )));
                    }
                }
            }
        }
        FinSuppPerm::from_map(map)
    }

    pub fn to_text(&self) -> String {
        if self.is_rotation() {
            return format!("rotation {}\n", self.group.render_angle(&self.trans[0]));
        }
        let mut out = String::new();
        for (b, t) in self.breaks.iter().zip(&self.trans) {
            out.push_str(&format!("{} | {}\n", self.group.render_point(b), self.group.render_angle(t)));
        }
        out
    }

    /// Parses [`Iet::to_text`] output; `;` may separate arcs on one line.
    pub fn parse(group: &Arc<AngleGroup>, src: &str) -> Result<Iet> {
        let lines: Vec<&str> =
            src.split(['\n', ';']).map(|l| l.split('#').next().unwrap().trim()).filter(|l| !l.is_empty()).collect();
        if lines.len() == 1 {
            if let Some(rest) = lines[0].strip_prefix("rotation") {
                return Ok(Self::rotation(group, group.parse_angle(rest)?));
            }
        }
        let mut arcs = Vec::new();
        for l in lines {
            let (p, a) =
                l.split_once('|').ok_or_else(|| Error::Parse(format!("expected '<point> | <angle>', got {l:?}")))?;
            arcs.push((group.parse_point(p)?, group.parse_angle(a)?));
        }
        Self::from_arcs(group, arcs).map_err(|e| match e {
            Error::Config(s) => Error::Parse(s),
            other => other,
        })
    }

    /// Random product of `factors` rotations and arc swaps, with breakpoints drawn
    /// from all cosets and free coordinates bounded by `coord_bound`.
    pub fn random<R: Rng + ?Sized>(
        group: &Arc<AngleGroup>,
        rng: &mut R,
        factors: usize,
        coord_bound: i32,
    ) -> Result<Iet> {
        let mut g = Self::identity(group);
        for _ in 0..factors {
            let f = if rng.gen_bool(0.3) {
                Self::rotation(group, random_angle(group, rng, coord_bound))
            } else {
                let base = rng.gen_range(0..group.num_bases().max(1)) as u32;
                let mut pts: Vec<Point> = Vec::new();
                while pts.len() < 3 {
                    let p = Point::new(base, random_angle(group, rng, coord_bound));
                    if !pts.contains(&p) {
                        pts.push(p);
                    }
                }
                sort_points(group, &mut pts)?;
                Self::swap_arcs(group, pts[0], pts[1], pts[2])?
            };
            g = f.compose(&g)?;
        }
        Ok(g)
    }
}

pub fn random_angle<R: Rng + ?Sized>(group: &AngleGroup, rng: &mut R, coord_bound: i32) -> Angle {
    let mut a = group.torsion_angle(rng.gen_range(0..group.m() as i64));
    for i in 0..group.rank() {
        a.k[i] = rng.gen_range(-coord_bound..=coord_bound);
    }
    a
}

/// A permutation of points moving finitely many of them.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct FinSuppPerm {
    map: BTreeMap<Point, Point>,
}

impl fmt::Debug for FinSuppPerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.map.iter()).finish()
    }
}

impl FinSuppPerm {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn from_map(mut map: BTreeMap<Point, Point>) -> Result<Self> {
        map.retain(|k, v| k != v);
        let domain: BTreeSet<&Point> = map.keys().collect();
        let range: BTreeSet<&Point> = map.values().collect();
        if range.len() != map.len() || domain != range {
            return Err(invariant("stored pairs do not form a permutation of their support"));
        }
        Ok(Self { map })
    }

    pub fn from_cycle(cycle: &[Point]) -> Result<Self> {
        let n = cycle.len();
        Self::from_map((0..n).map(|i| (cycle[i], cycle[(i + 1) % n])).collect())
    }

    pub fn apply(&self, x: &Point) -> Point {
        *self.map.get(x).unwrap_or(x)
    }

    pub fn is_identity(&self) -> bool {
        self.map.is_empty()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&Point, &Point)> {
        self.map.iter()
    }

    pub fn contains(&self, x: &Point) -> bool {
        self.map.contains_key(x)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &FinSuppPerm) -> FinSuppPerm {
        let mut map = BTreeMap::new();
        for x in self.map.keys().chain(other.map.keys()) {
            let y = self.apply(&other.apply(x));
            if y != *x {
                map.insert(*x, y);
            }
        }
        Self { map }
    }

    pub fn inverse(&self) -> FinSuppPerm {
        Self { map: self.map.iter().map(|(k, v)| (*v, *k)).collect() }
    }

    /// `g σ g⁻¹`.
    pub fn conjugate(&self, g: &Iet) -> Result<FinSuppPerm> {
        let mut map = BTreeMap::new();
        for (x, y) in &self.map {
            map.insert(g.evaluate(x)?, g.evaluate(y)?);
        }
        Ok(Self { map })
    }

    pub fn render(&self, group: &AngleGroup) -> String {
        let parts: Vec<String> =
            self.map.iter().map(|(k, v)| format!("{} -> {}", group.render_point(k), group.render_point(v))).collect();
        format!("{{{}}}", parts.join(", "))
    }
}

/// Elements with a finite support in the sense of the functor formalism:
/// lit lamps for configurations, moved points for permutations.
pub trait FinitelySupported {
    fn support(&self) -> BTreeSet<Point>;
}

impl FinitelySupported for FinSuppPerm {
    fn support(&self) -> BTreeSet<Point> {
        self.map.keys().copied().collect()
    }
}

pub fn support_map<T: FinitelySupported + ?Sized>(c: &T) -> BTreeSet<Point> {
    c.support()
}

/// `(τ, g)` in Sym(R/Z) ⋊ IET, acting by `x ↦ τ(g x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemidirectElement {
    pub perm: FinSuppPerm,
    pub iet: Iet,
}

impl SemidirectElement {
    pub fn identity(group: &Arc<AngleGroup>) -> Self {
        Self { perm: FinSuppPerm::identity(), iet: Iet::identity(group) }
    }

    /// ι(g) = (τ_g, g).
    pub fn embed(g: &Iet) -> Result<Self> {
        Ok(Self { perm: g.cocycle()?, iet: g.clone() })
    }

    pub fn multiply(&self, other: &SemidirectElement) -> Result<Self> {
        Ok(Self { perm: self.perm.compose(&other.perm.conjugate(&self.iet)?), iet: self.iet.compose(&other.iet)? })
    }

    pub fn apply(&self, x: &Point) -> Result<Point> {
        Ok(self.perm.apply(&self.iet.evaluate(x)?))
    }
}

/// Rank over Q of an integer matrix, by fraction-free elimination.
pub fn integer_rank(rows: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let cols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    let mut prev = BigInt::from(1);
    for c in 0..cols {
        let Some(pivot) = (rank..a.len()).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(rank, pivot);
        for r in rank + 1..a.len() {
            for j in c + 1..cols {
                let v = (&a[rank][c] * &a[r][j] - &a[r][c] * &a[rank][j]) / &prev;
                a[r][j] = v;
            }
            a[r][c] = BigInt::zero();
        }
        prev = a[rank][c].clone();
        rank += 1;
    }
    rank
}

/// Rational rank of the group of angles generated by the translations of `gens`.
pub fn rational_rank(gens: &[Iet]) -> Result<usize> {
    let first = gens.first().ok_or_else(|| config("rational_rank needs at least one generator"))?;
    let d = first.group.rank();
    let mut rows = Vec::new();
    for g in gens {
        first.check_group(g)?;
        for t in &g.trans {
            rows.push(t.k[..d].iter().map(|&x| x as i64).collect());
        }
    }
    Ok(integer_rank(&rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn quarter_group() -> Arc<AngleGroup> {
        AngleGroup::torsion(4).unwrap()
    }

    fn pt(g: &AngleGroup, p: i64) -> Point {
        Point::new(0, g.torsion_angle(p))
    }

    /// [0,1/4) ↦ +1/4, [1/4,1/2) ↦ -1/4, [1/2,1) fixed.
    fn swap(g: &Arc<AngleGroup>) -> Iet {
        Iet::swap_arcs(g, pt(g, 0), pt(g, 1), pt(g, 2)).unwrap()
    }

    #[test]
    fn swap_evaluates_piecewise() {
        let g = AngleGroup::torsion(8).unwrap();
        let s = Iet::from_arcs(
            &g,
            vec![(pt(&g, 0), g.torsion_angle(2)), (pt(&g, 2), g.torsion_angle(-2)), (pt(&g, 4), Angle::ZERO)],
        )
        .unwrap();
        assert_eq!(s.evaluate(&pt(&g, 1)).unwrap(), pt(&g, 3));
        assert_eq!(s.evaluate(&pt(&g, 3)).unwrap(), pt(&g, 1));
        assert_eq!(s.evaluate(&pt(&g, 6)).unwrap(), pt(&g, 6));
    }

    #[test]
    fn swap_is_an_involution() {
        let g = quarter_group();
        let s = swap(&g);
        assert_eq!(s.compose(&s).unwrap(), Iet::identity(&g));
        assert_eq!(s.inverse(), s);
    }

    #[test]
    fn left_companion_at_breakpoint() {
        let g = quarter_group();
        let s = swap(&g);
        assert_eq!(s.evaluate(&pt(&g, 1)).unwrap(), pt(&g, 0));
        assert_eq!(s.evaluate_left(&pt(&g, 1)).unwrap(), pt(&g, 2));
    }

    #[test]
    fn cocycle_of_swap_is_three_cycle() {
        let g = quarter_group();
        let tau = swap(&g).cocycle().unwrap();
        let expect = FinSuppPerm::from_cycle(&[pt(&g, 0), pt(&g, 2), pt(&g, 1)]).unwrap();
        assert_eq!(tau, expect);
        let support: Vec<Point> = support_map(&tau).into_iter().collect();
        assert_eq!(support, vec![pt(&g, 0), pt(&g, 1), pt(&g, 2)]);
    }

    #[test]
    fn rotations_have_trivial_cocycle() {
        let g = AngleGroup::builder(4).theta("sqrt(2) - 1").build().unwrap();
        let r = Iet::rotation(&g, Angle::new(1, &[1]));
        assert!(r.cocycle().unwrap().is_identity());
        assert_eq!(r.compose(&r.inverse()).unwrap(), Iet::identity(&g));
        let r2 = Iet::rotation(&g, Angle::new(2, &[-3]));
        assert_eq!(r.compose(&r2).unwrap(), Iet::rotation(&g, Angle::new(3, &[-2])));
    }

    #[test]
    fn non_tiling_arcs_rejected() {
        let g = quarter_group();
        let r = Iet::from_arcs(&g, vec![(pt(&g, 0), g.torsion_angle(1)), (pt(&g, 2), Angle::ZERO)]);
        assert!(r.is_err());
    }

    #[test]
    fn text_round_trip() {
        let g = AngleGroup::builder(12)
            .thetas(&["sqrt(2) - 1", "sqrt(3) - 1"])
            .bases(&["0", "sqrt(5) - 2"])
            .build()
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let f = Iet::random(&g, &mut rng, 4, 2).unwrap();
            let text = f.to_text();
            let back = Iet::parse(&g, &text).unwrap();
            assert_eq!(back, f);
            assert_eq!(back.to_text(), text);
        }
        assert!(Iet::parse(&g, "x0 + 0/12 + [0,0]·θ | 1/12 + [0,0]·θ\nbogus").is_err());
    }

    #[test]
    fn semidirect_embedding_is_a_homomorphism() {
        let g = AngleGroup::builder(6).theta("sqrt(2) - 1").build().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let a = Iet::random(&g, &mut rng, 3, 2).unwrap();
            let b = Iet::random(&g, &mut rng, 3, 2).unwrap();
            let lhs = SemidirectElement::embed(&a).unwrap().multiply(&SemidirectElement::embed(&b).unwrap()).unwrap();
            let rhs = SemidirectElement::embed(&a.compose(&b).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn rank_examples() {
        let g2 = AngleGroup::builder(1).thetas(&["sqrt(2) - 1", "sqrt(3) - 1"]).build().unwrap();
        let gens = vec![Iet::rotation(&g2, Angle::new(0, &[1, 0])), Iet::rotation(&g2, Angle::new(0, &[1, 1]))];
        assert_eq!(rational_rank(&gens).unwrap(), 2);
        let g3 = AngleGroup::builder(1).thetas(&["sqrt(2) - 1", "sqrt(3) - 1", "sqrt(5) - 2"]).build().unwrap();
        assert_eq!(rational_rank(&[Iet::rotation(&g3, g3.theta(0))]).unwrap(), 1);
        let q = quarter_group();
        assert_eq!(rational_rank(&[swap(&q)]).unwrap(), 0);
        assert_eq!(integer_rank(&[vec![2, 4, 6], vec![1, 2, 3], vec![0, 1, 1]]), 2);
        assert_eq!(integer_rank(&[vec![0, 0], vec![0, 0]]), 0);
    }
}
