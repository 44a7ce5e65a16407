//! The angle group Λ = Z^d × (1/m)Z/Z inside R/Z, and points of Σ + Λ.
//!
//! Equality is decided on coordinates. Circle order is decided on dyadic
//! enclosures `[lo, lo + w] * 2^-p` computed with exact integer arithmetic,
//! climbing a precision ladder until the two enclosures separate.

use crate::error::{config, Error, Result};
use crate::real::RealNumber;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

/// Largest supported rational rank.
pub const MAX_RANK: usize = 6;

pub const DEFAULT_LADDER: [u32; 4] = [64, 128, 256, 1024];

/// `p/m + Σ k_i θ_i (mod 1)`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Angle {
    pub p: u32,
    pub k: [i32; MAX_RANK],
}

impl Angle {
    pub const ZERO: Angle = Angle { p: 0, k: [0; MAX_RANK] };

    pub fn new(p: u32, k: &[i32]) -> Self {
        let mut out = Self::ZERO;
        out.p = p;
        out.k[..k.len()].copy_from_slice(k);
        out
    }

    pub fn is_zero(&self) -> bool {
        *self == Self::ZERO
    }

    /// Group law with torsion reduced mod `m`; coordinates are not validated.
    #[inline]
    pub fn add_mod(self, other: Angle, m: u32) -> Angle {
        let mut k = self.k;
        for (a, b) in k.iter_mut().zip(other.k) {
            *a += b;
        }
        let mut p = self.p + other.p;
        if p >= m {
            p -= m;
            if p >= m {
                p %= m;
            }
        }
        Angle { p, k }
    }

    #[inline]
    pub fn neg_mod(self, m: u32) -> Angle {
        let mut k = self.k;
        for a in k.iter_mut() {
            *a = -*a;
        }
        Angle { p: (m - self.p % m) % m, k }
    }

    #[inline]
    pub fn sub_mod(self, other: Angle, m: u32) -> Angle {
        self.add_mod(other.neg_mod(m), m)
    }

    /// `n * self`.
    pub fn scale_mod(self, n: i32, m: u32) -> Angle {
        let mut k = self.k;
        for a in k.iter_mut() {
            *a *= n;
        }
        let p = (self.p as i64 * n as i64).rem_euclid(m as i64) as u32;
        Angle { p, k }
    }

    /// ℓ¹ norm of the free coordinates.
    pub fn free_norm(&self) -> u64 {
        self.k.iter().map(|x| x.unsigned_abs() as u64).sum()
    }

    pub fn is_torsion(&self) -> bool {
        self.k.iter().all(|&x| x == 0)
    }
}

impl Hash for Angle {
    #[inline]
    fn hash<H: Hasher>(&self, state: &mut H) {
        let w = |a: i32, b: i32| (a as u32 as u64) | ((b as u32 as u64) << 32);
        state.write_u64(self.p as u64 | ((self.k[0] as u32 as u64) << 32));
        state.write_u64(w(self.k[1], self.k[2]));
        state.write_u64(w(self.k[3], self.k[4]));
        state.write_u32(self.k[5] as u32);
    }
}

impl fmt::Debug for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let last = self.k.iter().rposition(|&x| x != 0).map_or(0, |i| i + 1);
        write!(f, "Angle({}; {:?})", self.p, &self.k[..last])
    }
}

/// `x_base + offset`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Point {
    pub base: u32,
    pub offset: Angle,
}

impl Point {
    pub fn new(base: u32, offset: Angle) -> Self {
        Self { base, offset }
    }

    #[inline]
    pub fn translate(self, a: Angle, m: u32) -> Point {
        Point { base: self.base, offset: self.offset.add_mod(a, m) }
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}+{:?}", self.base, self.offset)
    }
}

/// Exact `floor(r * 2^bits)` enclosures of the generators at one rung of the ladder.
#[derive(Debug, Clone)]
struct Rung {
    bits: u32,
    theta: Vec<BigInt>,
    base: Vec<BigInt>,
}

#[derive(Debug)]
pub struct AngleGroup {
    m: u32,
    theta: Vec<RealNumber>,
    theta_int: Vec<BigInt>,
    theta_src: Vec<String>,
    base: Vec<RealNumber>,
    base_src: Vec<String>,
    base_exact: Vec<bool>,
    fix64_theta: Vec<i128>,
    fix64_base: Vec<i128>,
    rungs: Vec<Rung>,
    ladder: Vec<u32>,
    fingerprint: u64,
}

/// Construction options for [`AngleGroup`].
#[derive(Debug, Clone)]
pub struct AngleGroupBuilder {
    m: u32,
    theta: Vec<String>,
    base: Vec<String>,
    independence_assumed: bool,
    coset_norm_bound: u32,
    ladder: Vec<u32>,
}

impl AngleGroupBuilder {
    pub fn new(m: u32) -> Self {
        Self {
            m,
            theta: Vec::new(),
            base: vec!["0".into()],
            independence_assumed: true,
            coset_norm_bound: 3,
            ladder: DEFAULT_LADDER.to_vec(),
        }
    }

    pub fn theta(mut self, src: &str) -> Self {
        self.theta.push(src.to_string());
        self
    }

    pub fn thetas<S: AsRef<str>>(mut self, srcs: &[S]) -> Self {
        self.theta.extend(srcs.iter().map(|s| s.as_ref().to_string()));
        self
    }

    pub fn bases<S: AsRef<str>>(mut self, srcs: &[S]) -> Self {
        self.base = srcs.iter().map(|s| s.as_ref().to_string()).collect();
        self
    }

    pub fn independence_assumed(mut self, flag: bool) -> Self {
        self.independence_assumed = flag;
        self
    }

    pub fn coset_norm_bound(mut self, bound: u32) -> Self {
        self.coset_norm_bound = bound;
        self
    }

    pub fn ladder(mut self, ladder: &[u32]) -> Self {
        self.ladder = ladder.to_vec();
        self
    }

    /// Builds the group without the rational-denominator and coset screens.
    pub fn build_unscreened(self) -> Result<Arc<AngleGroup>> {
        self.build_inner(false)
    }

    pub fn build(self) -> Result<Arc<AngleGroup>> {
        self.build_inner(true)
    }

    fn build_inner(self, screen: bool) -> Result<Arc<AngleGroup>> {
        if self.m == 0 {
            return Err(config("torsion denominator m must be at least 1"));
        }
        if self.theta.len() > MAX_RANK {
            return Err(config(format!("rank {} exceeds the supported maximum {MAX_RANK}", self.theta.len())));
        }
        if !self.theta.is_empty() && !self.independence_assumed {
            return Err(config("irrational generators require independence_assumed = true"));
        }
        if self.ladder.is_empty() || self.ladder[0] != 64 || self.ladder.windows(2).any(|w| w[0] >= w[1]) {
            return Err(config("precision ladder must start at 64 bits and increase"));
        }
        let parse = |s: &String| RealNumber::parse(s).map_err(|e| config(format!("real {s:?}: {e}")));
        let theta_full: Vec<RealNumber> = self.theta.iter().map(parse).collect::<Result<_>>()?;
        let base_full: Vec<RealNumber> = self.base.iter().map(parse).collect::<Result<_>>()?;
        let theta_int: Vec<BigInt> = theta_full.iter().map(|t| t.floor()).collect();
        let theta: Vec<RealNumber> = theta_full.iter().map(|t| t.fractional()).collect();
        let base: Vec<RealNumber> = base_full.iter().map(|t| t.fractional()).collect();
        let to_i128 = |x: BigInt| x.to_i128().expect("fractional part fits");
        let fix64_theta = theta.iter().map(|t| to_i128(t.floor_scaled(64))).collect();
        let fix64_base = base.iter().map(|t| to_i128(t.floor_scaled(64))).collect();
        let rungs = self.ladder[1..]
            .iter()
            .map(|&bits| Rung {
                bits,
                theta: theta.iter().map(|t| t.floor_scaled(bits)).collect(),
                base: base.iter().map(|t| t.floor_scaled(bits)).collect(),
            })
            .collect();
        let mut h = DefaultHasher::new();
        self.m.hash(&mut h);
        for t in theta_full.iter().chain([RealNumber::integer(-1)].iter()).chain(base_full.iter()) {
            t.to_string().hash(&mut h);
        }
        let group = AngleGroup {
            m: self.m,
            base_exact: base.iter().map(|b| b.is_rational()).collect(),
            theta,
            theta_int,
            theta_src: self.theta,
            base,
            base_src: self.base,
            fix64_theta,
            fix64_base,
            rungs,
            ladder: self.ladder,
            fingerprint: h.finish(),
        };
        if screen {
            group.screen_generators()?;
            group.screen_bases(self.coset_norm_bound)?;
        }
        Ok(Arc::new(group))
    }
}

/// A dyadic enclosure `[lo, lo + width] * 2^-bits`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Enclosure<T> {
    lo: T,
    width: T,
}

impl AngleGroup {
    pub fn builder(m: u32) -> AngleGroupBuilder {
        AngleGroupBuilder::new(m)
    }

    /// Purely rational group `(1/m)Z/Z` with Σ = {0}.
    pub fn torsion(m: u32) -> Result<Arc<Self>> {
        AngleGroupBuilder::new(m).build()
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn rank(&self) -> usize {
        self.theta.len()
    }

    pub fn num_bases(&self) -> usize {
        self.base.len()
    }

    pub fn theta_sources(&self) -> &[String] {
        &self.theta_src
    }

    pub fn base_sources(&self) -> &[String] {
        &self.base_src
    }

    pub fn ladder(&self) -> &[u32] {
        &self.ladder
    }

    pub fn same_group(&self, other: &AngleGroup) -> bool {
        std::ptr::eq(self, other) || self.fingerprint == other.fingerprint
    }

    /// The i-th free generator θ_i as an angle.
    pub fn theta(&self, i: usize) -> Angle {
        let mut a = Angle::ZERO;
        a.k[i] = 1;
        a
    }

    /// `p/m`.
    pub fn torsion_angle(&self, p: i64) -> Angle {
        Angle { p: p.rem_euclid(self.m as i64) as u32, k: [0; MAX_RANK] }
    }

    /// The angle `p/q`, if `q` divides `m` after reduction.
    pub fn rational_angle(&self, p: i64, q: u64) -> Result<Angle> {
        let r = BigRational::new(p.into(), q.into());
        let scaled = r * BigRational::from_integer(self.m.into());
        if !scaled.is_integer() {
            return Err(config(format!("{p}/{q} is not a multiple of 1/{}", self.m)));
        }
        Ok(self.torsion_angle(scaled.to_integer().mod_floor(&BigInt::from(self.m)).to_i64().unwrap()))
    }

    pub fn base_point(&self, b: u32) -> Point {
        Point::new(b, Angle::ZERO)
    }

    pub fn validate_angle(&self, a: &Angle) -> Result<()> {
        if a.p >= self.m {
            return Err(config(format!("torsion coordinate {} not reduced mod {}", a.p, self.m)));
        }
        if a.k[self.rank()..].iter().any(|&x| x != 0) {
            return Err(config(format!("angle {a:?} has coordinates beyond rank {}", self.rank())));
        }
        Ok(())
    }

    pub fn validate_point(&self, x: &Point) -> Result<()> {
        if x.base as usize >= self.base.len() {
            return Err(config(format!("base index {} out of range (|Σ| = {})", x.base, self.base.len())));
        }
        self.validate_angle(&x.offset)
    }

    pub fn add(&self, a: &Angle, b: &Angle) -> Result<Angle> {
        self.validate_angle(a)?;
        self.validate_angle(b)?;
        Ok(a.add_mod(*b, self.m))
    }

    pub fn neg(&self, a: &Angle) -> Result<Angle> {
        self.validate_angle(a)?;
        Ok(a.neg_mod(self.m))
    }

    pub fn sub(&self, a: &Angle, b: &Angle) -> Result<Angle> {
        self.validate_angle(a)?;
        self.validate_angle(b)?;
        Ok(a.sub_mod(*b, self.m))
    }

    /// `y - x` when both lie in the same coset.
    pub fn difference(&self, y: &Point, x: &Point) -> Option<Angle> {
        (y.base == x.base).then(|| y.offset.sub_mod(x.offset, self.m))
    }

    fn free_width(&self, a: &Angle) -> i128 {
        a.k[..self.rank()].iter().map(|&k| k.unsigned_abs() as i128).sum()
    }

    /// Enclosure of `p/m + Σ k_i frac(θ_i)` at 64 bits.
    fn enclose64(&self, a: &Angle) -> Enclosure<i128> {
        let m = self.m as i128;
        let t = ((a.p as i128) << 64) / m;
        let mut lo = t;
        let mut width = if ((a.p as i128) << 64) % m == 0 { 0 } else { 1 };
        for (i, &k) in a.k[..self.rank()].iter().enumerate() {
            let l = self.fix64_theta[i];
            if k >= 0 {
                lo += k as i128 * l;
            } else {
                lo += k as i128 * (l + 1);
            }
            width += k.unsigned_abs() as i128;
        }
        Enclosure { lo, width }
    }

    fn enclose_big(&self, a: &Angle, theta: &[BigInt], bits: u32) -> Enclosure<BigInt> {
        let scaled = BigInt::from(a.p) << bits as usize;
        let (q, r) = scaled.div_mod_floor(&BigInt::from(self.m));
        let mut lo = q;
        let mut width = BigInt::from(if r.is_zero() { 0 } else { 1 });
        for (i, &k) in a.k[..self.rank()].iter().enumerate() {
            let l = &theta[i];
            if k >= 0 {
                lo += l * k;
            } else {
                lo += (l + 1) * k;
            }
            width += k.unsigned_abs();
        }
        Enclosure { lo, width }
    }

    /// Certified interval of width at most `2^-precision` around the real number
    /// `p/m + Σ k_i θ_i`, with the generators taken as given (not reduced mod 1).
    pub fn angle_real_enclosure(&self, a: &Angle, precision: u32) -> (BigRational, BigRational) {
        let precision = precision.max(1);
        let w = 2 + self.free_width(a) as u64;
        let extra = 64 - w.leading_zeros();
        let bits = precision + extra;
        let theta: Vec<BigInt> = self.theta.iter().map(|t| t.floor_scaled(bits)).collect();
        let e = self.enclose_big(a, &theta, bits);
        let int_part: BigInt = a.k[..self.rank()].iter().zip(&self.theta_int).map(|(&k, n)| n * k).sum();
        let den = BigInt::one() << bits as usize;
        let lo = BigRational::new(e.lo.clone(), den.clone()) + BigRational::from_integer(int_part);
        let hi = &lo + BigRational::new(e.width, den);
        (lo, hi)
    }

    /// Representative of the angle in [0, 1) as a float (for diagnostics only).
    pub fn angle_to_f64(&self, a: &Angle) -> f64 {
        let e = self.enclose64(a);
        let frac = e.lo.rem_euclid(1i128 << 64);
        frac as f64 * (-64f64).exp2()
    }

    pub fn point_to_f64(&self, x: &Point) -> f64 {
        let e = self.point_enclose64(x);
        let frac = e.lo.rem_euclid(1i128 << 64);
        frac as f64 * (-64f64).exp2()
    }

    fn point_enclose64(&self, x: &Point) -> Enclosure<i128> {
        let mut e = self.enclose64(&x.offset);
        e.lo += self.fix64_base[x.base as usize];
        if !self.base_exact[x.base as usize] {
            e.width += 1;
        }
        e
    }

    /// Exact value in [0, 1) when the point does not involve any θ_i.
    pub fn point_exact(&self, x: &Point) -> Option<BigRational> {
        if !x.offset.is_torsion() {
            return None;
        }
        let b = self.base[x.base as usize].as_rational()?;
        let v = b + BigRational::new(x.offset.p.into(), self.m.into());
        Some(&v - BigRational::from_integer(v.floor().to_integer()))
    }

    /// Circle order of representatives in [0, 1).
    pub fn compare(&self, x: &Point, y: &Point) -> Result<Ordering> {
        if x == y {
            return Ok(Ordering::Equal);
        }
        if let Some(o) = separate64(&self.point_enclose64(x), &self.point_enclose64(y)) {
            return Ok(o);
        }
        if let (Some(a), Some(b)) = (self.point_exact(x), self.point_exact(y)) {
            return match a.cmp(&b) {
                Ordering::Equal => Err(self.undecidable(x, y)),
                o => Ok(o),
            };
        }
        for rung in &self.rungs {
            let ex = self.point_enclose_big(x, rung);
            let ey = self.point_enclose_big(y, rung);
            if let Some(o) = separate_big(&ex, &ey, rung.bits) {
                return Ok(o);
            }
        }
        Err(self.undecidable(x, y))
    }

    fn undecidable(&self, x: &Point, y: &Point) -> Error {
        Error::UndecidableComparison { left: self.render_point(x), right: self.render_point(y) }
    }

    fn point_enclose_big(&self, x: &Point, rung: &Rung) -> Enclosure<BigInt> {
        let mut e = self.enclose_big(&x.offset, &rung.theta, rung.bits);
        e.lo += &rung.base[x.base as usize];
        if !self.base_exact[x.base as usize] {
            e.width += 1;
        }
        e
    }

    /// Whether the real number `base_i - base_j - Σ k θ` lies in (1/m)Z at 64 bits.
    fn may_be_torsion(&self, lo: i128, width: i128) -> bool {
        let m = self.m as i128;
        let one = 1i128 << 64;
        // m * [lo, lo + width] contains a multiple of 2^64 (widened by one unit for rounding)
        let a = (lo - 1) * m;
        let b = (lo + width + 1) * m;
        a.div_euclid(one) != b.div_euclid(one) || a.rem_euclid(one) == 0
    }

    fn screen_generators(&self) -> Result<()> {
        let one = 1i128 << 64;
        for (i, &l) in self.fix64_theta.iter().enumerate() {
            for q in 1..=self.m as i128 {
                let a = l * q;
                let b = (l + 1) * q;
                if a.div_euclid(one) != b.div_euclid(one) || a.rem_euclid(one) == 0 {
                    return Err(config(format!(
                        "generator θ{} = {} is within 2^-64 of a rational with denominator {q} <= m",
                        i + 1,
                        self.theta_src[i]
                    )));
                }
            }
        }
        Ok(())
    }

    fn screen_bases(&self, bound: u32) -> Result<()> {
        let d = self.rank();
        let ball = coordinate_ball(d, bound as i32);
        for i in 0..self.base.len() {
            for j in 0..i {
                let diff = self.fix64_base[i] - self.fix64_base[j];
                let mut width = 2;
                if self.base_exact[i] && self.base_exact[j] {
                    width = 0;
                }
                for k in &ball {
                    let mut a = Angle::ZERO;
                    a.k[..d].copy_from_slice(k);
                    let e = self.enclose64(&a);
                    // diff - e lies in [diff - lo - e.width - 1, diff - lo + 1]
                    let lo = diff - e.lo - e.width - 1;
                    if self.may_be_torsion(lo, width + e.width + 2) {
                        return Err(config(format!(
                            "base points {} and {} appear to lie in the same coset (offset near {:?})",
                            self.base_src[j], self.base_src[i], k
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn render_angle(&self, a: &Angle) -> String {
        let d = self.rank();
        if d == 0 {
            return format!("{}/{}", a.p, self.m);
        }
        let ks: Vec<String> = a.k[..d].iter().map(|k| k.to_string()).collect();
        format!("{}/{} + [{}]·θ", a.p, self.m, ks.join(","))
    }

    pub fn render_point(&self, x: &Point) -> String {
        format!("x{} + {}", x.base, self.render_angle(&x.offset))
    }

    /// Parses the canonical rendering; also accepts `*` for `·`, `theta` for `θ`,
    /// a bare `p/q`, a bare `[k…]·θ`, and a leading minus on either part.
    pub fn parse_angle(&self, src: &str) -> Result<Angle> {
        let s: String = src.replace("theta", "θ").replace('*', "·").chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty angle".into()));
        }
        let bad = || Error::Parse(format!("malformed angle {src:?}"));
        let mut out = Angle::ZERO;
        let mut rest = s.as_str();
        while !rest.is_empty() {
            let (sign, body) = match rest.as_bytes()[0] {
                b'+' => (1, &rest[1..]),
                b'-' => (-1, &rest[1..]),
                _ => (1, rest),
            };
            if let Some(after) = body.strip_prefix('[') {
                let close = after.find(']').ok_or_else(bad)?;
                let inner = &after[..close];
                let tail = after[close + 1..].strip_prefix("·θ").ok_or_else(bad)?;
                let ks: Vec<i32> = if inner.is_empty() {
                    Vec::new()
                } else {
                    inner.split(',').map(|t| t.parse::<i32>().map_err(|_| bad())).collect::<Result<_>>()?
                };
                if ks.len() != self.rank() {
                    return Err(Error::Parse(format!(
                        "angle {src:?} has {} free coordinates, group rank is {}",
                        ks.len(),
                        self.rank()
                    )));
                }
                let mut a = Angle::ZERO;
                for (slot, k) in a.k.iter_mut().zip(ks) {
                    *slot = sign * k;
                }
                out = out.add_mod(a, self.m);
                rest = tail;
            } else {
                let end = body.find(['+', '-']).unwrap_or(body.len());
                let term = &body[..end];
                let (p, q) = match term.split_once('/') {
                    Some((p, q)) => (p.parse::<i64>().map_err(|_| bad())?, q.parse::<u64>().map_err(|_| bad())?),
                    None => (term.parse::<i64>().map_err(|_| bad())?, 1),
                };
                if q == 0 {
                    return Err(bad());
                }
                let a = self.rational_angle(sign as i64 * p, q).map_err(|e| Error::Parse(e.to_string()))?;
                out = out.add_mod(a, self.m);
                rest = &body[end..];
            }
        }
        Ok(out)
    }

    pub fn parse_point(&self, src: &str) -> Result<Point> {
        let s = src.trim();
        let bad = || Error::Parse(format!("malformed point {src:?}"));
        let body = s.strip_prefix('x').ok_or_else(bad)?;
        let digits = body.chars().take_while(|c| c.is_ascii_digit()).count();
        if digits == 0 {
            return Err(bad());
        }
        let base: u32 = body[..digits].parse().map_err(|_| bad())?;
        let rest = body[digits..].trim();
        let offset = if rest.is_empty() { Angle::ZERO } else { self.parse_angle(rest)? };
        let p = Point::new(base, offset);
        self.validate_point(&p).map_err(|e| Error::Parse(e.to_string()))?;
        Ok(p)
    }
}

fn separate64(x: &Enclosure<i128>, y: &Enclosure<i128>) -> Option<Ordering> {
    let one = 1i128 << 64;
    let fx = frac_interval(x.lo, x.width, one)?;
    let fy = frac_interval(y.lo, y.width, one)?;
    if fx.1 < fy.0 {
        Some(Ordering::Less)
    } else if fy.1 < fx.0 {
        Some(Ordering::Greater)
    } else {
        None
    }
}

fn frac_interval(lo: i128, width: i128, one: i128) -> Option<(i128, i128)> {
    let r = lo.rem_euclid(one);
    (r + width < one).then_some((r, r + width))
}

fn separate_big(x: &Enclosure<BigInt>, y: &Enclosure<BigInt>, bits: u32) -> Option<Ordering> {
    let one = BigInt::one() << bits as usize;
    let frac = |e: &Enclosure<BigInt>| {
        let r = e.lo.mod_floor(&one);
        let hi = &r + &e.width;
        (hi < one).then_some((r, hi))
    };
    let fx = frac(x)?;
    let fy = frac(y)?;
    if fx.1 < fy.0 {
        Some(Ordering::Less)
    } else if fy.1 < fx.0 {
        Some(Ordering::Greater)
    } else {
        None
    }
}

/// All integer vectors of length `d` with ℓ¹ norm at most `r`, in lexicographic order.
pub fn coordinate_ball(d: usize, r: i32) -> Vec<Vec<i32>> {
    fn rec(d: usize, r: i32, prefix: &mut Vec<i32>, out: &mut Vec<Vec<i32>>) {
        if prefix.len() == d {
            out.push(prefix.clone());
            return;
        }
        let used: i32 = prefix.iter().map(|x| x.abs()).sum();
        let left = r - used;
        for v in -left..=left {
            prefix.push(v);
            rec(d, r, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, r, &mut Vec::new(), &mut out);
    out
}

impl fmt::Display for AngleGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Λ(m={}, θ=[{}], Σ=[{}])", self.m, self.theta_src.join(", "), self.base_src.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQRT2_MINUS_1: &str = "0.41421356237309504880168872420969807856967187537694807317668";

    fn g41() -> Arc<AngleGroup> {
        AngleGroup::builder(4).theta(SQRT2_MINUS_1).build().unwrap()
    }

    #[test]
    fn torsion_wraps_and_inverse() {
        let g = g41();
        let a = Angle::new(1, &[0]);
        let b = Angle::new(3, &[0]);
        assert_eq!(g.add(&a, &b).unwrap(), Angle::ZERO);
        let c = Angle::new(1, &[2]);
        let d = Angle::new(2, &[-1]);
        assert_eq!(g.add(&c, &d).unwrap(), Angle::new(3, &[1]));
        assert_eq!(g.add(&c, &g.neg(&c).unwrap()).unwrap(), Angle::ZERO);
    }

    #[test]
    fn mismatched_coordinates_rejected() {
        let g = g41();
        let bad = Angle::new(5, &[0]);
        assert!(matches!(g.add(&bad, &Angle::ZERO), Err(Error::Config(_))));
        let too_wide = Angle::new(0, &[0, 1]);
        assert!(g.validate_angle(&too_wide).is_err());
    }

    #[test]
    fn compare_quarter_and_theta() {
        let g = g41();
        let quarter = Point::new(0, Angle::new(1, &[0]));
        let three_q = Point::new(0, Angle::new(3, &[0]));
        let theta = Point::new(0, Angle::new(0, &[1]));
        assert_eq!(g.compare(&quarter, &quarter).unwrap(), Ordering::Equal);
        assert_eq!(g.compare(&quarter, &theta).unwrap(), Ordering::Less);
        assert_eq!(g.compare(&three_q, &theta).unwrap(), Ordering::Greater);
    }

    #[test]
    fn enclosure_of_theta_brackets_decimal() {
        let g = AngleGroup::builder(4).theta("sqrt(2) - 1").build().unwrap();
        for prec in [1, 8, 64, 200] {
            let (lo, hi) = g.angle_real_enclosure(&Angle::new(0, &[1]), prec);
            assert!(&hi - &lo <= BigRational::new(1.into(), BigInt::one() << prec as usize));
            let oracle = RealNumber::parse(SQRT2_MINUS_1).unwrap();
            let o = oracle.as_rational().unwrap();
            if prec <= 150 {
                assert!(&lo <= o && o <= &hi, "prec {prec}");
            }
        }
        let (lo, hi) = g.angle_real_enclosure(&Angle::new(2, &[0]), 30);
        let half = BigRational::new(1.into(), 2.into());
        assert!(lo <= half && half <= hi);
        let (lo, hi) = g.angle_real_enclosure(&Angle::ZERO, 10);
        assert!(lo <= BigRational::zero() && BigRational::zero() <= hi);
    }

    #[test]
    fn screen_rejects_rational_generator() {
        assert!(AngleGroup::builder(4).theta("0.25").build().is_err());
        assert!(AngleGroup::builder(4).theta("1/3").build().is_err());
        assert!(AngleGroup::builder(2).theta("1/3").build().is_ok());
    }

    #[test]
    fn screen_rejects_same_coset_bases() {
        let r = AngleGroup::builder(12).theta("sqrt(2) - 1").bases(&["0", "sqrt(2) + 1/12"]).build();
        assert!(r.is_err());
        let ok = AngleGroup::builder(12).theta("sqrt(2) - 1").bases(&["0", "sqrt(3) - 1"]).build();
        assert!(ok.is_ok());
    }

    #[test]
    fn dependent_generators_surface_as_undecidable() {
        let g = AngleGroup::builder(1).theta("sqrt(2) - 1").theta("sqrt(8)/2 - 1").build().unwrap();
        let a = Point::new(0, Angle::new(0, &[1, 0]));
        let b = Point::new(0, Angle::new(0, &[0, 1]));
        assert!(matches!(g.compare(&a, &b), Err(Error::UndecidableComparison { .. })));
    }

    #[test]
    fn rational_only_group_compares_exactly() {
        let g = AngleGroup::torsion(12).unwrap();
        let a = Point::new(0, g.torsion_angle(1));
        let b = Point::new(0, g.torsion_angle(11));
        assert_eq!(g.compare(&a, &b).unwrap(), Ordering::Less);
        assert_eq!(g.compare(&Point::default(), &a).unwrap(), Ordering::Less);
    }

    #[test]
    fn close_points_need_higher_rungs() {
        // the two generators differ by 10^-30, below the 64-bit resolution
        let mk = |ladder: &[u32]| {
            AngleGroup::builder(1).theta("sqrt(2) - 1").theta("sqrt(2) - 1 + 1e-30").ladder(ladder).build().unwrap()
        };
        let a = Point::new(0, Angle::new(0, &[1, 0]));
        let b = Point::new(0, Angle::new(0, &[0, 1]));
        assert_eq!(mk(&DEFAULT_LADDER).compare(&a, &b).unwrap(), Ordering::Less);
        assert!(matches!(mk(&[64]).compare(&a, &b), Err(Error::UndecidableComparison { .. })));
    }

    #[test]
    fn render_and_parse_round_trip() {
        let g = AngleGroup::builder(12).thetas(&["sqrt(2)-1", "sqrt(3)-1"]).bases(&["0", "sqrt(5)-2"]).build().unwrap();
        let a = Angle::new(7, &[-3, 2]);
        let s = g.render_angle(&a);
        assert_eq!(s, "7/12 + [-3,2]·θ");
        assert_eq!(g.parse_angle(&s).unwrap(), a);
        assert_eq!(g.parse_angle("7/12 + [-3, 2]*theta").unwrap(), a);
        assert_eq!(g.parse_angle("1/4").unwrap(), g.torsion_angle(3));
        assert_eq!(g.parse_angle("-1/4").unwrap(), g.torsion_angle(9));
        assert_eq!(g.parse_angle("-[1,0]·θ").unwrap(), Angle::new(0, &[-1, 0]));
        assert!(g.parse_angle("1/5").is_err());
        let x = Point::new(1, a);
        assert_eq!(g.parse_point(&g.render_point(&x)).unwrap(), x);
        assert_eq!(g.parse_point("x1").unwrap(), Point::new(1, Angle::ZERO));
        assert!(g.parse_point("x2").is_err());
    }

    #[test]
    fn coordinate_ball_sizes() {
        for n in 0..5 {
            assert_eq!(coordinate_ball(2, n).len() as i32, 2 * n * n + 2 * n + 1);
        }
        assert_eq!(coordinate_ball(0, 3).len(), 1);
    }
}
