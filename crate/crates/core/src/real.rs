//! Real generators of the angle group: exact rationals and quadratic surds.
//!
//! Every value supports exact `floor(x * 2^p)` for any `p`, which is all the
//! certified ordering needs.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

/// `rational + irrational * sqrt(radicand)`, radicand square-free of small factors
/// and not a perfect square (or `irrational == 0`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealNumber {
    rational: BigRational,
    irrational: BigRational,
    radicand: BigInt,
}

impl RealNumber {
    pub fn rational(r: BigRational) -> Self {
        Self { rational: r, irrational: BigRational::zero(), radicand: BigInt::one() }
    }

    pub fn integer(n: i64) -> Self {
        Self::rational(BigRational::from_integer(n.into()))
    }

    /// `sqrt(n)` for a non-negative rational `n`.
    pub fn sqrt(n: &BigRational) -> Result<Self> {
        if n.is_negative() {
            return Err(Error::Parse(format!("sqrt of negative number {n}")));
        }
        // sqrt(p/q) = sqrt(p*q)/q
        let q = n.denom().clone();
        let (outside, inside) = extract_square(&(n.numer() * &q));
        let coeff = BigRational::new(outside, q);
        if inside.is_one() {
            Ok(Self::rational(coeff))
        } else {
            Ok(Self { rational: BigRational::zero(), irrational: coeff, radicand: inside })
        }
    }

    pub fn is_rational(&self) -> bool {
        self.irrational.is_zero()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.is_rational().then_some(&self.rational)
    }

    fn compatible(&self, other: &Self) -> Result<BigInt> {
        if self.is_rational() {
            return Ok(other.radicand.clone());
        }
        if other.is_rational() || self.radicand == other.radicand {
            return Ok(self.radicand.clone());
        }
        Err(Error::Parse(format!("cannot combine sqrt({}) with sqrt({})", self.radicand, other.radicand)))
    }

    fn normalized(mut self) -> Self {
        if self.irrational.is_zero() {
            self.radicand = BigInt::one();
        }
        self
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let c = self.compatible(other)?;
        Ok(Self {
            rational: &self.rational + &other.rational,
            irrational: &self.irrational + &other.irrational,
            radicand: c,
        }
        .normalized())
    }

    pub fn neg(&self) -> Self {
        Self { rational: -&self.rational, irrational: -&self.irrational, radicand: self.radicand.clone() }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let c = self.compatible(other)?;
        let cr = BigRational::from_integer(c.clone());
        let rational = &self.rational * &other.rational + &self.irrational * &other.irrational * cr;
        let irrational = &self.rational * &other.irrational + &self.irrational * &other.rational;
        Ok(Self { rational, irrational, radicand: c }.normalized())
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_rational() {
            if self.rational.is_zero() {
                return Err(Error::Parse("division by zero".into()));
            }
            return Ok(Self::rational(self.rational.recip()));
        }
        // (a + b√c)^-1 = (a - b√c) / (a² - b²c); the norm is nonzero since √c is irrational
        let cr = BigRational::from_integer(self.radicand.clone());
        let norm = &self.rational * &self.rational - &self.irrational * &self.irrational * cr;
        Ok(Self {
            rational: &self.rational / &norm,
            irrational: -&self.irrational / &norm,
            radicand: self.radicand.clone(),
        })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.recip()?)
    }

    /// Exact `floor(self * 2^bits)`.
    pub fn floor_scaled(&self, bits: u32) -> BigInt {
        // value = (a + b√c) / den
        let den = self.rational.denom().lcm(self.irrational.denom());
        let a = self.rational.numer() * (&den / self.rational.denom());
        let b = self.irrational.numer() * (&den / self.irrational.denom());
        let a_scaled = a << bits as usize;
        let s = if b.is_zero() {
            BigInt::zero()
        } else {
            // floor(b * √c * 2^bits) via an integer square root of b² c 4^bits
            let sq: BigInt = (&b * &b * &self.radicand) << (2 * bits as usize);
            let r = sq.sqrt();
            if b.is_positive() {
                r
            } else if &r * &r == sq {
                -r
            } else {
                -r - 1
            }
        };
        (a_scaled + s).div_floor(&den)
    }

    pub fn floor(&self) -> BigInt {
        self.floor_scaled(0)
    }

    /// `self - floor(self)`.
    pub fn fractional(&self) -> Self {
        let f = self.floor();
        Self { rational: &self.rational - BigRational::from_integer(f), ..self.clone() }
    }

    pub fn to_f64(&self) -> f64 {
        let lo = self.floor_scaled(60);
        lo.to_f64().unwrap_or(f64::NAN) * (-60f64).exp2()
    }

    pub fn parse(src: &str) -> Result<Self> {
        let mut p = Parser { chars: src.chars().collect(), pos: 0 };
        let v = p.expr()?;
        p.skip_ws();
        if p.pos != p.chars.len() {
            return Err(Error::Parse(format!("unexpected '{}' in real expression {src:?}", p.chars[p.pos])));
        }
        Ok(v)
    }
}

impl fmt::Display for RealNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            write!(f, "{}", self.rational)
        } else {
            write!(f, "{} + {}*sqrt({})", self.rational, self.irrational, self.radicand)
        }
    }
}

fn extract_square(n: &BigInt) -> (BigInt, BigInt) {
    let mut outside = BigInt::one();
    let mut inside = n.clone();
    if inside.is_zero() {
        return (BigInt::zero(), BigInt::one());
    }
    let r = inside.sqrt();
    if &r * &r == inside {
        return (r, BigInt::one());
    }
    for p in 2u32..1000 {
        let pp = BigInt::from(p * p);
        while (&inside % &pp).is_zero() {
            inside /= &pp;
            outside *= p;
        }
    }
    (outside, inside)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<RealNumber> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                '+' => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?)?;
                }
                '-' => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?)?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RealNumber> {
        let mut acc = self.unary()?;
        while let Some(c) = self.peek() {
            match c {
                '*' => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary()?)?;
                }
                '/' => {
                    self.pos += 1;
                    acc = acc.div(&self.unary()?)?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<RealNumber> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<RealNumber> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let v = self.expr()?;
                self.expect(')')?;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.decimal(),
            Some(c) if c.is_ascii_alphabetic() || c == '√' => {
                let start = self.pos;
                while self.pos < self.chars.len()
                    && (self.chars[self.pos].is_ascii_alphabetic() || self.chars[self.pos] == '√')
                {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                if name != "sqrt" && name != "√" {
                    return Err(Error::Parse(format!("unknown function {name:?}")));
                }
                let arg = if self.peek() == Some('(') {
                    self.pos += 1;
                    let v = self.expr()?;
                    self.expect(')')?;
                    v
                } else {
                    self.decimal()?
                };
                let r = arg.as_rational().ok_or_else(|| Error::Parse("sqrt of an irrational number".into()))?.clone();
                RealNumber::sqrt(&r)
            }
            Some(c) => Err(Error::Parse(format!("unexpected '{c}'"))),
            None => Err(Error::Parse("unexpected end of expression".into())),
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Parse(format!("expected '{c}'")))
        }
    }

    fn decimal(&mut self) -> Result<RealNumber> {
        self.skip_ws();
        let start = self.pos;
        let mut int = BigInt::zero();
        let mut scale = 0u32;
        let mut seen_dot = false;
        let mut digits = 0;
        while let Some(&c) = self.chars.get(self.pos) {
            if c.is_ascii_digit() {
                int = int * 10 + c.to_digit(10).unwrap();
                digits += 1;
                if seen_dot {
                    scale += 1;
                }
            } else if c == '.' && !seen_dot {
                seen_dot = true;
            } else if c == '_' {
            } else {
                break;
            }
            self.pos += 1;
        }
        if digits == 0 {
            self.pos = start;
            return Err(Error::Parse("expected a number".into()));
        }
        let mut value = BigRational::new(int, BigInt::from(10).pow(scale));
        if let Some(&e) = self.chars.get(self.pos) {
            if e == 'e' || e == 'E' {
                self.pos += 1;
                let neg = match self.chars.get(self.pos) {
                    Some('-') => {
                        self.pos += 1;
                        true
                    }
                    Some('+') => {
                        self.pos += 1;
                        false
                    }
                    _ => false,
                };
                let s = self.pos;
                while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
                let exp: u32 = self.chars[s..self.pos]
                    .iter()
                    .collect::<String>()
                    .parse()
                    .map_err(|_| Error::Parse("bad exponent".into()))?;
                let p = BigRational::from_integer(BigInt::from(10).pow(exp));
                value = if neg { value / p } else { value * p };
            }
        }
        Ok(RealNumber::rational(value))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_fractions_and_surds() {
        let a = RealNumber::parse("0.25").unwrap();
        assert_eq!(a.as_rational().unwrap(), &BigRational::new(1.into(), 4.into()));
        let b = RealNumber::parse("3/12").unwrap();
        assert_eq!(a, b);
        let c = RealNumber::parse("sqrt(2) - 1").unwrap();
        assert!(!c.is_rational());
        let d = RealNumber::parse("sqrt(8)/2 - 1").unwrap();
        assert_eq!(c, d);
        assert!(RealNumber::parse("sqrt(9)").unwrap().is_rational());
        assert!(RealNumber::parse("sqrt(2) + sqrt(3)").is_err());
        assert!(RealNumber::parse("1 +").is_err());
    }

    #[test]
    fn floor_scaled_of_sqrt2() {
        let s = RealNumber::parse("sqrt(2)").unwrap();
        // floor(sqrt(2) * 2^20) = 1482910
        assert_eq!(s.floor_scaled(20), BigInt::from(1_482_910));
        let n = s.neg();
        assert_eq!(n.floor_scaled(20), BigInt::from(-1_482_911));
        let t = RealNumber::parse("(1 + sqrt(5))/2").unwrap();
        assert_eq!(t.floor(), BigInt::one());
        assert!((t.to_f64() - 1.618033988749895).abs() < 1e-15);
    }

    #[test]
    fn reciprocal_of_surd() {
        let t = RealNumber::parse("1/(sqrt(2) - 1)").unwrap();
        assert_eq!(t, RealNumber::parse("sqrt(2) + 1").unwrap());
    }
}
