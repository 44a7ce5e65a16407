//! Proper 3-colorings of the line, the free product of three involutions acting
//! on them, and the lamplighter-type walk over an unrestricted configuration.

pub mod hwalk;
pub mod line;

use crate::action::Action;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::fmt;

pub use hwalk::{
    decay_estimate, eval_t_n, eval_t_n_translates, h_walk_step, prepare_registry, word_length_drift,
    word_length_return, DecayParams, DecayReport, DecayRow, DriftEstimate, HWalkState, LampStep, LengthChiSquare,
};
pub use line::{tilde_word, ColoredLine, ColoredLineAction, MarkEntry, MarkRegistry, DEFAULT_CORE};

#[repr(u8)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Color {
    Blue,
    Yellow,
    Red,
}

impl Color {
    pub const ALL: [Color; 3] = [Color::Blue, Color::Yellow, Color::Red];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    #[inline]
    pub fn from_index(i: usize) -> Color {
        Self::ALL[i]
    }

    pub fn letter(self) -> char {
        ['b', 'y', 'r'][self.index()]
    }

    pub fn from_letter(c: char) -> Option<Color> {
        match c.to_ascii_lowercase() {
            'b' => Some(Color::Blue),
            'y' => Some(Color::Yellow),
            'r' => Some(Color::Red),
            _ => None,
        }
    }
}

/// A reduced word in the involutions `b, y, r`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(VecDeque<Color>);

impl Word {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Reduces the given letters.
    pub fn from_letters(letters: impl IntoIterator<Item = Color>) -> Self {
        let mut w = Self::empty();
        for c in letters {
            w.mul_right(c);
        }
        w
    }

    pub fn parse(src: &str) -> Result<Self> {
        let src = src.trim();
        if src == "e" || src.is_empty() {
            return Ok(Self::empty());
        }
        src.chars()
            .map(|c| Color::from_letter(c).ok_or_else(|| Error::Parse(format!("bad letter {c:?} in word {src:?}"))))
            .collect::<Result<Vec<_>>>()
            .map(Self::from_letters)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> impl DoubleEndedIterator<Item = Color> + '_ {
        self.0.iter().copied()
    }

    pub fn to_vec(&self) -> Vec<Color> {
        self.0.iter().copied().collect()
    }

    /// `self ← self · c`; returns the new length.
    #[inline]
    pub fn mul_right(&mut self, c: Color) -> usize {
        if self.0.back() == Some(&c) {
            self.0.pop_back();
        } else {
            self.0.push_back(c);
        }
        self.0.len()
    }

    /// `self ← c · self`.
    #[inline]
    pub fn mul_left(&mut self, c: Color) -> usize {
        if self.0.front() == Some(&c) {
            self.0.pop_front();
        } else {
            self.0.push_front(c);
        }
        self.0.len()
    }

    pub fn inverse(&self) -> Self {
        Self(self.0.iter().rev().copied().collect())
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut out = self.clone();
        for c in other.letters() {
            out.mul_right(c);
        }
        out
    }

    /// Shortlex key.
    pub fn shortlex_key(&self) -> (usize, Vec<Color>) {
        (self.len(), self.to_vec())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("e");
        }
        for c in &self.0 {
            write!(f, "{}", c.letter())?;
        }
        Ok(())
    }
}

/// Every reduced word of length `len` in shortlex order.
pub fn reduced_words(len: usize) -> Vec<Word> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(out.len() * 2);
        for w in &out {
            for c in Color::ALL {
                if w.last() != Some(&c) {
                    let mut v: Vec<Color> = w.clone();
                    v.push(c);
                    next.push(v);
                }
            }
        }
        out = next;
    }
    out.into_iter().map(|v| Word(v.into())).collect()
}

/// `Z/2 * Z/2 * Z/2` acting on itself by left multiplication.
#[derive(Debug, Clone, Copy, Default)]
pub struct FreeProductSelf;

impl Action for FreeProductSelf {
    type Point = Word;
    type Element = Word;

    fn num_generators(&self) -> usize {
        3
    }

    fn inverse_generator(&self, s: usize) -> usize {
        s
    }

    fn generator_name(&self, s: usize) -> String {
        Color::from_index(s).letter().to_string()
    }

    fn apply_generator(&self, s: usize, x: &Word) -> Result<Word> {
        let mut y = x.clone();
        y.mul_left(Color::from_index(s));
        Ok(y)
    }

    fn identity(&self) -> Word {
        Word::empty()
    }

    fn push_right(&self, w: &mut Word, s: usize) -> Result<()> {
        w.mul_right(Color::from_index(s));
        Ok(())
    }

    fn push_left(&self, w: &mut Word, s: usize) -> Result<()> {
        w.mul_left(Color::from_index(s));
        Ok(())
    }

    fn apply(&self, w: &Word, x: &Word) -> Result<Word> {
        Ok(w.mul(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn words_reduce() {
        let w = Word::parse("byyr").unwrap();
        assert_eq!(w.to_string(), "br");
        assert_eq!(w.mul(&w.inverse()), Word::empty());
        assert!(Word::parse("bxq").is_err());
        assert_eq!(Word::parse("e").unwrap().len(), 0);
    }

    #[test]
    fn shortlex_enumeration() {
        assert_eq!(reduced_words(0).len(), 1);
        assert_eq!(reduced_words(3).len(), 12);
        let two: Vec<String> = reduced_words(2).iter().map(|w| w.to_string()).collect();
        assert_eq!(two, ["by", "br", "yb", "yr", "rb", "ry"]);
    }
}
