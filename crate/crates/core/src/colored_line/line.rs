//! The colored line and the marked-point registry defining `f`.
//!
//! Edge `k` joins vertices `k` and `k + 1`. The line starts as a seeded Markov
//! coloring around the origin. Each registered word `w` of length `l` gets a
//! block appended beyond the current frontier, alternately on the right and on
//! the left:
//!
//! ```text
//! lead | w̃ w w̃ | j | w̃ w w̃ | j | … | w̃ w w̃ | trail      (l + 1 copies)
//! ```
//!
//! Filler and junction edges are Markov draws constrained by their neighbours.
//! `x_i` is the vertex between the first `w̃` and `w` of copy `i`, and `f` is 1
//! exactly at the vertices `x_i + i`.

use super::{reduced_words, Color, Word};
use crate::action::Action;
use crate::error::{config, invariant, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;
use std::fmt::Write as _;

#[derive(Debug, Clone)]
struct BlockLayout {
    word: Vec<Color>,
    tilde: Vec<Color>,
    lead: Vec<Color>,
    junctions: Vec<Color>,
    trail: Vec<Color>,
}

impl BlockLayout {
    fn l(&self) -> usize {
        self.word.len()
    }

    fn copy_len(&self) -> usize {
        11 * self.l()
    }

    fn period(&self) -> usize {
        self.copy_len() + 1
    }

    fn copies_len(&self) -> usize {
        (self.l() + 1) * self.copy_len() + self.l()
    }

    fn len(&self) -> usize {
        self.lead.len() + self.copies_len() + self.trail.len()
    }

    fn color(&self, o: usize) -> Color {
        let lead = self.lead.len();
        if o < lead {
            return self.lead[o];
        }
        let o = o - lead;
        if o < self.copies_len() {
            let (i, r) = (o / self.period(), o % self.period());
            let l = self.l();
            if r < 5 * l {
                self.tilde[r]
            } else if r < 6 * l {
                self.word[r - 5 * l]
            } else if r < 11 * l {
                self.tilde[r - 6 * l]
            } else {
                self.junctions[i]
            }
        } else {
            self.trail[o - self.copies_len()]
        }
    }

    /// Whether the vertex at offset `o` (left end of edge `o`) carries a mark.
    fn is_mark(&self, o: usize) -> bool {
        let lead = self.lead.len();
        if o < lead {
            return false;
        }
        let o = o - lead;
        let (i, r) = (o / self.period(), o % self.period());
        i <= self.l() && r == 5 * self.l() + i
    }
}

#[derive(Debug, Clone)]
enum Body {
    Free(Vec<Color>),
    Block(Box<BlockLayout>),
}

#[derive(Debug, Clone)]
struct Segment {
    start: i64,
    body: Body,
}

impl Segment {
    fn color(&self, o: usize) -> Color {
        match &self.body {
            Body::Free(v) => v[o],
            Body::Block(b) => b.color(o),
        }
    }
}

fn other_than(a: Color, rng: &mut ChaCha8Rng) -> Color {
    let r = rng.gen_range(0..2usize);
    Color::ALL.into_iter().filter(|&c| c != a).nth(r).unwrap()
}

/// An edge coloring of a finite window `[left_end, right_end)` of Z,
/// extended only by appending beyond either end.
#[derive(Debug, Clone)]
pub struct ColoredLine {
    seed: u64,
    right: Vec<Segment>,
    left: Vec<Segment>,
    right_end: i64,
    left_end: i64,
    right_rng: ChaCha8Rng,
    left_rng: ChaCha8Rng,
}

impl ColoredLine {
    /// A Markov coloring of edges `[-core, core)`.
    pub fn new(seed: u64, core: usize) -> Self {
        let mut right_rng = ChaCha8Rng::seed_from_u64(seed);
        right_rng.set_stream(0);
        let mut left_rng = ChaCha8Rng::seed_from_u64(seed);
        left_rng.set_stream(1);
        let first = Color::from_index(right_rng.gen_range(0..3usize));
        let mut line = Self {
            seed,
            right: vec![Segment { start: 0, body: Body::Free(vec![first]) }],
            left: Vec::new(),
            right_end: 1,
            left_end: 0,
            right_rng,
            left_rng,
        };
        line.extend_right(core.max(1) - 1);
        line.extend_left(core);
        line
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Colored edges are `[left_end, right_end)`.
    pub fn edge_range(&self) -> (i64, i64) {
        (self.left_end, self.right_end)
    }

    /// Vertices whose two incident edges are both colored.
    pub fn vertex_range(&self) -> (i64, i64) {
        (self.left_end + 1, self.right_end - 1)
    }

    #[inline]
    pub fn color_at(&self, edge: i64) -> Option<Color> {
        if edge >= self.right_end || edge < self.left_end {
            return None;
        }
        let segs = if edge >= 0 { &self.right } else { &self.left };
        let i = if edge >= 0 {
            segs.partition_point(|s| s.start <= edge) - 1
        } else {
            segs.partition_point(|s| s.start > edge)
        };
        let s = &segs[i];
        Some(s.color((edge - s.start) as usize))
    }

    /// Same as [`color_at`](Self::color_at), extending the Markov coloring when needed.
    pub fn color_at_extend(&mut self, edge: i64) -> Color {
        if edge >= self.right_end {
            self.extend_right((edge - self.right_end + 1) as usize);
        } else if edge < self.left_end {
            self.extend_left((self.left_end - edge) as usize);
        }
        self.color_at(edge).unwrap()
    }

    fn rightmost(&self) -> Color {
        self.color_at(self.right_end - 1).unwrap()
    }

    fn leftmost(&self) -> Option<Color> {
        self.color_at(self.left_end)
    }

    pub fn extend_right(&mut self, k: usize) {
        if k == 0 {
            return;
        }
        let mut prev = self.rightmost();
        let colors: Vec<Color> = (0..k)
            .map(|_| {
                prev = other_than(prev, &mut self.right_rng);
                prev
            })
            .collect();
        self.right.push(Segment { start: self.right_end, body: Body::Free(colors) });
        self.right_end += k as i64;
    }

    pub fn extend_left(&mut self, k: usize) {
        if k == 0 {
            return;
        }
        let mut prev = self.leftmost().unwrap_or_else(|| self.color_at(0).unwrap());
        let mut colors: Vec<Color> = (0..k)
            .map(|_| {
                prev = other_than(prev, &mut self.left_rng);
                prev
            })
            .collect();
        colors.reverse();
        self.left_end -= k as i64;
        self.left.push(Segment { start: self.left_end, body: Body::Free(colors) });
    }

    /// Appends the block for `word` on one side; returns its first edge.
    fn plant(&mut self, word: &[Color], tilde: &[Color], on_right: bool) -> i64 {
        let l = word.len();
        let filler = l.max(1);
        let mut pattern: Vec<Option<Color>> = vec![None; filler];
        for i in 0..=l {
            pattern.extend(tilde.iter().chain(word).chain(tilde).map(|&c| Some(c)));
            if i < l {
                pattern.push(None);
            }
        }
        pattern.extend(std::iter::repeat_n(None, filler));
        let n = pattern.len();
        let outer_left = if on_right { Some(self.rightmost()) } else { None };
        let outer_right = if on_right { None } else { self.leftmost() };
        let rng = if on_right { &mut self.right_rng } else { &mut self.left_rng };
        let mut filled: Vec<Color> = Vec::with_capacity(n);
        for i in 0..n {
            let c = match pattern[i] {
                Some(c) => c,
                None => {
                    let left = if i == 0 { outer_left } else { Some(filled[i - 1]) };
                    let right = if i + 1 < n { pattern[i + 1] } else { outer_right };
                    let allowed: Vec<Color> =
                        Color::ALL.into_iter().filter(|&c| Some(c) != left && Some(c) != right).collect();
                    allowed[rng.gen_range(0..allowed.len())]
                }
            };
            filled.push(c);
        }
        let mut junctions = Vec::with_capacity(l);
        let period = 11 * l + 1;
        for i in 0..l {
            junctions.push(filled[filler + i * period + 11 * l]);
        }
        let layout = BlockLayout {
            word: word.to_vec(),
            tilde: tilde.to_vec(),
            lead: filled[..filler].to_vec(),
            junctions,
            trail: filled[n - filler..].to_vec(),
        };
        debug_assert_eq!(layout.len(), n);
        let seg;
        if on_right {
            seg = Segment { start: self.right_end, body: Body::Block(Box::new(layout)) };
            self.right_end += n as i64;
            let start = seg.start;
            self.right.push(seg);
            start
        } else {
            self.left_end -= n as i64;
            seg = Segment { start: self.left_end, body: Body::Block(Box::new(layout)) };
            let start = seg.start;
            self.left.push(seg);
            start
        }
    }

    /// `f(y)`; `None` outside the colored window.
    #[inline]
    pub fn is_marked(&self, y: i64) -> Option<bool> {
        if y < self.left_end || y > self.right_end {
            return None;
        }
        if y == self.right_end {
            return Some(false);
        }
        let segs = if y >= 0 { &self.right } else { &self.left };
        let i = if y >= 0 { segs.partition_point(|s| s.start <= y) - 1 } else { segs.partition_point(|s| s.start > y) };
        let s = &segs[i];
        Some(match &s.body {
            Body::Free(_) => false,
            Body::Block(b) => b.is_mark((y - s.start) as usize),
        })
    }

    /// Image of vertex `x` under the involution of color `c`.
    #[inline]
    pub fn switch(&self, c: Color, x: i64) -> Result<i64> {
        let left = self.color_at(x - 1);
        let right = self.color_at(x);
        match (left, right) {
            (Some(a), _) if a == c => Ok(x - 1),
            (_, Some(b)) if b == c => Ok(x + 1),
            (Some(_), Some(_)) => Ok(x),
            _ => Err(config(format!("vertex {x} is outside the colored window {:?}", self.edge_range()))),
        }
    }

    /// Segment count, for diagnostics.
    pub fn num_segments(&self) -> usize {
        self.left.len() + self.right.len()
    }

    fn block_segments(&self) -> impl Iterator<Item = (i64, &BlockLayout)> {
        self.left.iter().chain(&self.right).filter_map(|s| match &s.body {
            Body::Block(b) => Some((s.start, &**b)),
            Body::Free(_) => None,
        })
    }
}

/// The auxiliary word: shortlex-first proper word of length `5l` that keeps `w̃ w w̃` proper.
pub fn tilde_word(word: &[Color]) -> Vec<Color> {
    let l = word.len();
    if l == 0 {
        return Vec::new();
    }
    let first = word[0];
    let last = word[l - 1];
    let n = 5 * l;
    let mut out: Vec<Color> = Vec::with_capacity(n);
    for i in 0..n {
        let c = Color::ALL
            .into_iter()
            .find(|&c| {
                let prev = if i == 0 { last } else { out[i - 1] };
                c != prev && (i + 1 < n || c != first)
            })
            .unwrap();
        out.push(c);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkEntry {
    pub word: Word,
    pub tilde: Vec<Color>,
    /// `I_w` as a vertex interval, nested in registration order.
    pub interval: (i64, i64),
    /// `x_0(w), …, x_l(w)`.
    pub anchors: Vec<i64>,
    pub on_right: bool,
}

impl MarkEntry {
    pub fn marks(&self) -> impl Iterator<Item = i64> + '_ {
        self.anchors.iter().enumerate().map(|(i, x)| x + i as i64)
    }
}

/// Registered words with their blocks; the configuration `f` is read off the line.
#[derive(Debug, Clone)]
pub struct MarkRegistry {
    line: ColoredLine,
    entries: Vec<MarkEntry>,
    index: FxHashMap<Vec<Color>, usize>,
    next_right: bool,
}

pub const DEFAULT_CORE: usize = 64;

impl MarkRegistry {
    pub fn new(seed: u64) -> Self {
        Self::with_core(seed, DEFAULT_CORE)
    }

    pub fn with_core(seed: u64, core: usize) -> Self {
        Self { line: ColoredLine::new(seed, core), entries: Vec::new(), index: FxHashMap::default(), next_right: true }
    }

    pub fn line(&self) -> &ColoredLine {
        &self.line
    }

    pub fn entries(&self) -> &[MarkEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entry(&self, w: &Word) -> Option<&MarkEntry> {
        self.index.get(&w.to_vec()).map(|&i| &self.entries[i])
    }

    pub fn frontier(&self) -> (i64, i64) {
        self.line.vertex_range()
    }

    /// Registers one word (no-op when already present) and returns its entry index.
    pub fn register_word(&mut self, w: &Word) -> usize {
        let key = w.to_vec();
        if let Some(&i) = self.index.get(&key) {
            return i;
        }
        let tilde = tilde_word(&key);
        let on_right = self.next_right;
        self.next_right = !self.next_right;
        let start = self.line.plant(&key, &tilde, on_right);
        let l = key.len();
        let filler = l.max(1) as i64;
        let period = (11 * l + 1) as i64;
        let anchors = (0..=l as i64).map(|i| start + filler + i * period + 5 * l as i64).collect();
        let (lo, hi) = self.line.edge_range();
        self.entries.push(MarkEntry { word: w.clone(), tilde, interval: (lo, hi), anchors, on_right });
        self.index.insert(key, self.entries.len() - 1);
        self.entries.len() - 1
    }

    /// Registers the given words in shortlex order.
    pub fn register<'a>(&mut self, words: impl IntoIterator<Item = &'a Word>) {
        let mut ws: Vec<&Word> = words.into_iter().collect();
        ws.sort_by_cached_key(|w| w.shortlex_key());
        ws.dedup();
        for w in ws {
            self.register_word(w);
        }
    }

    /// Registers the first `count` reduced words in shortlex order.
    pub fn build_up_to(&mut self, count: usize) {
        let mut len = 0;
        while self.len() < count {
            for w in reduced_words(len) {
                if self.len() >= count {
                    break;
                }
                self.register_word(&w);
            }
            len += 1;
        }
    }

    /// Extends the Markov coloring by `k` edges on both sides.
    pub fn extend_margin(&mut self, k: usize) {
        self.line.extend_right(k);
        self.line.extend_left(k);
    }

    pub fn eval_f(&self, y: i64) -> Result<bool> {
        self.line
            .is_marked(y)
            .ok_or_else(|| config(format!("f({y}) requested outside the frontier {:?}", self.frontier())))
    }

    /// Checks properness, the copy layout, nesting and disjointness of marks.
    pub fn audit(&self) -> Result<()> {
        let (lo, hi) = self.line.edge_range();
        let mut prev = self.line.color_at(lo).unwrap();
        for e in lo + 1..hi {
            let c = self.line.color_at(e).unwrap();
            if c == prev {
                return Err(invariant(format!("edges {} and {e} share a color", e - 1)));
            }
            prev = c;
        }
        let mut last: Option<(i64, i64)> = None;
        let mut seen = rustc_hash::FxHashSet::default();
        for e in &self.entries {
            let l = e.word.len();
            if let Some((a, b)) = last {
                if !(e.interval.0 <= a && b <= e.interval.1) {
                    return Err(invariant("mark intervals are not nested"));
                }
            }
            last = Some(e.interval);
            let expect: Vec<Color> = e.tilde.iter().chain(&e.word.to_vec()).chain(&e.tilde).copied().collect();
            for (i, &x) in e.anchors.iter().enumerate() {
                let start = x - 5 * l as i64;
                let read: Vec<Color> = (0..11 * l as i64).map(|k| self.line.color_at(start + k).unwrap()).collect();
                if read != expect {
                    return Err(invariant(format!("copy {i} of {} is not w̃ww̃", e.word)));
                }
                let mark = x + i as i64;
                if !self.eval_f(mark)? {
                    return Err(invariant(format!("missing mark at {mark}")));
                }
                if !seen.insert(mark) {
                    return Err(invariant(format!("mark {mark} shared between words")));
                }
            }
        }
        let total: usize = self.line.block_segments().map(|(_, b)| b.l() + 1).sum();
        if total != seen.len() {
            return Err(invariant("block marks and registered marks disagree"));
        }
        Ok(())
    }

    /// Text table of registered words, intervals and marks.
    pub fn dump(&self) -> String {
        let mut out = String::from("word\tinterval\tanchors\tmarks\n");
        for e in &self.entries {
            let anchors: Vec<String> = e.anchors.iter().map(|x| x.to_string()).collect();
            let marks: Vec<String> = e.marks().map(|x| x.to_string()).collect();
            let _ = writeln!(
                out,
                "{}\t[{}, {}]\t{}\t{}",
                e.word,
                e.interval.0,
                e.interval.1,
                anchors.join(","),
                marks.join(",")
            );
        }
        out
    }
}

/// The free product acting on the vertices of a colored line.
#[derive(Debug, Clone, Copy)]
pub struct ColoredLineAction<'a> {
    line: &'a ColoredLine,
}

impl<'a> ColoredLineAction<'a> {
    pub fn new(line: &'a ColoredLine) -> Self {
        Self { line }
    }
}

impl Action for ColoredLineAction<'_> {
    type Point = i64;
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

    #[inline]
    fn apply_generator(&self, s: usize, x: &i64) -> Result<i64> {
        self.line.switch(Color::from_index(s), *x)
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

    fn apply(&self, w: &Word, x: &i64) -> Result<i64> {
        let mut y = *x;
        for c in w.letters().rev() {
            y = self.line.switch(c, y)?;
        }
        Ok(y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schreier::schreier_ball;

    #[test]
    fn coloring_is_proper_and_deterministic() {
        let mut a = ColoredLine::new(7, 32);
        let mut b = ColoredLine::new(7, 32);
        for e in -500..500 {
            assert_eq!(a.color_at_extend(e), b.color_at_extend(e));
        }
        for e in -500..499 {
            assert_ne!(a.color_at(e), a.color_at(e + 1));
        }
    }

    #[test]
    fn pair_frequencies() {
        let mut line = ColoredLine::new(3, 16);
        line.extend_right(100_000);
        let mut counts = [[0u32; 3]; 3];
        for e in 0..100_000 {
            let (a, b) = (line.color_at(e).unwrap(), line.color_at(e + 1).unwrap());
            counts[a.index()][b.index()] += 1;
        }
        for (i, row) in counts.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                let f = c as f64 / 100_000.0;
                if i == j {
                    assert_eq!(c, 0);
                } else {
                    assert!((0.14..=0.19).contains(&f), "{i}{j}: {f}");
                }
            }
        }
    }

    #[test]
    fn involutions_and_line_orbit() {
        let mut line = ColoredLine::new(11, 32);
        line.extend_right(10);
        let act = ColoredLineAction::new(&line);
        for x in -20..20 {
            for s in 0..3 {
                let y = act.apply_generator(s, &x).unwrap();
                assert_eq!(act.apply_generator(s, &y).unwrap(), x);
                assert!((y - x).abs() <= 1);
            }
        }
        let ball = schreier_ball(&act, &0, 10).unwrap();
        let mut v = ball.vertices.clone();
        v.sort();
        assert_eq!(v, (-10..=10).collect::<Vec<_>>());
    }

    #[test]
    fn tilde_keeps_copies_proper() {
        for l in 1..6 {
            for w in reduced_words(l) {
                let t = tilde_word(&w.to_vec());
                assert_eq!(t.len(), 5 * l);
                let all: Vec<Color> = t.iter().chain(&w.to_vec()).chain(&t).copied().collect();
                assert!(all.windows(2).all(|p| p[0] != p[1]));
            }
        }
    }

    #[test]
    fn registry_audit_first_words() {
        let mut reg = MarkRegistry::new(5);
        reg.build_up_to(20);
        assert_eq!(reg.len(), 20);
        reg.audit().unwrap();
        let (lo, hi) = reg.frontier();
        let total: usize = (lo..=hi).filter(|&y| reg.eval_f(y).unwrap()).count();
        let expected: usize = reg.entries().iter().map(|e| e.word.len() + 1).sum();
        assert_eq!(total, expected);
        assert!(reg.eval_f(hi + 5).is_err());
        assert!(reg.dump().lines().count() == 21);
    }

    #[test]
    fn anchors_read_the_word() {
        let mut reg = MarkRegistry::new(9);
        let w = Word::parse("byrb").unwrap();
        reg.register([&w]);
        reg.extend_margin(20);
        let act = ColoredLineAction::new(reg.line());
        let e = reg.entry(&w).unwrap();
        for &x in &e.anchors {
            // w^-1 x = x + |w|
            assert_eq!(act.apply(&w.inverse(), &x).unwrap(), x + 4);
        }
    }

    #[test]
    fn unmarked_core() {
        let reg = MarkRegistry::new(1);
        let (lo, hi) = reg.frontier();
        assert!((lo..=hi).all(|y| !reg.eval_f(y).unwrap()));
    }
}
