//! Exact arithmetic in Thompson's group F.
//!
//! Elements are handled through the infinite presentation
//! `<x_0, x_1, x_2, ... | x_j x_i = x_i x_{j+1} for i < j>` and stored in the
//! standard infinite normal form
//!
//! ```text
//! x_0^{r_0} x_1^{r_1} ... x_M^{r_M} x_M^{-s_M} ... x_1^{-s_1} x_0^{-s_0}
//! ```
//!
//! with exactly one of `r_M`, `s_M` nonzero and `r_i s_i > 0` implying
//! `r_{i+1} + s_{i+1} > 0`. Everything in this module is a pure function and
//! serves as the ground truth the automata are checked against.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::encoding::{encode, SymbolWord};

/// Largest radius accepted by the Cayley graph search.
pub const MAX_BFS_RADIUS: u32 = 10;

/// Largest exponent magnitude accepted by the text grammar.
pub const MAX_TOKEN_EXPONENT: i64 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("r and s must have the same length (got {r} and {s})")]
    LengthMismatch { r: usize, s: usize },
    #[error("exactly one of r_M, s_M must be nonzero (M = {top})")]
    TopBlock { top: usize },
    #[error("unreduced at index {index}: r_{index} s_{index} > 0 but x_{next} is absent", next = index + 1)]
    Unreduced { index: usize },
    #[error("BFS radius {0} exceeds the cap of {MAX_BFS_RADIUS}")]
    RadiusTooLarge(u32),
}

/// A signed generator `x_index^{±1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GeneratorLetter {
    pub index: u32,
    pub inverse: bool,
}

impl GeneratorLetter {
    pub const fn x(index: u32) -> Self {
        GeneratorLetter {
            index,
            inverse: false,
        }
    }

    pub const fn x_inv(index: u32) -> Self {
        GeneratorLetter {
            index,
            inverse: true,
        }
    }

    pub const fn inverted(self) -> Self {
        GeneratorLetter {
            index: self.index,
            inverse: !self.inverse,
        }
    }

    /// True for `x_0^{±1}` and `x_1^{±1}`.
    pub const fn is_finite_generator(self) -> bool {
        self.index <= 1
    }
}

impl fmt::Display for GeneratorLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}^{}", self.index, if self.inverse { -1 } else { 1 })
    }
}

/// The four letters of the finite generating set, in BFS expansion order.
pub const FINITE_GENERATORS: [GeneratorLetter; 4] = [
    GeneratorLetter::x(0),
    GeneratorLetter::x_inv(0),
    GeneratorLetter::x(1),
    GeneratorLetter::x_inv(1),
];

/// A finite word over the infinite generating set. The empty word is the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GeneratorWord(pub Vec<GeneratorLetter>);

impl GeneratorWord {
    pub fn new(letters: Vec<GeneratorLetter>) -> Self {
        GeneratorWord(letters)
    }

    pub fn letters(&self) -> &[GeneratorLetter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The formal inverse: reversed, every letter inverted.
    pub fn inverse(&self) -> Self {
        GeneratorWord(self.0.iter().rev().map(|g| g.inverted()).collect())
    }

    pub fn concat(&self, other: &GeneratorWord) -> Self {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&other.0);
        GeneratorWord(letters)
    }
}

impl From<Vec<GeneratorLetter>> for GeneratorWord {
    fn from(letters: Vec<GeneratorLetter>) -> Self {
        GeneratorWord(letters)
    }
}

impl fmt::Display for GeneratorWord {
    /// Runs of the same letter print as a single `x<i>^<e>` token.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        let mut first = true;
        let mut iter = self.0.iter().peekable();
        while let Some(&g) = iter.next() {
            let mut count: i64 = 1;
            while iter.peek() == Some(&&g) {
                iter.next();
                count += 1;
            }
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            let exp = if g.inverse { -count } else { count };
            write!(f, "x{}^{}", g.index, exp)?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("bad token `{token}` at offset {offset}: {reason}")]
pub struct ParseWordError {
    pub offset: usize,
    pub token: String,
    pub reason: &'static str,
}

impl FromStr for GeneratorWord {
    type Err = ParseWordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut letters = Vec::new();
        let mut offset = 0;
        for raw in s.split_inclusive(char::is_whitespace) {
            let token = raw.trim_end();
            let here = offset;
            offset += raw.len();
            if token.is_empty() {
                continue;
            }
            if token == "e" {
                continue;
            }
            let err = |reason| ParseWordError {
                offset: here,
                token: token.to_string(),
                reason,
            };
            let body = token
                .strip_prefix('x')
                .ok_or_else(|| err("expected `x<index>^<exponent>`"))?;
            let (index, exp) = match body.split_once('^') {
                Some((i, e)) => (i, e),
                None => (body, "1"),
            };
            if index.is_empty() || !index.bytes().all(|b| b.is_ascii_digit()) {
                return Err(err("index must be a non-negative integer"));
            }
            let index: u32 = index.parse().map_err(|_| err("index out of range"))?;
            let exp: i64 = exp
                .parse()
                .map_err(|_| err("exponent must be an integer"))?;
            if exp == 0 {
                return Err(err("exponent must be nonzero"));
            }
            if exp.abs() > MAX_TOKEN_EXPONENT {
                return Err(err("exponent too large"));
            }
            let letter = if exp > 0 {
                GeneratorLetter::x(index)
            } else {
                GeneratorLetter::x_inv(index)
            };
            letters.extend(std::iter::repeat_n(letter, exp.unsigned_abs() as usize));
        }
        Ok(GeneratorWord(letters))
    }
}

/// An element of F in dense normal form: `r` and `s` hold the exponents of
/// `x_0 .. x_M` in the positive and negative halves.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NormalForm {
    r: Vec<u32>,
    s: Vec<u32>,
}

impl NormalForm {
    pub fn identity() -> Self {
        NormalForm::default()
    }

    /// Validates both normal-form conditions.
    pub fn from_vectors(r: Vec<u32>, s: Vec<u32>) -> Result<Self, GroupError> {
        if r.len() != s.len() {
            return Err(GroupError::LengthMismatch {
                r: r.len(),
                s: s.len(),
            });
        }
        if let (Some(&rm), Some(&sm)) = (r.last(), s.last()) {
            if (rm == 0) == (sm == 0) {
                return Err(GroupError::TopBlock { top: r.len() - 1 });
            }
        }
        for i in 0..r.len().saturating_sub(1) {
            if r[i] > 0 && s[i] > 0 && r[i + 1] + s[i + 1] == 0 {
                return Err(GroupError::Unreduced { index: i });
            }
        }
        Ok(NormalForm { r, s })
    }

    pub fn r(&self) -> &[u32] {
        &self.r
    }

    pub fn s(&self) -> &[u32] {
        &self.s
    }

    pub fn is_identity(&self) -> bool {
        self.r.is_empty()
    }

    /// `M`, the largest index present; `None` for the identity.
    pub fn max_index(&self) -> Option<usize> {
        self.r.len().checked_sub(1)
    }

    /// Largest index with a positive exponent (`i_m`).
    pub fn top_positive_index(&self) -> Option<usize> {
        self.r.iter().rposition(|&e| e > 0)
    }

    /// Largest index with a negative exponent (`j_n`).
    pub fn top_negative_index(&self) -> Option<usize> {
        self.s.iter().rposition(|&e| e > 0)
    }

    /// Sum of all exponent magnitudes.
    pub fn exponent_sum(&self) -> u64 {
        self.r.iter().chain(&self.s).map(|&e| e as u64).sum()
    }

    /// Sparse `(index, exponent)` view of the positive half, ascending.
    pub fn positive_terms(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.r
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| (i, e))
    }

    /// Sparse `(index, exponent)` view of the negative half, ascending by index.
    pub fn negative_terms(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.s
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| (i, e))
    }

    pub fn to_word(&self) -> GeneratorWord {
        nf_to_word(self)
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&nf_to_word(self), f)
    }
}

impl FromStr for NormalForm {
    type Err = ParseWordError;

    /// Parses any generator word and reduces it.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(reduce(&s.parse()?))
    }
}

/// Semi-normal form `P N^{-1}` with both halves sorted, condition 3 not yet enforced.
#[derive(Clone, Debug, Default)]
struct SemiNormal {
    pos: BTreeMap<u32, u32>,
    neg: BTreeMap<u32, u32>,
}

impl SemiNormal {
    fn from_normal_form(nf: &NormalForm) -> Self {
        let collect = |v: &[u32]| {
            v.iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| (i as u32, e))
                .collect::<BTreeMap<_, _>>()
        };
        SemiNormal {
            pos: collect(&nf.r),
            neg: collect(&nf.s),
        }
    }

    /// Right-multiplies by one letter, keeping both halves sorted.
    fn push(&mut self, g: GeneratorLetter) {
        if g.inverse {
            self.push_negative(g.index);
        } else {
            self.push_positive(g.index);
        }
    }

    // x_q^{-1} x_k^{-1} = x_{k+1}^{-1} x_q^{-1} for q < k: the new letter moves
    // left past every smaller negative index, gaining one per letter passed.
    fn push_negative(&mut self, mut k: u32) {
        for (&q, &count) in &self.neg {
            if q < k {
                k += count;
            } else {
                break;
            }
        }
        *self.neg.entry(k).or_insert(0) += 1;
    }

    // Travelling left through N^{-1}:
    //   x_q^{-1} x_k = x_{k+1} x_q^{-1}   (q < k)
    //   x_q^{-1} x_q = 1
    //   x_q^{-1} x_k = x_k x_{q+1}^{-1}   (q > k)
    // then into P via x_p x_k = x_k x_{p+1} for p > k.
    fn push_positive(&mut self, mut k: u32) {
        let mut shift_from = None;
        let mut cancelled = false;
        for (&q, &count) in &self.neg {
            if q < k {
                k += count;
            } else if q == k {
                cancelled = true;
                break;
            } else {
                shift_from = Some(q);
                break;
            }
        }
        if cancelled {
            let e = self.neg.get_mut(&k).expect("present");
            *e -= 1;
            if *e == 0 {
                self.neg.remove(&k);
            }
            return;
        }
        if let Some(q) = shift_from {
            self.neg = shift_keys(std::mem::take(&mut self.neg), |i| {
                if i >= q {
                    i + 1
                } else {
                    i
                }
            });
        }
        self.pos = shift_keys(
            std::mem::take(&mut self.pos),
            |i| if i > k { i + 1 } else { i },
        );
        *self.pos.entry(k).or_insert(0) += 1;
    }

    /// Largest index violating condition 3, if any.
    fn violation(&self) -> Option<u32> {
        self.pos.keys().rev().copied().find(|i| {
            self.neg.contains_key(i)
                && !self.pos.contains_key(&(i + 1))
                && !self.neg.contains_key(&(i + 1))
        })
    }

    // x_i y x_i^{-1} = y' where every index of y is >= i + 2 and drops by one.
    fn normalise(&mut self) {
        while let Some(i) = self.violation() {
            for half in [&mut self.pos, &mut self.neg] {
                let e = half.get_mut(&i).expect("present");
                *e -= 1;
                if *e == 0 {
                    half.remove(&i);
                }
                *half = shift_keys(std::mem::take(half), |j| if j > i { j - 1 } else { j });
            }
        }
    }

    fn into_normal_form(mut self) -> NormalForm {
        self.normalise();
        let top = self.pos.keys().chain(self.neg.keys()).max().copied();
        let Some(top) = top else {
            return NormalForm::identity();
        };
        let len = top as usize + 1;
        let mut r = vec![0; len];
        let mut s = vec![0; len];
        for (&i, &e) in &self.pos {
            r[i as usize] = e;
        }
        for (&i, &e) in &self.neg {
            s[i as usize] = e;
        }
        debug_assert!(NormalForm::from_vectors(r.clone(), s.clone()).is_ok());
        NormalForm { r, s }
    }
}

fn shift_keys(map: BTreeMap<u32, u32>, f: impl Fn(u32) -> u32) -> BTreeMap<u32, u32> {
    map.into_iter().map(|(k, v)| (f(k), v)).collect()
}

/// The unique normal form equal to `w` in F.
pub fn reduce(w: &GeneratorWord) -> NormalForm {
    let mut semi = SemiNormal::default();
    for &g in &w.0 {
        semi.push(g);
    }
    semi.into_normal_form()
}

/// `x_0^{r_0} ... x_M^{r_M} x_M^{-s_M} ... x_0^{-s_0}` with zero blocks dropped.
pub fn nf_to_word(nf: &NormalForm) -> GeneratorWord {
    let mut letters = Vec::with_capacity(nf.exponent_sum() as usize);
    for (i, &e) in nf.r.iter().enumerate() {
        letters.extend(std::iter::repeat_n(
            GeneratorLetter::x(i as u32),
            e as usize,
        ));
    }
    for (i, &e) in nf.s.iter().enumerate().rev() {
        letters.extend(std::iter::repeat_n(
            GeneratorLetter::x_inv(i as u32),
            e as usize,
        ));
    }
    GeneratorWord(letters)
}

/// Right multiplication `nf · g`.
pub fn multiply(nf: &NormalForm, g: GeneratorLetter) -> NormalForm {
    let mut semi = SemiNormal::from_normal_form(nf);
    semi.push(g);
    semi.into_normal_form()
}

/// Right multiplication by a whole word.
pub fn multiply_word(nf: &NormalForm, w: &GeneratorWord) -> NormalForm {
    let mut semi = SemiNormal::from_normal_form(nf);
    for &g in &w.0 {
        semi.push(g);
    }
    semi.into_normal_form()
}

pub fn invert(nf: &NormalForm) -> NormalForm {
    reduce(&nf_to_word(nf).inverse())
}

/// Burillo's `D = Σe + Σf + i_m + j_n`. A missing half contributes index 0.
pub fn burillo_d(nf: &NormalForm) -> u64 {
    nf.exponent_sum()
        + nf.top_positive_index().unwrap_or(0) as u64
        + nf.top_negative_index().unwrap_or(0) as u64
}

/// The ball of a given radius in the Cayley graph of F on `{x_0^{±1}, x_1^{±1}}`,
/// with the word length of every element in it.
#[derive(Clone, Debug)]
pub struct CayleyBall {
    radius: u32,
    elements: Vec<NormalForm>,
    lengths: Vec<u32>,
    index: HashMap<SymbolWord, usize>,
}

impl CayleyBall {
    pub fn new(radius: u32) -> Result<Self, GroupError> {
        if radius > MAX_BFS_RADIUS {
            return Err(GroupError::RadiusTooLarge(radius));
        }
        let mut ball = CayleyBall {
            radius,
            elements: Vec::new(),
            lengths: Vec::new(),
            index: HashMap::new(),
        };
        let mut queue = VecDeque::new();
        ball.insert(NormalForm::identity(), 0);
        queue.push_back(0usize);
        while let Some(at) = queue.pop_front() {
            let dist = ball.lengths[at];
            if dist == radius {
                continue;
            }
            for g in FINITE_GENERATORS {
                let next = multiply(&ball.elements[at], g);
                if let Some(slot) = ball.insert(next, dist + 1) {
                    queue.push_back(slot);
                }
            }
        }
        Ok(ball)
    }

    fn insert(&mut self, nf: NormalForm, dist: u32) -> Option<usize> {
        let key = encode(&nf);
        if self.index.contains_key(&key) {
            return None;
        }
        let slot = self.elements.len();
        self.index.insert(key, slot);
        self.elements.push(nf);
        self.lengths.push(dist);
        Some(slot)
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Elements with their word lengths, in BFS order.
    pub fn iter(&self) -> impl Iterator<Item = (&NormalForm, u32)> {
        self.elements.iter().zip(self.lengths.iter().copied())
    }

    pub fn elements(&self) -> &[NormalForm] {
        &self.elements
    }

    pub fn length_of(&self, nf: &NormalForm) -> Option<u32> {
        self.index.get(&encode(nf)).map(|&i| self.lengths[i])
    }
}

/// Word length of `nf` over `{x_0^{±1}, x_1^{±1}}` if it is at most `radius`.
pub fn geodesic_length_bfs(nf: &NormalForm, radius: u32) -> Result<Option<u32>, GroupError> {
    Ok(CayleyBall::new(radius)?.length_of(nf))
}
