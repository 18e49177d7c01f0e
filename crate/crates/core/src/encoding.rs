//! The normal-form language over the symbol alphabet `{a, b, #}` and convolution.
//!
//! A normal form with exponent vectors `r`, `s` is written
//! `a^{r_0} b^{s_0} # a^{r_1} b^{s_1} # ... # a^{r_M} b^{s_M}`; the identity is
//! the empty word.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::group::NormalForm;

/// A letter of the symbol alphabet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sym {
    A,
    B,
    Hash,
}

impl Sym {
    pub const ALL: [Sym; 3] = [Sym::A, Sym::B, Sym::Hash];

    pub fn as_char(self) -> char {
        match self {
            Sym::A => 'a',
            Sym::B => 'b',
            Sym::Hash => '#',
        }
    }

    pub fn from_char(c: char) -> Option<Sym> {
        match c {
            'a' => Some(Sym::A),
            'b' => Some(Sym::B),
            '#' => Some(Sym::Hash),
            _ => None,
        }
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymbolParseError {
    #[error("symbol `{found}` at offset {offset} is not one of a, b, #")]
    BadSymbol { offset: usize, found: char },
    #[error("expected a single symbol, got `{0}`")]
    NotASymbol(String),
}

impl FromStr for Sym {
    type Err = SymbolParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.chars();
        match (chars.next().and_then(Sym::from_char), chars.next()) {
            (Some(sym), None) => Ok(sym),
            _ => Err(SymbolParseError::NotASymbol(s.to_string())),
        }
    }
}

/// A word over `{a, b, #}`; membership in the normal-form language is checked separately.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolWord(pub Vec<Sym>);

impl SymbolWord {
    pub fn empty() -> Self {
        SymbolWord(Vec::new())
    }

    pub fn symbols(&self) -> &[Sym] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count(&self, sym: Sym) -> usize {
        self.0.iter().filter(|&&c| c == sym).count()
    }

    /// Every word of length at most `max_len`, shortest first, lexicographic within a length.
    pub fn all_up_to(max_len: usize) -> impl Iterator<Item = SymbolWord> {
        (0..=max_len).flat_map(|len| {
            let total = 3usize.pow(len as u32);
            (0..total).map(move |mut n| {
                let mut word = vec![Sym::A; len];
                for slot in word.iter_mut().rev() {
                    *slot = Sym::ALL[n % 3];
                    n /= 3;
                }
                SymbolWord(word)
            })
        })
    }
}

impl From<Vec<Sym>> for SymbolWord {
    fn from(v: Vec<Sym>) -> Self {
        SymbolWord(v)
    }
}

impl fmt::Display for SymbolWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|s| write!(f, "{s}"))
    }
}

impl FromStr for SymbolWord {
    type Err = SymbolParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.char_indices()
            .map(|(offset, c)| {
                Sym::from_char(c).ok_or(SymbolParseError::BadSymbol { offset, found: c })
            })
            .collect::<Result<Vec<_>, _>>()
            .map(SymbolWord)
    }
}

/// Why a word is not the encoding of a normal form.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinfViolation {
    #[error("block {block} contains the subword `ba`")]
    Misordered { block: usize },
    #[error("top block {top} is empty (trailing `#`)")]
    EmptyTopBlock { top: usize },
    #[error("top block {top} has both r_M and s_M nonzero")]
    MixedTopBlock { top: usize },
    #[error("r_{index} s_{index} > 0 but block {next} is empty", next = index + 1)]
    Unreduced { index: usize },
}

/// Splits a word into `(r_i, s_i)` blocks and checks the three normal-form conditions.
fn parse_blocks(w: &SymbolWord) -> Result<Vec<(u32, u32)>, LinfViolation> {
    if w.is_empty() {
        return Ok(Vec::new());
    }
    let mut blocks = vec![(0u32, 0u32)];
    for &sym in &w.0 {
        let block = blocks.len() - 1;
        let (r, s) = blocks.last_mut().expect("nonempty");
        match sym {
            Sym::A if *s > 0 => return Err(LinfViolation::Misordered { block }),
            Sym::A => *r += 1,
            Sym::B => *s += 1,
            Sym::Hash => blocks.push((0, 0)),
        }
    }
    let top = blocks.len() - 1;
    match blocks[top] {
        (0, 0) => return Err(LinfViolation::EmptyTopBlock { top }),
        (r, s) if r > 0 && s > 0 => return Err(LinfViolation::MixedTopBlock { top }),
        _ => {}
    }
    for (index, pair) in blocks.windows(2).enumerate() {
        let ((r, s), (rn, sn)) = (pair[0], pair[1]);
        if r > 0 && s > 0 && rn + sn == 0 {
            return Err(LinfViolation::Unreduced { index });
        }
    }
    Ok(blocks)
}

pub fn encode(nf: &NormalForm) -> SymbolWord {
    let mut out = Vec::with_capacity(nf.exponent_sum() as usize + nf.r().len());
    for (i, (&r, &s)) in nf.r().iter().zip(nf.s()).enumerate() {
        if i > 0 {
            out.push(Sym::Hash);
        }
        out.extend(std::iter::repeat_n(Sym::A, r as usize));
        out.extend(std::iter::repeat_n(Sym::B, s as usize));
    }
    SymbolWord(out)
}

pub fn decode(w: &SymbolWord) -> Result<NormalForm, LinfViolation> {
    let blocks = parse_blocks(w)?;
    let (r, s) = blocks.into_iter().unzip();
    Ok(NormalForm::from_vectors(r, s).expect("block conditions match normal-form conditions"))
}

pub fn is_linf_valid(w: &SymbolWord) -> bool {
    parse_blocks(w).is_ok()
}

/// One track of a convolution column: a symbol, or `None` for the padding `◇`.
pub type Padded = Option<Sym>;

fn padded_char(p: Padded) -> char {
    p.map_or('_', Sym::as_char)
}

fn padded_from_char(c: char) -> Option<Padded> {
    if c == '_' || c == '◇' {
        Some(None)
    } else {
        Sym::from_char(c).map(Some)
    }
}

/// A letter of the two-track padded alphabet; `(◇, ◇)` is excluded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pair {
    upper: Padded,
    lower: Padded,
}

impl Pair {
    pub fn new(upper: Padded, lower: Padded) -> Option<Pair> {
        (upper.is_some() || lower.is_some()).then_some(Pair { upper, lower })
    }

    pub fn upper(self) -> Padded {
        self.upper
    }

    pub fn lower(self) -> Padded {
        self.lower
    }

    pub fn swapped(self) -> Pair {
        Pair {
            upper: self.lower,
            lower: self.upper,
        }
    }

    /// All fifteen pair letters.
    pub fn all() -> impl Iterator<Item = Pair> {
        const PADDED: [Padded; 4] = [Some(Sym::A), Some(Sym::B), Some(Sym::Hash), None];
        PADDED
            .into_iter()
            .flat_map(|u| PADDED.into_iter().filter_map(move |l| Pair::new(u, l)))
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}|{})",
            padded_char(self.upper),
            padded_char(self.lower)
        )
    }
}

impl FromStr for Pair {
    type Err = ConvolutionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ConvolutionError::Syntax(s.to_string());
        let inner = s
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(bad)?;
        let (u, l) = inner.split_once('|').ok_or_else(bad)?;
        let one = |t: &str| {
            let mut cs = t.chars();
            match (cs.next().and_then(padded_from_char), cs.next()) {
                (Some(p), None) => Ok(p),
                _ => Err(bad()),
            }
        };
        Pair::new(one(u)?, one(l)?).ok_or(ConvolutionError::AllPadding { column: 0 })
    }
}

/// Convolution of two words as a sequence of pair letters.
pub fn convolve_pair(u: &SymbolWord, v: &SymbolWord) -> Vec<Pair> {
    let len = u.len().max(v.len());
    (0..len)
        .map(|i| Pair {
            upper: u.0.get(i).copied(),
            lower: v.0.get(i).copied(),
        })
        .collect()
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConvolutionError {
    #[error("column {column} is all padding")]
    AllPadding { column: usize },
    #[error("track {track} has a symbol after padding at column {column}")]
    InteriorPadding { track: usize, column: usize },
    #[error("column {column} has {found} entries, expected {expected}")]
    Arity {
        column: usize,
        found: usize,
        expected: usize,
    },
    #[error("cannot parse convolution `{0}`")]
    Syntax(String),
}

/// The padded column-wise interleaving of `k` words.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConvolvedWord {
    tracks: usize,
    columns: Vec<Vec<Padded>>,
}

impl ConvolvedWord {
    /// Validates the padding invariants: no all-`◇` column, padding only as a suffix.
    pub fn from_columns(
        tracks: usize,
        columns: Vec<Vec<Padded>>,
    ) -> Result<Self, ConvolutionError> {
        let mut ended = vec![false; tracks];
        for (column, col) in columns.iter().enumerate() {
            if col.len() != tracks {
                return Err(ConvolutionError::Arity {
                    column,
                    found: col.len(),
                    expected: tracks,
                });
            }
            if col.iter().all(Option::is_none) {
                return Err(ConvolutionError::AllPadding { column });
            }
            for (track, p) in col.iter().enumerate() {
                match (p, ended[track]) {
                    (Some(_), true) => {
                        return Err(ConvolutionError::InteriorPadding { track, column })
                    }
                    (None, _) => ended[track] = true,
                    _ => {}
                }
            }
        }
        Ok(ConvolvedWord { tracks, columns })
    }

    pub fn tracks(&self) -> usize {
        self.tracks
    }

    pub fn columns(&self) -> &[Vec<Padded>] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    /// The pair-letter view of a two-track convolution.
    pub fn to_pairs(&self) -> Option<Vec<Pair>> {
        (self.tracks == 2).then(|| {
            self.columns
                .iter()
                .map(|c| Pair {
                    upper: c[0],
                    lower: c[1],
                })
                .collect()
        })
    }

    pub fn from_pairs(pairs: &[Pair]) -> Result<Self, ConvolutionError> {
        Self::from_columns(2, pairs.iter().map(|p| vec![p.upper, p.lower]).collect())
    }

    /// One line per track, each padded with `_` to the common length.
    pub fn to_track_lines(&self) -> String {
        (0..self.tracks)
            .map(|t| {
                self.columns
                    .iter()
                    .map(|c| padded_char(c[t]))
                    .collect::<String>()
            })
            .collect::<Vec<_>>()
            .join("\n")
    }
}

pub fn convolve(words: &[SymbolWord]) -> ConvolvedWord {
    let len = words.iter().map(SymbolWord::len).max().unwrap_or(0);
    let columns = (0..len)
        .map(|i| words.iter().map(|w| w.0.get(i).copied()).collect())
        .collect();
    ConvolvedWord {
        tracks: words.len(),
        columns,
    }
}

pub fn deconvolve(c: &ConvolvedWord) -> Vec<SymbolWord> {
    (0..c.tracks)
        .map(|t| SymbolWord(c.columns.iter().filter_map(|col| col[t]).collect()))
        .collect()
}

impl fmt::Display for ConvolvedWord {
    /// Inline form: `(a|b)(_|b)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for col in &self.columns {
            let cells: Vec<String> = col.iter().map(|&p| padded_char(p).to_string()).collect();
            write!(f, "({})", cells.join("|"))?;
        }
        Ok(())
    }
}

impl FromStr for ConvolvedWord {
    type Err = ConvolutionError;

    /// Accepts the inline form or the one-line-per-track form. Empty text is
    /// the empty two-track convolution.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let text = s.trim();
        if text.is_empty() {
            return Ok(ConvolvedWord {
                tracks: 2,
                columns: Vec::new(),
            });
        }
        let syntax = || ConvolutionError::Syntax(s.to_string());
        let cell = |c: char| padded_from_char(c).ok_or_else(syntax);
        if text.starts_with('(') {
            let mut columns = Vec::new();
            let mut rest = text;
            while !rest.is_empty() {
                let inner = rest.strip_prefix('(').ok_or_else(syntax)?;
                let close = inner.find(')').ok_or_else(syntax)?;
                let col = inner[..close]
                    .split('|')
                    .map(|t| {
                        let mut cs = t.trim().chars();
                        match (cs.next(), cs.next()) {
                            (Some(c), None) => cell(c),
                            _ => Err(syntax()),
                        }
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                columns.push(col);
                rest = inner[close + 1..].trim_start();
            }
            let tracks = columns[0].len();
            return Self::from_columns(tracks, columns);
        }
        let lines: Vec<Vec<Padded>> = text
            .lines()
            .map(|l| l.trim().chars().map(cell).collect::<Result<Vec<_>, _>>())
            .collect::<Result<_, _>>()?;
        let len = lines[0].len();
        if lines.iter().any(|l| l.len() != len) {
            return Err(syntax());
        }
        let columns = (0..len)
            .map(|i| lines.iter().map(|l| l[i]).collect())
            .collect();
        Self::from_columns(lines.len(), columns)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sw(s: &str) -> SymbolWord {
        s.parse().unwrap()
    }

    fn nf(r: &[u32], s: &[u32]) -> NormalForm {
        NormalForm::from_vectors(r.to_vec(), s.to_vec()).unwrap()
    }

    fn sample_element() -> NormalForm {
        nf(&[0, 2, 0, 0, 3, 0, 0, 0, 0], &[0, 0, 0, 0, 2, 6, 0, 0, 1])
    }

    #[test]
    fn encode_examples() {
        assert_eq!(encode(&NormalForm::identity()), SymbolWord::empty());
        assert_eq!(
            encode(&sample_element()).to_string(),
            "#aa###aaabb#bbbbbb###b"
        );
        assert_eq!(encode(&nf(&[0], &[2])).to_string(), "bb");
    }

    #[test]
    fn decode_examples() {
        assert_eq!(
            decode(&sw("#aa###aaabb#bbbbbb###b")).unwrap(),
            sample_element()
        );
        assert_eq!(
            decode(&SymbolWord::empty()).unwrap(),
            NormalForm::identity()
        );
        assert_eq!(
            decode(&sw("ab")),
            Err(LinfViolation::MixedTopBlock { top: 0 })
        );
        assert_eq!(
            decode(&sw("a#")),
            Err(LinfViolation::EmptyTopBlock { top: 1 })
        );
        assert_eq!(
            decode(&sw("ba")),
            Err(LinfViolation::Misordered { block: 0 })
        );
        assert_eq!(
            decode(&sw("ab##a")),
            Err(LinfViolation::Unreduced { index: 0 })
        );
    }

    #[test]
    fn validity_examples() {
        assert!(is_linf_valid(&sw("aa")));
        assert!(!is_linf_valid(&sw("b#ab")));
        assert!(is_linf_valid(&sw("a#b")));
        assert!(is_linf_valid(&sw("ab#a")));
        assert!(!is_linf_valid(&sw("#")));
    }

    #[test]
    fn hash_count_is_max_index() {
        let e = sample_element();
        assert_eq!(encode(&e).count(Sym::Hash), e.max_index().unwrap());
    }

    #[test]
    fn convolve_examples() {
        let c = convolve(&[sw("aa"), sw("bbb"), sw("a")]);
        assert_eq!(c.to_string(), "(a|b|a)(a|b|_)(_|b|_)");
        assert_eq!(convolve(&[sw(""), sw("b")]).to_string(), "(_|b)");
        let c = convolve(&[sw("bb"), sw("bb###b")]);
        assert_eq!(c.to_string(), "(b|b)(b|b)(_|#)(_|#)(_|#)(_|b)");
        assert_eq!(c.to_track_lines(), "bb____\nbb###b");
    }

    #[test]
    fn deconvolve_examples() {
        let empty: ConvolvedWord = "".parse().unwrap();
        assert_eq!(
            deconvolve(&empty),
            vec![SymbolWord::empty(), SymbolWord::empty()]
        );
        let c: ConvolvedWord = "(a|b)(_|b)".parse().unwrap();
        assert_eq!(deconvolve(&c), vec![sw("a"), sw("bb")]);
        let two_line: ConvolvedWord = "a_\nbb".parse().unwrap();
        assert_eq!(two_line, c);
    }

    #[test]
    fn convolution_rejects_bad_padding() {
        assert_eq!(
            "(_|a)(a|b)".parse::<ConvolvedWord>(),
            Err(ConvolutionError::InteriorPadding {
                track: 0,
                column: 1
            })
        );
        assert_eq!(
            "(_|_)".parse::<ConvolvedWord>(),
            Err(ConvolutionError::AllPadding { column: 0 })
        );
        assert!("(a|b".parse::<ConvolvedWord>().is_err());
    }

    #[test]
    fn all_up_to_counts() {
        assert_eq!(SymbolWord::all_up_to(2).count(), 13);
        let valid: Vec<String> = SymbolWord::all_up_to(2)
            .filter(is_linf_valid)
            .map(|w| w.to_string())
            .collect();
        assert_eq!(valid, ["", "a", "b", "aa", "bb", "#a", "#b"]);
    }

    #[test]
    fn pair_letters() {
        assert_eq!(Pair::all().count(), 15);
        let p: Pair = "(_|#)".parse().unwrap();
        assert_eq!(p.to_string(), "(_|#)");
        assert!("(_|_)".parse::<Pair>().is_err());
    }
}
