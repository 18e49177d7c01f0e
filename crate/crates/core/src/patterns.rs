//! Regular pair languages of the form `⊗(z·x·w, z·y·w)`.
//!
//! `z` ranges over one regular language, `w` over another, and `x`, `y` are
//! fixed words. Such languages are regular; [`ShiftPattern::build`] produces
//! a deterministic automaton for one over the padded pair alphabet.
//!
//! The two regular languages are written in a small regex dialect over
//! `{a, b, #}`: literals, `.` for any letter, `[ab]` classes, grouping with
//! `( )`, alternation `|` and the postfix operators `*`, `+`, `?`. The empty
//! pattern denotes the empty word.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::automata::{AutomatonBuilder, AutomatonError, CounterAction, CounterAutomaton, Guard};
use crate::encoding::{Padded, Pair, Sym, SymbolWord};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PatternError {
    #[error("regex `{pattern}` at offset {offset}: {reason}")]
    Regex {
        pattern: String,
        offset: usize,
        reason: String,
    },
    #[error("fixed word `{0}` is not over {{a, b, #}}")]
    Literal(String),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
}

#[derive(Clone, Debug)]
enum Node {
    Empty,
    Class(Vec<Sym>),
    Concat(Vec<Node>),
    Alt(Vec<Node>),
    Star(Box<Node>),
}

struct RegexParser<'a> {
    src: &'a str,
    chars: Vec<char>,
    pos: usize,
}

impl<'a> RegexParser<'a> {
    fn error(&self, reason: &str) -> PatternError {
        PatternError::Regex {
            pattern: self.src.to_string(),
            offset: self.pos,
            reason: reason.to_string(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn alt(&mut self) -> Result<Node, PatternError> {
        let mut arms = vec![self.seq()?];
        while self.peek() == Some('|') {
            self.pos += 1;
            arms.push(self.seq()?);
        }
        Ok(if arms.len() == 1 {
            arms.pop().unwrap()
        } else {
            Node::Alt(arms)
        })
    }

    fn seq(&mut self) -> Result<Node, PatternError> {
        let mut items = Vec::new();
        while let Some(c) = self.peek() {
            if c == '|' || c == ')' {
                break;
            }
            let mut node = self.atom()?;
            while let Some(op) = self.peek() {
                node = match op {
                    '*' => Node::Star(Box::new(node)),
                    '+' => Node::Concat(vec![node.clone(), Node::Star(Box::new(node))]),
                    '?' => Node::Alt(vec![node, Node::Empty]),
                    _ => break,
                };
                self.pos += 1;
            }
            items.push(node);
        }
        Ok(match items.len() {
            0 => Node::Empty,
            1 => items.pop().unwrap(),
            _ => Node::Concat(items),
        })
    }

    fn atom(&mut self) -> Result<Node, PatternError> {
        let c = self.peek().ok_or_else(|| self.error("unexpected end"))?;
        self.pos += 1;
        match c {
            '.' => Ok(Node::Class(Sym::ALL.to_vec())),
            '(' => {
                let inner = self.alt()?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            '[' => {
                let mut class = Vec::new();
                loop {
                    match self.peek() {
                        Some(']') => break,
                        Some(c) => {
                            class
                                .push(Sym::from_char(c).ok_or_else(|| self.error("not a letter"))?);
                            self.pos += 1;
                        }
                        None => return Err(self.error("unclosed class")),
                    }
                }
                self.pos += 1;
                Ok(Node::Class(class))
            }
            c => Sym::from_char(c)
                .map(|s| Node::Class(vec![s]))
                .ok_or_else(|| {
                    self.pos -= 1;
                    self.error("unexpected character")
                }),
        }
    }
}

/// Compiles a regex to a deterministic finite state automaton over `{a,b,#}`.
pub fn compile_regex(pattern: &str) -> Result<CounterAutomaton<Sym>, PatternError> {
    let mut parser = RegexParser {
        src: pattern,
        chars: pattern.chars().collect(),
        pos: 0,
    };
    let node = parser.alt()?;
    if parser.pos != parser.chars.len() {
        return Err(parser.error("unbalanced `)`"));
    }
    let mut b = AutomatonBuilder::new(pattern);
    let mut fresh = 0usize;
    let mut new_state = |b: &mut AutomatonBuilder<Sym>| {
        fresh += 1;
        b.state(&format!("r{fresh}"))
    };
    let (start, end) = thompson(&node, &mut b, &mut new_state);
    b.start(start).accept(end);
    Ok(b.build()?.determinize()?.minimize()?.with_name(pattern))
}

fn thompson(
    node: &Node,
    b: &mut AutomatonBuilder<Sym>,
    fresh: &mut impl FnMut(&mut AutomatonBuilder<Sym>) -> usize,
) -> (usize, usize) {
    let eps = |b: &mut AutomatonBuilder<Sym>, from, to| {
        b.transition(from, None, Guard::Any, to, CounterAction::NONE);
    };
    match node {
        Node::Empty => {
            let s = fresh(b);
            (s, s)
        }
        Node::Class(syms) => {
            let (s, e) = (fresh(b), fresh(b));
            for &c in syms {
                b.edge(s, c, e);
            }
            (s, e)
        }
        Node::Concat(items) => {
            let s = fresh(b);
            let mut end = s;
            for item in items {
                let (is, ie) = thompson(item, b, fresh);
                eps(b, end, is);
                end = ie;
            }
            (s, end)
        }
        Node::Alt(arms) => {
            let (s, e) = (fresh(b), fresh(b));
            for arm in arms {
                let (is, ie) = thompson(arm, b, fresh);
                eps(b, s, is);
                eps(b, ie, e);
            }
            (s, e)
        }
        Node::Star(inner) => {
            let s = fresh(b);
            let (is, ie) = thompson(inner, b, fresh);
            eps(b, s, is);
            eps(b, ie, s);
            (s, s)
        }
    }
}

fn dfa_run(dfa: &CounterAutomaton<Sym>, word: &[Sym]) -> bool {
    dfa.accepts(word).unwrap_or(false)
}

/// The language `{⊗(z·upper·w, z·lower·w) : z ∈ prefix, w ∈ suffix}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftPattern {
    pub name: String,
    pub prefix: String,
    pub upper: String,
    pub lower: String,
    pub suffix: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Key {
    Prefix(usize),
    Shift(Cursor),
}

/// Where each track is within `x·w` / `y·w`, plus the letters of `w` the
/// leading track has read and the lagging one has not.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Cursor {
    pos: [usize; 2],
    buffer: VecDeque<Sym>,
    lead: usize,
    suffix_state: usize,
    ended: [bool; 2],
}

impl Cursor {
    fn advance(
        &mut self,
        track: usize,
        c: Padded,
        fixed: &[Vec<Sym>; 2],
        suffix: &CounterAutomaton<Sym>,
    ) -> bool {
        if self.ended[track] {
            return c.is_none();
        }
        let lagging = !self.buffer.is_empty() && self.lead != track;
        let Some(c) = c else {
            if self.pos[track] < fixed[track].len() || lagging {
                return false;
            }
            self.ended[track] = true;
            return true;
        };
        if self.pos[track] < fixed[track].len() {
            self.pos[track] += 1;
            return fixed[track][self.pos[track] - 1] == c;
        }
        if lagging {
            return self.buffer.pop_front() == Some(c);
        }
        if self.ended[1 - track] {
            return false;
        }
        match suffix.step(self.suffix_state, 0, c) {
            Ok(Some((q, _))) => {
                self.suffix_state = q;
                if self.buffer.is_empty() {
                    self.lead = track;
                }
                self.buffer.push_back(c);
                true
            }
            _ => false,
        }
    }

    fn is_final(&self, fixed: &[Vec<Sym>; 2], suffix: &CounterAutomaton<Sym>) -> bool {
        self.pos[0] == fixed[0].len()
            && self.pos[1] == fixed[1].len()
            && self.buffer.is_empty()
            && suffix.is_accepting(self.suffix_state)
    }
}

fn literal(word: &str) -> Result<Vec<Sym>, PatternError> {
    word.parse::<SymbolWord>()
        .map(|w| w.0)
        .map_err(|_| PatternError::Literal(word.to_string()))
}

impl ShiftPattern {
    pub fn new(name: &str, prefix: &str, upper: &str, lower: &str, suffix: &str) -> Self {
        ShiftPattern {
            name: name.to_string(),
            prefix: prefix.to_string(),
            upper: upper.to_string(),
            lower: lower.to_string(),
            suffix: suffix.to_string(),
        }
    }

    /// Deterministic, minimal automaton over the pair alphabet.
    pub fn build(&self) -> Result<CounterAutomaton<Pair>, PatternError> {
        let prefix = compile_regex(&self.prefix)?;
        let suffix = compile_regex(&self.suffix)?;
        let fixed = [literal(&self.upper)?, literal(&self.lower)?];
        let mut b = AutomatonBuilder::<Pair>::new(self.name.clone());
        let mut ids: HashMap<Key, usize> = HashMap::new();
        let mut queue = VecDeque::new();
        let mut intern = |b: &mut AutomatonBuilder<Pair>, queue: &mut VecDeque<Key>, key: Key| {
            let n = ids.len();
            *ids.entry(key.clone()).or_insert_with(|| {
                queue.push_back(key);
                b.state(&format!("n{n}"))
            })
        };
        let start = intern(&mut b, &mut queue, Key::Prefix(prefix.start()));
        b.start(start);
        let pairs = Pair::all().collect::<Vec<_>>();
        while let Some(key) = queue.pop_front() {
            let here = intern(&mut b, &mut queue, key.clone());
            match key {
                Key::Prefix(q) => {
                    for &c in &Sym::ALL {
                        if let Ok(Some((next, _))) = prefix.step(q, 0, c) {
                            let to = intern(&mut b, &mut queue, Key::Prefix(next));
                            b.edge(here, Pair::new(Some(c), Some(c)).unwrap(), to);
                        }
                    }
                    if prefix.is_accepting(q) {
                        let cursor = Cursor {
                            pos: [0, 0],
                            buffer: VecDeque::new(),
                            lead: 0,
                            suffix_state: suffix.start(),
                            ended: [false, false],
                        };
                        let to = intern(&mut b, &mut queue, Key::Shift(cursor));
                        b.transition(here, None, Guard::Any, to, CounterAction::NONE);
                    }
                }
                Key::Shift(cursor) => {
                    if cursor.is_final(&fixed, &suffix) {
                        b.accept(here);
                    }
                    for &pair in &pairs {
                        let mut next = cursor.clone();
                        if next.advance(0, pair.upper(), &fixed, &suffix)
                            && next.advance(1, pair.lower(), &fixed, &suffix)
                        {
                            let to = intern(&mut b, &mut queue, Key::Shift(next));
                            b.edge(here, pair, to);
                        }
                    }
                }
            }
        }
        Ok(b.build()?
            .determinize()?
            .minimize()?
            .with_name(self.name.clone()))
    }

    /// Direct membership test, trying every split point.
    pub fn matches(&self, u: &SymbolWord, v: &SymbolWord) -> Result<bool, PatternError> {
        Ok(self.matcher()?(u, v))
    }

    /// [`ShiftPattern::matches`] with the regular parts compiled once.
    pub fn matcher(&self) -> Result<impl Fn(&SymbolWord, &SymbolWord) -> bool, PatternError> {
        let prefix = compile_regex(&self.prefix)?;
        let suffix = compile_regex(&self.suffix)?;
        let (x, y) = (literal(&self.upper)?, literal(&self.lower)?);
        Ok(move |u: &SymbolWord, v: &SymbolWord| {
            let (u, v) = (u.symbols(), v.symbols());
            (0..=u.len().min(v.len())).any(|k| {
                if u[..k] != v[..k] || !dfa_run(&prefix, &u[..k]) {
                    return false;
                }
                let (ru, rv) = (&u[k..], &v[k..]);
                ru.starts_with(&x)
                    && rv.starts_with(&y)
                    && ru[x.len()..] == rv[y.len()..]
                    && dfa_run(&suffix, &ru[x.len()..])
            })
        })
    }
}
