//! Deterministic non-blind one-counter automata.
//!
//! A machine is a finite automaton with one integer counter that starts at
//! zero. Each transition reads a symbol (or nothing, for ε), may only fire when
//! its [`Guard`] admits the current counter value, and applies a
//! [`CounterAction`]. A word is accepted when the run ends in an accepting state
//! with the counter at zero. Finite state automata are the special case with
//! zero deltas and `any` guards.
//!
//! Machines are immutable once built; use [`AutomatonBuilder`] or the text
//! format in [`format`] to make one.

mod format;
mod ops;

pub use ops::union_accepts;

use std::collections::{BTreeSet, HashMap};
use std::fmt::{self, Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use thiserror::Error;

use crate::encoding::{Pair, Sym};

/// Largest counter delta a single transition may carry.
pub const MAX_DELTA: i32 = 4;

/// Longest word [`CounterAutomaton::enumerate_accepted`] will generate up to.
pub const MAX_ENUMERATION_LEN: usize = 16;

/// A finite input alphabet with a dense index.
pub trait Symbol:
    Copy + Eq + Ord + Hash + Debug + Display + FromStr + Send + Sync + 'static
{
    /// Upper bound on [`Symbol::index`].
    const COUNT: usize;

    fn index(self) -> usize;

    /// Every letter of the type, in a fixed order.
    fn universe() -> Vec<Self>;
}

impl Symbol for Sym {
    const COUNT: usize = 3;

    fn index(self) -> usize {
        match self {
            Sym::A => 0,
            Sym::B => 1,
            Sym::Hash => 2,
        }
    }

    fn universe() -> Vec<Self> {
        Sym::ALL.to_vec()
    }
}

impl Symbol for Pair {
    const COUNT: usize = 16;

    fn index(self) -> usize {
        let slot = |p: Option<Sym>| p.map_or(3, Symbol::index);
        slot(self.upper()) * 4 + slot(self.lower())
    }

    fn universe() -> Vec<Self> {
        Pair::all().collect()
    }
}

/// Sign of the counter; the granularity at which guards distinguish values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CounterSign {
    Negative,
    Zero,
    Positive,
}

impl CounterSign {
    pub const ALL: [CounterSign; 3] = [
        CounterSign::Negative,
        CounterSign::Zero,
        CounterSign::Positive,
    ];

    pub fn of(counter: i64) -> Self {
        match counter.signum() {
            -1 => CounterSign::Negative,
            0 => CounterSign::Zero,
            _ => CounterSign::Positive,
        }
    }

    fn representative(self) -> i64 {
        match self {
            CounterSign::Negative => -1,
            CounterSign::Zero => 0,
            CounterSign::Positive => 1,
        }
    }
}

impl fmt::Display for CounterSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CounterSign::Negative => "negative",
            CounterSign::Zero => "zero",
            CounterSign::Positive => "positive",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Guard {
    Any,
    Zero,
    Positive,
    Negative,
}

impl Guard {
    pub fn admits(self, counter: i64) -> bool {
        match self {
            Guard::Any => true,
            Guard::Zero => counter == 0,
            Guard::Positive => counter > 0,
            Guard::Negative => counter < 0,
        }
    }

    /// The guard admitting exactly the values both admit, if any.
    pub fn and(self, other: Guard) -> Option<Guard> {
        match (self, other) {
            (Guard::Any, g) | (g, Guard::Any) => Some(g),
            (a, b) if a == b => Some(a),
            _ => None,
        }
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Guard::Any => "any",
            Guard::Zero => "=0",
            Guard::Positive => ">0",
            Guard::Negative => "<0",
        })
    }
}

impl FromStr for Guard {
    type Err = AutomatonError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "any" | "" => Ok(Guard::Any),
            "=0" => Ok(Guard::Zero),
            ">0" => Ok(Guard::Positive),
            "<0" => Ok(Guard::Negative),
            other => Err(AutomatonError::Syntax {
                line: 0,
                message: format!("unknown guard `{other}`"),
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CounterAction {
    Delta(i32),
    SetZero,
}

impl CounterAction {
    pub const NONE: CounterAction = CounterAction::Delta(0);

    pub fn apply(self, counter: i64) -> i64 {
        match self {
            CounterAction::Delta(d) => counter + d as i64,
            CounterAction::SetZero => 0,
        }
    }

    pub fn is_noop(self) -> bool {
        self == CounterAction::NONE
    }
}

impl fmt::Display for CounterAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CounterAction::Delta(0) => f.write_str("0"),
            CounterAction::Delta(d) => write!(f, "{d:+}"),
            CounterAction::SetZero => f.write_str("set0"),
        }
    }
}

impl FromStr for CounterAction {
    type Err = AutomatonError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "set0" {
            return Ok(CounterAction::SetZero);
        }
        s.parse::<i32>()
            .map(CounterAction::Delta)
            .map_err(|_| AutomatonError::Syntax {
                line: 0,
                message: format!("unknown counter action `{s}`"),
            })
    }
}

/// One edge. `symbol == None` is an ε-transition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition<S> {
    pub from: usize,
    pub symbol: Option<S>,
    pub guard: Guard,
    pub to: usize,
    pub action: CounterAction,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutomatonError {
    #[error("machine has no start state")]
    MissingStart,
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("symbol `{0}` is not in the machine alphabet")]
    SymbolOutsideAlphabet(String),
    #[error("counter delta {0} exceeds the cap of {MAX_DELTA}")]
    DeltaTooLarge(i32),
    #[error("nondeterministic at step {step}: {count} transitions enabled in state `{state}` on `{symbol}`")]
    Nondeterministic {
        step: usize,
        state: String,
        symbol: String,
        count: usize,
    },
    #[error("machine has ε-transitions; eliminate them before running")]
    EpsilonPresent,
    #[error("ε-transition out of `{state}` has a counter action or an unsupported guard")]
    UnsupportedEpsilon { state: String },
    #[error("alphabets differ")]
    AlphabetMismatch,
    #[error("machine `{0}` is not a plain finite state automaton")]
    NotRegular(String),
    #[error("placeholder state `{0}` has outgoing transitions")]
    PlaceholderHasEdges(String),
    #[error("enumeration length {0} exceeds the cap of {MAX_ENUMERATION_LEN}")]
    EnumerationTooLong(usize),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

/// A determinism violation found by [`CounterAutomaton::check_deterministic`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Conflict {
    Epsilon {
        state: String,
    },
    Overlap {
        state: String,
        symbol: String,
        sign: CounterSign,
        count: usize,
    },
}

impl fmt::Display for Conflict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Conflict::Epsilon { state } => write!(f, "state `{state}` has ε-transitions"),
            Conflict::Overlap {
                state,
                symbol,
                sign,
                count,
            } => {
                write!(
                    f,
                    "state `{state}` has {count} transitions on `{symbol}` with {sign} counter"
                )
            }
        }
    }
}

/// The outcome of a deterministic run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Run {
    pub accepted: bool,
    /// `(state, counter)` before the first symbol and after each symbol read.
    pub trace: Vec<(usize, i64)>,
}

/// Acceptance plus the largest counter magnitude seen along the run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunSummary {
    pub accepted: bool,
    pub max_abs_counter: i64,
    pub steps: usize,
}

#[derive(Clone, Debug)]
pub struct CounterAutomaton<S: Symbol> {
    name: String,
    states: Vec<String>,
    start: usize,
    accepting: Vec<bool>,
    alphabet: Vec<S>,
    transitions: Vec<Transition<S>>,
    // Derived lookup tables.
    moves: Vec<Vec<u32>>,
    epsilon: Vec<Vec<u32>>,
    in_alphabet: Vec<bool>,
}

impl<S: Symbol> PartialEq for CounterAutomaton<S> {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.states == other.states
            && self.start == other.start
            && self.accepting == other.accepting
            && self.alphabet == other.alphabet
            && self.transitions == other.transitions
    }
}

impl<S: Symbol> Eq for CounterAutomaton<S> {}

#[derive(Clone, Debug)]
pub struct AutomatonBuilder<S> {
    name: String,
    states: Vec<String>,
    lookup: HashMap<String, usize>,
    start: Option<usize>,
    accepting: BTreeSet<usize>,
    alphabet: Option<Vec<S>>,
    transitions: Vec<Transition<S>>,
}

impl<S: Symbol> AutomatonBuilder<S> {
    pub fn new(name: impl Into<String>) -> Self {
        AutomatonBuilder {
            name: name.into(),
            states: Vec::new(),
            lookup: HashMap::new(),
            start: None,
            accepting: BTreeSet::new(),
            alphabet: None,
            transitions: Vec::new(),
        }
    }

    /// Returns the id of the named state, creating it if needed.
    pub fn state(&mut self, name: &str) -> usize {
        if let Some(&id) = self.lookup.get(name) {
            return id;
        }
        let id = self.states.len();
        self.states.push(name.to_string());
        self.lookup.insert(name.to_string(), id);
        id
    }

    pub fn existing_state(&self, name: &str) -> Option<usize> {
        self.lookup.get(name).copied()
    }

    pub fn start(&mut self, id: usize) -> &mut Self {
        self.start = Some(id);
        self
    }

    pub fn accept(&mut self, id: usize) -> &mut Self {
        self.accepting.insert(id);
        self
    }

    pub fn alphabet(&mut self, alphabet: Vec<S>) -> &mut Self {
        self.alphabet = Some(alphabet);
        self
    }

    pub fn transition(
        &mut self,
        from: usize,
        symbol: Option<S>,
        guard: Guard,
        to: usize,
        action: CounterAction,
    ) -> &mut Self {
        self.transitions.push(Transition {
            from,
            symbol,
            guard,
            to,
            action,
        });
        self
    }

    /// Shorthand for an unguarded transition with no counter action.
    pub fn edge(&mut self, from: usize, symbol: S, to: usize) -> &mut Self {
        self.transition(from, Some(symbol), Guard::Any, to, CounterAction::NONE)
    }

    pub fn build(self) -> Result<CounterAutomaton<S>, AutomatonError> {
        let start = self.start.ok_or(AutomatonError::MissingStart)?;
        let mut alphabet = self.alphabet.unwrap_or_else(S::universe);
        alphabet.sort();
        alphabet.dedup();
        let mut in_alphabet = vec![false; S::COUNT];
        for &s in &alphabet {
            in_alphabet[s.index()] = true;
        }
        let mut transitions = self.transitions;
        for t in &transitions {
            if let Some(s) = t.symbol {
                if !in_alphabet[s.index()] {
                    return Err(AutomatonError::SymbolOutsideAlphabet(s.to_string()));
                }
            }
            if let CounterAction::Delta(d) = t.action {
                if d.abs() > MAX_DELTA {
                    return Err(AutomatonError::DeltaTooLarge(d));
                }
            }
            if t.from >= self.states.len() || t.to >= self.states.len() {
                return Err(AutomatonError::UnknownState(format!(
                    "#{}",
                    t.from.max(t.to)
                )));
            }
        }
        transitions.sort();
        transitions.dedup();
        let n = self.states.len();
        let mut moves = vec![Vec::new(); n * S::COUNT];
        let mut epsilon = vec![Vec::new(); n];
        for (i, t) in transitions.iter().enumerate() {
            match t.symbol {
                Some(s) => moves[t.from * S::COUNT + s.index()].push(i as u32),
                None => epsilon[t.from].push(i as u32),
            }
        }
        let mut accepting = vec![false; n];
        for id in self.accepting {
            accepting[id] = true;
        }
        Ok(CounterAutomaton {
            name: self.name,
            states: self.states,
            start,
            accepting,
            alphabet,
            transitions,
            moves,
            epsilon,
            in_alphabet,
        })
    }
}

impl<S: Symbol> CounterAutomaton<S> {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_id(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn is_accepting(&self, state: usize) -> bool {
        self.accepting[state]
    }

    pub fn accepting_states(&self) -> impl Iterator<Item = usize> + '_ {
        self.accepting
            .iter()
            .enumerate()
            .filter(|(_, &a)| a)
            .map(|(i, _)| i)
    }

    pub fn alphabet(&self) -> &[S] {
        &self.alphabet
    }

    pub fn transitions(&self) -> &[Transition<S>] {
        &self.transitions
    }

    pub fn has_epsilon(&self) -> bool {
        self.epsilon.iter().any(|e| !e.is_empty())
    }

    /// True when every transition is unguarded with no counter action.
    pub fn is_regular(&self) -> bool {
        self.transitions
            .iter()
            .all(|t| t.guard == Guard::Any && t.action.is_noop())
    }

    pub(crate) fn moves_from(
        &self,
        state: usize,
        symbol: S,
    ) -> impl Iterator<Item = &Transition<S>> {
        self.moves[state * S::COUNT + symbol.index()]
            .iter()
            .map(|&i| &self.transitions[i as usize])
    }

    pub(crate) fn epsilon_from(&self, state: usize) -> impl Iterator<Item = &Transition<S>> {
        self.epsilon[state]
            .iter()
            .map(|&i| &self.transitions[i as usize])
    }

    pub fn contains_symbol(&self, symbol: S) -> bool {
        self.in_alphabet[symbol.index()]
    }

    /// The unique enabled move from a configuration, `Ok(None)` when stuck.
    pub fn step(
        &self,
        state: usize,
        counter: i64,
        symbol: S,
    ) -> Result<Option<(usize, i64)>, AutomatonError> {
        if !self.contains_symbol(symbol) {
            return Err(AutomatonError::SymbolOutsideAlphabet(symbol.to_string()));
        }
        let mut enabled = self
            .moves_from(state, symbol)
            .filter(|t| t.guard.admits(counter));
        let Some(t) = enabled.next() else {
            return Ok(None);
        };
        let extra = enabled.count();
        if extra > 0 {
            return Err(AutomatonError::Nondeterministic {
                step: 0,
                state: self.states[state].clone(),
                symbol: symbol.to_string(),
                count: extra + 1,
            });
        }
        Ok(Some((t.to, t.action.apply(counter))))
    }

    fn simulate(
        &self,
        word: &[S],
        mut trace: Option<&mut Vec<(usize, i64)>>,
    ) -> Result<RunSummary, AutomatonError> {
        if self.has_epsilon() {
            return Err(AutomatonError::EpsilonPresent);
        }
        let (mut state, mut counter) = (self.start, 0i64);
        let mut max_abs = 0;
        if let Some(t) = trace.as_deref_mut() {
            t.push((state, counter));
        }
        for (step, &symbol) in word.iter().enumerate() {
            match self.step(state, counter, symbol) {
                Ok(Some((s, c))) => {
                    state = s;
                    counter = c;
                    max_abs = max_abs.max(counter.abs());
                    if let Some(t) = trace.as_deref_mut() {
                        t.push((state, counter));
                    }
                }
                Ok(None) => {
                    return Ok(RunSummary {
                        accepted: false,
                        max_abs_counter: max_abs,
                        steps: step,
                    })
                }
                Err(AutomatonError::Nondeterministic {
                    state,
                    symbol,
                    count,
                    ..
                }) => {
                    return Err(AutomatonError::Nondeterministic {
                        step,
                        state,
                        symbol,
                        count,
                    })
                }
                Err(e) => return Err(e),
            }
        }
        let accepted = self.accepting[state] && counter == 0;
        Ok(RunSummary {
            accepted,
            max_abs_counter: max_abs,
            steps: word.len(),
        })
    }

    /// Runs the machine, returning acceptance and the visited configurations.
    pub fn run(&self, word: &[S]) -> Result<Run, AutomatonError> {
        let mut trace = Vec::with_capacity(word.len() + 1);
        let summary = self.simulate(word, Some(&mut trace))?;
        debug_assert!(!summary.accepted || trace.last().is_some_and(|&(_, c)| c == 0));
        Ok(Run {
            accepted: summary.accepted,
            trace,
        })
    }

    pub fn accepts(&self, word: &[S]) -> Result<bool, AutomatonError> {
        Ok(self.simulate(word, None)?.accepted)
    }

    /// Like [`CounterAutomaton::accepts`] but also reports the counter high-water mark.
    pub fn run_summary(&self, word: &[S]) -> Result<RunSummary, AutomatonError> {
        self.simulate(word, None)
    }

    /// Every place where more than one move is enabled for some counter sign,
    /// plus every state with ε-transitions. Empty for a deterministic machine.
    pub fn check_deterministic(&self) -> Vec<Conflict> {
        let mut conflicts = Vec::new();
        for (state, name) in self.states.iter().enumerate() {
            if !self.epsilon[state].is_empty() {
                conflicts.push(Conflict::Epsilon {
                    state: name.clone(),
                });
            }
            for &symbol in &self.alphabet {
                for sign in CounterSign::ALL {
                    let count = self
                        .moves_from(state, symbol)
                        .filter(|t| t.guard.admits(sign.representative()))
                        .count();
                    if count > 1 {
                        conflicts.push(Conflict::Overlap {
                            state: name.clone(),
                            symbol: symbol.to_string(),
                            sign,
                            count,
                        });
                    }
                }
            }
        }
        conflicts
    }

    pub fn is_deterministic(&self) -> bool {
        self.check_deterministic().is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(s: &str) -> Vec<Sym> {
        s.chars().map(|c| Sym::from_char(c).unwrap()).collect()
    }

    /// a^n b^n with n >= 0, using the counter.
    fn anbn() -> CounterAutomaton<Sym> {
        let mut b = AutomatonBuilder::new("anbn");
        let (p, q) = (b.state("p"), b.state("q"));
        b.start(p).accept(p).accept(q);
        b.transition(p, Some(Sym::A), Guard::Any, p, CounterAction::Delta(1));
        b.transition(
            p,
            Some(Sym::B),
            Guard::Positive,
            q,
            CounterAction::Delta(-1),
        );
        b.transition(
            q,
            Some(Sym::B),
            Guard::Positive,
            q,
            CounterAction::Delta(-1),
        );
        b.alphabet(vec![Sym::A, Sym::B]);
        b.build().unwrap()
    }

    #[test]
    fn counter_language() {
        let m = anbn();
        assert!(m.accepts(&sym("")).unwrap());
        assert!(m.accepts(&sym("aabb")).unwrap());
        assert!(!m.accepts(&sym("aab")).unwrap());
        assert!(!m.accepts(&sym("abb")).unwrap());
        let run = m.run(&sym("ab")).unwrap();
        assert_eq!(run.trace, vec![(0, 0), (0, 1), (1, 0)]);
        assert!(matches!(
            m.run(&sym("a#")),
            Err(AutomatonError::SymbolOutsideAlphabet(_))
        ));
    }

    #[test]
    fn accepting_state_needs_zero_counter() {
        let m = anbn();
        let run = m.run(&sym("aa")).unwrap();
        assert!(m.is_accepting(run.trace.last().unwrap().0));
        assert!(!run.accepted);
    }

    #[test]
    fn detects_overlap() {
        let mut b = AutomatonBuilder::new("clash");
        let (q, r) = (b.state("q"), b.state("r"));
        b.start(q);
        b.transition(q, Some(Sym::A), Guard::Positive, q, CounterAction::Delta(1));
        b.transition(q, Some(Sym::A), Guard::Any, r, CounterAction::NONE);
        let m = b.build().unwrap();
        let conflicts = m.check_deterministic();
        assert_eq!(
            conflicts,
            vec![Conflict::Overlap {
                state: "q".into(),
                symbol: "a".into(),
                sign: CounterSign::Positive,
                count: 2
            }]
        );
        assert!(m.accepts(&sym("a")).is_ok());
    }

    #[test]
    fn runtime_nondeterminism_is_an_error() {
        let mut b = AutomatonBuilder::new("clash");
        let (q, r) = (b.state("q"), b.state("r"));
        b.start(q);
        b.edge(q, Sym::A, q).edge(q, Sym::A, r);
        let m = b.build().unwrap();
        assert!(matches!(
            m.run(&sym("ba")),
            Ok(Run {
                accepted: false,
                ..
            })
        ));
        assert!(matches!(
            m.run(&sym("a")),
            Err(AutomatonError::Nondeterministic {
                step: 0,
                count: 2,
                ..
            })
        ));
    }

    #[test]
    fn set_zero_action() {
        let mut b = AutomatonBuilder::new("reset");
        let q = b.state("q");
        b.start(q).accept(q);
        b.transition(q, Some(Sym::A), Guard::Any, q, CounterAction::Delta(3));
        b.transition(q, Some(Sym::B), Guard::Positive, q, CounterAction::SetZero);
        let m = b.build().unwrap();
        assert!(m.accepts(&sym("aab")).unwrap());
        assert!(!m.accepts(&sym("aaba")).unwrap());
        assert!(!m.accepts(&sym("b")).unwrap());
    }

    #[test]
    fn rejects_large_delta() {
        let mut b = AutomatonBuilder::new("big");
        let q = b.state("q");
        b.start(q);
        b.transition(q, Some(Sym::A), Guard::Any, q, CounterAction::Delta(5));
        assert_eq!(b.build().unwrap_err(), AutomatonError::DeltaTooLarge(5));
    }

    #[test]
    fn guard_conjunction() {
        assert_eq!(Guard::Any.and(Guard::Zero), Some(Guard::Zero));
        assert_eq!(Guard::Zero.and(Guard::Positive), None);
        assert_eq!(Guard::Positive.and(Guard::Positive), Some(Guard::Positive));
    }

    #[test]
    fn pair_indices_are_distinct() {
        let mut seen: Vec<usize> = Pair::universe().into_iter().map(Symbol::index).collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 15);
        assert!(seen.iter().all(|&i| i < Pair::COUNT));
    }
}
