//! Text formats for machines.
//!
//! The definition format (`.cam`) is line based:
//!
//! ```text
//! // comment
//! name: fig2
//! alphabet: *
//! states: q0 q1 q2
//! start: q0
//! accept: q2
//! q0 --(a|a)--> q0
//! q1 --(b|b)[>0]/-1--> q1
//! q1 --eps[=0]--> q2
//! ```
//!
//! `alphabet: *` means every letter of the symbol type. Guards are `any`,
//! `=0`, `>0`, `<0`; actions are signed deltas or `set0`. Both default to a
//! no-op. States mentioned only in transitions are created on first use.
//!
//! The DOT export is meant for Graphviz but [`CounterAutomaton::from_dot`]
//! reads back what [`CounterAutomaton::to_dot`] writes.

use std::fmt::Write as _;

use super::{
    AutomatonBuilder, AutomatonError, CounterAction, CounterAutomaton, Guard, Symbol, Transition,
};

fn syntax(line: usize, message: impl Into<String>) -> AutomatonError {
    AutomatonError::Syntax {
        line,
        message: message.into(),
    }
}

fn parse_symbol<S: Symbol>(line: usize, text: &str) -> Result<Option<S>, AutomatonError> {
    let text = text.trim();
    if text == "eps" || text == "ε" {
        return Ok(None);
    }
    text.parse::<S>()
        .map(Some)
        .map_err(|_| syntax(line, format!("unknown symbol `{text}`")))
}

fn parse_alphabet<S: Symbol>(line: usize, text: &str) -> Result<Vec<S>, AutomatonError> {
    if text.trim() == "*" {
        return Ok(S::universe());
    }
    text.split_whitespace()
        .map(|t| parse_symbol::<S>(line, t)?.ok_or_else(|| syntax(line, "ε is not a letter")))
        .collect()
}

fn render_alphabet<S: Symbol>(alphabet: &[S]) -> String {
    let mut universe = S::universe();
    universe.sort();
    if alphabet == universe.as_slice() {
        return "*".to_string();
    }
    alphabet
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

fn symbol_text<S: Symbol>(symbol: Option<S>) -> String {
    symbol.map_or_else(|| "eps".to_string(), |s| s.to_string())
}

fn with_line<T>(line: usize, r: Result<T, AutomatonError>) -> Result<T, AutomatonError> {
    r.map_err(|e| match e {
        AutomatonError::Syntax { message, .. } => syntax(line, message),
        other => other,
    })
}

/// Parses `sym[guard]/action` as used in the definition format.
fn parse_label<S: Symbol>(
    line: usize,
    label: &str,
) -> Result<(Option<S>, Guard, CounterAction), AutomatonError> {
    let label = label.trim();
    let (head, action) = match label.split_once('/') {
        Some((h, a)) => (h, with_line(line, a.parse())?),
        None => (label, CounterAction::NONE),
    };
    let (sym, guard) = match head.split_once('[') {
        Some((s, g)) => {
            let g = g
                .strip_suffix(']')
                .ok_or_else(|| syntax(line, "unclosed guard"))?;
            (s, with_line(line, g.parse())?)
        }
        None => (head, Guard::Any),
    };
    Ok((parse_symbol(line, sym)?, guard, action))
}

impl<S: Symbol> CounterAutomaton<S> {
    /// Parses the line-based definition format.
    pub fn from_definition(text: &str) -> Result<CounterAutomaton<S>, AutomatonError> {
        let mut name = String::from("machine");
        let mut start = None;
        let mut pending = Vec::new();
        let mut accept = Vec::new();
        let mut alphabet = None;
        let mut states = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let n = i + 1;
            let line = raw.split("//").next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some((from, rest)) = line.split_once("--") {
                let (label, to) = rest
                    .rsplit_once("-->")
                    .ok_or_else(|| syntax(n, "expected `-->`"))?;
                let (from, to) = (from.trim(), to.trim());
                if from.is_empty() || to.is_empty() {
                    return Err(syntax(n, "missing state name"));
                }
                let (symbol, guard, action) = parse_label::<S>(n, label)?;
                pending.push((from.to_string(), symbol, guard, to.to_string(), action));
                continue;
            }
            let (key, value) = line
                .split_once(':')
                .ok_or_else(|| syntax(n, format!("cannot parse `{line}`")))?;
            let value = value.trim();
            match key.trim() {
                "name" => name = value.to_string(),
                "alphabet" => alphabet = Some(parse_alphabet::<S>(n, value)?),
                "states" => states.extend(value.split_whitespace().map(str::to_string)),
                "start" => start = Some(value.to_string()),
                "accept" => accept.extend(value.split_whitespace().map(str::to_string)),
                other => return Err(syntax(n, format!("unknown key `{other}`"))),
            }
        }
        let mut b = AutomatonBuilder::new(name);
        if let Some(a) = alphabet {
            b.alphabet(a);
        }
        for s in &states {
            b.state(s);
        }
        // With a `states:` line every other mention must be declared.
        let declared = !states.is_empty();
        let lookup = |b: &mut AutomatonBuilder<S>, name: &str| match b.existing_state(name) {
            Some(id) => Ok(id),
            None if !declared => Ok(b.state(name)),
            None => Err(AutomatonError::UnknownState(name.to_string())),
        };
        let start = start.ok_or(AutomatonError::MissingStart)?;
        let id = lookup(&mut b, &start)?;
        b.start(id);
        for s in &accept {
            let id = lookup(&mut b, s)?;
            b.accept(id);
        }
        for (from, symbol, guard, to, action) in pending {
            let (f, t) = (lookup(&mut b, &from)?, lookup(&mut b, &to)?);
            b.transition(f, symbol, guard, t, action);
        }
        b.build()
    }

    /// Renders the definition format; `from_definition` inverts it.
    pub fn to_definition(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "name: {}", self.name);
        let _ = writeln!(out, "alphabet: {}", render_alphabet(&self.alphabet));
        let _ = writeln!(out, "states: {}", self.states.join(" "));
        let _ = writeln!(out, "start: {}", self.states[self.start]);
        let accept: Vec<&str> = self
            .accepting_states()
            .map(|q| self.states[q].as_str())
            .collect();
        let _ = writeln!(out, "accept: {}", accept.join(" "));
        for t in &self.transitions {
            let mut label = symbol_text(t.symbol);
            if t.guard != Guard::Any {
                let _ = write!(label, "[{}]", t.guard);
            }
            if !t.action.is_noop() {
                let _ = write!(label, "/{}", t.action);
            }
            let _ = writeln!(
                out,
                "{} --{}--> {}",
                self.states[t.from], label, self.states[t.to]
            );
        }
        out
    }

    fn edge_label(&self, t: &Transition<S>) -> String {
        format!("{} [{}] / {}", symbol_text(t.symbol), t.guard, t.action)
    }

    /// Graphviz rendering with accepting states drawn as double circles.
    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "digraph \"{}\" {{", self.name);
        let _ = writeln!(out, "  rankdir=LR;");
        let _ = writeln!(
            out,
            "  comment=\"alphabet: {}\";",
            render_alphabet(&self.alphabet)
        );
        let _ = writeln!(out, "  __start [shape=point];");
        for (q, name) in self.states.iter().enumerate() {
            let shape = if self.accepting[q] {
                "doublecircle"
            } else {
                "circle"
            };
            let _ = writeln!(out, "  \"{name}\" [shape={shape}];");
        }
        let _ = writeln!(out, "  __start -> \"{}\";", self.states[self.start]);
        let mut edges: Vec<String> = self
            .transitions
            .iter()
            .map(|t| {
                format!(
                    "  \"{}\" -> \"{}\" [label=\"{}\"];",
                    self.states[t.from],
                    self.states[t.to],
                    self.edge_label(t)
                )
            })
            .collect();
        edges.sort();
        for e in edges {
            let _ = writeln!(out, "{e}");
        }
        out.push_str("}\n");
        out
    }

    /// Reads the subset of DOT that [`CounterAutomaton::to_dot`] produces.
    pub fn from_dot(text: &str) -> Result<CounterAutomaton<S>, AutomatonError> {
        let mut b: Option<AutomatonBuilder<S>> = None;
        let mut start = None;
        for (i, raw) in text.lines().enumerate() {
            let n = i + 1;
            let line = raw.trim().trim_end_matches(';');
            if let Some(rest) = line.strip_prefix("digraph") {
                let name = rest.trim().trim_end_matches('{').trim().trim_matches('"');
                b = Some(AutomatonBuilder::new(name));
                continue;
            }
            let Some(b) = b.as_mut() else {
                if line.is_empty() {
                    continue;
                }
                return Err(syntax(n, "expected `digraph`"));
            };
            if line.is_empty()
                || line == "}"
                || line.starts_with("rankdir")
                || line.starts_with("__start [")
            {
                continue;
            }
            if let Some(rest) = line.strip_prefix("comment=") {
                let rest = rest.trim_matches('"');
                if let Some(a) = rest.strip_prefix("alphabet:") {
                    b.alphabet(parse_alphabet::<S>(n, a)?);
                }
                continue;
            }
            if let Some(target) = line.strip_prefix("__start ->") {
                start = Some(target.trim().trim_matches('"').to_string());
                continue;
            }
            let (head, attrs) = line
                .split_once('[')
                .ok_or_else(|| syntax(n, format!("cannot parse `{line}`")))?;
            let attrs = attrs.trim_end_matches(']');
            if let Some((from, to)) = head.split_once("->") {
                let label = attrs
                    .trim()
                    .strip_prefix("label=")
                    .map(|l| l.trim_matches('"'))
                    .ok_or_else(|| syntax(n, "edge without label"))?;
                let mut parts = label.splitn(2, ' ');
                let symbol = parse_symbol::<S>(n, parts.next().unwrap_or(""))?;
                let rest = parts.next().unwrap_or("").trim();
                let (guard, action) = match rest.split_once('/') {
                    Some((g, a)) => {
                        let g = g.trim().trim_start_matches('[').trim_end_matches(']');
                        (with_line(n, g.parse())?, with_line(n, a.parse())?)
                    }
                    None => (Guard::Any, CounterAction::NONE),
                };
                let (f, t) = (
                    b.state(from.trim().trim_matches('"')),
                    b.state(to.trim().trim_matches('"')),
                );
                b.transition(f, symbol, guard, t, action);
            } else {
                let id = b.state(head.trim().trim_matches('"'));
                if attrs.contains("doublecircle") {
                    b.accept(id);
                }
            }
        }
        let mut b = b.ok_or_else(|| syntax(1, "expected `digraph`"))?;
        let start = start.ok_or(AutomatonError::MissingStart)?;
        let id = b
            .existing_state(&start)
            .ok_or(AutomatonError::UnknownState(start))?;
        b.start(id);
        b.build()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::{Pair, Sym};

    const SAMPLE: &str = "\
// a^n b^n
name: anbn
alphabet: a b
states: p q
start: p
accept: p q
p --a/+1--> p
p --b[>0]/-1--> q
q --b[>0]/-1--> q
";

    #[test]
    fn definition_round_trip() {
        let m = CounterAutomaton::<Sym>::from_definition(SAMPLE).unwrap();
        assert_eq!(m.states().len(), 2);
        assert_eq!(m.alphabet(), &[Sym::A, Sym::B]);
        assert!(m.accepts(&[Sym::A, Sym::B]).unwrap());
        let again = CounterAutomaton::<Sym>::from_definition(&m.to_definition()).unwrap();
        assert_eq!(m, again);
    }

    #[test]
    fn dot_round_trip() {
        let m = CounterAutomaton::<Sym>::from_definition(SAMPLE).unwrap();
        let dot = m.to_dot();
        assert!(dot.contains("\"q\" [shape=doublecircle]"));
        assert!(dot.contains("[label=\"b [>0] / -1\"]"));
        assert_eq!(CounterAutomaton::<Sym>::from_dot(&dot).unwrap(), m);
    }

    #[test]
    fn pair_machines_and_epsilon() {
        let text = "name: t\nalphabet: *\nstart: s\naccept: f\ns --(a|_)--> s\ns --eps[=0]--> f\nf --(#|b)/set0--> f\n";
        let m = CounterAutomaton::<Pair>::from_definition(text).unwrap();
        assert_eq!(m.alphabet().len(), 15);
        assert!(m.has_epsilon());
        let dot = m.to_dot();
        assert!(dot.contains("alphabet: *"));
        assert_eq!(CounterAutomaton::<Pair>::from_dot(&dot).unwrap(), m);
        assert_eq!(
            CounterAutomaton::<Pair>::from_definition(&m.to_definition()).unwrap(),
            m
        );
    }

    #[test]
    fn syntax_errors_carry_lines() {
        let err = CounterAutomaton::<Sym>::from_definition("start: p\np --c--> p\n").unwrap_err();
        assert!(
            matches!(err, AutomatonError::Syntax { line: 2, .. }),
            "{err:?}"
        );
        let err =
            CounterAutomaton::<Sym>::from_definition("start: p\np --a[>1]--> p\n").unwrap_err();
        assert!(
            matches!(err, AutomatonError::Syntax { line: 2, .. }),
            "{err:?}"
        );
        assert_eq!(
            CounterAutomaton::<Sym>::from_definition("p --a--> p\n").unwrap_err(),
            AutomatonError::MissingStart
        );
    }
}
