use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use super::{
    AutomatonBuilder, AutomatonError, CounterAction, CounterAutomaton, Guard, Symbol, MAX_DELTA,
    MAX_ENUMERATION_LEN,
};

type Config = (usize, i64);

impl<S: Symbol> CounterAutomaton<S> {
    /// Product with a finite state automaton over the same alphabet.
    ///
    /// The counter behaviour of `self` is kept; `fsa` only restricts which
    /// words can be read. Only reachable product states are materialised.
    pub fn intersect_regular(
        &self,
        fsa: &CounterAutomaton<S>,
    ) -> Result<CounterAutomaton<S>, AutomatonError> {
        if !fsa.is_regular() || fsa.has_epsilon() {
            return Err(AutomatonError::NotRegular(fsa.name.clone()));
        }
        if self.alphabet != fsa.alphabet {
            return Err(AutomatonError::AlphabetMismatch);
        }
        let mut b = AutomatonBuilder::new(format!("{} & {}", self.name, fsa.name));
        b.alphabet(self.alphabet.clone());
        let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
        let mut queue = VecDeque::new();
        let mut intern = |b: &mut AutomatonBuilder<S>,
                          queue: &mut VecDeque<(usize, usize)>,
                          p: usize,
                          q: usize| {
            *ids.entry((p, q)).or_insert_with(|| {
                queue.push_back((p, q));
                b.state(&format!("{}&{}", self.states[p], fsa.states[q]))
            })
        };
        let start = intern(&mut b, &mut queue, self.start, fsa.start);
        b.start(start);
        while let Some((p, q)) = queue.pop_front() {
            let here = intern(&mut b, &mut queue, p, q);
            if self.accepting[p] && fsa.accepting[q] {
                b.accept(here);
            }
            for t in self.epsilon_from(p) {
                let to = intern(&mut b, &mut queue, t.to, q);
                b.transition(here, None, t.guard, to, t.action);
            }
            for &symbol in &self.alphabet {
                for t in self.moves_from(p, symbol) {
                    for f in fsa.moves_from(q, symbol) {
                        let to = intern(&mut b, &mut queue, t.to, f.to);
                        b.transition(here, Some(symbol), t.guard, to, t.action);
                    }
                }
            }
        }
        b.build()
    }

    /// Removes ε-transitions.
    ///
    /// ε-moves must have no counter action and an `any` or `=0` guard; such a
    /// guard is folded into the guard of the next real move. States left
    /// unreachable are dropped.
    pub fn eliminate_epsilon(&self) -> Result<CounterAutomaton<S>, AutomatonError> {
        for t in &self.transitions {
            if t.symbol.is_none()
                && (!t.action.is_noop() || !matches!(t.guard, Guard::Any | Guard::Zero))
            {
                return Err(AutomatonError::UnsupportedEpsilon {
                    state: self.states[t.from].clone(),
                });
            }
        }
        let mut b = AutomatonBuilder::new(self.name.clone());
        b.alphabet(self.alphabet.clone());
        for name in &self.states {
            b.state(name);
        }
        b.start(self.start);
        for p in 0..self.states.len() {
            for (q, g) in self.epsilon_closure(p) {
                if self.accepting[q] {
                    b.accept(p);
                }
                for &symbol in &self.alphabet {
                    for t in self.moves_from(q, symbol) {
                        if let Some(guard) = g.and(t.guard) {
                            b.transition(p, Some(symbol), guard, t.to, t.action);
                        }
                    }
                }
            }
        }
        Ok(b.build()?.trim())
    }

    /// States reachable from `p` by ε-moves, each with the weakest guard any
    /// path to it needs. Includes `p` itself with `any`.
    fn epsilon_closure(&self, p: usize) -> BTreeMap<usize, Guard> {
        let mut best: BTreeMap<usize, Guard> = BTreeMap::new();
        let mut stack = vec![(p, Guard::Any)];
        while let Some((q, g)) = stack.pop() {
            match best.get(&q) {
                Some(Guard::Any) => continue,
                Some(_) if g != Guard::Any => continue,
                _ => {}
            }
            best.insert(q, g);
            for t in self.epsilon_from(q) {
                if let Some(next) = g.and(t.guard) {
                    stack.push((t.to, next));
                }
            }
        }
        best
    }

    /// Drops states not reachable from the start state.
    pub fn trim(&self) -> CounterAutomaton<S> {
        let mut seen = vec![false; self.states.len()];
        let mut stack = vec![self.start];
        seen[self.start] = true;
        while let Some(q) = stack.pop() {
            for t in self.transitions.iter().filter(|t| t.from == q) {
                if !seen[t.to] {
                    seen[t.to] = true;
                    stack.push(t.to);
                }
            }
        }
        let mut b = AutomatonBuilder::new(self.name.clone());
        b.alphabet(self.alphabet.clone());
        let mut map = vec![usize::MAX; self.states.len()];
        for (q, name) in self.states.iter().enumerate() {
            if seen[q] {
                map[q] = b.state(name);
                if self.accepting[q] {
                    b.accept(map[q]);
                }
            }
        }
        b.start(map[self.start]);
        for t in self.transitions.iter().filter(|t| seen[t.from]) {
            b.transition(map[t.from], t.symbol, t.guard, map[t.to], t.action);
        }
        b.build().expect("trimming keeps a valid machine")
    }

    /// Subset construction for a plain finite state automaton.
    pub fn determinize(&self) -> Result<CounterAutomaton<S>, AutomatonError> {
        if !self.is_regular() {
            return Err(AutomatonError::NotRegular(self.name.clone()));
        }
        let closure = |set: BTreeSet<usize>| -> BTreeSet<usize> {
            let mut out = BTreeSet::new();
            let mut stack: Vec<usize> = set.into_iter().collect();
            while let Some(q) = stack.pop() {
                if out.insert(q) {
                    stack.extend(self.epsilon_from(q).map(|t| t.to));
                }
            }
            out
        };
        let mut b = AutomatonBuilder::new(self.name.clone());
        b.alphabet(self.alphabet.clone());
        let mut ids: HashMap<BTreeSet<usize>, usize> = HashMap::new();
        let mut queue = VecDeque::new();
        let first = closure(BTreeSet::from([self.start]));
        let start = b.state("d0");
        ids.insert(first.clone(), start);
        queue.push_back(first);
        b.start(start);
        while let Some(set) = queue.pop_front() {
            let here = ids[&set];
            if set.iter().any(|&q| self.accepting[q]) {
                b.accept(here);
            }
            for &symbol in &self.alphabet {
                let next: BTreeSet<usize> = set
                    .iter()
                    .flat_map(|&q| self.moves_from(q, symbol).map(|t| t.to))
                    .collect();
                if next.is_empty() {
                    continue;
                }
                let next = closure(next);
                let to = match ids.get(&next) {
                    Some(&id) => id,
                    None => {
                        let id = b.state(&format!("d{}", ids.len()));
                        ids.insert(next.clone(), id);
                        queue.push_back(next);
                        id
                    }
                };
                b.edge(here, symbol, to);
            }
        }
        b.build()
    }

    /// Minimal partial DFA for a deterministic finite state automaton.
    ///
    /// States that cannot reach acceptance are removed, then equivalent
    /// states merged by partition refinement. States are renamed `s0`, `s1`,
    /// ... in breadth-first order from the start.
    pub fn minimize(&self) -> Result<CounterAutomaton<S>, AutomatonError> {
        if !self.is_regular() || !self.is_deterministic() {
            return Err(AutomatonError::NotRegular(self.name.clone()));
        }
        let n = self.states.len();
        let mut live = self.accepting.clone();
        let mut changed = true;
        while changed {
            changed = false;
            for t in &self.transitions {
                if live[t.to] && !live[t.from] {
                    live[t.from] = true;
                    changed = true;
                }
            }
        }
        const DEAD: usize = usize::MAX;
        let target = |q: usize, c: S| {
            self.moves_from(q, c)
                .next()
                .map(|t| t.to)
                .filter(|&to| live[to])
        };
        let mut class: Vec<usize> = (0..n)
            .map(|q| {
                if !live[q] {
                    DEAD
                } else {
                    self.accepting[q] as usize
                }
            })
            .collect();
        loop {
            let mut sigs: HashMap<Vec<usize>, usize> = HashMap::new();
            let mut next = vec![DEAD; n];
            for q in (0..n).filter(|&q| live[q]) {
                let mut sig = vec![class[q]];
                sig.extend(
                    self.alphabet
                        .iter()
                        .map(|&c| target(q, c).map_or(DEAD, |to| class[to])),
                );
                let len = sigs.len();
                next[q] = *sigs.entry(sig).or_insert(len);
            }
            let stable = sigs.len()
                == class
                    .iter()
                    .filter(|&&c| c != DEAD)
                    .collect::<BTreeSet<_>>()
                    .len();
            class = next;
            if stable {
                break;
            }
        }
        let mut b = AutomatonBuilder::new(self.name.clone());
        b.alphabet(self.alphabet.clone());
        if !live[self.start] {
            let s = b.state("s0");
            b.start(s);
            return b.build();
        }
        let mut ids: HashMap<usize, usize> = HashMap::new();
        let mut queue = VecDeque::from([self.start]);
        ids.insert(class[self.start], b.state("s0"));
        b.start(0);
        let mut done = BTreeSet::new();
        while let Some(q) = queue.pop_front() {
            if !done.insert(class[q]) {
                continue;
            }
            let here = ids[&class[q]];
            if self.accepting[q] {
                b.accept(here);
            }
            for &c in &self.alphabet {
                if let Some(to) = target(q, c) {
                    let len = ids.len();
                    let id = *ids
                        .entry(class[to])
                        .or_insert_with(|| b.state(&format!("s{len}")));
                    b.edge(here, c, id);
                    queue.push_back(to);
                }
            }
        }
        b.build()
    }

    /// Replaces the state `placeholder` by a copy of `sub`.
    ///
    /// Edges into the placeholder go to the start of the copy; accepting
    /// states of the copy accept. Copied states are renamed `prefix.name`.
    pub fn splice(
        &self,
        placeholder: &str,
        sub: &CounterAutomaton<S>,
        prefix: &str,
    ) -> Result<CounterAutomaton<S>, AutomatonError> {
        let hole = self
            .state_id(placeholder)
            .ok_or_else(|| AutomatonError::UnknownState(placeholder.to_string()))?;
        if self.transitions.iter().any(|t| t.from == hole) {
            return Err(AutomatonError::PlaceholderHasEdges(placeholder.to_string()));
        }
        if self.alphabet != sub.alphabet {
            return Err(AutomatonError::AlphabetMismatch);
        }
        let mut b = AutomatonBuilder::new(self.name.clone());
        b.alphabet(self.alphabet.clone());
        let mut outer = vec![usize::MAX; self.states.len()];
        for (q, name) in self.states.iter().enumerate() {
            if q != hole {
                outer[q] = b.state(name);
                if self.accepting[q] {
                    b.accept(outer[q]);
                }
            }
        }
        let inner: Vec<usize> = sub
            .states
            .iter()
            .enumerate()
            .map(|(q, name)| {
                let id = b.state(&format!("{prefix}.{name}"));
                if sub.accepting[q] {
                    b.accept(id);
                }
                id
            })
            .collect();
        outer[hole] = inner[sub.start];
        b.start(outer[self.start]);
        for t in &self.transitions {
            b.transition(outer[t.from], t.symbol, t.guard, outer[t.to], t.action);
        }
        for t in &sub.transitions {
            b.transition(inner[t.from], t.symbol, t.guard, inner[t.to], t.action);
        }
        b.build()
    }

    /// All accepted words of length at most `max_len`.
    ///
    /// Works on nondeterministic machines and machines with ε-moves by
    /// tracking sets of configurations. Counters are bounded by what
    /// `max_len` moves could possibly reach.
    pub fn enumerate_accepted(&self, max_len: usize) -> Result<BTreeSet<Vec<S>>, AutomatonError> {
        if max_len > MAX_ENUMERATION_LEN {
            return Err(AutomatonError::EnumerationTooLong(max_len));
        }
        let bound = MAX_DELTA as i64 * (max_len as i64 + 1) + 8 * self.states.len() as i64;
        let mut out = BTreeSet::new();
        let start = self.config_closure(BTreeSet::from([(self.start, 0)]), bound);
        let mut prefix = Vec::new();
        self.enumerate_from(start, max_len, bound, &mut prefix, &mut out);
        Ok(out)
    }

    fn enumerate_from(
        &self,
        configs: BTreeSet<Config>,
        remaining: usize,
        bound: i64,
        prefix: &mut Vec<S>,
        out: &mut BTreeSet<Vec<S>>,
    ) {
        if configs.iter().any(|&(q, c)| self.accepting[q] && c == 0) {
            out.insert(prefix.clone());
        }
        if remaining == 0 {
            return;
        }
        for &symbol in &self.alphabet {
            let next: BTreeSet<Config> = configs
                .iter()
                .flat_map(|&(q, c)| {
                    self.moves_from(q, symbol)
                        .filter(move |t| t.guard.admits(c))
                        .map(move |t| (t.to, t.action.apply(c)))
                })
                .filter(|&(_, c)| c.abs() <= bound)
                .collect();
            if next.is_empty() {
                continue;
            }
            let next = self.config_closure(next, bound);
            prefix.push(symbol);
            self.enumerate_from(next, remaining - 1, bound, prefix, out);
            prefix.pop();
        }
    }

    fn config_closure(&self, configs: BTreeSet<Config>, bound: i64) -> BTreeSet<Config> {
        if !self.has_epsilon() {
            return configs;
        }
        let mut out = BTreeSet::new();
        let mut stack: Vec<Config> = configs.into_iter().collect();
        while let Some((q, c)) = stack.pop() {
            if c.abs() > bound || !out.insert((q, c)) {
                continue;
            }
            for t in self.epsilon_from(q).filter(|t| t.guard.admits(c)) {
                stack.push((t.to, t.action.apply(c)));
            }
        }
        out
    }

    /// Nondeterministic acceptance test; tolerates ε-moves and overlaps.
    pub fn accepts_nondeterministic(&self, word: &[S]) -> bool {
        let bound = MAX_DELTA as i64 * (word.len() as i64 + 1) + 8 * self.states.len() as i64;
        let mut configs = self.config_closure(BTreeSet::from([(self.start, 0)]), bound);
        for &symbol in word {
            let next: BTreeSet<Config> = configs
                .iter()
                .flat_map(|&(q, c)| {
                    self.moves_from(q, symbol)
                        .filter(move |t| t.guard.admits(c))
                        .map(move |t| (t.to, t.action.apply(c)))
                })
                .collect();
            configs = self.config_closure(next, bound);
            if configs.is_empty() {
                return false;
            }
        }
        configs.iter().any(|&(q, c)| self.accepting[q] && c == 0)
    }

    /// Union by a fresh start state with ε-moves into each operand.
    pub fn union(
        machines: &[&CounterAutomaton<S>],
        name: &str,
    ) -> Result<CounterAutomaton<S>, AutomatonError> {
        let mut b = AutomatonBuilder::new(name);
        let start = b.state("start");
        b.start(start);
        let alphabet = machines
            .first()
            .map(|m| m.alphabet.clone())
            .unwrap_or_else(S::universe);
        b.alphabet(alphabet.clone());
        for (k, m) in machines.iter().enumerate() {
            if m.alphabet != alphabet {
                return Err(AutomatonError::AlphabetMismatch);
            }
            let ids: Vec<usize> = m
                .states
                .iter()
                .map(|s| b.state(&format!("{k}.{s}")))
                .collect();
            for q in m.accepting_states() {
                b.accept(ids[q]);
            }
            b.transition(start, None, Guard::Any, ids[m.start], CounterAction::NONE);
            for t in &m.transitions {
                b.transition(ids[t.from], t.symbol, t.guard, ids[t.to], t.action);
            }
        }
        b.build()
    }
}

/// Indices of the machines accepting `word`. Each machine must be deterministic.
pub fn union_accepts<S: Symbol>(
    machines: &[CounterAutomaton<S>],
    word: &[S],
) -> Result<Vec<usize>, AutomatonError> {
    let mut hits = Vec::new();
    for (i, m) in machines.iter().enumerate() {
        if m.accepts(word)? {
            hits.push(i);
        }
    }
    Ok(hits)
}
