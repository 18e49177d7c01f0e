//! Exhaustive checks of the structure against the group arithmetic.
//!
//! Every suite is a finite sweep over a named set. Results are collected in
//! a [`VerificationReport`] whose text form is stable for fixed parameters.

use std::fmt;
use std::sync::Mutex;

use rayon::prelude::*;
use thiserror::Error;

use crate::encoding::{
    convolve_pair, decode, encode, is_linf_valid, ConvolvedWord, Sym, SymbolWord,
};
use crate::group::{burillo_d, multiply, CayleyBall, GroupError, NormalForm};
use crate::structure::{Generator, MachineLibrary, Multiplier, Structure};

pub const MAX_LANGUAGE_LEN: usize = 14;
pub const MAX_RADIUS: u32 = 8;
pub const MAX_LEN_CAP: usize = 9;
/// Failures listed per suite; the counts are always complete.
pub const SAMPLE_CAP: usize = 20;

#[derive(Debug, Error)]
pub enum VerificationError {
    #[error("{name} = {value} exceeds the limit {limit}")]
    TooLarge {
        name: &'static str,
        value: usize,
        limit: usize,
    },
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Sweep bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerificationParams {
    pub language_len: usize,
    pub radius: u32,
    pub len_cap: usize,
    pub p_max: usize,
    pub m_max: usize,
}

impl Default for VerificationParams {
    fn default() -> Self {
        VerificationParams {
            language_len: 12,
            radius: 7,
            len_cap: 7,
            p_max: 50,
            m_max: 5,
        }
    }
}

impl VerificationParams {
    pub fn validate(&self) -> Result<(), VerificationError> {
        let check = |name, value: usize, limit: usize| {
            if value > limit {
                Err(VerificationError::TooLarge { name, value, limit })
            } else {
                Ok(())
            }
        };
        check("language_len", self.language_len, MAX_LANGUAGE_LEN)?;
        check("radius", self.radius as usize, MAX_RADIUS as usize)?;
        check("len_cap", self.len_cap, MAX_LEN_CAP)
    }
}

impl fmt::Display for VerificationParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "language_len={} radius={} len_cap={} p_max={} m_max={}",
            self.language_len, self.radius, self.len_cap, self.p_max, self.m_max
        )
    }
}

/// Outcome of one suite.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SuiteResult {
    pub name: String,
    pub passed: usize,
    pub failed: usize,
    pub samples: Vec<String>,
    /// Informational lines that do not affect the verdict.
    pub notes: Vec<String>,
}

impl SuiteResult {
    pub fn new(name: &str) -> Self {
        SuiteResult {
            name: name.to_string(),
            ..Default::default()
        }
    }

    pub fn ok(&self) -> bool {
        self.failed == 0
    }

    pub fn checked(&self) -> usize {
        self.passed + self.failed
    }

    pub fn record(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
            if self.samples.len() < SAMPLE_CAP {
                self.samples.push(witness());
            }
        }
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.notes.push(line.into());
    }

    /// Merges results computed in order (for parallel sweeps).
    fn absorb(&mut self, outcomes: impl IntoIterator<Item = Option<String>>) {
        for outcome in outcomes {
            match outcome {
                None => self.record(true, String::new),
                Some(w) => self.record(false, || w),
            }
        }
    }
}

impl fmt::Display for SuiteResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "[{}] {} checked={} passed={} failed={}",
            self.name,
            if self.ok() { "PASS" } else { "FAIL" },
            self.checked(),
            self.passed,
            self.failed
        )?;
        for s in &self.samples {
            writeln!(f, "  failure: {s}")?;
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub params: VerificationParams,
    pub patches: bool,
    pub suites: Vec<SuiteResult>,
}

impl VerificationReport {
    pub fn ok(&self) -> bool {
        self.suites.iter().all(SuiteResult::ok)
    }

    pub fn suite(&self, name: &str) -> Option<&SuiteResult> {
        self.suites.iter().find(|s| s.name == name)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "verification report")?;
        writeln!(
            f,
            "parameters: {} patches={}",
            self.params,
            if self.patches { "on" } else { "off" }
        )?;
        for s in &self.suites {
            write!(f, "{s}")?;
        }
        writeln!(f, "summary:")?;
        for s in &self.suites {
            writeln!(
                f,
                "  {}: {} {}/{}",
                s.name,
                if s.ok() { "pass" } else { "fail" },
                s.passed,
                s.checked()
            )?;
        }
        let failing = self.suites.iter().filter(|s| !s.ok()).count();
        if failing == 0 {
            writeln!(f, "  overall: PASS")
        } else {
            writeln!(
                f,
                "  overall: FAIL ({failing} of {} suites)",
                self.suites.len()
            )
        }
    }
}

fn witness(u: &SymbolWord, v: &SymbolWord) -> String {
    let c = ConvolvedWord::from_pairs(&convolve_pair(u, v)).expect("two tracks");
    format!("⊗(\"{u}\", \"{v}\") = {c}")
}

/// The normal form acceptor against the block-structural validity predicate.
pub fn verify_language(structure: &Structure, max_len: usize) -> SuiteResult {
    let mut suite = SuiteResult::new("language");
    let fsa = structure.linf_fsa();
    let words: Vec<SymbolWord> = SymbolWord::all_up_to(max_len).collect();
    let outcomes: Vec<Option<String>> = words
        .par_iter()
        .map(|w| {
            let by_machine = fsa.accepts(w.symbols()).unwrap_or(false);
            let by_blocks = is_linf_valid(w);
            (by_machine != by_blocks)
                .then(|| format!("\"{w}\": machine={by_machine} blocks={by_blocks}"))
        })
        .collect();
    suite.absorb(outcomes);
    suite
}

/// Round trips between normal forms and words.
pub fn verify_bijection(ball: &CayleyBall, max_len: usize) -> SuiteResult {
    let mut suite = SuiteResult::new("bijection");
    let forward: Vec<Option<String>> = ball
        .elements()
        .par_iter()
        .map(|nf| {
            let w = encode(nf);
            match decode(&w) {
                Ok(back) if back == *nf => None,
                other => Some(format!("decode(encode({nf})) = {other:?}")),
            }
        })
        .collect();
    suite.absorb(forward);
    let words: Vec<SymbolWord> = SymbolWord::all_up_to(max_len)
        .filter(is_linf_valid)
        .collect();
    let backward: Vec<Option<String>> = words
        .par_iter()
        .map(|w| match decode(w) {
            Ok(nf) if encode(&nf) == *w => None,
            other => Some(format!("encode(decode(\"{w}\")) from {other:?}")),
        })
        .collect();
    suite.absorb(backward);
    suite
}

/// Counter magnitudes and final counters seen while running multipliers.
#[derive(Debug, Default)]
pub struct CounterAudit {
    runs: usize,
    violations: Vec<String>,
    violation_count: usize,
}

impl CounterAudit {
    /// Runs every case machine on `⊗(u, v)` and checks the `2n + 2` bound and
    /// that accepting traces end at counter 0.
    fn observe(&mut self, m: &Multiplier, u: &SymbolWord, v: &SymbolWord) {
        let word = if m.track_swapped {
            convolve_pair(v, u)
        } else {
            convolve_pair(u, v)
        };
        let bound = 2 * word.len() as i64 + 2;
        for case in &m.machines {
            self.runs += 1;
            let Ok(run) = case.automaton.run(&word) else {
                continue;
            };
            let peak = run.trace.iter().map(|&(_, c)| c.abs()).max().unwrap_or(0);
            let final_zero = run.trace.last().is_some_and(|&(_, c)| c == 0);
            if peak > bound || (run.accepted && !final_zero) {
                self.violation_count += 1;
                if self.violations.len() < SAMPLE_CAP {
                    self.violations.push(format!(
                        "{} on {}: peak |counter| {peak} > {bound} or nonzero accepting counter",
                        case.name,
                        witness(u, v)
                    ));
                }
            }
        }
    }

    fn merge(&mut self, other: CounterAudit) {
        self.runs += other.runs;
        self.violation_count += other.violation_count;
        for v in other.violations {
            if self.violations.len() < SAMPLE_CAP {
                self.violations.push(v);
            }
        }
    }
}

fn case_names(m: &Multiplier, u: &SymbolWord, v: &SymbolWord) -> String {
    let names: Vec<&str> = m
        .accepting_cases(u, v)
        .into_iter()
        .map(|i| m.machines[i].label.as_str())
        .collect();
    if names.is_empty() {
        "none".to_string()
    } else {
        names.join(", ")
    }
}

/// Positive sweep over the ball and exhaustive sweep over pairs of words.
pub fn verify_multipliers(
    structure: &Structure,
    ball: &CayleyBall,
    len_cap: usize,
    audit: &mut CounterAudit,
) -> SuiteResult {
    let mut suite = SuiteResult::new("multipliers");
    let shared = Mutex::new(CounterAudit::default());
    let mut positive_rows: Vec<(&NormalForm, Generator)> = Vec::new();
    for nf in ball.elements() {
        for g in Generator::ALL {
            positive_rows.push((nf, g));
        }
    }
    let positive: Vec<Option<String>> = positive_rows
        .par_iter()
        .map(|&(nf, g)| {
            let u = encode(nf);
            let v = encode(&multiply(nf, g.letter()));
            let m = structure.multiplier(g);
            let mut local = CounterAudit::default();
            local.observe(m, &u, &v);
            shared.lock().expect("audit lock").merge(local);
            (!m.accepts(&u, &v)).then(|| format!("{g} rejects the true image {}", witness(&u, &v)))
        })
        .collect();
    suite.absorb(positive);

    let words: Vec<SymbolWord> = SymbolWord::all_up_to(len_cap)
        .filter(is_linf_valid)
        .collect();
    let images: Vec<[SymbolWord; 4]> = words
        .iter()
        .map(|u| {
            let nf = decode(u).expect("valid word");
            Generator::ALL.map(|g| encode(&multiply(&nf, g.letter())))
        })
        .collect();
    let negative: Vec<Option<String>> = (0..words.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let u = &words[i];
            let mut local = CounterAudit::default();
            let mut out = Vec::with_capacity(words.len() * 4);
            for (k, g) in Generator::ALL.into_iter().enumerate() {
                let m = structure.multiplier(g);
                let truth = &images[i][k];
                for v in &words {
                    let accepted = m.accepts(u, v);
                    local.observe(m, u, v);
                    out.push((accepted != (v == truth)).then(|| {
                        format!(
                            "{g} {} {} (image is {truth:?}; cases: {})",
                            if accepted { "accepts" } else { "rejects" },
                            witness(u, v),
                            case_names(m, u, v)
                        )
                    }));
                }
            }
            shared.lock().expect("audit lock").merge(local);
            out
        })
        .collect();
    suite.absorb(negative);
    audit.merge(shared.into_inner().expect("audit lock"));
    suite.note(format!(
        "ball elements: {}; words of length <= {len_cap}: {}",
        ball.len(),
        words.len()
    ));
    suite
}

/// Word length against the encoding length: `D'/12 - 2 <= l <= 3D'`.
pub fn verify_quasigeodesic(ball: &CayleyBall) -> SuiteResult {
    let mut suite = SuiteResult::new("quasigeodesic");
    for (nf, l) in ball.iter() {
        let d_prime = encode(nf).len() as u64;
        let l = u64::from(l);
        let ok = d_prime == 0 || (d_prime <= 12 * (l + 2) && l <= 3 * d_prime);
        suite.record(ok, || {
            format!("{nf}: D'={d_prime} l={l} outside D'/12-2 <= l <= 3D'")
        });
    }
    suite
}

/// The encoding length `D'` against Burillo's `D`: `D <= D' <= 2D`.
pub fn verify_encoding_length(ball: &CayleyBall) -> SuiteResult {
    let mut suite = SuiteResult::new("encoding-length");
    let mut reversed_holds = 0usize;
    let mut reversed_first: Option<String> = None;
    for nf in ball.elements() {
        let d_prime = encode(nf).len() as u64;
        let d = burillo_d(nf);
        suite.record(d <= d_prime && d_prime <= 2 * d, || {
            format!("{nf}: D={d} D'={d_prime} outside D <= D' <= 2D")
        });
        if d_prime <= d && d <= 2 * d_prime {
            reversed_holds += 1;
        } else if reversed_first.is_none() {
            reversed_first = Some(format!("{nf}: D={d} D'={d_prime}"));
        }
    }
    suite.note(format!(
        "D' <= D <= 2D' holds on {reversed_holds} of {} elements{}",
        ball.len(),
        reversed_first
            .map(|w| format!("; first exception {w}"))
            .unwrap_or_default()
    ));
    suite
}

/// `⊗(b^p, b^p #^{p+1} b)` is accepted and the pumped words are not.
pub fn verify_pumping(structure: &Structure, p_max: usize, m_max: usize) -> SuiteResult {
    let mut suite = SuiteResult::new("pumping");
    let m = structure.multiplier(Generator::X1Inv);
    let word = |b_count: usize, hashes: usize| {
        let mut w = vec![Sym::B; b_count];
        w.extend(std::iter::repeat_n(Sym::Hash, hashes));
        w.push(Sym::B);
        SymbolWord(w)
    };
    for p in 1..=p_max {
        let u = SymbolWord(vec![Sym::B; p]);
        let v = word(p, p + 1);
        suite.record(m.accepts(&u, &v), || {
            format!("p={p}: {} rejected", witness(&u, &v))
        });
        for k in 1..=m_max {
            let u = SymbolWord(vec![Sym::B; p + k]);
            let v = word(p + k, p + 1);
            suite.record(!m.accepts(&u, &v), || {
                format!("p={p} m={k}: {} accepted", witness(&u, &v))
            });
        }
    }
    suite
}

/// Determinism of every shipped machine, the counter audit and overlaps
/// between case machines.
pub fn verify_machines(
    structure: &Structure,
    library: &MachineLibrary,
    audit: &CounterAudit,
    overlap_len: usize,
) -> SuiteResult {
    let mut suite = SuiteResult::new("machines");
    for name in MachineLibrary::names() {
        let outcome = if name == "fig1" {
            library
                .symbol_machine(name)
                .map(|m| (m.has_epsilon(), m.check_deterministic()))
        } else {
            library.pair_machine(name).and_then(|raw| {
                let eps = raw.has_epsilon();
                library
                    .assembled(name)
                    .map(|m| (eps, m.check_deterministic()))
            })
        };
        match outcome {
            Ok((eps, conflicts)) => {
                if eps {
                    suite.note(format!(
                        "{name}: contains ε (by design); checked after elimination"
                    ));
                }
                suite.record(conflicts.is_empty(), || {
                    let list: Vec<String> = conflicts.iter().map(ToString::to_string).collect();
                    format!("{name}: {}", list.join("; "))
                });
            }
            Err(e) => suite.record(false, || format!("{name}: {e}")),
        }
    }
    for g in Generator::ALL {
        for case in &structure.multiplier(g).machines {
            let conflicts = case.automaton.check_deterministic();
            suite.record(conflicts.is_empty(), || {
                format!(
                    "{g} {}: {} conflicts after intersection",
                    case.name,
                    conflicts.len()
                )
            });
        }
    }
    suite.record(audit.violation_count == 0, || audit.violations.join(" | "));
    suite.note(format!(
        "counter audit: {} runs, {} violations",
        audit.runs, audit.violation_count
    ));

    for g in [Generator::X0Inv, Generator::X1Inv] {
        let m = structure.multiplier(g);
        let words: Vec<SymbolWord> = SymbolWord::all_up_to(overlap_len)
            .filter(is_linf_valid)
            .collect();
        let overlaps: Vec<(SymbolWord, SymbolWord, String)> = words
            .par_iter()
            .filter_map(|u| {
                let v = encode(&multiply(&decode(u).expect("valid word"), g.letter()));
                let cases = m.accepting_cases(u, &v);
                (cases.len() > 1).then(|| {
                    let labels: Vec<&str> = cases
                        .iter()
                        .map(|&i| m.machines[i].label.as_str())
                        .collect();
                    (u.clone(), v, labels.join(" + "))
                })
            })
            .collect();
        let mut groups: Vec<(String, usize, String)> = Vec::new();
        for (u, v, labels) in &overlaps {
            match groups.iter_mut().find(|(l, ..)| l == labels) {
                Some(entry) => entry.1 += 1,
                None => groups.push((labels.clone(), 1, witness(u, v))),
            }
        }
        if groups.is_empty() {
            suite.note(format!(
                "{g}: case machines disjoint on inputs of length <= {overlap_len}"
            ));
        }
        for (labels, count, first) in groups {
            suite.note(format!(
                "{g}: overlap {labels} on {count} inputs of length <= {overlap_len}, e.g. {first}"
            ));
        }
    }
    suite
}

/// Runs every suite.
pub fn verify_all(
    structure: &Structure,
    library: &MachineLibrary,
    params: VerificationParams,
) -> Result<VerificationReport, VerificationError> {
    params.validate()?;
    let ball = CayleyBall::new(params.radius)?;
    let mut audit = CounterAudit::default();
    let language = verify_language(structure, params.language_len);
    let bijection = verify_bijection(&ball, params.language_len);
    let multipliers = verify_multipliers(structure, &ball, params.len_cap, &mut audit);
    let quasigeodesic = verify_quasigeodesic(&ball);
    let encoding_length = verify_encoding_length(&ball);
    let pumping = verify_pumping(structure, params.p_max, params.m_max);
    let machines = verify_machines(structure, library, &audit, 10);
    Ok(VerificationReport {
        params,
        patches: structure.options().patches,
        suites: vec![
            language,
            bijection,
            multipliers,
            quasigeodesic,
            encoding_length,
            pumping,
            machines,
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn structure() -> Structure {
        Structure::standard().unwrap()
    }

    #[test]
    fn language_small() {
        let s = structure();
        assert_eq!(verify_language(&s, 0).checked(), 1);
        let r = verify_language(&s, 2);
        assert_eq!((r.checked(), r.failed), (13, 0));
    }

    #[test]
    fn radius_zero_rows() {
        let s = structure();
        let ball = CayleyBall::new(0).unwrap();
        let mut audit = CounterAudit::default();
        let r = verify_multipliers(&s, &ball, 0, &mut audit);
        // four positive rows plus four (e, e) negative rows
        assert_eq!((r.checked(), r.failed), (8, 0));
    }

    #[test]
    fn pumping_small() {
        let r = verify_pumping(&structure(), 3, 2);
        assert_eq!((r.checked(), r.failed), (9, 0));
    }

    #[test]
    fn quasigeodesic_first_rows() {
        let ball = CayleyBall::new(1).unwrap();
        assert_eq!(verify_quasigeodesic(&ball).checked(), 5);
        // x0: D = 1 + 0 and D' = 1
        let e = verify_encoding_length(&ball);
        assert_eq!(e.checked(), 5);
    }

    #[test]
    fn suite_caps_samples() {
        let mut s = SuiteResult::new("t");
        for i in 0..30 {
            s.record(false, || i.to_string());
        }
        assert_eq!((s.failed, s.samples.len()), (30, SAMPLE_CAP));
        assert!(!s.ok());
    }

    #[test]
    fn params_are_capped() {
        let p = VerificationParams {
            language_len: 15,
            ..Default::default()
        };
        assert!(matches!(
            p.validate(),
            Err(VerificationError::TooLarge {
                name: "language_len",
                ..
            })
        ));
    }

    #[test]
    fn report_is_deterministic() {
        let s = structure();
        let lib = MachineLibrary::embedded();
        let p = VerificationParams {
            language_len: 4,
            radius: 2,
            len_cap: 3,
            p_max: 3,
            m_max: 2,
        };
        let a = verify_all(&s, &lib, p).unwrap().to_string();
        let b = verify_all(&s, &lib, p).unwrap().to_string();
        assert_eq!(a, b);
        assert!(a.contains("summary:"));
    }
}
