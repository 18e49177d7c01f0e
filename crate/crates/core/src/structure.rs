//! The automatic structure: the normal form acceptor, the pair acceptor and
//! the multiplier machines for `x0^±1` and `x1^±1`.
//!
//! Each multiplier is a union of case machines. A case machine is a
//! deterministic one-counter machine over the pair alphabet, already
//! intersected with the acceptor for `⊗(L, L)`, so membership of `⊗(u, v)`
//! in the multiplier language is "some case machine accepts".
//!
//! Machine definitions are data. They ship embedded in the crate and can be
//! overridden from a directory (see [`MachineLibrary`]).

use std::borrow::Cow;
use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::automata::{AutomatonBuilder, AutomatonError, Conflict, CounterAutomaton, RunSummary};
use crate::encoding::{convolve_pair, encode, is_linf_valid, Padded, Pair, Sym, SymbolWord};
use crate::group::{GeneratorLetter, GeneratorWord};
use crate::patterns::{PatternError, ShiftPattern};

/// Environment variable naming a directory of `.cam` files that override the
/// embedded machine definitions.
pub const MACHINES_ENV: &str = "THOMPSON_MACHINES";

#[derive(Debug, Error)]
pub enum StructureError {
    #[error("unknown machine `{0}`")]
    UnknownMachine(String),
    #[error("machine `{name}`: {source}")]
    Machine {
        name: String,
        source: AutomatonError,
    },
    #[error("machine `{name}` is not deterministic: {conflict}")]
    Nondeterministic { name: String, conflict: Conflict },
    #[error("pattern `{name}`: {source}")]
    Pattern { name: String, source: PatternError },
    #[error("reading `{path}`: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("`{0}` is not a valid normal form word")]
    InvalidWord(SymbolWord),
    #[error("no image of `{u}` under {generator} within the search bounds")]
    NoImage { u: SymbolWord, generator: Generator },
    #[error("`{u}` has several images under {generator}: {}", images.join(", "))]
    AmbiguousImage {
        u: SymbolWord,
        generator: Generator,
        images: Vec<String>,
    },
    #[error("{0} is not one of x0, x0^-1, x1, x1^-1")]
    NotFiniteGenerator(GeneratorLetter),
}

/// One of the four finite generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    X0,
    X0Inv,
    X1,
    X1Inv,
}

impl Generator {
    pub const ALL: [Generator; 4] = [
        Generator::X0,
        Generator::X0Inv,
        Generator::X1,
        Generator::X1Inv,
    ];

    pub fn letter(self) -> GeneratorLetter {
        match self {
            Generator::X0 => GeneratorLetter::x(0),
            Generator::X0Inv => GeneratorLetter::x_inv(0),
            Generator::X1 => GeneratorLetter::x(1),
            Generator::X1Inv => GeneratorLetter::x_inv(1),
        }
    }

    pub fn inverse(self) -> Generator {
        match self {
            Generator::X0 => Generator::X0Inv,
            Generator::X0Inv => Generator::X0,
            Generator::X1 => Generator::X1Inv,
            Generator::X1Inv => Generator::X1,
        }
    }

    pub fn is_inverse(self) -> bool {
        matches!(self, Generator::X0Inv | Generator::X1Inv)
    }
}

impl TryFrom<GeneratorLetter> for Generator {
    type Error = StructureError;

    fn try_from(g: GeneratorLetter) -> Result<Self, Self::Error> {
        match (g.index, g.inverse) {
            (0, false) => Ok(Generator::X0),
            (0, true) => Ok(Generator::X0Inv),
            (1, false) => Ok(Generator::X1),
            (1, true) => Ok(Generator::X1Inv),
            _ => Err(StructureError::NotFiniteGenerator(g)),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Generator::X0 => "x0",
            Generator::X0Inv => "x0inv",
            Generator::X1 => "x1",
            Generator::X1Inv => "x1inv",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown generator `{0}`; expected x0, x0inv, x1 or x1inv")]
pub struct ParseGeneratorError(String);

impl FromStr for Generator {
    type Err = ParseGeneratorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "x0" | "x0^1" => Ok(Generator::X0),
            "x0inv" | "x0^-1" | "X0" => Ok(Generator::X0Inv),
            "x1" | "x1^1" => Ok(Generator::X1),
            "x1inv" | "x1^-1" | "X1" => Ok(Generator::X1Inv),
            other => Err(ParseGeneratorError(other.to_string())),
        }
    }
}

/// Pair machines generated from shift patterns: name, prefix regex, upper
/// insert, lower insert, suffix regex.
pub const PATTERN_MACHINES: &[(&str, &str, &str, &str, &str)] = &[
    ("m1", "", "", "#", ".*"),
    ("m2", "", "", "#", "a+#.*"),
    ("m3", "", "a##", "#", ".*"),
    ("m221", "", "##", "", ".*"),
    ("m2b", "", "", "#", "[ab].*"),
    ("x0inv-case1", "a*b*", "", "b", "(#.*)?"),
    ("x0inv-case2", "a*", "a##", "#", ".*"),
    ("x0inv-patch-power", "a*", "a", "", ""),
    ("x1inv-case1.1", "a*", "", "#b", ""),
    ("x1inv-case1.2", "a*#a*b*", "", "b", "(#.*)?"),
    ("x1inv-case1.3a", "a*#a+", "a", "", ""),
    ("x1inv-case1.3b", "a*", "#a", "", ""),
    ("x1inv-case1.3c", "a*#a+", "a##", "#", ".*"),
    ("x1inv-patch-1.3", "a*#", "a##", "#", ".*"),
];

/// The shift pattern a shipped machine was generated from, if any.
pub fn shift_pattern(name: &str) -> Option<ShiftPattern> {
    PATTERN_MACHINES
        .iter()
        .find(|p| p.0 == name)
        .map(|&(name, prefix, upper, lower, suffix)| {
            ShiftPattern::new(name, prefix, upper, lower, suffix)
        })
}

macro_rules! embedded {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../machines/", $name, ".cam")))),*]
    };
}

const EMBEDDED: &[(&str, &str)] = embedded![
    "fig1",
    "fig2",
    "fig3",
    "fig4",
    "fig5",
    "fig6",
    "m1",
    "m2",
    "m3",
    "m221",
    "m2b",
    "x0inv-case1",
    "x0inv-case2",
    "x0inv-patch-power",
    "x1inv-case1.1",
    "x1inv-case1.2",
    "x1inv-case1.3a",
    "x1inv-case1.3b",
    "x1inv-case1.3c",
    "x1inv-patch-1.3",
    "x1inv-patch-top-b",
];

/// Source of machine definitions.
#[derive(Clone, Debug, Default)]
pub struct MachineLibrary {
    dir: Option<PathBuf>,
}

impl MachineLibrary {
    /// Only the definitions compiled into the crate.
    pub fn embedded() -> Self {
        MachineLibrary { dir: None }
    }

    /// Definitions in `dir` take precedence over the embedded ones.
    pub fn with_dir(dir: impl Into<PathBuf>) -> Self {
        MachineLibrary {
            dir: Some(dir.into()),
        }
    }

    /// Honours [`MACHINES_ENV`] when set.
    pub fn from_env() -> Self {
        match std::env::var_os(MACHINES_ENV) {
            Some(dir) if !dir.is_empty() => MachineLibrary::with_dir(dir),
            _ => MachineLibrary::embedded(),
        }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn names() -> impl Iterator<Item = &'static str> {
        EMBEDDED.iter().map(|(n, _)| *n)
    }

    /// The definition text for `name`.
    pub fn text(&self, name: &str) -> Result<Cow<'static, str>, StructureError> {
        if let Some(dir) = &self.dir {
            let path = dir.join(format!("{name}.cam"));
            if path.exists() {
                return std::fs::read_to_string(&path)
                    .map(Cow::Owned)
                    .map_err(|source| StructureError::Io { path, source });
            }
        }
        EMBEDDED
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, t)| Cow::Borrowed(*t))
            .ok_or_else(|| StructureError::UnknownMachine(name.to_string()))
    }

    /// The symbol machine `name`, exactly as defined.
    pub fn symbol_machine(&self, name: &str) -> Result<CounterAutomaton<Sym>, StructureError> {
        CounterAutomaton::from_definition(&self.text(name)?).map_err(|source| {
            StructureError::Machine {
                name: name.to_string(),
                source,
            }
        })
    }

    /// The pair machine `name`, exactly as defined (placeholders unresolved).
    pub fn pair_machine(&self, name: &str) -> Result<CounterAutomaton<Pair>, StructureError> {
        CounterAutomaton::from_definition(&self.text(name)?).map_err(|source| {
            StructureError::Machine {
                name: name.to_string(),
                source,
            }
        })
    }

    /// The pair machine with placeholder states replaced and ε-moves removed.
    pub fn assembled(&self, name: &str) -> Result<CounterAutomaton<Pair>, StructureError> {
        let wrap = |source| StructureError::Machine {
            name: name.to_string(),
            source,
        };
        let mut m = self.pair_machine(name)?;
        for &(placeholder, sub) in splices(name) {
            let sub_machine = self.pair_machine(sub)?;
            m = m
                .splice(placeholder, &sub_machine, placeholder)
                .map_err(wrap)?;
        }
        if m.has_epsilon() {
            m = m.eliminate_epsilon().map_err(wrap)?;
        }
        Ok(m)
    }
}

fn splices(name: &str) -> &'static [(&'static str, &'static str)] {
    match name {
        "fig4" => &[("M1", "m1"), ("M2", "m2"), ("M3", "m3")],
        "fig5" => &[("M", "m221")],
        "fig6" => &[("M1_t1", "m1"), ("M2", "m2b"), ("M1_t3", "m1")],
        _ => &[],
    }
}

struct CaseSpec {
    machine: &'static str,
    label: &'static str,
    patch: bool,
}

const X0_INV_CASES: &[CaseSpec] = &[
    CaseSpec {
        machine: "x0inv-case1",
        label: "case 1",
        patch: false,
    },
    CaseSpec {
        machine: "x0inv-case2",
        label: "case 2",
        patch: false,
    },
    CaseSpec {
        machine: "x0inv-patch-power",
        label: "patch: u = a^n",
        patch: true,
    },
];

const X1_INV_CASES: &[CaseSpec] = &[
    CaseSpec {
        machine: "x1inv-case1.1",
        label: "case 1.1",
        patch: false,
    },
    CaseSpec {
        machine: "x1inv-case1.2",
        label: "case 1.2",
        patch: false,
    },
    CaseSpec {
        machine: "x1inv-case1.3a",
        label: "case 1.3 (r1 > 1, empty tail)",
        patch: false,
    },
    CaseSpec {
        machine: "x1inv-case1.3b",
        label: "case 1.3 (r1 = 1, empty tail)",
        patch: false,
    },
    CaseSpec {
        machine: "x1inv-case1.3c",
        label: "case 1.3 (r1 > 1, tail ##)",
        patch: false,
    },
    CaseSpec {
        machine: "fig2",
        label: "case 2.1 R>M",
        patch: false,
    },
    CaseSpec {
        machine: "fig3",
        label: "case 2.1 R=M",
        patch: false,
    },
    CaseSpec {
        machine: "fig4",
        label: "case 2.1 R<M",
        patch: false,
    },
    CaseSpec {
        machine: "fig5",
        label: "case 2.2.1",
        patch: false,
    },
    CaseSpec {
        machine: "fig6",
        label: "case 2.2.2",
        patch: false,
    },
    CaseSpec {
        machine: "x1inv-patch-1.3",
        label: "patch: case 1.3 (r1 = 1, tail ##)",
        patch: true,
    },
    CaseSpec {
        machine: "x1inv-patch-top-b",
        label: "patch: case 2.2.2 at the top block",
        patch: true,
    },
];

/// A deterministic case machine of a multiplier, restricted to `⊗(L, L)`.
#[derive(Clone, Debug)]
pub struct CaseMachine {
    pub name: String,
    pub label: String,
    pub patch: bool,
    pub automaton: CounterAutomaton<Pair>,
}

/// The multiplier language for one generator as a union of case machines.
#[derive(Clone, Debug)]
pub struct Multiplier {
    pub generator: Generator,
    pub machines: Vec<CaseMachine>,
    /// Positive generators reuse the inverse generator's machines on `⊗(v, u)`.
    pub track_swapped: bool,
}

impl Multiplier {
    fn column_word(&self, u: &SymbolWord, v: &SymbolWord) -> Vec<Pair> {
        if self.track_swapped {
            convolve_pair(v, u)
        } else {
            convolve_pair(u, v)
        }
    }

    /// Indices of the case machines accepting `⊗(u, v)` (tracks swapped for
    /// positive generators).
    pub fn accepting_cases(&self, u: &SymbolWord, v: &SymbolWord) -> Vec<usize> {
        let word = self.column_word(u, v);
        (0..self.machines.len())
            .filter(|&i| self.machines[i].automaton.accepts(&word).unwrap_or(false))
            .collect()
    }

    pub fn accepts(&self, u: &SymbolWord, v: &SymbolWord) -> bool {
        let word = self.column_word(u, v);
        self.machines
            .iter()
            .any(|m| m.automaton.accepts(&word).unwrap_or(false))
    }

    /// Acceptance plus the largest counter magnitude over all case runs.
    pub fn accepts_with_summary(&self, u: &SymbolWord, v: &SymbolWord) -> (bool, RunSummary) {
        let word = self.column_word(u, v);
        let mut total = RunSummary {
            accepted: false,
            max_abs_counter: 0,
            steps: word.len(),
        };
        for m in &self.machines {
            if let Ok(s) = m.automaton.run_summary(&word) {
                total.accepted |= s.accepted;
                total.max_abs_counter = total.max_abs_counter.max(s.max_abs_counter);
            }
        }
        (total.accepted, total)
    }

    /// Every `v` with `⊗(u, v)` accepted and `|v| <= 2|u| + 2`.
    pub fn images(&self, u: &SymbolWord) -> Images {
        self.images_within(u, 2 * u.len() + 2)
    }

    /// Every `v` with `⊗(u, v)` accepted and `|v| <= max_len`.
    pub fn images_within(&self, u: &SymbolWord, max_len: usize) -> Images {
        let fixed_track = usize::from(self.track_swapped);
        let mut out = Images::default();
        for m in &self.machines {
            let (words, count) = search(&m.automaton, u.symbols(), fixed_track, max_len);
            out.words.extend(words.into_iter().map(SymbolWord));
            out.unlisted |= count > 1;
        }
        out
    }
}

/// Result of an image search.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Images {
    pub words: BTreeSet<SymbolWord>,
    /// Some case machine accepts further images not listed in `words`.
    pub unlisted: bool,
}

impl Images {
    /// The image if there is exactly one.
    pub fn unique(&self) -> Option<&SymbolWord> {
        let mut it = self.words.iter();
        match (it.next(), it.next(), self.unlisted) {
            (Some(v), None, false) => Some(v),
            _ => None,
        }
    }
}

fn column(fixed: Padded, free: Padded, fixed_track: usize) -> Option<Pair> {
    if fixed_track == 0 {
        Pair::new(fixed, free)
    } else {
        Pair::new(free, fixed)
    }
}

/// Breadth-first search over configurations with one track fixed and the
/// other chosen freely, up to `max_free` free symbols.
///
/// The machine is deterministic, so each free word is one path; paths are
/// counted (saturating at 2) to tell a unique accepted word from several.
/// Returns one accepted word per accepting configuration and the number of
/// accepted words.
fn search(
    m: &CounterAutomaton<Pair>,
    fixed: &[Sym],
    fixed_track: usize,
    max_free: usize,
) -> (Vec<Vec<Sym>>, u8) {
    #[derive(Clone, Copy, PartialEq, Eq, Hash)]
    struct Key {
        state: usize,
        counter: i64,
        column: usize,
        free_len: usize,
        ended: bool,
    }
    struct Node {
        key: Key,
        parent: usize,
        symbol: Option<Sym>,
        paths: u8,
    }
    let start = Key {
        state: m.start(),
        counter: 0,
        column: 0,
        free_len: 0,
        ended: false,
    };
    let mut nodes = vec![Node {
        key: start,
        parent: usize::MAX,
        symbol: None,
        paths: 1,
    }];
    let mut index = HashMap::from([(start, 0usize)]);
    let mut accepted = Vec::new();
    let mut total: u8 = 0;
    // Every edge goes from one column to the next, so a node's path count is
    // final by the time it is reached in this order.
    let mut at = 0;
    while at < nodes.len() {
        let key = nodes[at].key;
        let paths = nodes[at].paths;
        if key.column >= fixed.len() && m.is_accepting(key.state) && key.counter == 0 {
            accepted.push(at);
            total = total.saturating_add(paths).min(2);
        }
        let fixed_sym = fixed.get(key.column).copied();
        let mut choices: Vec<Padded> = Vec::with_capacity(4);
        if !key.ended && key.free_len < max_free {
            choices.extend(Sym::ALL.iter().map(|&s| Some(s)));
        }
        choices.push(None);
        for free in choices {
            let Some(pair) = column(fixed_sym, free, fixed_track) else {
                continue;
            };
            let Ok(Some((state, counter))) = m.step(key.state, key.counter, pair) else {
                continue;
            };
            let next = Key {
                state,
                counter,
                column: key.column + 1,
                free_len: key.free_len + usize::from(free.is_some()),
                ended: free.is_none(),
            };
            match index.get(&next) {
                Some(&i) => nodes[i].paths = nodes[i].paths.saturating_add(paths).min(2),
                None => {
                    index.insert(next, nodes.len());
                    nodes.push(Node {
                        key: next,
                        parent: at,
                        symbol: free,
                        paths,
                    });
                }
            }
        }
        at += 1;
    }
    let mut words: Vec<Vec<Sym>> = accepted
        .into_iter()
        .map(|mut i| {
            let mut word = Vec::new();
            while nodes[i].parent != usize::MAX {
                word.extend(nodes[i].symbol);
                i = nodes[i].parent;
            }
            word.reverse();
            word
        })
        .collect();
    words.sort();
    words.dedup();
    (words, total)
}

/// Options for assembling a [`Structure`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StructureOptions {
    /// Include the machines covering inputs the case analysis misses.
    pub patches: bool,
}

impl Default for StructureOptions {
    fn default() -> Self {
        StructureOptions { patches: true }
    }
}

/// The normal form acceptor and all four multipliers.
#[derive(Clone, Debug)]
pub struct Structure {
    linf: CounterAutomaton<Sym>,
    pair: CounterAutomaton<Pair>,
    multipliers: HashMap<Generator, Multiplier>,
    options: StructureOptions,
}

impl Structure {
    pub fn new(
        library: &MachineLibrary,
        options: StructureOptions,
    ) -> Result<Self, StructureError> {
        let linf = library.symbol_machine("fig1")?;
        let pair = linf_pair_fsa_from(&linf);
        let build = |specs: &[CaseSpec]| -> Result<Vec<CaseMachine>, StructureError> {
            let mut out = Vec::new();
            for spec in specs.iter().filter(|s| options.patches || !s.patch) {
                let raw = library.assembled(spec.machine)?;
                if let Some(conflict) = raw.check_deterministic().into_iter().next() {
                    return Err(StructureError::Nondeterministic {
                        name: spec.machine.to_string(),
                        conflict,
                    });
                }
                let automaton = raw
                    .intersect_regular(&pair)
                    .map_err(|source| StructureError::Machine {
                        name: spec.machine.to_string(),
                        source,
                    })?
                    .trim()
                    .with_name(spec.machine);
                out.push(CaseMachine {
                    name: spec.machine.to_string(),
                    label: spec.label.to_string(),
                    patch: spec.patch,
                    automaton,
                });
            }
            Ok(out)
        };
        let x0 = build(X0_INV_CASES)?;
        let x1 = build(X1_INV_CASES)?;
        let mut multipliers = HashMap::new();
        for (g, machines) in [(Generator::X0Inv, x0), (Generator::X1Inv, x1)] {
            multipliers.insert(
                g.inverse(),
                Multiplier {
                    generator: g.inverse(),
                    machines: machines.clone(),
                    track_swapped: true,
                },
            );
            multipliers.insert(
                g,
                Multiplier {
                    generator: g,
                    machines,
                    track_swapped: false,
                },
            );
        }
        Ok(Structure {
            linf,
            pair,
            multipliers,
            options,
        })
    }

    /// Embedded machines with patches enabled.
    pub fn standard() -> Result<Self, StructureError> {
        Structure::new(&MachineLibrary::embedded(), StructureOptions::default())
    }

    pub fn options(&self) -> StructureOptions {
        self.options
    }

    pub fn linf_fsa(&self) -> &CounterAutomaton<Sym> {
        &self.linf
    }

    pub fn linf_pair_fsa(&self) -> &CounterAutomaton<Pair> {
        &self.pair
    }

    pub fn multiplier(&self, g: Generator) -> &Multiplier {
        &self.multipliers[&g]
    }

    pub fn multiplier_x0_inv(&self) -> &Multiplier {
        self.multiplier(Generator::X0Inv)
    }

    pub fn multiplier_x1_inv(&self) -> &Multiplier {
        self.multiplier(Generator::X1Inv)
    }

    /// Whether `⊗(u, v)` lies in the multiplier language of `g`.
    pub fn multiplier_accepts(&self, g: Generator, u: &SymbolWord, v: &SymbolWord) -> bool {
        self.multiplier(g).accepts(u, v)
    }

    /// The case machines accepting `⊗(u, v)` for `g`.
    pub fn accepting_cases(
        &self,
        g: Generator,
        u: &SymbolWord,
        v: &SymbolWord,
    ) -> Vec<&CaseMachine> {
        let m = self.multiplier(g);
        m.accepting_cases(u, v)
            .into_iter()
            .map(|i| &m.machines[i])
            .collect()
    }

    /// The normal form of `u·g`, read off the multiplier machines.
    pub fn multiplier_apply(
        &self,
        u: &SymbolWord,
        g: Generator,
    ) -> Result<SymbolWord, StructureError> {
        if !is_linf_valid(u) {
            return Err(StructureError::InvalidWord(u.clone()));
        }
        let images = self.multiplier(g).images(u);
        if let Some(v) = images.unique() {
            return Ok(v.clone());
        }
        if images.words.is_empty() {
            return Err(StructureError::NoImage {
                u: u.clone(),
                generator: g,
            });
        }
        let mut listed: Vec<String> = images.words.iter().map(|v| format!("\"{v}\"")).collect();
        if images.unlisted {
            listed.push("...".to_string());
        }
        Err(StructureError::AmbiguousImage {
            u: u.clone(),
            generator: g,
            images: listed,
        })
    }

    /// Folds [`Structure::multiplier_apply`] over a word in the finite generators.
    pub fn word_to_normal_form(&self, w: &GeneratorWord) -> Result<SymbolWord, StructureError> {
        let mut u = encode(&crate::group::NormalForm::identity());
        for &letter in w.letters() {
            let g = Generator::try_from(letter)?;
            u = self.multiplier_apply(&u, g)?;
        }
        Ok(u)
    }
}

/// Accepts `⊗(u, v)` exactly when both tracks are normal form words.
///
/// Each track runs its own copy of `fsa`; a track that shows padding must be
/// in an accepting state and stays finished.
pub fn linf_pair_fsa_from(fsa: &CounterAutomaton<Sym>) -> CounterAutomaton<Pair> {
    type Slot = Option<usize>;
    let name = |s: Slot| s.map_or_else(|| "end".to_string(), |q| fsa.states()[q].clone());
    let advance = |s: Slot, c: Padded| -> Option<Slot> {
        match (s, c) {
            (None, None) => Some(None),
            (None, Some(_)) => None,
            (Some(q), None) => fsa.is_accepting(q).then_some(None),
            (Some(q), Some(c)) => fsa.step(q, 0, c).ok().flatten().map(|(to, _)| Some(to)),
        }
    };
    let done = |s: Slot| s.is_none_or(|q| fsa.is_accepting(q));
    let mut b = AutomatonBuilder::<Pair>::new("linf-pair");
    let mut ids: HashMap<(Slot, Slot), usize> = HashMap::new();
    let mut queue = VecDeque::new();
    let start = (Some(fsa.start()), Some(fsa.start()));
    ids.insert(
        start,
        b.state(&format!("{},{}", name(start.0), name(start.1))),
    );
    b.start(0);
    queue.push_back(start);
    while let Some((x, y)) = queue.pop_front() {
        let here = ids[&(x, y)];
        if done(x) && done(y) {
            b.accept(here);
        }
        for pair in Pair::all() {
            if let (Some(nx), Some(ny)) = (advance(x, pair.upper()), advance(y, pair.lower())) {
                let to = *ids.entry((nx, ny)).or_insert_with(|| {
                    queue.push_back((nx, ny));
                    b.state(&format!("{},{}", name(nx), name(ny)))
                });
                b.edge(here, pair, to);
            }
        }
    }
    b.build().expect("pair acceptor is well formed")
}

/// Builds a shipped pattern machine from its shift pattern.
pub fn build_pattern_machine(name: &str) -> Result<CounterAutomaton<Pair>, StructureError> {
    let pattern =
        shift_pattern(name).ok_or_else(|| StructureError::UnknownMachine(name.to_string()))?;
    pattern.build().map_err(|source| StructureError::Pattern {
        name: name.to_string(),
        source,
    })
}
