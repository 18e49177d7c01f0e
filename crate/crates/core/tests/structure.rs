use std::collections::BTreeSet;

use rayon::prelude::*;
use thompson_core::structure::{
    shift_pattern, Generator, MachineLibrary, Structure, StructureError, PATTERN_MACHINES,
};
use thompson_core::{
    convolve, decode, encode, is_linf_valid, multiply, reduce, CayleyBall, GeneratorWord,
    NormalForm, Pair, SymbolWord,
};

fn sw(s: &str) -> SymbolWord {
    s.parse().unwrap()
}

fn image(u: &SymbolWord, g: Generator) -> SymbolWord {
    encode(&multiply(&decode(u).unwrap(), g.letter()))
}

fn valid_words(max_len: usize) -> Vec<SymbolWord> {
    SymbolWord::all_up_to(max_len)
        .filter(is_linf_valid)
        .collect()
}

#[test]
fn exact_images_for_short_inputs() {
    // All v with |v| <= 12 accepted for each u with |u| <= 10.
    let s = Structure::standard().unwrap();
    let words = valid_words(10);
    let bad: Vec<String> = words
        .par_iter()
        .flat_map_iter(|u| {
            let s = &s;
            Generator::ALL.into_iter().filter_map(move |g| {
                let truth = image(u, g);
                let found = s.multiplier(g).images_within(u, 12);
                let expected: BTreeSet<SymbolWord> = if truth.len() <= 12 {
                    BTreeSet::from([truth])
                } else {
                    BTreeSet::new()
                };
                (found.words != expected || found.unlisted).then(|| format!("{g} {u}: {found:?}"))
            })
        })
        .collect();
    assert!(
        bad.is_empty(),
        "{} inputs disagree, e.g. {:?}",
        bad.len(),
        &bad[..bad.len().min(5)]
    );
}

#[test]
fn apply_on_the_ball_and_back() {
    let s = Structure::standard().unwrap();
    let ball = CayleyBall::new(7).unwrap();
    let rows: Vec<(&NormalForm, Generator)> = ball
        .elements()
        .iter()
        .flat_map(|n| Generator::ALL.map(|g| (n, g)))
        .collect();
    let bad: Vec<String> = rows
        .par_iter()
        .filter_map(|&(n, g)| {
            let u = encode(n);
            let v = s.multiplier_apply(&u, g).ok()?;
            let back = s.multiplier_apply(&v, g.inverse()).ok();
            (v != encode(&multiply(n, g.letter())) || back.as_ref() != Some(&u))
                .then(|| format!("{g} {u}"))
        })
        .collect();
    assert!(bad.is_empty(), "{bad:?}");
    assert!(rows
        .par_iter()
        .all(|&(n, g)| s.multiplier_apply(&encode(n), g).is_ok()));
}

#[test]
fn member_examples_with_cases() {
    let s = Structure::standard().unwrap();
    let labels = |g, u: &str, v: &str| -> Vec<String> {
        s.accepting_cases(g, &sw(u), &sw(v))
            .into_iter()
            .map(|c| c.label.clone())
            .collect()
    };
    assert_eq!(labels(Generator::X1Inv, "", "#b"), ["case 1.1"]);
    assert_eq!(labels(Generator::X1Inv, "bb", "bb###b"), ["case 2.1 R>M"]);
    assert!(labels(Generator::X0Inv, "a", "a#b").is_empty());
    assert_eq!(labels(Generator::X0Inv, "a", ""), ["patch: u = a^n"]);
    assert_eq!(labels(Generator::X0Inv, "a##a", "#a"), ["case 2"]);
    assert_eq!(
        labels(Generator::X1Inv, "#a##a", "##a"),
        ["patch: case 1.3 (r1 = 1, tail ##)"]
    );
    assert_eq!(
        labels(Generator::X1Inv, "b##b", "b##bb"),
        ["patch: case 2.2.2 at the top block"]
    );
}

#[test]
fn lemma_shape_and_pumped_words() {
    let s = Structure::standard().unwrap();
    assert!(s.multiplier_accepts(Generator::X1Inv, &sw("b"), &sw("b##b")));
    assert_eq!(
        encode(&reduce(&"x0^-1 x1^-1".parse::<GeneratorWord>().unwrap())),
        sw("b##b")
    );
    assert!(s.multiplier_accepts(Generator::X1Inv, &sw("bb"), &sw("bb###b")));
    assert!(!s.multiplier_accepts(Generator::X1Inv, &sw("bbb"), &sw("bbb###b")));
}

#[test]
fn pattern_machines_match_their_predicates() {
    let lib = MachineLibrary::embedded();
    let words: Vec<SymbolWord> = SymbolWord::all_up_to(5).collect();
    for &(name, ..) in PATTERN_MACHINES {
        let m = lib.pair_machine(name).unwrap();
        let matches = shift_pattern(name).unwrap().matcher().unwrap();
        for u in &words {
            for v in &words {
                let pairs = convolve(&[u.clone(), v.clone()]).to_pairs().unwrap();
                assert_eq!(
                    m.accepts(&pairs).unwrap(),
                    matches(u, v),
                    "{name} on ({u}, {v})"
                );
            }
        }
    }
}

#[test]
fn epsilon_elimination_keeps_the_language() {
    let lib = MachineLibrary::embedded();
    let raw = lib.pair_machine("fig4").unwrap();
    assert!(raw.has_epsilon());
    let mut spliced = raw;
    for (placeholder, sub) in [("M1", "m1"), ("M2", "m2"), ("M3", "m3")] {
        spliced = spliced
            .splice(placeholder, &lib.pair_machine(sub).unwrap(), placeholder)
            .unwrap();
    }
    let eliminated = lib.assembled("fig4").unwrap();
    assert!(!eliminated.has_epsilon());
    assert!(eliminated.is_deterministic());
    assert_eq!(
        spliced.enumerate_accepted(7).unwrap(),
        eliminated.enumerate_accepted(7).unwrap()
    );
}

#[test]
fn fig1_enumerates_the_short_normal_forms() {
    let fsa = MachineLibrary::embedded().symbol_machine("fig1").unwrap();
    let listed: BTreeSet<SymbolWord> = fsa
        .enumerate_accepted(6)
        .unwrap()
        .into_iter()
        .map(SymbolWord)
        .collect();
    let expected: BTreeSet<SymbolWord> = valid_words(6).into_iter().collect();
    assert_eq!(listed, expected);
    let dot = fsa.to_dot();
    assert_eq!(dot.matches("doublecircle").count(), 3);
}

#[test]
fn positive_generators_swap_tracks() {
    let s = Structure::standard().unwrap();
    for u in valid_words(6) {
        for g in [Generator::X0, Generator::X1] {
            let v = image(&u, g);
            assert!(s.multiplier_accepts(g, &u, &v));
            assert!(s.multiplier_accepts(g.inverse(), &v, &u));
        }
    }
    let pairs: Vec<Pair> = convolve(&[sw("#b"), sw("")]).to_pairs().unwrap();
    assert!(s.multiplier(Generator::X1).machines.iter().any(|m| {
        m.automaton
            .accepts(&pairs.iter().map(|p| p.swapped()).collect::<Vec<_>>())
            .unwrap()
    }));
}

#[test]
fn machine_directory_overrides() {
    let dir = std::env::temp_dir().join(format!("thompson-machines-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    // An override that drops the pure power patch.
    std::fs::write(
        dir.join("x0inv-patch-power.cam"),
        "name: x0inv-patch-power\nalphabet: *\nstates: s0\nstart: s0\naccept:\n",
    )
    .unwrap();
    let lib = MachineLibrary::with_dir(&dir);
    let s = Structure::new(&lib, Default::default()).unwrap();
    assert!(matches!(
        s.multiplier_apply(&sw("a"), Generator::X0Inv),
        Err(StructureError::NoImage { .. })
    ));
    assert_eq!(
        s.multiplier_apply(&sw(""), Generator::X0Inv).unwrap(),
        sw("b")
    );

    std::fs::write(dir.join("fig2.cam"), "name: fig2\nstates: q0\nstart: q9\n").unwrap();
    assert!(matches!(
        Structure::new(&lib, Default::default()),
        Err(StructureError::Machine { .. })
    ));
    std::fs::remove_dir_all(&dir).unwrap();
}
