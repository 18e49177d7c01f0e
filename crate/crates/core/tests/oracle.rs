//! `reduce` against F acting on [0, 1] by piecewise linear maps, plus frozen
//! values computed by that action.

use num::{BigInt, BigRational, One, Zero};
use proptest::prelude::*;
use thompson_core::{
    burillo_d, decode, encode, invert, multiply, nf_to_word, reduce, GeneratorLetter,
    GeneratorWord, NormalForm,
};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `x0`: slopes 1/2, 1, 2 on [0, 1/2], [1/2, 3/4], [3/4, 1].
fn x0(t: &BigRational) -> BigRational {
    if *t <= q(1, 2) {
        t / q(2, 1)
    } else if *t <= q(3, 4) {
        t - q(1, 4)
    } else {
        t * q(2, 1) - BigRational::one()
    }
}

fn x0_inv(t: &BigRational) -> BigRational {
    if *t <= q(1, 4) {
        t * q(2, 1)
    } else if *t <= q(1, 2) {
        t + q(1, 4)
    } else {
        (t + BigRational::one()) / q(2, 1)
    }
}

/// `x_n` is the identity on [0, 1 - 2^-n] and a rescaled `x0` after it.
fn apply_letter(g: GeneratorLetter, t: &BigRational) -> BigRational {
    let width = q(1, 1i64 << g.index);
    let start = BigRational::one() - &width;
    if *t <= start {
        return t.clone();
    }
    let local = (t - &start) / &width;
    let moved = if g.inverse {
        x0_inv(&local)
    } else {
        x0(&local)
    };
    start + moved * width
}

/// Composition as functions: `w = g1 g2` sends `t` to `g1(g2(t))`.
fn act(w: &GeneratorWord, t: &BigRational) -> BigRational {
    w.letters()
        .iter()
        .rev()
        .fold(t.clone(), |acc, &g| apply_letter(g, &acc))
}

fn probe_points() -> Vec<BigRational> {
    let mut pts: Vec<BigRational> = (0..=256).map(|k| q(k, 256)).collect();
    pts.extend((1..81).map(|k| q(k, 81)));
    pts.extend((1..49).map(|k| q(k, 49)));
    pts
}

fn same_element(a: &GeneratorWord, b: &GeneratorWord) -> bool {
    probe_points().iter().all(|t| act(a, t) == act(b, t))
}

fn w(text: &str) -> GeneratorWord {
    text.parse().unwrap()
}

fn nf(r: &[u32], s: &[u32]) -> NormalForm {
    NormalForm::from_vectors(r.to_vec(), s.to_vec()).unwrap()
}

#[test]
fn action_respects_the_relations() {
    for i in 0..3u32 {
        for j in i + 1..4 {
            let lhs = GeneratorWord(vec![GeneratorLetter::x(j), GeneratorLetter::x(i)]);
            let rhs = GeneratorWord(vec![GeneratorLetter::x(i), GeneratorLetter::x(j + 1)]);
            assert!(same_element(&lhs, &rhs), "x{j} x{i}");
        }
    }
    assert!(!same_element(&w("x0 x1"), &w("x1 x0")));
    assert!(probe_points().iter().all(|t| act(&w("x1 x1^-1"), t) == *t));
}

#[test]
fn reduce_preserves_the_action() {
    for text in [
        "x1 x0",
        "x1^-1 x0",
        "x0^-1 x1 x0",
        "x0 x1^-1 x0^-1 x1",
        "x3 x0^-2 x1 x2^-1 x0^3",
        "x1^-1 x1^-1 x0 x1 x0^-1 x1^2",
        "x2 x1 x0 x0^-1 x1^-1",
    ] {
        let word = w(text);
        let normal = nf_to_word(&reduce(&word));
        assert!(same_element(&word, &normal), "{text} -> {normal}");
    }
}

#[test]
fn frozen_normal_forms() {
    // Values computed with the action above.
    let cases: &[(&str, &str, &str)] = &[
        ("x1 x0", "x0^1 x2^1", "a##a"),
        ("x1^-1 x0", "x0^1 x2^-1", "a##b"),
        ("x0^-1 x1", "x2^1 x0^-1", "b##a"),
        ("x0^-1 x1^-1", "x2^-1 x0^-1", "b##b"),
        ("x0 x0 x1^-1", "x0^2 x1^-1", "aa#b"),
        ("x1 x1^-1", "e", ""),
        ("x1^-1", "x1^-1", "#b"),
        (
            "x1^2 x4^3 x8^-1 x5^-6 x4^-2",
            "x1^2 x4^3 x8^-1 x5^-6 x4^-2",
            "#aa###aaabb#bbbbbb###b",
        ),
    ];
    for &(input, normal, word) in cases {
        let n = reduce(&w(input));
        assert_eq!(n.to_string(), normal, "{input}");
        assert_eq!(encode(&n).to_string(), word, "{input}");
        assert!(same_element(&w(input), &w(normal)));
    }
}

#[test]
fn frozen_d_values() {
    assert_eq!(burillo_d(&NormalForm::identity()), 0);
    assert_eq!(burillo_d(&reduce(&w("x0"))), 1);
    assert_eq!(burillo_d(&reduce(&w("x1"))), 2);
    assert_eq!(burillo_d(&reduce(&w("x2 x1^-1"))), 5);
    let big = nf(&[0, 2, 0, 0, 3, 0, 0, 0, 0], &[0, 0, 0, 0, 2, 6, 0, 0, 1]);
    assert_eq!(burillo_d(&big), 26);
    assert_eq!(encode(&big).len(), 22);
}

fn letter() -> impl Strategy<Value = GeneratorLetter> {
    (0u32..4, any::<bool>()).prop_map(|(i, inv)| {
        if inv {
            GeneratorLetter::x_inv(i)
        } else {
            GeneratorLetter::x(i)
        }
    })
}

fn finite_letter() -> impl Strategy<Value = GeneratorLetter> {
    (0u32..2, any::<bool>()).prop_map(|(i, inv)| {
        if inv {
            GeneratorLetter::x_inv(i)
        } else {
            GeneratorLetter::x(i)
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn reduce_agrees_with_the_action(letters in prop::collection::vec(letter(), 0..14)) {
        let word = GeneratorWord(letters);
        prop_assert!(same_element(&word, &nf_to_word(&reduce(&word))));
    }

    #[test]
    fn encoding_round_trips(letters in prop::collection::vec(letter(), 0..20)) {
        let n = reduce(&GeneratorWord(letters));
        prop_assert_eq!(decode(&encode(&n)).unwrap(), n);
    }

    #[test]
    fn multiply_then_inverse(letters in prop::collection::vec(finite_letter(), 0..20), g in finite_letter()) {
        let n = reduce(&GeneratorWord(letters));
        prop_assert_eq!(multiply(&multiply(&n, g), g.inverted()), n);
    }

    #[test]
    fn inverse_cancels(letters in prop::collection::vec(letter(), 0..12)) {
        let word = GeneratorWord(letters);
        let n = reduce(&word);
        let product = reduce(&nf_to_word(&n).concat(&nf_to_word(&invert(&n))));
        prop_assert!(product.is_identity());
    }

    #[test]
    fn zero_is_fixed(letters in prop::collection::vec(letter(), 0..10)) {
        let word = GeneratorWord(letters);
        prop_assert!(act(&word, &BigRational::zero()).is_zero());
        prop_assert!(act(&word, &BigRational::one()).is_one());
    }
}
