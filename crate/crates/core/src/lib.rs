//! Thompson's group F with a one-counter graph automatic structure.
//!
//! Elements are kept in the unique infinite normal form and encoded as words
//! over `{a, b, #}`. Right multiplication by each of `x0^±1` and `x1^±1` is
//! recognised by deterministic one-counter machines reading the padded
//! convolution of input and output.

pub mod automata;
pub mod encoding;
pub mod group;
pub mod patterns;
pub mod structure;
pub mod verification;

pub use automata::{
    AutomatonBuilder, AutomatonError, CounterAction, CounterAutomaton, Guard, Symbol,
};
pub use encoding::{
    convolve, decode, deconvolve, encode, is_linf_valid, ConvolvedWord, Pair, Sym, SymbolWord,
};
pub use group::{
    burillo_d, geodesic_length_bfs, invert, multiply, multiply_word, nf_to_word, reduce,
    CayleyBall, GeneratorLetter, GeneratorWord, GroupError, NormalForm,
};
pub use structure::{Generator, MachineLibrary, Structure, StructureError, StructureOptions};
pub use verification::{verify_all, VerificationParams, VerificationReport};
