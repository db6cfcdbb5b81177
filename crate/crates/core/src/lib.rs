//! Guessability of sets of infinite sequences.
//!
//! A set `S` of sequences `N -> N` is *guessable* when some function on finite
//! prefixes, fed `f(0), ..., f(n)` for growing `n`, eventually settles on the
//! correct membership answer for every `f`. This crate provides
//!
//! * [`oracle`]: lazily evaluated sequences with exact query logs,
//! * [`lang`]: a first-order language with ellipsis terms `G[ u : x .. v ]`,
//! * [`semantics`]: query-tracked evaluation and prefix "attempts",
//! * [`synth`]: overguessers and guessers built from sentences, and sentences
//!   built back from guessers, overguessers, countable families and
//!   topological data,
//! * [`adversary`]: diagonalizing constructions that defeat candidate guessers.

pub mod adversary;
pub mod builtins;
pub mod lang;
pub mod oracle;
pub mod pairing;
pub mod semantics;
pub mod synth;

pub use lang::{classify_sentence, parse, parse_formula, Formula, Pi2Sentence, SentenceClass, Sigma2Sentence, Signature, Term};
pub use oracle::{FinitePrefix, QueryLog, SequenceOracle, SequenceSpec};
pub use pairing::PairingCodec;
pub use semantics::{attempt, eval_qf, Assignment, AttemptOutcome, EvalError};
pub use synth::{Delta2Spec, ExtendedNat, GuessTrace, Guesser, Overguesser};
pub use adversary::{diagonalize, ExtensionOracles, FlipStatus, FlipTrace};
