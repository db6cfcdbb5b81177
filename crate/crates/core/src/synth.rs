//! Constructions between sentences, overguessers and guessers.
//!
//! An *overguesser* maps finite prefixes to `N ∪ {∞}`; on members of its set
//! it is eventually bounded and on non-members it tends to infinity. The
//! overguesser of an `exists x. forall y. φ` sentence is computed by
//! [`mu_from_sigma2`]; two of them, one for a set and one for its complement,
//! make a guesser ([`guesser_from_delta2`]).
//!
//! `mu_from_sigma2` is a bounded search: on a prefix of length `B` it only
//! considers witnesses `a <= B` and counterexamples `b <= B`. A witness that
//! survives every `b` keeps surviving when fewer `b` are checked, and a pair
//! `(a, b)` refuted on some prefix stays refuted on all longer prefixes, so
//! both overguesser properties are kept.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use thiserror::Error;

use crate::builtins;
use crate::lang::{parse, HostError, LangError, Pi2Sentence, Sigma2Sentence, Signature, SymbolKind, Term};
use crate::oracle::{FinitePrefix, SequenceOracle};
use crate::pairing::PairingCodec;
use crate::semantics::{attempt_on, EvalError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error(transparent)]
    Lang(#[from] LangError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("guessers and overguessers need a nonempty prefix")]
    EmptyPrefix,
    #[error("`{name}` is not bound to a {expected}")]
    Unbound { name: String, expected: &'static str },
    #[error("topology table for {0} is empty")]
    EmptyTable(&'static str),
    #[error("topology table line {line}: {message}")]
    TableSyntax { line: usize, message: String },
}

/// `N ∪ {∞}`, ordered with every finite value below `Infinity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtendedNat {
    Finite(u64),
    Infinity,
}

impl ExtendedNat {
    pub fn finite(self) -> Option<u64> {
        match self {
            ExtendedNat::Finite(n) => Some(n),
            ExtendedNat::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == ExtendedNat::Infinity
    }
}

impl fmt::Display for ExtendedNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedNat::Finite(n) => write!(f, "{n}"),
            ExtendedNat::Infinity => write!(f, "inf"),
        }
    }
}

type GuessFn = Arc<dyn Fn(&FinitePrefix) -> Result<bool, SynthError> + Send + Sync>;
type OverguessFn = Arc<dyn Fn(&FinitePrefix) -> Result<ExtendedNat, SynthError> + Send + Sync>;

/// A function from nonempty prefixes to `{0, 1}` (`true` is 1).
#[derive(Clone)]
pub struct Guesser {
    provenance: String,
    func: GuessFn,
}

impl fmt::Debug for Guesser {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Guesser").field("provenance", &self.provenance).finish()
    }
}

impl Guesser {
    pub fn new<F>(provenance: impl Into<String>, func: F) -> Self
    where
        F: Fn(&FinitePrefix) -> Result<bool, SynthError> + Send + Sync + 'static,
    {
        Guesser {
            provenance: provenance.into(),
            func: Arc::new(func),
        }
    }

    /// Wraps a plain predicate on the prefix entries.
    pub fn from_predicate(provenance: impl Into<String>, pred: fn(&[u64]) -> bool) -> Self {
        Self::new(provenance, move |p| Ok(pred(p.entries())))
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn guess(&self, prefix: &FinitePrefix) -> Result<bool, SynthError> {
        if prefix.is_empty() {
            return Err(SynthError::EmptyPrefix);
        }
        (self.func)(prefix)
    }

    pub fn constant(value: bool) -> Self {
        Self::new(format!("const-{}", u8::from(value)), move |_| Ok(value))
    }

    /// 1 iff the prefix has even length: it changes its mind at every step.
    pub fn even_length() -> Self {
        Self::from_predicate("parity", builtins::even_length)
    }

    /// 1 iff the prefix values are exactly `{0, ..., len-1}`.
    pub fn initial_segment() -> Self {
        Self::from_predicate("initial-segment", builtins::initial_segment)
    }

    pub fn last_entry_is(value: u64) -> Self {
        Self::new(format!("last-is-{value}"), move |p| Ok(builtins::last_is(p.entries(), value)))
    }
}

/// Guess "no" until a zero shows up, then "yes" forever.
pub fn contains_zero_guesser() -> Guesser {
    Guesser::from_predicate("contains-zero", builtins::contains_zero)
}

pub fn guesser_not(g: &Guesser) -> Guesser {
    let inner = g.clone();
    Guesser::new(format!("not({})", g.provenance), move |p| Ok(!inner.guess(p)?))
}

pub fn guesser_and(g1: &Guesser, g2: &Guesser) -> Guesser {
    let (a, b) = (g1.clone(), g2.clone());
    Guesser::new(format!("and({}, {})", g1.provenance, g2.provenance), move |p| {
        let x = a.guess(p)?;
        let y = b.guess(p)?;
        Ok(x && y)
    })
}

pub fn guesser_or(g1: &Guesser, g2: &Guesser) -> Guesser {
    let (a, b) = (g1.clone(), g2.clone());
    Guesser::new(format!("or({}, {})", g1.provenance, g2.provenance), move |p| {
        let x = a.guess(p)?;
        let y = b.guess(p)?;
        Ok(x || y)
    })
}

/// Guesses of `g` on `f(0..k)` for `k = 1..=horizon`.
///
/// `stable_from` is the least length from which every recorded guess equals
/// the last one. This only describes the observed horizon; it says nothing
/// about the limit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuessTrace {
    pub guesses: Vec<bool>,
    pub stable_from: Option<usize>,
}

impl GuessTrace {
    pub fn run(g: &Guesser, f: &SequenceOracle, horizon: usize) -> Result<Self, SynthError> {
        let mut prefix = FinitePrefix::empty();
        let mut guesses = Vec::with_capacity(horizon);
        for k in 0..horizon {
            prefix.push(f.value(k as u64));
            guesses.push(g.guess(&prefix)?);
        }
        Ok(Self::from_guesses(guesses))
    }

    pub fn from_guesses(guesses: Vec<bool>) -> Self {
        let stable_from = guesses.last().map(|last| {
            let changes = guesses.iter().rposition(|g| g != last);
            changes.map_or(1, |i| i + 2)
        });
        GuessTrace { guesses, stable_from }
    }

    pub fn final_guess(&self) -> Option<bool> {
        self.guesses.last().copied()
    }
}

/// A function from nonempty prefixes to `N ∪ {∞}`.
#[derive(Clone)]
pub struct Overguesser {
    provenance: String,
    func: OverguessFn,
}

impl fmt::Debug for Overguesser {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Overguesser").field("provenance", &self.provenance).finish()
    }
}

impl Overguesser {
    pub fn new<F>(provenance: impl Into<String>, func: F) -> Self
    where
        F: Fn(&FinitePrefix) -> Result<ExtendedNat, SynthError> + Send + Sync + 'static,
    {
        Overguesser {
            provenance: provenance.into(),
            func: Arc::new(func),
        }
    }

    /// The bounded "least very nice witness" overguesser of `sentence`.
    pub fn from_sigma2(sentence: &Sigma2Sentence, sig: &Signature) -> Result<Self, SynthError> {
        sig.check_formula(&sentence.matrix)?;
        let sentence = sentence.clone();
        let sig = sig.clone();
        Ok(Overguesser::new(sentence.to_formula().to_string(), move |p| {
            mu_from_sigma2(&sentence, p, &sig)
        }))
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn evaluate(&self, prefix: &FinitePrefix) -> Result<ExtendedNat, SynthError> {
        if prefix.is_empty() {
            return Err(SynthError::EmptyPrefix);
        }
        (self.func)(prefix)
    }
}

struct WitnessSearch<'a> {
    sentence: &'a Sigma2Sentence,
    sig: &'a Signature,
    oracle: SequenceOracle,
    len: u64,
}

impl<'a> WitnessSearch<'a> {
    fn new(sentence: &'a Sigma2Sentence, prefix: &FinitePrefix, sig: &'a Signature) -> Result<Self, SynthError> {
        if prefix.is_empty() {
            return Err(SynthError::EmptyPrefix);
        }
        Ok(WitnessSearch {
            sentence,
            sig,
            oracle: SequenceOracle::zero_pad(prefix),
            len: prefix.len() as u64,
        })
    }

    /// `(a, b)` is nice for every `b <= len`.
    fn very_nice(&self, a: u64) -> Result<bool, SynthError> {
        let with_a = self.sentence.matrix.substitute(&self.sentence.outer, &Term::Num(a))?;
        for b in 0..=self.len {
            let phi = with_a.substitute(&self.sentence.inner, &Term::Num(b))?;
            if !attempt_on(&phi, &self.oracle, self.len, self.sig)?.is_nice() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Least `a <= len(p)` such that for every `b <= len(p)` the attempt on
/// `φ(a, b)` over `p` either fails or succeeds with "true"; `Infinity` if
/// there is none.
pub fn mu_from_sigma2(sentence: &Sigma2Sentence, prefix: &FinitePrefix, sig: &Signature) -> Result<ExtendedNat, SynthError> {
    let search = WitnessSearch::new(sentence, prefix, sig)?;
    for a in 0..=search.len {
        if search.very_nice(a)? {
            return Ok(ExtendedNat::Finite(a));
        }
    }
    Ok(ExtendedNat::Infinity)
}

/// True iff some `b <= len(p)` refutes the witness `a` with a succeeded,
/// false attempt.
pub fn is_excluded(sentence: &Sigma2Sentence, prefix: &FinitePrefix, a: u64, sig: &Signature) -> Result<bool, SynthError> {
    Ok(!WitnessSearch::new(sentence, prefix, sig)?.very_nice(a)?)
}

/// A set given twice: by a `forall exists` and an `exists forall` sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Delta2Spec {
    pub pi2: Pi2Sentence,
    pub sigma2: Sigma2Sentence,
}

impl Delta2Spec {
    /// Parses both sentences and checks them against `sig`.
    pub fn parse(pi2: &str, sigma2: &str, sig: &Signature) -> Result<Self, SynthError> {
        Ok(Delta2Spec {
            pi2: Pi2Sentence::from_formula(&parse(pi2, sig)?)?,
            sigma2: Sigma2Sentence::from_formula(&parse(sigma2, sig)?)?,
        })
    }

    /// The set of sequences containing a zero.
    pub fn contains_zero() -> Self {
        Self::parse("forall x. exists y. f(y) = 0", "exists x. forall y. f(x) = 0", &Signature::new())
            .expect("builtin sentences parse")
    }
}

/// Guess 1 exactly when `μ(p) <= ν(p)`, with `μ` overguessing the set through
/// its `exists forall` sentence and `ν` overguessing the complement through
/// the negated `forall exists` sentence.
pub fn guesser_from_delta2(spec: &Delta2Spec, sig: &Signature) -> Result<Guesser, SynthError> {
    let mu = Overguesser::from_sigma2(&spec.sigma2, sig)?;
    let nu = Overguesser::from_sigma2(&spec.pi2.negated(), sig)?;
    let provenance = format!("delta2[{} ; {}]", spec.pi2.to_formula(), spec.sigma2.to_formula());
    Ok(Guesser::new(provenance, move |p| Ok(mu.evaluate(p)? <= nu.evaluate(p)?)))
}

fn require_kind(sig: &Signature, name: &str, want: SymbolKind, noun: &'static str) -> Result<(), SynthError> {
    if sig.kind(name) == Some(want) {
        Ok(())
    } else {
        Err(SynthError::Unbound {
            name: name.to_string(),
            expected: noun,
        })
    }
}

/// "Eventually always 1" and "1 infinitely often" for the guesser bound to
/// `gname`. For a real guesser both define the same set.
pub fn sentences_from_guesser(gname: &str, sig: &Signature) -> Result<Delta2Spec, SynthError> {
    require_kind(sig, gname, SymbolKind::Sequence, "sequence function")?;
    let sigma2 = format!("exists x. forall y. ((y > x) -> {gname}[ f(z) : z .. y ] = 1)");
    let pi2 = format!("forall x. exists y. ((y > x) & {gname}[ f(z) : z .. y ] = 1)");
    Delta2Spec::parse(&pi2, &sigma2, sig)
}

/// Declares `name` as `μ'(p) = μ(p) + 1` for finite `μ(p)` and `0` for
/// infinite, with results cached per tuple.
pub fn register_mu_prime(sig: &mut Signature, name: &str, mu: &Overguesser) -> Result<(), SynthError> {
    let mu = mu.clone();
    let cache: Mutex<HashMap<Vec<u64>, u64>> = Mutex::new(HashMap::new());
    sig.declare_seq_function(
        name,
        Arc::new(move |xs: &[u64]| {
            if let Some(v) = cache.lock().unwrap().get(xs) {
                return Ok(*v);
            }
            let value = match mu.evaluate(&FinitePrefix::from(xs)) {
                Ok(ExtendedNat::Finite(n)) => n.saturating_add(1),
                Ok(ExtendedNat::Infinity) => 0,
                Err(e) => return Err(HostError(e.to_string())),
            };
            cache.lock().unwrap().insert(xs.to_vec(), value);
            Ok(value)
        }),
    )?;
    Ok(())
}

/// `exists m. forall m3. ((m3 > d2(m)) -> (0 < Mu[..m3] & Mu[..m3] < d1(m)))`
/// where `Mu` is a μ′ symbol (see [`register_mu_prime`]). The projections are
/// declared from `codec` if `sig` lacks them.
pub fn sigma2_from_overguesser(mu_name: &str, codec: &PairingCodec, sig: &mut Signature) -> Result<Sigma2Sentence, SynthError> {
    require_kind(sig, mu_name, SymbolKind::Sequence, "sequence function")?;
    for (name, proj) in [("d1", 0usize), ("d2", 1usize)] {
        if !sig.contains(name) {
            let codec = *codec;
            sig.declare_fn(name, 1, move |xs| {
                let (a, b) = codec.decode(xs[0]);
                [a, b][proj]
            })?;
        }
        require_kind(sig, name, SymbolKind::Function { arity: 1 }, "unary function")?;
    }
    let text = format!(
        "exists m. forall m3. ((m3 > d2(m)) -> (0 < {mu_name}[ f(z) : z .. m3 ] & {mu_name}[ f(z) : z .. m3 ] < d1(m)))"
    );
    Ok(Sigma2Sentence::from_formula(&parse(&text, sig)?)?)
}

/// An enumeration `m -> h_m` of sequences, as `g(m, n) = h_m(n)`.
#[derive(Clone)]
pub struct CountableFamily {
    pub name: String,
    func: Arc<dyn Fn(u64, u64) -> u64 + Send + Sync>,
}

impl fmt::Debug for CountableFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CountableFamily").field("name", &self.name).finish()
    }
}

impl CountableFamily {
    pub fn new<F>(name: impl Into<String>, func: F) -> Self
    where
        F: Fn(u64, u64) -> u64 + Send + Sync + 'static,
    {
        CountableFamily {
            name: name.into(),
            func: Arc::new(func),
        }
    }

    /// `h_m` is the constant sequence `m`.
    pub fn constants() -> Self {
        Self::new("constfam", |m, _| m)
    }

    pub fn value(&self, m: u64, n: u64) -> u64 {
        (self.func)(m, n)
    }

    pub fn member(&self, m: u64) -> SequenceOracle {
        let func = self.func.clone();
        SequenceOracle::from_fn(format!("{}[{m}]", self.name), move |n| func(m, n))
    }
}

/// Declares the family as the binary symbol `g` and returns
/// `exists x. forall y. g(x, y) = f(y)`.
pub fn sigma2_from_countable_family(fam: &CountableFamily, sig: &mut Signature) -> Result<Sigma2Sentence, SynthError> {
    let func = fam.func.clone();
    sig.declare_fn("g", 2, move |xs| func(xs[0], xs[1]))?;
    let f = parse("exists x. forall y. g(x, y) = f(y)", sig)?;
    Ok(Sigma2Sentence::from_formula(&f)?)
}

/// Basic open sets `T_ij` (all extensions of a finite prefix) describing a
/// set as `⋂_i ⋃_j T_ij`.
///
/// Lookup of `(i, j)`: if row `i` has entries, the entry with the largest
/// listed `j' <= j`, or the row's first entry when every listed `j'` exceeds
/// `j`; rows without entries use `default`. Repeating a set inside a union
/// does not change it, and an empty `default` (the whole space) makes the
/// unlisted rows vacuous.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TopologySpec {
    pub entries: BTreeMap<(u64, u64), FinitePrefix>,
    pub default: FinitePrefix,
}

impl TopologySpec {
    pub fn new(entries: BTreeMap<(u64, u64), FinitePrefix>, default: FinitePrefix) -> Self {
        TopologySpec { entries, default }
    }

    pub fn lookup(&self, i: u64, j: u64) -> &FinitePrefix {
        let mut row = self.entries.range((i, 0)..=(i, u64::MAX));
        let first = match row.next() {
            Some((_, p)) => p,
            None => return &self.default,
        };
        self.entries
            .range((i, 0)..=(i, j))
            .next_back()
            .map(|(_, p)| p)
            .unwrap_or(first)
    }

    /// `τ(i, j, x_0, ..., x_k)`: 1 iff `(x_0, ..., x_k) = T_ij`.
    pub fn tau(&self, i: u64, j: u64, xs: &[u64]) -> u64 {
        u64::from(self.lookup(i, j).entries() == xs)
    }

    /// Index of the last slot of the tuple `(i, j, f(0), ..., f(len-1))`,
    /// i.e. `len(T_ij) + 1`.
    pub fn ell(&self, i: u64, j: u64) -> u64 {
        self.lookup(i, j).len() as u64 + 1
    }

    /// Whether `f` lies in `T_ij`.
    pub fn extends(&self, i: u64, j: u64, f: &SequenceOracle) -> bool {
        self.lookup(i, j)
            .entries()
            .iter()
            .enumerate()
            .all(|(k, v)| f.value(k as u64) == *v)
    }

    /// Parses a table:
    ///
    /// ```text
    /// # comment
    /// 0 0 : 7
    /// 0 1 : 3, 4
    /// 1 0 :
    /// default : 1
    /// ```
    pub fn parse(text: &str) -> Result<Self, SynthError> {
        let mut spec = TopologySpec::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: &str| SynthError::TableSyntax {
                line: idx + 1,
                message: message.to_string(),
            };
            let (key, values) = line.split_once(':').ok_or_else(|| err("missing `:`"))?;
            let values = values.trim();
            let prefix: FinitePrefix = if values.is_empty() {
                FinitePrefix::empty()
            } else {
                values
                    .split(',')
                    .map(|v| v.trim().parse::<u64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| err("malformed prefix"))?
                    .into()
            };
            let key: Vec<&str> = key.split_whitespace().collect();
            match key.as_slice() {
                ["default"] => spec.default = prefix,
                [i, j] => {
                    let i = i.parse().map_err(|_| err("malformed row index"))?;
                    let j = j.parse().map_err(|_| err("malformed column index"))?;
                    spec.entries.insert((i, j), prefix);
                }
                _ => return Err(err("expected `<i> <j> :` or `default :`")),
            }
        }
        Ok(spec)
    }
}

fn declare_topology(sig: &mut Signature, table: &TopologySpec, tau: &str, ell: &str) -> Result<(), SynthError> {
    let t = table.clone();
    sig.declare_seq_fn(tau, move |xs| match xs {
        [i, j, rest @ ..] => t.tau(*i, *j, rest),
        _ => 0,
    })?;
    let t = table.clone();
    sig.declare_fn(ell, 2, move |xs| t.ell(xs[0], xs[1]))?;
    Ok(())
}

fn topology_matrix(tau: &str, ell: &str) -> String {
    format!("{tau}[ pick(z, i, j, f(monus(z, 2))) : z .. {ell}(i, j) ] = 1")
}

/// Δ₂ pair for a set given by tables for itself and for its complement.
///
/// Declares `TauS`/`EllS` and `TauC`/`EllC` (plus `pick` and `monus` if
/// missing). The ellipsis body feeds the tuple `(i, j, f(0), ..., f(len-1))`
/// to `Tau`:
///
/// * `forall i. exists j. TauS[ pick(z, i, j, f(monus(z, 2))) : z .. EllS(i, j) ] = 1`
/// * `exists i. forall j. !(TauC[ ... ] = 1)`
pub fn delta2_from_topology(for_s: &TopologySpec, for_complement: &TopologySpec, sig: &mut Signature) -> Result<Delta2Spec, SynthError> {
    if for_s.entries.is_empty() {
        return Err(SynthError::EmptyTable("the set"));
    }
    if for_complement.entries.is_empty() {
        return Err(SynthError::EmptyTable("the complement"));
    }
    for name in ["pick", "monus"] {
        if !sig.contains(name) {
            let (arity, host) = crate::lang::builtin_function(name).expect("builtin");
            sig.declare_function(name, arity, host)?;
        }
    }
    declare_topology(sig, for_s, "TauS", "EllS")?;
    declare_topology(sig, for_complement, "TauC", "EllC")?;
    let pi2 = format!("forall i. exists j. {}", topology_matrix("TauS", "EllS"));
    let sigma2 = format!("exists i. forall j. !({})", topology_matrix("TauC", "EllC"));
    Delta2Spec::parse(&pi2, &sigma2, sig)
}
