//! Finite prefixes and lazily evaluated infinite sequences.
//!
//! A [`SequenceOracle`] wraps a total rule `index -> natural`. Every answer is
//! memoized the first time it is computed, so a rule that is not actually
//! deterministic still yields a deterministic oracle. Reads made during one
//! evaluation are tracked by a [`Session`], which owns its own [`QueryLog`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use thiserror::Error;

/// A finite sequence of naturals `(n_0, ..., n_k)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FinitePrefix(Vec<u64>);

impl FinitePrefix {
    pub fn new(entries: Vec<u64>) -> Self {
        FinitePrefix(entries)
    }

    pub fn empty() -> Self {
        FinitePrefix(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[u64] {
        &self.0
    }

    pub fn get(&self, i: usize) -> Option<u64> {
        self.0.get(i).copied()
    }

    /// Index of the last entry, `None` for the empty prefix.
    pub fn last_index(&self) -> Option<u64> {
        self.0.len().checked_sub(1).map(|k| k as u64)
    }

    pub fn push(&mut self, value: u64) {
        self.0.push(value);
    }

    pub fn contains(&self, value: u64) -> bool {
        self.0.contains(&value)
    }

    pub fn into_vec(self) -> Vec<u64> {
        self.0
    }
}

impl From<Vec<u64>> for FinitePrefix {
    fn from(v: Vec<u64>) -> Self {
        FinitePrefix(v)
    }
}

impl From<&[u64]> for FinitePrefix {
    fn from(v: &[u64]) -> Self {
        FinitePrefix(v.to_vec())
    }
}

impl fmt::Display for FinitePrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, ")")
    }
}

/// Set of oracle indices read so far.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QueryLog {
    queried: BTreeSet<u64>,
}

impl QueryLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, index: u64) {
        self.queried.insert(index);
    }

    pub fn queried(&self) -> &BTreeSet<u64> {
        &self.queried
    }

    pub fn max_queried(&self) -> Option<u64> {
        self.queried.iter().next_back().copied()
    }

    pub fn contains(&self, index: u64) -> bool {
        self.queried.contains(&index)
    }

    pub fn len(&self) -> usize {
        self.queried.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queried.is_empty()
    }

    pub fn clear(&mut self) {
        self.queried.clear();
    }
}

pub type Rule = Arc<dyn Fn(u64) -> u64 + Send + Sync>;

/// A total sequence `f: N -> N`, queried lazily.
#[derive(Clone)]
pub struct SequenceOracle {
    rule: Rule,
    label: String,
    memo: Arc<Mutex<BTreeMap<u64, u64>>>,
    log: Arc<Mutex<QueryLog>>,
}

impl fmt::Debug for SequenceOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SequenceOracle")
            .field("label", &self.label)
            .field("memoized", &self.memo.lock().unwrap().len())
            .finish()
    }
}

impl SequenceOracle {
    /// Builds an oracle from an arbitrary rule. The label is only used for display.
    pub fn from_fn<F>(label: impl Into<String>, rule: F) -> Self
    where
        F: Fn(u64) -> u64 + Send + Sync + 'static,
    {
        SequenceOracle {
            rule: Arc::new(rule),
            label: label.into(),
            memo: Arc::new(Mutex::new(BTreeMap::new())),
            log: Arc::new(Mutex::new(QueryLog::new())),
        }
    }

    pub fn identity() -> Self {
        Self::from_fn("id", |i| i)
    }

    pub fn constant(n: u64) -> Self {
        Self::from_fn(format!("const:{n}"), move |_| n)
    }

    /// `p` followed by zeros.
    pub fn zero_pad(p: &FinitePrefix) -> Self {
        let entries = p.entries().to_vec();
        let label = format!("prefix:{}:pad0", list_text(&entries));
        Self::from_fn(label, move |i| {
            usize::try_from(i)
                .ok()
                .and_then(|i| entries.get(i).copied())
                .unwrap_or(0)
        })
    }

    /// All ones except a zero at `position`.
    pub fn plant_zero(position: u64) -> Self {
        Self::from_fn(format!("plantzero:{position}"), move |i| u64::from(i != position))
    }

    /// Periodic repetition of a nonempty block.
    pub fn cycle(block: Vec<u64>) -> Self {
        assert!(!block.is_empty(), "cycle block must be nonempty");
        let label = format!("cycle:{}", list_text(&block));
        let period = block.len() as u64;
        Self::from_fn(label, move |i| block[(i % period) as usize])
    }

    /// `p` followed by `tail(i)` for every index past the prefix.
    pub fn extend_with<F>(p: &FinitePrefix, label: impl Into<String>, tail: F) -> Self
    where
        F: Fn(u64) -> u64 + Send + Sync + 'static,
    {
        let entries = p.entries().to_vec();
        Self::from_fn(label, move |i| match usize::try_from(i).ok().and_then(|j| entries.get(j)) {
            Some(v) => *v,
            None => tail(i),
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Memoized value at `i`, without touching any log.
    pub fn value(&self, i: u64) -> u64 {
        let mut memo = self.memo.lock().unwrap();
        *memo.entry(i).or_insert_with(|| (self.rule)(i))
    }

    /// Reads `f(i)`, recording `i` in the oracle's own log.
    pub fn query(&self, i: u64) -> u64 {
        self.log.lock().unwrap().record(i);
        self.value(i)
    }

    /// Snapshot of everything read through [`SequenceOracle::query`].
    pub fn log(&self) -> QueryLog {
        self.log.lock().unwrap().clone()
    }

    pub fn reset_log(&self) {
        self.log.lock().unwrap().clear();
    }

    /// A fresh evaluation session with an empty log.
    pub fn session(&self) -> Session<'_> {
        Session {
            oracle: self,
            log: QueryLog::new(),
        }
    }

    /// `(f(0), ..., f(k))`.
    pub fn prefix_of(&self, k: u64) -> FinitePrefix {
        FinitePrefix((0..=k).map(|i| self.query(i)).collect())
    }

    /// True iff both oracles agree at every index `<= k`.
    pub fn agrees_through(&self, other: &SequenceOracle, k: u64) -> bool {
        (0..=k).all(|i| self.value(i) == other.value(i))
    }
}

/// Per-evaluation view of an oracle with its own query log.
pub struct Session<'a> {
    oracle: &'a SequenceOracle,
    log: QueryLog,
}

impl Session<'_> {
    pub fn query(&mut self, i: u64) -> u64 {
        self.log.record(i);
        self.oracle.query(i)
    }

    pub fn log(&self) -> &QueryLog {
        &self.log
    }

    pub fn into_log(self) -> QueryLog {
        self.log
    }
}

fn list_text(xs: &[u64]) -> String {
    let inner: Vec<String> = xs.iter().map(u64::to_string).collect();
    format!("[{}]", inner.join(","))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid sequence spec `{spec}`: {reason}")]
pub struct SequenceSpecError {
    pub spec: String,
    pub reason: String,
}

/// Textual description of a builtin sequence.
///
/// Grammar (no surrounding whitespace, optional spaces inside lists):
///
/// ```text
/// spec    := "id" | "const:" NAT | "prefix:" list ":pad0"
///          | "plantzero:" NAT | "cycle:" list
/// list    := "[" [ NAT { "," NAT } ] "]"
/// ```
///
/// `cycle` requires a nonempty list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SequenceSpec {
    Identity,
    Const(u64),
    ZeroPadded(Vec<u64>),
    PlantZero(u64),
    Cycle(Vec<u64>),
}

impl SequenceSpec {
    pub fn to_oracle(&self) -> SequenceOracle {
        match self {
            SequenceSpec::Identity => SequenceOracle::identity(),
            SequenceSpec::Const(n) => SequenceOracle::constant(*n),
            SequenceSpec::ZeroPadded(p) => SequenceOracle::zero_pad(&FinitePrefix::new(p.clone())),
            SequenceSpec::PlantZero(p) => SequenceOracle::plant_zero(*p),
            SequenceSpec::Cycle(b) => SequenceOracle::cycle(b.clone()),
        }
    }
}

impl fmt::Display for SequenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SequenceSpec::Identity => write!(f, "id"),
            SequenceSpec::Const(n) => write!(f, "const:{n}"),
            SequenceSpec::ZeroPadded(p) => write!(f, "prefix:{}:pad0", list_text(p)),
            SequenceSpec::PlantZero(p) => write!(f, "plantzero:{p}"),
            SequenceSpec::Cycle(b) => write!(f, "cycle:{}", list_text(b)),
        }
    }
}

impl FromStr for SequenceSpec {
    type Err = SequenceSpecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason: &str| SequenceSpecError {
            spec: s.to_string(),
            reason: reason.to_string(),
        };
        if s == "id" {
            return Ok(SequenceSpec::Identity);
        }
        if let Some(rest) = s.strip_prefix("const:") {
            return parse_nat(rest).map(SequenceSpec::Const).ok_or_else(|| err("expected a natural"));
        }
        if let Some(rest) = s.strip_prefix("plantzero:") {
            return parse_nat(rest)
                .map(SequenceSpec::PlantZero)
                .ok_or_else(|| err("expected a natural"));
        }
        if let Some(rest) = s.strip_prefix("prefix:") {
            let list = rest
                .strip_suffix(":pad0")
                .ok_or_else(|| err("prefix spec must end with `:pad0`"))?;
            return parse_list(list).map(SequenceSpec::ZeroPadded).ok_or_else(|| err("malformed list"));
        }
        if let Some(rest) = s.strip_prefix("cycle:") {
            let block = parse_list(rest).ok_or_else(|| err("malformed list"))?;
            if block.is_empty() {
                return Err(err("cycle block must be nonempty"));
            }
            return Ok(SequenceSpec::Cycle(block));
        }
        Err(err("unknown sequence kind"))
    }
}

fn parse_nat(s: &str) -> Option<u64> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

fn parse_list(s: &str) -> Option<Vec<u64>> {
    let inner = s.strip_prefix('[')?.strip_suffix(']')?;
    if inner.trim().is_empty() {
        return Some(Vec::new());
    }
    inner.split(',').map(|item| parse_nat(item.trim())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn query_examples() {
        assert_eq!(SequenceOracle::identity().query(2), 2);
        assert_eq!(SequenceOracle::constant(7).query(10), 7);
        let padded = SequenceOracle::zero_pad(&FinitePrefix::new(vec![3, 0, 2]));
        assert_eq!(padded.query(5), 0);
        assert_eq!(padded.log().max_queried(), Some(5));
    }

    #[test]
    fn zero_pad_examples() {
        let padded = SequenceOracle::zero_pad(&vec![3, 0, 2].into());
        let values: Vec<u64> = (0..6).map(|i| padded.query(i)).collect();
        assert_eq!(values, vec![3, 0, 2, 0, 0, 0]);

        let zeros = SequenceOracle::zero_pad(&FinitePrefix::empty());
        assert!((0..20).all(|i| zeros.query(i) == 0));

        let five = SequenceOracle::zero_pad(&vec![5].into());
        assert_eq!(five.query(0), 5);
        assert_eq!(five.query(1), 0);
    }

    #[test]
    fn prefix_of_examples() {
        assert_eq!(SequenceOracle::identity().prefix_of(3), vec![0, 1, 2, 3].into());
        assert_eq!(SequenceOracle::constant(7).prefix_of(0), vec![7].into());
        let padded = SequenceOracle::zero_pad(&vec![3, 0, 2].into());
        assert_eq!(padded.prefix_of(4), vec![3, 0, 2, 0, 0].into());
    }

    #[test]
    fn agrees_through_examples() {
        let id = SequenceOracle::identity();
        let zeros = SequenceOracle::zero_pad(&FinitePrefix::empty());
        assert!(id.agrees_through(&SequenceOracle::zero_pad(&vec![0, 1, 2].into()), 2));
        assert!(id.agrees_through(&zeros, 0));
        assert!(!id.agrees_through(&zeros, 1));
    }

    #[test]
    fn memo_pins_first_answer() {
        let counter = std::sync::atomic::AtomicU64::new(0);
        let flaky = SequenceOracle::from_fn("flaky", move |_| {
            counter.fetch_add(1, std::sync::atomic::Ordering::SeqCst)
        });
        let first = flaky.query(4);
        assert_eq!(flaky.query(4), first);
        assert_eq!(flaky.value(4), first);
    }

    #[test]
    fn sessions_have_independent_logs() {
        let id = SequenceOracle::identity();
        let mut a = id.session();
        a.query(3);
        a.query(1);
        let mut b = id.session();
        b.query(7);
        assert_eq!(a.log().max_queried(), Some(3));
        assert_eq!(a.log().len(), 2);
        assert_eq!(b.log().max_queried(), Some(7));
        assert_eq!(b.log().len(), 1);
    }

    #[test]
    fn spec_strings() {
        let cases = [
            ("id", SequenceSpec::Identity),
            ("const:7", SequenceSpec::Const(7)),
            ("prefix:[3,0,2]:pad0", SequenceSpec::ZeroPadded(vec![3, 0, 2])),
            ("prefix:[]:pad0", SequenceSpec::ZeroPadded(vec![])),
            ("plantzero:5", SequenceSpec::PlantZero(5)),
            ("cycle:[1,2,3]", SequenceSpec::Cycle(vec![1, 2, 3])),
        ];
        for (text, spec) in cases {
            assert_eq!(text.parse::<SequenceSpec>().unwrap(), spec);
            assert_eq!(spec.to_string(), text);
        }
        assert_eq!(
            "prefix:[ 3, 0 ,2 ]:pad0".parse::<SequenceSpec>().unwrap(),
            SequenceSpec::ZeroPadded(vec![3, 0, 2])
        );
        for bad in ["", "ident", "const:", "const:-1", "prefix:[1,2]", "cycle:[]", "cycle:[1,,2]", "plantzero:x"] {
            assert!(bad.parse::<SequenceSpec>().is_err(), "{bad}");
        }
        let plant = SequenceSpec::PlantZero(5).to_oracle();
        assert_eq!(plant.prefix_of(6), vec![1, 1, 1, 1, 1, 0, 1].into());
    }
}
