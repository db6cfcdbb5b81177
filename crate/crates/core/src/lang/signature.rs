use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use super::{Formula, LangError, Term, RELATIONS};
use crate::builtins;

/// The reserved unary symbol bound to the ambient sequence.
pub const SEQUENCE_SYMBOL: &str = "f";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("host function failed: {0}")]
pub struct HostError(pub String);

pub type FixedHost = Arc<dyn Fn(&[u64]) -> Result<u64, HostError> + Send + Sync>;
pub type PredHost = Arc<dyn Fn(&[u64]) -> Result<bool, HostError> + Send + Sync>;
/// Host for a symbol of unbounded arity.
pub type SeqHost = Arc<dyn Fn(&[u64]) -> Result<u64, HostError> + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolKind {
    Function { arity: usize },
    Predicate { arity: usize },
    Sequence,
}

impl SymbolKind {
    fn noun(&self) -> &'static str {
        match self {
            SymbolKind::Function { .. } => "function",
            SymbolKind::Predicate { .. } => "predicate",
            SymbolKind::Sequence => "sequence function",
        }
    }
}

/// A finite fragment of the maximal language: the symbols one session needs,
/// each bound to a total host.
#[derive(Clone)]
pub struct Signature {
    functions: BTreeMap<String, (usize, FixedHost)>,
    predicates: BTreeMap<String, (usize, PredHost)>,
    seq_functions: BTreeMap<String, SeqHost>,
}

impl fmt::Debug for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Signature")
            .field("functions", &self.functions.iter().map(|(k, v)| (k, v.0)).collect::<Vec<_>>())
            .field("predicates", &self.predicates.iter().map(|(k, v)| (k, v.0)).collect::<Vec<_>>())
            .field("seq_functions", &self.seq_functions.keys().collect::<Vec<_>>())
            .finish()
    }
}

impl Default for Signature {
    fn default() -> Self {
        Self::new()
    }
}

impl Signature {
    /// Only the relational predicates, which the concrete syntax always uses.
    pub fn new() -> Self {
        let mut sig = Signature {
            functions: BTreeMap::new(),
            predicates: BTreeMap::new(),
            seq_functions: BTreeMap::new(),
        };
        for rel in RELATIONS {
            let key = match rel {
                "<" => "lt",
                ">" => "gt",
                "<=" => "le",
                _ => "ge",
            };
            let (arity, host) = builtin_predicate(key).expect("relation builtin");
            sig.predicates.insert(rel.to_string(), (arity, host));
        }
        sig
    }

    /// Relations plus `add`, `mul`, `monus`, `pick`, the pairing
    /// projections `d1`/`d2`, and the sequence functions `sum`, `len`, `last`,
    /// `max` and `Gz` (1 iff the tuple contains a zero).
    pub fn standard() -> Self {
        let mut sig = Self::new();
        for name in ["add", "mul", "monus", "pick", "d1", "d2"] {
            let (arity, host) = builtin_function(name).expect("builtin");
            sig.functions.insert(name.to_string(), (arity, host));
        }
        for name in ["sum", "len", "last", "max"] {
            sig.seq_functions.insert(name.to_string(), builtin_seq_function(name).expect("builtin"));
        }
        sig.seq_functions
            .insert("Gz".to_string(), builtin_seq_function("contains_zero").expect("builtin"));
        sig
    }

    pub fn kind(&self, name: &str) -> Option<SymbolKind> {
        if let Some((arity, _)) = self.functions.get(name) {
            Some(SymbolKind::Function { arity: *arity })
        } else if let Some((arity, _)) = self.predicates.get(name) {
            Some(SymbolKind::Predicate { arity: *arity })
        } else if self.seq_functions.contains_key(name) {
            Some(SymbolKind::Sequence)
        } else {
            None
        }
    }

    pub fn contains(&self, name: &str) -> bool {
        self.kind(name).is_some()
    }

    fn check_new(&self, name: &str) -> Result<(), LangError> {
        if name == SEQUENCE_SYMBOL || name == "forall" || name == "exists" || RELATIONS.contains(&name) {
            return Err(LangError::ReservedSymbol(name.to_string()));
        }
        if !is_identifier(name) {
            return Err(LangError::ReservedSymbol(name.to_string()));
        }
        if self.contains(name) {
            return Err(LangError::DuplicateSymbol(name.to_string()));
        }
        Ok(())
    }

    pub fn declare_function(&mut self, name: &str, arity: usize, host: FixedHost) -> Result<(), LangError> {
        self.check_new(name)?;
        if arity == 0 {
            return Err(LangError::ArityMismatch {
                name: name.to_string(),
                expected: 1,
                found: 0,
            });
        }
        self.functions.insert(name.to_string(), (arity, host));
        Ok(())
    }

    pub fn declare_predicate(&mut self, name: &str, arity: usize, host: PredHost) -> Result<(), LangError> {
        self.check_new(name)?;
        if arity == 0 {
            return Err(LangError::ArityMismatch {
                name: name.to_string(),
                expected: 1,
                found: 0,
            });
        }
        self.predicates.insert(name.to_string(), (arity, host));
        Ok(())
    }

    pub fn declare_seq_function(&mut self, name: &str, host: SeqHost) -> Result<(), LangError> {
        self.check_new(name)?;
        self.seq_functions.insert(name.to_string(), host);
        Ok(())
    }

    /// Convenience wrapper for infallible fixed-arity hosts.
    pub fn declare_fn<F>(&mut self, name: &str, arity: usize, host: F) -> Result<(), LangError>
    where
        F: Fn(&[u64]) -> u64 + Send + Sync + 'static,
    {
        self.declare_function(name, arity, Arc::new(move |xs| Ok(host(xs))))
    }

    /// Convenience wrapper for infallible sequence hosts.
    pub fn declare_seq_fn<F>(&mut self, name: &str, host: F) -> Result<(), LangError>
    where
        F: Fn(&[u64]) -> u64 + Send + Sync + 'static,
    {
        self.declare_seq_function(name, Arc::new(move |xs| Ok(host(xs))))
    }

    pub fn function(&self, name: &str) -> Option<(usize, &FixedHost)> {
        self.functions.get(name).map(|(a, h)| (*a, h))
    }

    pub fn predicate(&self, name: &str) -> Option<(usize, &PredHost)> {
        self.predicates.get(name).map(|(a, h)| (*a, h))
    }

    pub fn seq_function(&self, name: &str) -> Option<&SeqHost> {
        self.seq_functions.get(name)
    }

    pub fn symbols(&self) -> Vec<(String, SymbolKind)> {
        let mut out: Vec<(String, SymbolKind)> = self
            .functions
            .iter()
            .map(|(k, (a, _))| (k.clone(), SymbolKind::Function { arity: *a }))
            .chain(
                self.predicates
                    .iter()
                    .map(|(k, (a, _))| (k.clone(), SymbolKind::Predicate { arity: *a })),
            )
            .chain(self.seq_functions.keys().map(|k| (k.clone(), SymbolKind::Sequence)))
            .collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }

    fn check_occurrence(&self, name: &str, argc: Option<usize>, as_predicate: bool) -> Result<(), LangError> {
        let kind = self.kind(name).ok_or_else(|| LangError::UnknownSymbol(name.to_string()))?;
        let wrong = |expected: &'static str| LangError::WrongKind {
            name: name.to_string(),
            expected,
            actual: kind.noun(),
        };
        match (kind, argc, as_predicate) {
            (SymbolKind::Predicate { arity }, Some(n), true) | (SymbolKind::Function { arity }, Some(n), false) => {
                if arity == n {
                    Ok(())
                } else {
                    Err(LangError::ArityMismatch {
                        name: name.to_string(),
                        expected: arity,
                        found: n,
                    })
                }
            }
            (SymbolKind::Sequence, _, false) => Ok(()),
            (_, _, true) => Err(wrong("predicate")),
            (_, Some(_), false) => Err(wrong("function")),
            (_, None, false) => Err(wrong("sequence function")),
        }
    }

    /// Every symbol is declared, with the right kind and arity.
    pub fn check_formula(&self, formula: &Formula) -> Result<(), LangError> {
        let mut result = Ok(());
        formula.visit_symbols(&mut |name, argc, pred| {
            if result.is_ok() {
                result = self.check_occurrence(name, argc, pred);
            }
        });
        result
    }

    pub fn check_term(&self, term: &Term) -> Result<(), LangError> {
        let mut result = Ok(());
        term.visit_symbols(&mut |name, argc, pred| {
            if result.is_ok() {
                result = self.check_occurrence(name, argc, pred);
            }
        });
        result
    }

    /// Applies a signature file.
    ///
    /// ```text
    /// # comment
    /// fn    <name> <arity> <key>
    /// pred  <name> <arity> <key>
    /// seqfn <name> <key>
    /// ```
    ///
    /// Keys are resolved in `registry`; the declared arity must match the
    /// registered one.
    pub fn apply_declarations(&mut self, text: &str, registry: &Registry) -> Result<(), LangError> {
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| LangError::SignatureFile {
                line: line_no,
                message,
            };
            let words: Vec<&str> = line.split_whitespace().collect();
            let wrap = |e: LangError| err(e.to_string());
            match words.as_slice() {
                ["fn", name, arity, key] | ["pred", name, arity, key] => {
                    let arity: usize = arity.parse().map_err(|_| err(format!("bad arity `{arity}`")))?;
                    let entry = registry.get(key).ok_or_else(|| err(format!("unknown registry key `{key}`")))?;
                    match (words[0], entry) {
                        ("fn", RegistryEntry::Function(a, host)) if *a == arity => {
                            self.declare_function(name, arity, host.clone()).map_err(wrap)?
                        }
                        ("pred", RegistryEntry::Predicate(a, host)) if *a == arity => {
                            self.declare_predicate(name, arity, host.clone()).map_err(wrap)?
                        }
                        (_, RegistryEntry::Function(a, _)) | (_, RegistryEntry::Predicate(a, _)) if *a != arity => {
                            return Err(err(format!("`{key}` has arity {a}, declared {arity}")))
                        }
                        _ => return Err(err(format!("`{key}` is not a {}", words[0]))),
                    }
                }
                ["seqfn", name, key] => match registry.get(key) {
                    Some(RegistryEntry::Sequence(host)) => self.declare_seq_function(name, host.clone()).map_err(wrap)?,
                    Some(_) => return Err(err(format!("`{key}` is not a sequence function"))),
                    None => return Err(err(format!("unknown registry key `{key}`"))),
                },
                _ => return Err(err(format!("cannot parse `{line}`"))),
            }
        }
        Ok(())
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn fixed2(op: fn(u64, u64) -> u64) -> FixedHost {
    Arc::new(move |xs| Ok(op(xs[0], xs[1])))
}

fn fixed1(op: fn(u64) -> u64) -> FixedHost {
    Arc::new(move |xs| Ok(op(xs[0])))
}

fn pred2(op: fn(&u64, &u64) -> bool) -> PredHost {
    Arc::new(move |xs| Ok(op(&xs[0], &xs[1])))
}

fn seq(op: fn(&[u64]) -> u64) -> SeqHost {
    Arc::new(move |xs| Ok(op(xs)))
}

fn indicator(op: fn(&[u64]) -> bool) -> SeqHost {
    Arc::new(move |xs| Ok(u64::from(op(xs))))
}

/// Builtin fixed-arity functions by key.
pub fn builtin_function(key: &str) -> Option<(usize, FixedHost)> {
    Some(match key {
        "add" => (2, fixed2(builtins::add)),
        "mul" => (2, fixed2(builtins::mul)),
        "monus" => (2, fixed2(builtins::monus)),
        "pick" => (4, Arc::new(|xs: &[u64]| Ok(builtins::pick(xs[0], xs[1], xs[2], xs[3]))) as FixedHost),
        "d1" => (1, fixed1(builtins::d1)),
        "d2" => (1, fixed1(builtins::d2)),
        "pair" => (
            2,
            Arc::new(|xs: &[u64]| {
                crate::pairing::PairingCodec::diagonal()
                    .encode(xs[0], xs[1])
                    .ok_or_else(|| HostError("pair index overflows".into()))
            }) as FixedHost,
        ),
        // g(m, n) = m: the m-th sequence of the constant family
        "constfam" => (2, fixed2(|m, _| m)),
        _ => return None,
    })
}

/// Builtin predicates by key.
pub fn builtin_predicate(key: &str) -> Option<(usize, PredHost)> {
    Some(match key {
        "lt" => (2, pred2(u64::lt)),
        "gt" => (2, pred2(u64::gt)),
        "le" => (2, pred2(u64::le)),
        "ge" => (2, pred2(u64::ge)),
        "eq" => (2, pred2(u64::eq)),
        "even" => (1, Arc::new(|xs: &[u64]| Ok(xs[0].is_multiple_of(2))) as PredHost),
        _ => return None,
    })
}

/// Builtin sequence functions by key.
pub fn builtin_seq_function(key: &str) -> Option<SeqHost> {
    Some(match key {
        "sum" => seq(builtins::sum),
        "len" => seq(|xs| xs.len() as u64),
        "last" => seq(|xs| xs.last().copied().unwrap_or(0)),
        "max" => seq(|xs| xs.iter().copied().max().unwrap_or(0)),
        "min" => seq(|xs| xs.iter().copied().min().unwrap_or(0)),
        "contains_zero" => indicator(builtins::contains_zero),
        "even_length" => indicator(builtins::even_length),
        "initial_segment" => indicator(builtins::initial_segment),
        "last_is_5" => indicator(|xs| builtins::last_is(xs, 5)),
        "const0" => seq(|_| 0),
        "const1" => seq(|_| 1),
        _ => return None,
    })
}

#[derive(Clone)]
pub enum RegistryEntry {
    Function(usize, FixedHost),
    Predicate(usize, PredHost),
    Sequence(SeqHost),
}

/// Named hosts that signature files may refer to.
#[derive(Clone, Default)]
pub struct Registry {
    entries: BTreeMap<String, RegistryEntry>,
}

impl Registry {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Every builtin function, predicate and sequence function.
    pub fn builtin() -> Self {
        let mut reg = Self::empty();
        for key in ["add", "mul", "monus", "pick", "d1", "d2", "pair", "constfam"] {
            let (a, h) = builtin_function(key).unwrap();
            reg.entries.insert(key.into(), RegistryEntry::Function(a, h));
        }
        for key in ["lt", "gt", "le", "ge", "eq", "even"] {
            let (a, h) = builtin_predicate(key).unwrap();
            reg.entries.insert(key.into(), RegistryEntry::Predicate(a, h));
        }
        for key in [
            "sum",
            "len",
            "last",
            "max",
            "min",
            "contains_zero",
            "even_length",
            "initial_segment",
            "last_is_5",
            "const0",
            "const1",
        ] {
            reg.entries
                .insert(key.into(), RegistryEntry::Sequence(builtin_seq_function(key).unwrap()));
        }
        reg
    }

    pub fn insert(&mut self, key: impl Into<String>, entry: RegistryEntry) {
        self.entries.insert(key.into(), entry);
    }

    pub fn get(&self, key: &str) -> Option<&RegistryEntry> {
        self.entries.get(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}
