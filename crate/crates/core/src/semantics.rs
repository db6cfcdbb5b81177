//! Evaluation in the canonical model whose distinguished symbol `f` reads a
//! [`SequenceOracle`].
//!
//! Connectives never short-circuit: every subterm and subformula is evaluated,
//! so the set of oracle indices read depends only on the syntax and the values
//! found, never on evaluation order. Ellipsis terms evaluate the bound first,
//! then the body at `x = 0, 1, ..., bound` in ascending order.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::lang::{Formula, HostError, Signature, Term};
use crate::oracle::{FinitePrefix, QueryLog, SequenceOracle, Session};

/// Largest tuple an ellipsis term may build.
pub const DEFAULT_MAX_TUPLE: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("symbol `{name}` expects {expected} argument(s), found {found}")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("symbol `{0}` used with the wrong kind")]
    WrongKind(String),
    #[error("quantifier over `{0}` in a formula that must be quantifier-free")]
    Quantifier(String),
    #[error("sentence has free variables")]
    OpenFormula,
    #[error("ellipsis tuple of length {0} exceeds the evaluation limit")]
    TupleTooLarge(u128),
    #[error("query at index {index} beyond the available prefix")]
    OutOfPrefix { index: u64 },
    #[error(transparent)]
    Host(#[from] HostError),
}

/// Variable assignment; unmapped variables read as 0.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment(BTreeMap<String, u64>);

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, var: &str) -> u64 {
        self.0.get(var).copied().unwrap_or(0)
    }

    /// `s(var|value)`.
    pub fn with(&self, var: &str, value: u64) -> Assignment {
        let mut next = self.clone();
        next.0.insert(var.to_string(), value);
        next
    }

    pub fn set(&mut self, var: &str, value: u64) -> Option<u64> {
        self.0.insert(var.to_string(), value)
    }

    fn restore(&mut self, var: &str, previous: Option<u64>) {
        match previous {
            Some(v) => {
                self.0.insert(var.to_string(), v);
            }
            None => {
                self.0.remove(var);
            }
        }
    }
}

impl<S: Into<String>> FromIterator<(S, u64)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (S, u64)>>(iter: I) -> Self {
        Assignment(iter.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalResult<T> {
    pub value: T,
    /// Exactly the oracle indices read during this evaluation.
    pub queries: QueryLog,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttemptOutcome {
    Succeeded(bool),
    /// Some query reached past the prefix; `index` is the first such index.
    Failed { index: u64 },
}

impl AttemptOutcome {
    /// Succeeded(true) or Failed.
    pub fn is_nice(&self) -> bool {
        !matches!(self, AttemptOutcome::Succeeded(false))
    }
}

struct Machine<'a> {
    sig: &'a Signature,
    session: Session<'a>,
    /// Number of readable entries; `None` means unlimited.
    available: Option<u64>,
    /// Range `0..=B` for quantifiers; `None` rejects quantifiers.
    quantifier_bound: Option<u64>,
    max_tuple: u64,
    env: Assignment,
}

impl<'a> Machine<'a> {
    fn new(sig: &'a Signature, oracle: &'a SequenceOracle, env: Assignment) -> Self {
        Machine {
            sig,
            session: oracle.session(),
            available: None,
            quantifier_bound: None,
            max_tuple: DEFAULT_MAX_TUPLE,
            env,
        }
    }

    fn read(&mut self, index: u64) -> Result<u64, EvalError> {
        if let Some(len) = self.available {
            if index >= len {
                return Err(EvalError::OutOfPrefix { index });
            }
        }
        Ok(self.session.query(index))
    }

    fn term(&mut self, t: &Term) -> Result<u64, EvalError> {
        match t {
            Term::Var(x) => Ok(self.env.get(x)),
            Term::Num(n) => Ok(*n),
            Term::Seq(arg) => {
                let i = self.term(arg)?;
                self.read(i)
            }
            Term::App { symbol, args } => {
                let values = args.iter().map(|a| self.term(a)).collect::<Result<Vec<_>, _>>()?;
                if let Some((arity, host)) = self.sig.function(symbol) {
                    if arity != values.len() {
                        return Err(EvalError::ArityMismatch {
                            name: symbol.clone(),
                            expected: arity,
                            found: values.len(),
                        });
                    }
                    Ok(host(&values)?)
                } else if let Some(host) = self.sig.seq_function(symbol) {
                    Ok(host(&values)?)
                } else if self.sig.contains(symbol) {
                    Err(EvalError::WrongKind(symbol.clone()))
                } else {
                    Err(EvalError::UnknownSymbol(symbol.clone()))
                }
            }
            Term::Ellipsis {
                symbol,
                body,
                binder,
                bound,
            } => {
                let host = match self.sig.seq_function(symbol) {
                    Some(h) => h.clone(),
                    None if self.sig.contains(symbol) => return Err(EvalError::WrongKind(symbol.clone())),
                    None => return Err(EvalError::UnknownSymbol(symbol.clone())),
                };
                let last = self.term(bound)?;
                let len = u128::from(last) + 1;
                if len > u128::from(self.max_tuple) {
                    return Err(EvalError::TupleTooLarge(len));
                }
                let mut tuple = Vec::with_capacity(len as usize);
                let saved = self.env.set(binder, 0);
                let mut outcome = Ok(());
                for i in 0..=last {
                    self.env.set(binder, i);
                    match self.term(body) {
                        Ok(v) => tuple.push(v),
                        Err(e) => {
                            outcome = Err(e);
                            break;
                        }
                    }
                }
                self.env.restore(binder, saved);
                outcome?;
                Ok(host(&tuple)?)
            }
        }
    }

    fn formula(&mut self, phi: &Formula) -> Result<bool, EvalError> {
        match phi {
            Formula::Eq(l, r) => {
                let a = self.term(l)?;
                let b = self.term(r)?;
                Ok(a == b)
            }
            Formula::Pred { symbol, args } => {
                let values = args.iter().map(|a| self.term(a)).collect::<Result<Vec<_>, _>>()?;
                let (arity, host) = match self.sig.predicate(symbol) {
                    Some(p) => p,
                    None if self.sig.contains(symbol) => return Err(EvalError::WrongKind(symbol.clone())),
                    None => return Err(EvalError::UnknownSymbol(symbol.clone())),
                };
                if arity != values.len() {
                    return Err(EvalError::ArityMismatch {
                        name: symbol.clone(),
                        expected: arity,
                        found: values.len(),
                    });
                }
                Ok(host(&values)?)
            }
            Formula::Not(p) => Ok(!self.formula(p)?),
            Formula::And(l, r) => {
                let a = self.formula(l)?;
                let b = self.formula(r)?;
                Ok(a && b)
            }
            Formula::Or(l, r) => {
                let a = self.formula(l)?;
                let b = self.formula(r)?;
                Ok(a || b)
            }
            Formula::Implies(l, r) => {
                let a = self.formula(l)?;
                let b = self.formula(r)?;
                Ok(!a || b)
            }
            Formula::Forall(x, body) | Formula::Exists(x, body) => {
                let bound = self.quantifier_bound.ok_or_else(|| EvalError::Quantifier(x.clone()))?;
                let universal = matches!(phi, Formula::Forall(..));
                let saved = self.env.set(x, 0);
                let mut result = Ok(universal);
                for n in 0..=bound {
                    self.env.set(x, n);
                    match self.formula(body) {
                        Ok(v) if v != universal => {
                            result = Ok(v);
                            break;
                        }
                        Ok(_) => {}
                        Err(e) => {
                            result = Err(e);
                            break;
                        }
                    }
                }
                self.env.restore(x, saved);
                result
            }
        }
    }
}

/// Value of `t` under `s`, with the indices it read.
pub fn eval_term(
    t: &Term,
    oracle: &SequenceOracle,
    s: &Assignment,
    sig: &Signature,
) -> Result<EvalResult<u64>, EvalError> {
    let mut m = Machine::new(sig, oracle, s.clone());
    let value = m.term(t)?;
    Ok(EvalResult {
        value,
        queries: m.session.into_log(),
    })
}

/// Truth of a quantifier-free formula under `s`.
pub fn eval_qf(
    phi: &Formula,
    oracle: &SequenceOracle,
    s: &Assignment,
    sig: &Signature,
) -> Result<EvalResult<bool>, EvalError> {
    let mut m = Machine::new(sig, oracle, s.clone());
    let value = m.formula(phi)?;
    Ok(EvalResult {
        value,
        queries: m.session.into_log(),
    })
}

/// Evaluates a closed quantifier-free sentence over `p` padded with zeros,
/// failing as soon as any index past the end of `p` is read.
pub fn attempt(phi: &Formula, p: &FinitePrefix, sig: &Signature) -> Result<AttemptOutcome, EvalError> {
    if !phi.is_closed() {
        return Err(EvalError::OpenFormula);
    }
    let oracle = SequenceOracle::zero_pad(p);
    attempt_on(phi, &oracle, p.len() as u64, sig)
}

/// Like [`attempt`], reading only indices `< available` of `oracle`.
pub fn attempt_on(
    phi: &Formula,
    oracle: &SequenceOracle,
    available: u64,
    sig: &Signature,
) -> Result<AttemptOutcome, EvalError> {
    let mut m = Machine::new(sig, oracle, Assignment::new());
    m.available = Some(available);
    match m.formula(phi) {
        Ok(v) => Ok(AttemptOutcome::Succeeded(v)),
        Err(EvalError::OutOfPrefix { index }) => Ok(AttemptOutcome::Failed { index }),
        Err(e) => Err(e),
    }
}

/// Evaluates `phi` with every quantifier restricted to `0..=bound`.
///
/// This is an approximation for test harnesses: unbounded quantifiers are not
/// decidable, and a bounded answer can differ from the true one.
pub fn eval_bounded(
    phi: &Formula,
    oracle: &SequenceOracle,
    s: &Assignment,
    sig: &Signature,
    bound: u64,
) -> Result<bool, EvalError> {
    let mut m = Machine::new(sig, oracle, s.clone());
    m.quantifier_bound = Some(bound);
    m.formula(phi)
}
