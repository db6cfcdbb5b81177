//! Syntax of the ellipsis logic.
//!
//! Besides ordinary first-order terms there are two extra term forms: `f(t)`,
//! the distinguished unary symbol read from the ambient sequence, and the
//! ellipsis term `G[ u : x .. v ]`, which applies a symbol of unbounded arity
//! to the tuple `(u(x|0), ..., u(x|v))`. The binder `x` is bound in `u` only;
//! `v` is outside its scope.

mod parser;
mod print;
mod signature;

use std::collections::BTreeSet;

use thiserror::Error;

pub use parser::{parse, parse_formula, parse_term, ParseError};
pub use signature::{
    builtin_function, builtin_predicate, builtin_seq_function, FixedHost, HostError, PredHost,
    Registry, RegistryEntry, SeqHost, Signature, SymbolKind, SEQUENCE_SYMBOL,
};

/// Relational predicates written infix in the concrete syntax.
pub const RELATIONS: [&str; 4] = ["<", ">", "<=", ">="];

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Num(u64),
    /// Application of a declared function symbol to explicit arguments.
    App { symbol: String, args: Vec<Term> },
    /// `f(t)`.
    Seq(Box<Term>),
    /// `symbol[ body : binder .. bound ]`.
    Ellipsis {
        symbol: String,
        body: Box<Term>,
        binder: String,
        bound: Box<Term>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Eq(Term, Term),
    Pred { symbol: String, args: Vec<Term> },
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LangError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("symbol `{name}` expects {expected} argument(s), found {found}")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("symbol `{name}` is a {actual}, not a {expected}")]
    WrongKind {
        name: String,
        expected: &'static str,
        actual: &'static str,
    },
    #[error("symbol `{0}` is already declared")]
    DuplicateSymbol(String),
    #[error("symbol `{0}` is reserved")]
    ReservedSymbol(String),
    #[error("substituting for `{var}` would capture free variable `{binder}`")]
    Capture { var: String, binder: String },
    #[error("formula has free variables: {0:?}")]
    OpenFormula(BTreeSet<String>),
    #[error("not a valid {expected} sentence: {reason}")]
    InvalidSentence {
        expected: &'static str,
        reason: String,
    },
    #[error("signature file line {line}: {message}")]
    SignatureFile { line: usize, message: String },
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn num(n: u64) -> Term {
        Term::Num(n)
    }

    pub fn seq(arg: Term) -> Term {
        Term::Seq(Box::new(arg))
    }

    pub fn app(symbol: impl Into<String>, args: Vec<Term>) -> Term {
        Term::App {
            symbol: symbol.into(),
            args,
        }
    }

    pub fn ellipsis(symbol: impl Into<String>, body: Term, binder: impl Into<String>, bound: Term) -> Term {
        Term::Ellipsis {
            symbol: symbol.into(),
            body: Box::new(body),
            binder: binder.into(),
            bound: Box::new(bound),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::Num(_) => {}
            Term::App { args, .. } => args.iter().for_each(|a| a.collect_free(out)),
            Term::Seq(t) => t.collect_free(out),
            Term::Ellipsis {
                body, binder, bound, ..
            } => {
                let mut inner = body.free_vars();
                inner.remove(binder);
                out.extend(inner);
                bound.collect_free(out);
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// `self(var|repl)`.
    ///
    /// Inside an ellipsis term binding `x`: if `var != x` the substitution
    /// goes into both body and bound; if `var == x` only the bound is
    /// rewritten. A replacement whose free variables would be captured by an
    /// ellipsis binder is rejected.
    pub fn substitute(&self, var: &str, repl: &Term) -> Result<Term, LangError> {
        Ok(match self {
            Term::Var(x) if x == var => repl.clone(),
            Term::Var(_) | Term::Num(_) => self.clone(),
            Term::App { symbol, args } => Term::App {
                symbol: symbol.clone(),
                args: args
                    .iter()
                    .map(|a| a.substitute(var, repl))
                    .collect::<Result<_, _>>()?,
            },
            Term::Seq(t) => Term::Seq(Box::new(t.substitute(var, repl)?)),
            Term::Ellipsis {
                symbol,
                body,
                binder,
                bound,
            } => {
                let new_body = if binder == var {
                    (**body).clone()
                } else {
                    if body.free_vars().contains(var) && repl.free_vars().contains(binder) {
                        return Err(LangError::Capture {
                            var: var.to_string(),
                            binder: binder.clone(),
                        });
                    }
                    body.substitute(var, repl)?
                };
                Term::Ellipsis {
                    symbol: symbol.clone(),
                    body: Box::new(new_body),
                    binder: binder.clone(),
                    bound: Box::new(bound.substitute(var, repl)?),
                }
            }
        })
    }

    /// Visits every symbol occurrence together with its argument count
    /// (`None` for ellipsis applications).
    pub(crate) fn visit_symbols<'a>(&'a self, visit: &mut dyn FnMut(&'a str, Option<usize>, bool)) {
        match self {
            Term::Var(_) | Term::Num(_) => {}
            Term::App { symbol, args } => {
                visit(symbol, Some(args.len()), false);
                args.iter().for_each(|a| a.visit_symbols(visit));
            }
            Term::Seq(t) => t.visit_symbols(visit),
            Term::Ellipsis { symbol, body, bound, .. } => {
                visit(symbol, None, false);
                body.visit_symbols(visit);
                bound.visit_symbols(visit);
            }
        }
    }
}

impl Formula {
    pub fn eq(lhs: Term, rhs: Term) -> Formula {
        Formula::Eq(lhs, rhs)
    }

    pub fn pred(symbol: impl Into<String>, args: Vec<Term>) -> Formula {
        Formula::Pred {
            symbol: symbol.into(),
            args,
        }
    }

    /// `lhs REL rhs` for one of [`RELATIONS`].
    pub fn rel(op: &str, lhs: Term, rhs: Term) -> Formula {
        Formula::pred(op, vec![lhs, rhs])
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(inner: Formula) -> Formula {
        Formula::Not(Box::new(inner))
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn implies(l: Formula, r: Formula) -> Formula {
        Formula::Implies(Box::new(l), Box::new(r))
    }

    pub fn forall(var: impl Into<String>, body: Formula) -> Formula {
        Formula::Forall(var.into(), Box::new(body))
    }

    pub fn exists(var: impl Into<String>, body: Formula) -> Formula {
        Formula::Exists(var.into(), Box::new(body))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Eq(l, r) => {
                out.extend(l.free_vars());
                out.extend(r.free_vars());
            }
            Formula::Pred { args, .. } => args.iter().for_each(|a| out.extend(a.free_vars())),
            Formula::Not(p) => p.collect_free(out),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                l.collect_free(out);
                r.collect_free(out);
            }
            Formula::Forall(x, body) | Formula::Exists(x, body) => {
                let mut inner = body.free_vars();
                inner.remove(x);
                out.extend(inner);
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Eq(..) | Formula::Pred { .. } => true,
            Formula::Not(p) => p.is_quantifier_free(),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                l.is_quantifier_free() && r.is_quantifier_free()
            }
            Formula::Forall(..) | Formula::Exists(..) => false,
        }
    }

    /// True iff some quantifier occurs in the scope of another.
    pub fn has_nested_quantifiers(&self) -> bool {
        match self {
            Formula::Eq(..) | Formula::Pred { .. } => false,
            Formula::Not(p) => p.has_nested_quantifiers(),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                l.has_nested_quantifiers() || r.has_nested_quantifiers()
            }
            Formula::Forall(_, body) | Formula::Exists(_, body) => !body.is_quantifier_free(),
        }
    }

    /// `self(var|repl)`. Quantifiers binding `var` stop the substitution;
    /// replacements that a quantifier would capture are rejected.
    pub fn substitute(&self, var: &str, repl: &Term) -> Result<Formula, LangError> {
        Ok(match self {
            Formula::Eq(l, r) => Formula::Eq(l.substitute(var, repl)?, r.substitute(var, repl)?),
            Formula::Pred { symbol, args } => Formula::Pred {
                symbol: symbol.clone(),
                args: args
                    .iter()
                    .map(|a| a.substitute(var, repl))
                    .collect::<Result<_, _>>()?,
            },
            Formula::Not(p) => Formula::not(p.substitute(var, repl)?),
            Formula::And(l, r) => Formula::and(l.substitute(var, repl)?, r.substitute(var, repl)?),
            Formula::Or(l, r) => Formula::or(l.substitute(var, repl)?, r.substitute(var, repl)?),
            Formula::Implies(l, r) => Formula::implies(l.substitute(var, repl)?, r.substitute(var, repl)?),
            Formula::Forall(x, body) | Formula::Exists(x, body) => {
                let new_body = if x == var {
                    (**body).clone()
                } else {
                    if body.free_vars().contains(var) && repl.free_vars().contains(x) {
                        return Err(LangError::Capture {
                            var: var.to_string(),
                            binder: x.clone(),
                        });
                    }
                    body.substitute(var, repl)?
                };
                match self {
                    Formula::Forall(..) => Formula::forall(x.clone(), new_body),
                    _ => Formula::exists(x.clone(), new_body),
                }
            }
        })
    }

    pub(crate) fn visit_symbols<'a>(&'a self, visit: &mut dyn FnMut(&'a str, Option<usize>, bool)) {
        match self {
            Formula::Eq(l, r) => {
                l.visit_symbols(visit);
                r.visit_symbols(visit);
            }
            Formula::Pred { symbol, args } => {
                visit(symbol, Some(args.len()), true);
                args.iter().for_each(|a| a.visit_symbols(visit));
            }
            Formula::Not(p) => p.visit_symbols(visit),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                l.visit_symbols(visit);
                r.visit_symbols(visit);
            }
            Formula::Forall(_, body) | Formula::Exists(_, body) => body.visit_symbols(visit),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SentenceClass {
    QuantifierFree,
    /// `exists x. forall y. φ` with `φ` quantifier-free.
    Sigma2,
    /// `forall x. exists y. φ` with `φ` quantifier-free.
    Pi2,
    /// Everything else, including a single unnested quantifier.
    NestedOther,
}

pub fn classify_sentence(formula: &Formula) -> Result<SentenceClass, LangError> {
    let fv = formula.free_vars();
    if !fv.is_empty() {
        return Err(LangError::OpenFormula(fv));
    }
    if formula.is_quantifier_free() {
        return Ok(SentenceClass::QuantifierFree);
    }
    Ok(match formula {
        Formula::Exists(_, body) => match &**body {
            Formula::Forall(_, m) if m.is_quantifier_free() => SentenceClass::Sigma2,
            _ => SentenceClass::NestedOther,
        },
        Formula::Forall(_, body) => match &**body {
            Formula::Exists(_, m) if m.is_quantifier_free() => SentenceClass::Pi2,
            _ => SentenceClass::NestedOther,
        },
        _ => SentenceClass::NestedOther,
    })
}

fn split_prenex(
    formula: &Formula,
    expected: &'static str,
    outer_exists: bool,
) -> Result<(String, String, Formula), LangError> {
    let invalid = |reason: &str| LangError::InvalidSentence {
        expected,
        reason: reason.to_string(),
    };
    let (outer, rest) = match (formula, outer_exists) {
        (Formula::Exists(x, body), true) | (Formula::Forall(x, body), false) => (x, body),
        _ => return Err(invalid("wrong outer quantifier")),
    };
    let (inner, matrix) = match (&**rest, outer_exists) {
        (Formula::Forall(y, m), true) | (Formula::Exists(y, m), false) => (y, m),
        _ => return Err(invalid("wrong inner quantifier")),
    };
    check_matrix(outer, inner, matrix).map_err(|r| invalid(&r))?;
    Ok((outer.clone(), inner.clone(), (**matrix).clone()))
}

fn check_matrix(outer: &str, inner: &str, matrix: &Formula) -> Result<(), String> {
    if outer == inner {
        return Err(format!("both quantifiers bind `{outer}`"));
    }
    if !matrix.is_quantifier_free() {
        return Err("matrix contains a quantifier".into());
    }
    let extra: BTreeSet<String> = matrix
        .free_vars()
        .into_iter()
        .filter(|v| v != outer && v != inner)
        .collect();
    if !extra.is_empty() {
        return Err(format!("matrix has free variables {extra:?}"));
    }
    Ok(())
}

fn instantiate_matrix(matrix: &Formula, outer: &str, inner: &str, a: u64, b: u64) -> Result<Formula, LangError> {
    matrix
        .substitute(outer, &Term::Num(a))?
        .substitute(inner, &Term::Num(b))
}

/// `exists outer. forall inner. matrix`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sigma2Sentence {
    pub outer: String,
    pub inner: String,
    pub matrix: Formula,
}

impl Sigma2Sentence {
    pub fn new(outer: impl Into<String>, inner: impl Into<String>, matrix: Formula) -> Result<Self, LangError> {
        let (outer, inner) = (outer.into(), inner.into());
        check_matrix(&outer, &inner, &matrix).map_err(|reason| LangError::InvalidSentence {
            expected: "Sigma2",
            reason,
        })?;
        Ok(Sigma2Sentence { outer, inner, matrix })
    }

    pub fn from_formula(formula: &Formula) -> Result<Self, LangError> {
        let (outer, inner, matrix) = split_prenex(formula, "Sigma2", true)?;
        Ok(Sigma2Sentence { outer, inner, matrix })
    }

    pub fn to_formula(&self) -> Formula {
        Formula::exists(self.outer.clone(), Formula::forall(self.inner.clone(), self.matrix.clone()))
    }

    /// `matrix(outer, inner | a, b)`.
    pub fn instantiate(&self, a: u64, b: u64) -> Result<Formula, LangError> {
        instantiate_matrix(&self.matrix, &self.outer, &self.inner, a, b)
    }
}

/// `forall outer. exists inner. matrix`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pi2Sentence {
    pub outer: String,
    pub inner: String,
    pub matrix: Formula,
}

impl Pi2Sentence {
    pub fn new(outer: impl Into<String>, inner: impl Into<String>, matrix: Formula) -> Result<Self, LangError> {
        let (outer, inner) = (outer.into(), inner.into());
        check_matrix(&outer, &inner, &matrix).map_err(|reason| LangError::InvalidSentence {
            expected: "Pi2",
            reason,
        })?;
        Ok(Pi2Sentence { outer, inner, matrix })
    }

    pub fn from_formula(formula: &Formula) -> Result<Self, LangError> {
        let (outer, inner, matrix) = split_prenex(formula, "Pi2", false)?;
        Ok(Pi2Sentence { outer, inner, matrix })
    }

    pub fn to_formula(&self) -> Formula {
        Formula::forall(self.outer.clone(), Formula::exists(self.inner.clone(), self.matrix.clone()))
    }

    pub fn instantiate(&self, a: u64, b: u64) -> Result<Formula, LangError> {
        instantiate_matrix(&self.matrix, &self.outer, &self.inner, a, b)
    }

    /// `exists outer. forall inner. !matrix`, which defines the complement.
    pub fn negated(&self) -> Sigma2Sentence {
        Sigma2Sentence {
            outer: self.outer.clone(),
            inner: self.inner.clone(),
            matrix: Formula::not(self.matrix.clone()),
        }
    }
}
