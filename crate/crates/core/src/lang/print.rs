//! Canonical concrete syntax. `parse_formula(&f.to_string()) == Ok(f)`.

use std::fmt;

use super::{Formula, Term, RELATIONS};

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) => write!(f, "{x}"),
            Term::Num(n) => write!(f, "{n}"),
            Term::App { symbol, args } => {
                write!(f, "{symbol}(")?;
                write_args(f, args)?;
                write!(f, ")")
            }
            Term::Seq(t) => write!(f, "f({t})"),
            Term::Ellipsis {
                symbol,
                body,
                binder,
                bound,
            } => write!(f, "{symbol}[ {body} : {binder} .. {bound} ]"),
        }
    }
}

fn write_args(f: &mut fmt::Formatter<'_>, args: &[Term]) -> fmt::Result {
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{a}")?;
    }
    Ok(())
}

// Binding strength; larger binds tighter.
const QUANT: u8 = 0;
const IMP: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const NOT: u8 = 4;
const ATOM: u8 = 5;

fn level(formula: &Formula) -> u8 {
    match formula {
        Formula::Forall(..) | Formula::Exists(..) => QUANT,
        Formula::Implies(..) => IMP,
        Formula::Or(..) => OR,
        Formula::And(..) => AND,
        Formula::Not(..) => NOT,
        Formula::Eq(..) | Formula::Pred { .. } => ATOM,
    }
}

fn write_at(f: &mut fmt::Formatter<'_>, formula: &Formula, min_level: u8) -> fmt::Result {
    if level(formula) < min_level {
        write!(f, "(")?;
        write_formula(f, formula)?;
        write!(f, ")")
    } else {
        write_formula(f, formula)
    }
}

fn write_formula(f: &mut fmt::Formatter<'_>, formula: &Formula) -> fmt::Result {
    match formula {
        Formula::Eq(l, r) => write!(f, "{l} = {r}"),
        Formula::Pred { symbol, args } if RELATIONS.contains(&symbol.as_str()) && args.len() == 2 => {
            write!(f, "{} {symbol} {}", args[0], args[1])
        }
        Formula::Pred { symbol, args } => {
            write!(f, "{symbol}(")?;
            write_args(f, args)?;
            write!(f, ")")
        }
        Formula::Not(p) => {
            write!(f, "!")?;
            write_at(f, p, NOT)
        }
        Formula::And(l, r) => {
            write_at(f, l, AND)?;
            write!(f, " & ")?;
            write_at(f, r, NOT)
        }
        Formula::Or(l, r) => {
            write_at(f, l, OR)?;
            write!(f, " | ")?;
            write_at(f, r, AND)
        }
        Formula::Implies(l, r) => {
            write_at(f, l, OR)?;
            write!(f, " -> ")?;
            write_at(f, r, IMP)
        }
        Formula::Forall(x, body) | Formula::Exists(x, body) => {
            let kw = if matches!(formula, Formula::Forall(..)) {
                "forall"
            } else {
                "exists"
            };
            write!(f, "{kw} {x}. ")?;
            // binary bodies are bracketed for readability
            match **body {
                Formula::And(..) | Formula::Or(..) | Formula::Implies(..) => write_at(f, body, ATOM),
                _ => write_formula(f, body),
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self)
    }
}
