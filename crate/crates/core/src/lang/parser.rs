//! Recursive-descent parser for the concrete syntax.
//!
//! ```text
//! formula := 'forall' VAR '.' formula | 'exists' VAR '.' formula | imp
//! imp     := disj [ '->' imp ]
//! disj    := conj { '|' conj }
//! conj    := neg { '&' neg }
//! neg     := '!' neg | atom
//! atom    := term REL term | IDENT '(' term {',' term} ')' | '(' formula ')'
//! REL     := '=' | '<' | '>' | '<=' | '>='
//! term    := NAT | VAR | 'f' '(' term ')' | IDENT '(' term {',' term} ')'
//!          | IDENT '[' term ':' VAR '..' term ']'
//! ```
//!
//! `IDENT(...)` at the start of an atom is a predicate unless a relation
//! follows it, in which case it is a function application.

use std::fmt;

use thiserror::Error;

use super::signature::SEQUENCE_SYMBOL;
use super::{Formula, LangError, Signature, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at {}:{}: {}", self.line, self.column, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Nat(u64),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Colon,
    Dot,
    DotDot,
    Eq,
    Lt,
    Gt,
    Le,
    Ge,
    Arrow,
    Bar,
    Amp,
    Bang,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "`{s}`"),
            Tok::Nat(n) => return write!(f, "`{n}`"),
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Comma => ",",
            Tok::Colon => ":",
            Tok::Dot => ".",
            Tok::DotDot => "..",
            Tok::Eq => "=",
            Tok::Lt => "<",
            Tok::Gt => ">",
            Tok::Le => "<=",
            Tok::Ge => ">=",
            Tok::Arrow => "->",
            Tok::Bar => "|",
            Tok::Amp => "&",
            Tok::Bang => "!",
            Tok::Eof => return write!(f, "end of input"),
        };
        write!(f, "`{s}`")
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut column) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, column);
        let err = |message: String| ParseError {
            line: tl,
            column: tc,
            message,
        };
        if c == '\n' {
            i += 1;
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            column += 1;
            continue;
        }
        let next = chars.get(i + 1).copied();
        let (tok, width) = match c {
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '[' => (Tok::LBracket, 1),
            ']' => (Tok::RBracket, 1),
            ',' => (Tok::Comma, 1),
            ':' => (Tok::Colon, 1),
            '.' if next == Some('.') => (Tok::DotDot, 2),
            '.' => (Tok::Dot, 1),
            '=' => (Tok::Eq, 1),
            '<' if next == Some('=') => (Tok::Le, 2),
            '<' => (Tok::Lt, 1),
            '>' if next == Some('=') => (Tok::Ge, 2),
            '>' => (Tok::Gt, 1),
            '-' if next == Some('>') => (Tok::Arrow, 2),
            '|' => (Tok::Bar, 1),
            '&' => (Tok::Amp, 1),
            '!' => (Tok::Bang, 1),
            c if c.is_ascii_digit() => {
                let start = i;
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let digits: String = chars[start..j].iter().collect();
                let n = digits
                    .parse::<u64>()
                    .map_err(|_| err(format!("numeral `{digits}` is too large")))?;
                (Tok::Nat(n), j - start)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                (Tok::Ident(chars[start..j].iter().collect()), j - start)
            }
            other => return Err(err(format!("unexpected character `{other}`"))),
        };
        out.push(Spanned {
            tok,
            line: tl,
            column: tc,
        });
        i += width;
        column += width;
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let idx = (self.pos + offset).min(self.toks.len() - 1);
        &self.toks[idx].tok
    }

    fn bump(&mut self) -> Tok {
        let tok = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        tok
    }

    fn error(&self, message: String) -> ParseError {
        let sp = &self.toks[self.pos];
        ParseError {
            line: sp.line,
            column: sp.column,
            message,
        }
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected {want}, found {}", self.peek())))
        }
    }

    fn variable(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) if !is_reserved(&name) => {
                self.bump();
                Ok(name)
            }
            other => Err(self.error(format!("expected a variable, found {other}"))),
        }
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.error(format!("unexpected {} after end of formula", self.peek())))
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Tok::Ident(kw) if kw == "forall" || kw == "exists" => {
                let universal = kw == "forall";
                self.bump();
                let var = self.variable()?;
                self.expect(Tok::Dot)?;
                let body = self.formula()?;
                Ok(if universal {
                    Formula::forall(var, body)
                } else {
                    Formula::exists(var, body)
                })
            }
            _ => self.implication(),
        }
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            lhs = Formula::or(lhs, self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.negation()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            lhs = Formula::and(lhs, self.negation()?);
        }
        Ok(lhs)
    }

    fn negation(&mut self) -> Result<Formula, ParseError> {
        if *self.peek() == Tok::Bang {
            self.bump();
            return Ok(Formula::not(self.negation()?));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        if *self.peek() == Tok::LParen {
            self.bump();
            let inner = self.formula()?;
            self.expect(Tok::RParen)?;
            return Ok(inner);
        }
        let lhs = match (self.peek().clone(), self.peek_at(1)) {
            (Tok::Ident(name), Tok::LParen) if !is_reserved(&name) => {
                self.bump();
                let args = self.arguments()?;
                if relation(self.peek()).is_none() {
                    return Ok(Formula::pred(name, args));
                }
                Term::app(name, args)
            }
            _ => self.term()?,
        };
        let op = relation(self.peek()).ok_or_else(|| {
            self.error(format!("expected `=`, `<`, `>`, `<=` or `>=`, found {}", self.peek()))
        })?;
        self.bump();
        let rhs = self.term()?;
        Ok(match op {
            "=" => Formula::eq(lhs, rhs),
            rel => Formula::rel(rel, lhs, rhs),
        })
    }

    fn arguments(&mut self) -> Result<Vec<Term>, ParseError> {
        self.expect(Tok::LParen)?;
        let mut args = vec![self.term()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            args.push(self.term()?);
        }
        self.expect(Tok::RParen)?;
        Ok(args)
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Tok::Nat(n) => {
                self.bump();
                Ok(Term::Num(n))
            }
            Tok::Ident(name) if name == SEQUENCE_SYMBOL => {
                self.bump();
                self.expect(Tok::LParen)?;
                let arg = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(Term::seq(arg))
            }
            Tok::Ident(name) if !is_reserved(&name) => {
                self.bump();
                match self.peek() {
                    Tok::LParen => Ok(Term::app(name, self.arguments()?)),
                    Tok::LBracket => {
                        self.bump();
                        let body = self.term()?;
                        self.expect(Tok::Colon)?;
                        let binder = self.variable()?;
                        self.expect(Tok::DotDot)?;
                        let bound = self.term()?;
                        self.expect(Tok::RBracket)?;
                        Ok(Term::ellipsis(name, body, binder, bound))
                    }
                    _ => Ok(Term::Var(name)),
                }
            }
            other => Err(self.error(format!("expected a term, found {other}"))),
        }
    }
}

fn relation(tok: &Tok) -> Option<&'static str> {
    Some(match tok {
        Tok::Eq => "=",
        Tok::Lt => "<",
        Tok::Gt => ">",
        Tok::Le => "<=",
        Tok::Ge => ">=",
        _ => return None,
    })
}

fn is_reserved(name: &str) -> bool {
    matches!(name, "forall" | "exists") || name == SEQUENCE_SYMBOL
}

/// Parses a formula without consulting any signature.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser::new(text)?;
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(text)?;
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

/// Parses and checks every symbol against `sig`.
pub fn parse(text: &str, sig: &Signature) -> Result<Formula, LangError> {
    let f = parse_formula(text)?;
    sig.check_formula(&f)?;
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantified_example() {
        let got = parse_formula("exists x. forall y. f(x) = 0").unwrap();
        let want = Formula::exists(
            "x",
            Formula::forall("y", Formula::eq(Term::seq(Term::var("x")), Term::num(0))),
        );
        assert_eq!(got, want);
    }

    #[test]
    fn ellipsis_example() {
        let got = parse_formula("G[ f(z) : z .. y ] = 1").unwrap();
        let want = Formula::eq(
            Term::ellipsis("G", Term::seq(Term::var("z")), "z", Term::var("y")),
            Term::num(1),
        );
        assert_eq!(got, want);
    }

    #[test]
    fn unbalanced_input_is_an_error() {
        let err = parse_formula("forall x. (").unwrap_err();
        assert_eq!((err.line, err.column), (1, 12));
        let err = parse_formula("0 = 0\n  & (1 =").unwrap_err();
        assert_eq!(err.line, 2);
    }

    #[test]
    fn precedence_and_associativity() {
        let f = parse_formula("0 = 0 | 1 = 1 & !2 = 2 -> 3 = 3 -> 4 = 4").unwrap();
        let a = |n| Formula::eq(Term::num(n), Term::num(n));
        let want = Formula::implies(
            Formula::or(a(0), Formula::and(a(1), Formula::not(a(2)))),
            Formula::implies(a(3), a(4)),
        );
        assert_eq!(f, want);
        let f = parse_formula("0 = 0 | 1 = 1 | 2 = 2").unwrap();
        assert_eq!(f, Formula::or(Formula::or(a(0), a(1)), a(2)));
    }

    #[test]
    fn predicate_versus_application() {
        let p = parse_formula("even(f(3))").unwrap();
        assert_eq!(p, Formula::pred("even", vec![Term::seq(Term::num(3))]));
        let e = parse_formula("add(1, 2) <= 3").unwrap();
        assert_eq!(
            e,
            Formula::rel("<=", Term::app("add", vec![Term::num(1), Term::num(2)]), Term::num(3))
        );
    }

    #[test]
    fn reserved_words() {
        assert!(parse_formula("f = 0").is_err());
        assert!(parse_formula("forall f. 0 = 0").is_err());
        assert!(parse_formula("exists forall. 0 = 0").is_err());
        assert!(parse_formula("G[ f(z) : f .. 3 ] = 0").is_err());
        assert!(parse_formula("99999999999999999999999 = 0").is_err());
    }

    #[test]
    fn checked_parse_reports_symbol_errors() {
        let sig = Signature::standard();
        assert!(matches!(parse("nope(1) = 0", &sig), Err(LangError::UnknownSymbol(_))));
        assert!(matches!(parse("add(1) = 0", &sig), Err(LangError::ArityMismatch { .. })));
        assert!(matches!(parse("0 = ", &sig), Err(LangError::Parse(_))));
        parse("sum[ f(z) : z .. 99 ] = 4950", &sig).unwrap();
    }
}
