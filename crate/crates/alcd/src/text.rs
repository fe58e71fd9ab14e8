//! The `.alcd` text format: parser and printer.
//!
//! ```text
//! domain Q;
//! top <= some [r f, r f] lt;      # GCI
//! a : (A and some r.B);           # concept assertion
//! (a, b) : r;                     # role assertion
//! lt(a.age, b.age);               # predicate assertion
//! a.age = 1/2;                    # feature assertion
//! ```

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use alcd_core::cdomain::{DomainTag, Rational, Value};
use alcd_core::syntax::{name, Assertion, Concept, FeaturePath, Gci, Name, Ontology, PredRef};
use alcd_core::{ConcreteDomain, DomainError};
use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character `{0}`")]
    Lexical(char),
    #[error("expected {expected}, found {found}")]
    Unexpected { expected: String, found: String },
    #[error("unknown domain `{0}`")]
    UnknownDomain(String),
    #[error("`{name}` is not a predicate of the {domain} domain")]
    UnknownPredicate { name: String, domain: DomainTag },
    #[error("predicate `{name}` has arity {arity}, given {found} arguments")]
    Arity {
        name: String,
        arity: usize,
        found: usize,
    },
    #[error("`{0}` is used both as a role and as a feature")]
    RoleFeatureClash(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error(transparent)]
    Domain(#[from] DomainError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    /// Unsigned number as written: digits, optionally `/digits` or `.digits`.
    Number(String),
    Sym(char),
    Le,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Number(s) => write!(f, "number `{s}`"),
            Tok::Sym(c) => write!(f, "`{c}`"),
            Tok::Le => f.write_str("`<=`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut column) = (0, 1, 1);
    let advance = |i: &mut usize, line: &mut usize, column: &mut usize, c: char| {
        *i += 1;
        if c == '\n' {
            *line += 1;
            *column = 1;
        } else {
            *column += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, column);
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut column, c);
        } else if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                let c = chars[i];
                advance(&mut i, &mut line, &mut column, c);
            }
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                s.push(chars[i]);
                let c = chars[i];
                advance(&mut i, &mut line, &mut column, c);
            }
            out.push(Spanned {
                tok: Tok::Ident(s),
                line: l0,
                column: c0,
            });
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            let digits = |s: &mut String, i: &mut usize, line: &mut usize, column: &mut usize| {
                while *i < chars.len() && chars[*i].is_ascii_digit() {
                    s.push(chars[*i]);
                    advance(i, line, column, chars[*i]);
                }
            };
            digits(&mut s, &mut i, &mut line, &mut column);
            if i + 1 < chars.len() && (chars[i] == '/' || chars[i] == '.') && chars[i + 1].is_ascii_digit() {
                s.push(chars[i]);
                let c = chars[i];
                advance(&mut i, &mut line, &mut column, c);
                digits(&mut s, &mut i, &mut line, &mut column);
            }
            out.push(Spanned {
                tok: Tok::Number(s),
                line: l0,
                column: c0,
            });
        } else if c == '<' && chars.get(i + 1) == Some(&'=') {
            advance(&mut i, &mut line, &mut column, c);
            advance(&mut i, &mut line, &mut column, '=');
            out.push(Spanned {
                tok: Tok::Le,
                line: l0,
                column: c0,
            });
        } else if ";:(),.[]=-".contains(c) {
            advance(&mut i, &mut line, &mut column, c);
            out.push(Spanned {
                tok: Tok::Sym(c),
                line: l0,
                column: c0,
            });
        } else {
            return Err(ParseError {
                line,
                column,
                kind: ParseErrorKind::Lexical(c),
            });
        }
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

const KEYWORDS: &[&str] = &["domain", "top", "bot", "not", "and", "or", "some", "all"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Role,
    Feature,
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    domain: DomainTag,
    kinds: BTreeMap<Name, Kind>,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        let s = &self.toks[self.pos];
        ParseError {
            line: s.line,
            column: s.column,
            kind,
        }
    }

    fn error_at(&self, pos: usize, kind: ParseErrorKind) -> ParseError {
        let s = &self.toks[pos];
        ParseError {
            line: s.line,
            column: s.column,
            kind,
        }
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        self.error(ParseErrorKind::Unexpected {
            expected: expected.to_string(),
            found: self.peek().to_string(),
        })
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn is_sym(&self, c: char) -> bool {
        *self.peek() == Tok::Sym(c)
    }

    fn expect_sym(&mut self, c: char) -> PResult<()> {
        if self.is_sym(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{c}`")))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn expect_keyword(&mut self, kw: &str) -> PResult<()> {
        if self.is_keyword(kw) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{kw}`")))
        }
    }

    /// A name that is not a keyword.
    fn ident(&mut self, what: &str) -> PResult<Name> {
        match self.peek() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let n = name(s);
                self.bump();
                Ok(n)
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn classify(&mut self, pos: usize, n: &Name, kind: Kind) -> PResult<()> {
        match self.kinds.get(n) {
            Some(&k) if k != kind => Err(self.error_at(pos, ParseErrorKind::RoleFeatureClash(n.to_string()))),
            _ => {
                self.kinds.insert(n.clone(), kind);
                Ok(())
            }
        }
    }

    fn role(&mut self) -> PResult<Name> {
        let pos = self.pos;
        let r = self.ident("a role name")?;
        self.classify(pos, &r, Kind::Role)?;
        Ok(r)
    }

    fn feature(&mut self) -> PResult<Name> {
        let pos = self.pos;
        let f = self.ident("a feature name")?;
        self.classify(pos, &f, Kind::Feature)?;
        Ok(f)
    }

    fn ontology(&mut self) -> PResult<Ontology> {
        self.expect_keyword("domain")?;
        let pos = self.pos;
        let tag = match self.bump() {
            Tok::Ident(s) => DomainTag::from_name(&s)
                .ok_or_else(|| self.error_at(pos, ParseErrorKind::UnknownDomain(s.clone())))?,
            _ => return Err(self.error_at(pos, ParseErrorKind::Unexpected {
                expected: "a domain name".into(),
                found: self.toks[pos].tok.to_string(),
            })),
        };
        self.domain = tag;
        self.expect_sym(';')?;
        let mut o = Ontology::new(tag);
        while *self.peek() != Tok::Eof {
            self.statement(&mut o)?;
        }
        Ok(o)
    }

    fn statement(&mut self, o: &mut Ontology) -> PResult<()> {
        let head_is_name = matches!(self.peek(), Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()));
        if head_is_name {
            match self.peek_at(1) {
                Tok::Sym(':') => {
                    let individual = self.ident("an individual")?;
                    self.bump();
                    let concept = self.concept()?;
                    self.expect_sym(';')?;
                    o.abox.push(Assertion::Concept { individual, concept });
                    return Ok(());
                }
                Tok::Sym('(') => return self.predicate_assertion(o),
                Tok::Sym('.') => {
                    let individual = self.ident("an individual")?;
                    self.bump();
                    let feature = self.feature()?;
                    self.expect_sym('=')?;
                    let value = self.constant()?;
                    self.expect_sym(';')?;
                    o.abox.push(Assertion::Feature {
                        individual,
                        feature,
                        value,
                    });
                    return Ok(());
                }
                _ => {}
            }
        }
        if self.is_sym('(') && matches!(self.peek_at(2), Tok::Sym(',')) {
            self.bump();
            let from = self.ident("an individual")?;
            self.expect_sym(',')?;
            let to = self.ident("an individual")?;
            self.expect_sym(')')?;
            self.expect_sym(':')?;
            let role = self.role()?;
            self.expect_sym(';')?;
            o.abox.push(Assertion::Role { role, from, to });
            return Ok(());
        }
        let lhs = self.concept()?;
        if *self.peek() != Tok::Le {
            return Err(self.unexpected("`<=`"));
        }
        self.bump();
        let rhs = self.concept()?;
        self.expect_sym(';')?;
        o.tbox.push(Gci::new(lhs, rhs));
        Ok(())
    }

    fn predicate_assertion(&mut self, o: &mut Ontology) -> PResult<()> {
        let pos = self.pos;
        let pname = self.ident("a predicate")?;
        self.expect_sym('(')?;
        let mut args = Vec::new();
        loop {
            let individual = self.ident("an individual")?;
            self.expect_sym('.')?;
            let feature = self.feature()?;
            args.push((individual, feature));
            if self.is_sym(',') {
                self.bump();
            } else {
                break;
            }
        }
        self.expect_sym(')')?;
        self.expect_sym(';')?;
        let pred = self.lookup_predicate(pos, &pname, args.len())?;
        o.abox.push(Assertion::Predicate { pred, args });
        Ok(())
    }

    fn lookup_predicate(&self, pos: usize, pname: &str, found: usize) -> PResult<alcd_core::Pred> {
        let d = self.domain.domain().descriptor();
        let pred = d.lookup(pname).ok_or_else(|| {
            self.error_at(pos, ParseErrorKind::UnknownPredicate {
                name: pname.to_string(),
                domain: self.domain,
            })
        })?;
        let arity = d.arity(pred);
        if arity != found {
            return Err(self.error_at(pos, ParseErrorKind::Arity {
                name: pname.to_string(),
                arity,
                found,
            }));
        }
        Ok(pred)
    }

    fn concept(&mut self) -> PResult<Concept> {
        match self.peek().clone() {
            Tok::Ident(s) => match s.as_str() {
                "top" => {
                    self.bump();
                    Ok(Concept::Top)
                }
                "bot" => {
                    self.bump();
                    Ok(Concept::Bottom)
                }
                "not" => {
                    self.bump();
                    Ok(Concept::Not(Box::new(self.concept()?)))
                }
                "some" | "all" => {
                    self.bump();
                    let universal = s == "all";
                    if self.is_sym('[') {
                        self.cd_restriction(universal)
                    } else {
                        let r = self.role()?;
                        self.expect_sym('.')?;
                        let c = Box::new(self.concept()?);
                        Ok(if universal {
                            Concept::Forall(r, c)
                        } else {
                            Concept::Exists(r, c)
                        })
                    }
                }
                _ => Ok(Concept::Atomic(self.ident("a concept")?)),
            },
            Tok::Sym('(') => {
                self.bump();
                let mut c = self.concept()?;
                loop {
                    if self.is_keyword("and") {
                        self.bump();
                        c = Concept::and(c, self.concept()?);
                    } else if self.is_keyword("or") {
                        self.bump();
                        c = Concept::or(c, self.concept()?);
                    } else {
                        break;
                    }
                }
                self.expect_sym(')')?;
                Ok(c)
            }
            _ => Err(self.unexpected("a concept")),
        }
    }

    fn cd_restriction(&mut self, universal: bool) -> PResult<Concept> {
        self.expect_sym('[')?;
        let mut paths = Vec::new();
        loop {
            let first_pos = self.pos;
            let first = self.ident("a feature path")?;
            let path = if matches!(self.peek(), Tok::Ident(_)) {
                self.classify(first_pos, &first, Kind::Role)?;
                FeaturePath::via(first, self.feature()?)
            } else {
                self.classify(first_pos, &first, Kind::Feature)?;
                FeaturePath::plain(first)
            };
            paths.push(path);
            if self.is_sym(',') {
                self.bump();
            } else {
                break;
            }
        }
        self.expect_sym(']')?;
        let pos = self.pos;
        let pred = if self.is_sym('=') {
            self.bump();
            let v = self.constant()?;
            if paths.len() != 1 {
                return Err(self.error_at(pos, ParseErrorKind::Arity {
                    name: format!("={v}"),
                    arity: 1,
                    found: paths.len(),
                }));
            }
            PredRef::Singleton(v)
        } else {
            let pname = self.ident("a predicate")?;
            PredRef::Domain(self.lookup_predicate(pos, &pname, paths.len())?)
        };
        Ok(if universal {
            Concept::CdForall(paths, pred)
        } else {
            Concept::CdExists(paths, pred)
        })
    }

    fn rational(&mut self) -> PResult<Rational> {
        let negative = self.is_sym('-');
        if negative {
            self.bump();
        }
        let pos = self.pos;
        let Tok::Number(s) = self.peek().clone() else {
            return Err(self.unexpected("a number"));
        };
        self.bump();
        let q = if let Some((n, d)) = s.split_once('/') {
            let d: BigInt = d.parse().expect("lexed digits");
            if d.is_zero() {
                return Err(self.error_at(pos, ParseErrorKind::ZeroDenominator));
            }
            Rational::new(n.parse().expect("lexed digits"), d)
        } else if let Some((int, frac)) = s.split_once('.') {
            let scale = BigInt::from(10).pow(frac.len() as u32);
            let whole: BigInt = int.parse().expect("lexed digits");
            let frac: BigInt = frac.parse().expect("lexed digits");
            Rational::new(whole * &scale + frac, scale)
        } else {
            Rational::from_integer(s.parse().expect("lexed digits"))
        };
        Ok(if negative { -q } else { q })
    }

    fn constant(&mut self) -> PResult<Value> {
        let pos = self.pos;
        let v = if self.is_sym('[') {
            self.bump();
            let s = self.rational()?;
            self.expect_sym(',')?;
            let e = self.rational()?;
            self.expect_sym(']')?;
            Value::Interval(s, e)
        } else {
            Value::Rational(self.rational()?)
        };
        self.domain
            .domain()
            .check_value(&v)
            .map_err(|e| self.error_at(pos, e.into()))?;
        Ok(v)
    }
}

pub fn parse_ontology(src: &str) -> Result<Ontology, ParseError> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
        domain: DomainTag::Q,
        kinds: BTreeMap::new(),
    };
    p.ontology()
}

fn write_path(out: &mut String, p: &FeaturePath) {
    if let Some(r) = &p.role {
        out.push_str(r);
        out.push(' ');
    }
    out.push_str(&p.feature);
}

fn write_concept(out: &mut String, d: &dyn ConcreteDomain, c: &Concept) {
    match c {
        Concept::Top => out.push_str("top"),
        Concept::Bottom => out.push_str("bot"),
        Concept::Atomic(a) => out.push_str(a),
        Concept::Not(x) => {
            out.push_str("not ");
            write_concept(out, d, x);
        }
        Concept::And(a, b) | Concept::Or(a, b) => {
            out.push('(');
            write_concept(out, d, a);
            out.push_str(if matches!(c, Concept::And(..)) { " and " } else { " or " });
            write_concept(out, d, b);
            out.push(')');
        }
        Concept::Exists(r, x) | Concept::Forall(r, x) => {
            out.push_str(if matches!(c, Concept::Exists(..)) { "some " } else { "all " });
            out.push_str(r);
            out.push('.');
            write_concept(out, d, x);
        }
        Concept::CdExists(paths, p) | Concept::CdForall(paths, p) => {
            out.push_str(if matches!(c, Concept::CdExists(..)) { "some [" } else { "all [" });
            for (i, path) in paths.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_path(out, path);
            }
            out.push_str("] ");
            match p {
                PredRef::Domain(p) => out.push_str(d.descriptor().name(*p)),
                PredRef::Singleton(v) => {
                    let _ = write!(out, "= {v}");
                }
            }
        }
    }
}

pub fn concept_to_string(domain: DomainTag, c: &Concept) -> String {
    let mut out = String::new();
    write_concept(&mut out, domain.domain(), c);
    out
}

/// Prints an ontology in the text format; parsing the output gives back the
/// same ontology.
pub fn print_ontology(o: &Ontology) -> String {
    let d = o.domain.domain();
    let mut out = format!("domain {};\n", o.domain.name());
    for g in &o.tbox {
        write_concept(&mut out, d, &g.lhs);
        out.push_str(" <= ");
        write_concept(&mut out, d, &g.rhs);
        out.push_str(";\n");
    }
    for a in &o.abox {
        match a {
            Assertion::Concept { individual, concept } => {
                let _ = write!(out, "{individual} : ");
                write_concept(&mut out, d, concept);
            }
            Assertion::Role { role, from, to } => {
                let _ = write!(out, "({from}, {to}) : {role}");
            }
            Assertion::Predicate { pred, args } => {
                out.push_str(d.descriptor().name(*pred));
                out.push('(');
                for (i, (a, f)) in args.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    let _ = write!(out, "{a}.{f}");
                }
                out.push(')');
            }
            Assertion::Feature {
                individual,
                feature,
                value,
            } => {
                let _ = write!(out, "{individual}.{feature} = {value}");
            }
        }
        out.push_str(";\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alcd_core::cdomain::rationals::LT;

    #[test]
    fn two_ordered_successors() {
        let o = parse_ontology("domain Q; top <= some [r f, r f] lt;").unwrap();
        assert_eq!(o.tbox.len(), 1);
        let rf = FeaturePath::via(name("r"), name("f"));
        assert_eq!(o.tbox[0].rhs, Concept::CdExists(vec![rf.clone(), rf], PredRef::Domain(LT)));
    }

    #[test]
    fn empty_ontology() {
        let o = parse_ontology("domain Q;").unwrap();
        assert!(o.tbox.is_empty() && o.abox.is_empty());
    }

    #[test]
    fn arity_mismatch_is_reported_with_position() {
        let e = parse_ontology("domain Q;\ntop <= some [f, g, h] lt;").unwrap_err();
        assert_eq!((e.line, e.column), (2, 23));
        assert!(matches!(e.kind, ParseErrorKind::Arity { arity: 2, found: 3, .. }));
    }

    #[test]
    fn role_feature_clash() {
        let e = parse_ontology("domain Q; top <= some r.A; top <= some [r] = 1;").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::RoleFeatureClash("r".into()));
        assert_eq!(e.column, 41);
    }

    #[test]
    fn unknown_predicate_and_domain() {
        let e = parse_ontology("domain Q; top <= some [f, f] before;").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::UnknownPredicate { .. }));
        let e = parse_ontology("domain RCC8;").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::UnknownDomain(_)));
    }

    #[test]
    fn lexical_error() {
        let e = parse_ontology("domain Q;\n  a : A & B;").unwrap_err();
        assert_eq!((e.line, e.column, e.kind), (2, 9, ParseErrorKind::Lexical('&')));
    }

    #[test]
    fn all_statement_forms_round_trip() {
        let src = "domain Q;
            # comment
            (A and not B) <= (some r.top or all s.bot);
            A <= all [f, r g] gt;
            a : some [f] = -3/4;
            b : all [s f] = 0.25;
            (a, b) : r;
            lt(a.f, b.g);
            a.f = 2;";
        let o = parse_ontology(src).unwrap();
        assert_eq!(o.abox.len(), 5);
        let printed = print_ontology(&o);
        assert_eq!(parse_ontology(&printed).unwrap(), o);
        assert!(printed.contains("a : some [f] = -3/4;"));
        assert!(printed.contains("b : all [s f] = 1/4;"));
    }

    #[test]
    fn allen_intervals() {
        let o = parse_ontology("domain Allen; a.t = [0, 3/2]; top <= some [t, r t] meets;").unwrap();
        assert_eq!(parse_ontology(&print_ontology(&o)).unwrap(), o);
        let e = parse_ontology("domain Allen; a.t = [2, 1];").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Domain(DomainError::EmptyInterval(..))));
        let e = parse_ontology("domain Q; a.t = [0, 1];").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Domain(DomainError::WrongValue(..))));
    }
}
