//! Reader and printer for the old-style TPDB `.trs` format.
//!
//! ```text
//! (VAR x)
//! (RULES
//!   f(s(0),s(1),x) -> f(x,x,x)
//!   h -> 0
//! )
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::rule::{Rule, RuleError};
use crate::term::{Symbol, Term, Var, VarNames};
use crate::trs::{Trs, TrsError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("symbol {name} used with arity {found}, first used with arity {expected}")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("invalid rule {rule}: {source}")]
    InvalidRule { rule: String, source: RuleError },
    #[error("{0}")]
    Trs(#[from] TrsError),
}

/// Every error found in one input. Syntax errors stop the reader, so they
/// come alone; rule validity errors are collected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseErrors(pub Vec<ParseError>);

impl fmt::Display for ParseErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseErrors {}

impl From<ParseError> for ParseErrors {
    fn from(e: ParseError) -> Self {
        ParseErrors(vec![e])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Open,
    Close,
    Comma,
    Arrow,
    RelArrow,
    Ident(String),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Open => write!(f, "'('"),
            Tok::Close => write!(f, "')'"),
            Tok::Comma => write!(f, "','"),
            Tok::Arrow => write!(f, "'->'"),
            Tok::RelArrow => write!(f, "'->='"),
            Tok::Ident(s) => write!(f, "'{s}'"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn tokenize(text: &str) -> Vec<Spanned> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut i = 0;
    let arrow_at = |i: usize| chars.get(i) == Some(&'-') && chars.get(i + 1) == Some(&'>');
    while i < chars.len() {
        let ch = chars[i];
        let (start_line, start_col) = (line, column);
        let mut push = |tok, len: usize, i: &mut usize, column: &mut usize| {
            out.push(Spanned {
                tok,
                line: start_line,
                column: start_col,
            });
            *i += len;
            *column += len;
        };
        if ch == '\n' {
            line += 1;
            column = 1;
            i += 1;
        } else if ch.is_whitespace() {
            i += 1;
            column += 1;
        } else if ch == '(' {
            push(Tok::Open, 1, &mut i, &mut column);
        } else if ch == ')' {
            push(Tok::Close, 1, &mut i, &mut column);
        } else if ch == ',' {
            push(Tok::Comma, 1, &mut i, &mut column);
        } else if arrow_at(i) {
            if chars.get(i + 2) == Some(&'=') {
                push(Tok::RelArrow, 3, &mut i, &mut column);
            } else {
                push(Tok::Arrow, 2, &mut i, &mut column);
            }
        } else {
            let start = i;
            while i < chars.len()
                && !chars[i].is_whitespace()
                && !matches!(chars[i], '(' | ')' | ',')
                && !arrow_at(i)
            {
                i += 1;
            }
            let name: String = chars[start..i].iter().collect();
            column += i - start;
            out.push(Spanned {
                tok: Tok::Ident(name),
                line: start_line,
                column: start_col,
            });
        }
    }
    out
}

struct Parser {
    toks: Vec<Spanned>,
    at: usize,
    end: (usize, usize),
    vars: BTreeMap<String, Var>,
    arities: BTreeMap<String, usize>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.at)
            .map(|s| (s.line, s.column))
            .unwrap_or(self.end)
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        let (line, column) = self.here();
        ParseError { line, column, kind }
    }

    fn syntax(&self, msg: impl Into<String>) -> ParseError {
        self.error(ParseErrorKind::Syntax(msg.into()))
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|s| s.tok.clone());
        self.at += 1;
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if *t == want => {
                self.at += 1;
                Ok(())
            }
            Some(t) => Err(self.syntax(format!("expected {want}, found {t}"))),
            None => Err(self.syntax(format!("expected {want}, found end of input"))),
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.at += 1;
                Ok(s)
            }
            Some(t) => Err(self.syntax(format!("expected an identifier, found {t}"))),
            None => Err(self.syntax("expected an identifier, found end of input")),
        }
    }

    /// Skip to the parenthesis closing the current section.
    fn skip_section(&mut self) -> Result<(), ParseError> {
        let mut depth = 1;
        while depth > 0 {
            match self.next() {
                Some(Tok::Open) => depth += 1,
                Some(Tok::Close) => depth -= 1,
                Some(_) => {}
                None => return Err(self.syntax("unclosed section")),
            }
        }
        Ok(())
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let (line, column) = self.here();
        let name = self.ident()?;
        let mut args = Vec::new();
        let applied = self.peek() == Some(&Tok::Open);
        if applied {
            self.at += 1;
            if self.peek() == Some(&Tok::Close) {
                self.at += 1;
            } else {
                loop {
                    args.push(self.term()?);
                    match self.next() {
                        Some(Tok::Comma) => {}
                        Some(Tok::Close) => break,
                        Some(t) => {
                            self.at -= 1;
                            return Err(self.syntax(format!("expected ',' or ')', found {t}")));
                        }
                        None => return Err(self.syntax("unclosed argument list")),
                    }
                }
            }
        }
        if let Some(&v) = self.vars.get(&name) {
            if applied {
                return Err(ParseError {
                    line,
                    column,
                    kind: ParseErrorKind::Syntax(format!("variable {name} applied to arguments")),
                });
            }
            return Ok(Term::Var(v));
        }
        match self.arities.get(&name) {
            Some(&expected) if expected != args.len() => {
                return Err(ParseError {
                    line,
                    column,
                    kind: ParseErrorKind::ArityMismatch {
                        name,
                        expected,
                        found: args.len(),
                    },
                })
            }
            Some(_) => {}
            None => {
                self.arities.insert(name.clone(), args.len());
            }
        }
        Ok(Term::app(Symbol::new(name, args.len()), args))
    }
}

/// Read a rewrite system. Variables are numbered in order of declaration.
pub fn parse_trs(text: &str) -> Result<Trs, ParseErrors> {
    let toks = tokenize(text);
    let end = {
        let lines = text.split('\n').count();
        let last = text.rsplit('\n').next().unwrap_or("");
        (lines, last.chars().count() + 1)
    };
    let mut p = Parser {
        toks,
        at: 0,
        end,
        vars: BTreeMap::new(),
        arities: BTreeMap::new(),
    };
    let mut names = VarNames::new();
    let mut rules = Vec::new();
    let mut invalid = Vec::new();
    while p.peek().is_some() {
        p.expect(Tok::Open)?;
        let (line, column) = p.here();
        let section = p.ident()?;
        match section.as_str() {
            "VAR" => {
                while let Some(Tok::Ident(name)) = p.peek().cloned() {
                    p.at += 1;
                    if p.arities.contains_key(&name) {
                        return Err(p
                            .syntax(format!(
                                "{name} is declared as a variable after use as a symbol"
                            ))
                            .into());
                    }
                    if !p.vars.contains_key(&name) {
                        let v = Var(p.vars.len() as u32);
                        p.vars.insert(name.clone(), v);
                        names.insert(v, name);
                    }
                }
                p.expect(Tok::Close)?;
            }
            "RULES" => loop {
                match p.peek() {
                    Some(Tok::Close) => {
                        p.at += 1;
                        break;
                    }
                    None => return Err(p.syntax("unclosed RULES section").into()),
                    _ => {}
                }
                let (line, column) = p.here();
                let lhs = p.term()?;
                match p.peek() {
                    Some(Tok::Arrow) => p.at += 1,
                    Some(Tok::RelArrow) => {
                        return Err(p
                            .error(ParseErrorKind::Unsupported("relative rules (->=)".into()))
                            .into())
                    }
                    Some(t) => {
                        return Err(p.syntax(format!("expected '->', found {t}")).into());
                    }
                    None => return Err(p.syntax("expected '->', found end of input").into()),
                }
                let rhs = p.term()?;
                let shown = format!("{} -> {}", lhs.display(&names), rhs.display(&names));
                let lvars = lhs.vars();
                let unbound: Vec<String> = rhs
                    .vars()
                    .into_iter()
                    .filter(|v| !lvars.contains(v))
                    .map(|v| Term::Var(v).display(&names).to_string())
                    .collect();
                match Rule::new(lhs, rhs) {
                    Ok(rule) => rules.push(rule),
                    Err(mut source) => invalid.push(ParseError {
                        line,
                        column,
                        kind: ParseErrorKind::InvalidRule {
                            rule: shown,
                            source: {
                                if let RuleError::UnboundRhsVars { vars } = &mut source {
                                    *vars = unbound.join(", ");
                                }
                                source
                            },
                        },
                    }),
                }
            },
            "COMMENT" => p.skip_section()?,
            "STRATEGY" => {
                let (sl, sc) = p.here();
                let strategy = p.ident()?;
                if strategy != "FULL" {
                    return Err(ParseError {
                        line: sl,
                        column: sc,
                        kind: ParseErrorKind::Unsupported(format!("strategy {strategy}")),
                    }
                    .into());
                }
                p.expect(Tok::Close)?;
            }
            other => {
                return Err(ParseError {
                    line,
                    column,
                    kind: ParseErrorKind::Unsupported(format!("section {other}")),
                }
                .into())
            }
        }
    }
    if !invalid.is_empty() {
        return Err(ParseErrors(invalid));
    }
    let trs = Trs::new(rules).map_err(|e| ParseError {
        line: 1,
        column: 1,
        kind: e.into(),
    })?;
    Ok(trs.with_var_names(names))
}

/// Print a system in the dialect [`parse_trs`] reads.
pub fn print_trs(trs: &Trs) -> String {
    let mut vars = BTreeSet::new();
    for r in trs.rules() {
        r.lhs().collect_vars(&mut vars);
    }
    let mut names = VarNames::new();
    for v in &vars {
        let name = trs
            .var_names()
            .get(v)
            .cloned()
            .unwrap_or_else(|| v.to_string());
        names.insert(*v, name);
    }
    let mut out = String::new();
    if !names.is_empty() {
        let list: Vec<&str> = names.values().map(String::as_str).collect();
        out.push_str(&format!("(VAR {})\n", list.join(" ")));
    }
    out.push_str("(RULES\n");
    for r in trs.rules() {
        out.push_str(&format!("  {}\n", r.display(&names)));
    }
    out.push_str(")\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trs::tests::toyama;

    #[test]
    fn reads_toyama() {
        let trs = parse_trs("(VAR x) (RULES f(s(0),s(1),x) -> f(x,x,x) h -> 0 h -> 1)").unwrap();
        assert_eq!(trs.rules(), toyama().rules());
        assert_eq!(trs.var_names().get(&Var(0)).map(String::as_str), Some("x"));
    }

    #[test]
    fn validity_errors() {
        let err = parse_trs("(VAR x y) (RULES f(x) -> f(y))").unwrap_err();
        assert!(matches!(
            err.0[0].kind,
            ParseErrorKind::InvalidRule {
                source: RuleError::UnboundRhsVars { .. },
                ..
            }
        ));
        let err = parse_trs("(VAR x) (RULES x -> x)").unwrap_err();
        assert!(matches!(
            err.0[0].kind,
            ParseErrorKind::InvalidRule {
                source: RuleError::VariableLhs(_),
                ..
            }
        ));
        assert_eq!(err.0[0].line, 1);
        assert_eq!(err.0[0].column, 16);
    }

    #[test]
    fn all_invalid_rules_are_reported() {
        let err = parse_trs("(VAR x y)\n(RULES\n f(x) -> g(y)\n g(x) -> y\n)").unwrap_err();
        assert_eq!(err.0.len(), 2);
        assert_eq!((err.0[1].line, err.0[1].column), (4, 2));
    }

    #[test]
    fn rejects_unsupported_sections() {
        for text in [
            "(THEORY (AC plus)) (RULES a -> b)",
            "(STRATEGY INNERMOST) (RULES a -> b)",
            "(RULES a ->= b)",
        ] {
            let err = parse_trs(text).unwrap_err();
            assert!(
                matches!(err.0[0].kind, ParseErrorKind::Unsupported(_)),
                "{text}: {err}"
            );
        }
        assert!(parse_trs("(STRATEGY FULL) (RULES a -> b)").is_ok());
    }

    #[test]
    fn arity_mismatch() {
        let err = parse_trs("(RULES f(a) -> f(a,a))").unwrap_err();
        assert!(matches!(
            err.0[0].kind,
            ParseErrorKind::ArityMismatch {
                expected: 1,
                found: 2,
                ..
            }
        ));
    }

    #[test]
    fn comments_may_nest_parentheses() {
        let trs = parse_trs("(COMMENT see (Toyama, 1987))\n(RULES a -> b)").unwrap();
        assert_eq!(trs.rules().len(), 1);
    }

    #[test]
    fn arrow_splits_identifiers() {
        let trs = parse_trs("(RULES a->b)").unwrap();
        assert_eq!(trs.rules()[0].to_string(), "a -> b");
    }

    #[test]
    fn syntax_error_position() {
        let err = parse_trs("(RULES\n  f(a b) -> a)").unwrap_err();
        assert_eq!((err.0[0].line, err.0[0].column), (2, 7));
        let err = parse_trs("(RULES f(a) -> ").unwrap_err();
        assert!(matches!(err.0[0].kind, ParseErrorKind::Syntax(_)));
    }

    #[test]
    fn empty_parentheses_make_a_constant() {
        let trs = parse_trs("(RULES c() -> d)").unwrap();
        assert_eq!(trs.rules()[0].to_string(), "c -> d");
    }

    #[test]
    fn print_then_parse() {
        let trs = toyama();
        let text = print_trs(&trs);
        assert_eq!(
            text,
            "(VAR v0)\n(RULES\n  f(s(0),s(1),v0) -> f(v0,v0,v0)\n  h -> 0\n  h -> 1\n)\n"
        );
        assert_eq!(parse_trs(&text).unwrap().rules(), trs.rules());
    }
}
