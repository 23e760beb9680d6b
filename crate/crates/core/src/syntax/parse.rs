use thiserror::Error;

use super::{definedness, Formula, Signature, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("column {column}: {msg}")]
pub struct ParseError {
    /// 1-based character column of the offending token.
    pub column: usize,
    pub msg: String,
}

/// Knobs for the otherwise strict parser.
#[derive(Clone, Copy, Debug, Default)]
pub struct ParseOptions {
    /// Accept unbound identifiers as free variables instead of failing.
    pub free_vars: bool,
    /// Accept parameters outside the signature's parameter list.
    pub any_param: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Param(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Eq,
    Not,
    And,
    Or,
    Arrow,
    Bang,
    Eof,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Param(s) => format!("`@{s}`"),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Dot => "`.`".into(),
        Tok::Eq => "`=`".into(),
        Tok::Not => "`~`".into(),
        Tok::And => "`&`".into(),
        Tok::Or => "`|`".into(),
        Tok::Arrow => "`->`".into(),
        Tok::Bang => "`!`".into(),
        Tok::Eof => "end of input".into(),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let ident_at = |mut j: usize| {
        let start = j;
        while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_' || chars[j] == '\'') {
            j += 1;
        }
        (chars[start..j].iter().collect::<String>(), j)
    };
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            '.' => Some(Tok::Dot),
            '=' => Some(Tok::Eq),
            '~' => Some(Tok::Not),
            '&' => Some(Tok::And),
            '|' => Some(Tok::Or),
            '!' => Some(Tok::Bang),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, col));
            i += 1;
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            out.push((Tok::Arrow, col));
            i += 2;
        } else if c == '@' {
            if !chars.get(i + 1).is_some_and(|d| d.is_ascii_alphabetic() || *d == '_') {
                return Err(ParseError { column: col, msg: "expected parameter name after `@`".into() });
            }
            let (name, j) = ident_at(i + 1);
            out.push((Tok::Param(name), col));
            i = j;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let (name, j) = ident_at(i);
            out.push((Tok::Ident(name), col));
            i = j;
        } else {
            return Err(ParseError { column: col, msg: format!("unexpected character `{c}`") });
        }
    }
    out.push((Tok::Eof, chars.len() + 1));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    sig: &'a Signature,
    opts: ParseOptions,
    bound: Vec<String>,
}

type PResult<T> = Result<T, ParseError>;

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].0
    }

    fn column(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, msg: impl Into<String>) -> PResult<T> {
        Err(ParseError { column: self.column(), msg: msg.into() })
    }

    fn expect(&mut self, t: Tok) -> PResult<()> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.fail(format!("expected {}, found {}", describe(&t), describe(self.peek())))
        }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn finish(&mut self) -> PResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.fail(format!("unexpected {}", describe(self.peek())))
        }
    }

    fn implication(&mut self) -> PResult<Formula> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.implication()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> PResult<Formula> {
        let mut acc = self.conjunction()?;
        while self.eat(&Tok::Or) {
            acc = Formula::or(acc, self.conjunction()?);
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> PResult<Formula> {
        let mut acc = self.unary()?;
        while self.eat(&Tok::And) {
            acc = Formula::and(acc, self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> PResult<Formula> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Ident(kw) if kw == "forall" || kw == "exists" => {
                self.bump();
                let x = match self.bump() {
                    Tok::Ident(x) if !is_keyword(&x) => x,
                    other => {
                        self.pos -= 1;
                        return self.fail(format!("expected bound variable, found {}", describe(&other)));
                    }
                };
                self.expect(Tok::Dot)?;
                self.bound.push(x.clone());
                let body = self.implication();
                self.bound.pop();
                let body = body?;
                Ok(if kw == "forall" { Formula::forall(&x, body) } else { Formula::exists(&x, body) })
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> PResult<Formula> {
        match self.peek().clone() {
            Tok::Ident(kw) if kw == "false" => {
                self.bump();
                Ok(Formula::Falsum)
            }
            Tok::LParen => {
                self.bump();
                let f = self.implication()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(name) if self.sig.relation_arity(&name).is_some() && *self.peek2() == Tok::LParen => {
                let column = self.column();
                self.bump();
                let args = self.arguments()?;
                let arity = self.sig.relation_arity(&name).unwrap_or(0);
                if args.len() != arity {
                    return Err(ParseError {
                        column,
                        msg: format!("relation `{name}` expects {arity} arguments, got {}", args.len()),
                    });
                }
                Ok(Formula::Atom(name, args))
            }
            _ => {
                let lhs = self.term()?;
                if self.eat(&Tok::Bang) {
                    return Ok(definedness(&lhs));
                }
                if self.eat(&Tok::Eq) {
                    let rhs = self.term()?;
                    return Ok(Formula::Equal(lhs, rhs));
                }
                self.fail(format!("expected `=` or `!` after term, found {}", describe(self.peek())))
            }
        }
    }

    fn arguments(&mut self) -> PResult<Vec<Term>> {
        self.expect(Tok::LParen)?;
        let mut args = vec![self.term()?];
        while self.eat(&Tok::Comma) {
            args.push(self.term()?);
        }
        self.expect(Tok::RParen)?;
        Ok(args)
    }

    fn term(&mut self) -> PResult<Term> {
        let column = self.column();
        match self.bump() {
            Tok::Param(a) => {
                if !self.opts.any_param && !self.sig.has_param(&a) {
                    return Err(ParseError { column, msg: format!("undeclared parameter `@{a}`") });
                }
                Ok(Term::Param(a))
            }
            Tok::Ident(name) if !is_keyword(&name) => {
                if *self.peek() == Tok::LParen {
                    let args = self.arguments()?;
                    match self.sig.function_arity(&name) {
                        None => Err(ParseError { column, msg: format!("undeclared function `{name}`") }),
                        Some(n) if n != args.len() => Err(ParseError {
                            column,
                            msg: format!("function `{name}` expects {n} arguments, got {}", args.len()),
                        }),
                        Some(_) => Ok(Term::App(name, args)),
                    }
                } else if self.bound.contains(&name) {
                    Ok(Term::Var(name))
                } else if self.sig.function_arity(&name) == Some(0) {
                    Ok(Term::App(name, Vec::new()))
                } else if self.sig.function_arity(&name).is_some() {
                    Err(ParseError { column, msg: format!("function `{name}` needs arguments") })
                } else if self.opts.free_vars && self.sig.relation_arity(&name).is_none() {
                    Ok(Term::Var(name))
                } else {
                    Err(ParseError { column, msg: format!("undeclared symbol `{name}`") })
                }
            }
            other => {
                self.pos -= usize::from(other != Tok::Eof);
                self.fail(format!("expected term, found {}", describe(&other)))
            }
        }
    }
}

fn is_keyword(s: &str) -> bool {
    matches!(s, "forall" | "exists" | "false")
}

pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula, ParseError> {
    parse_formula_with(text, sig, ParseOptions::default())
}

pub fn parse_formula_with(text: &str, sig: &Signature, opts: ParseOptions) -> Result<Formula, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0, sig, opts, bound: Vec::new() };
    let f = p.implication()?;
    p.finish()?;
    Ok(f)
}

pub fn parse_term(text: &str, sig: &Signature) -> Result<Term, ParseError> {
    parse_term_with(text, sig, ParseOptions::default())
}

pub fn parse_term_with(text: &str, sig: &Signature, opts: ParseOptions) -> Result<Term, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0, sig, opts, bound: Vec::new() };
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::build(&[("f", 1), ("c", 0)], &[("p", 2), ("q", 1)], &["a", "b"]).unwrap()
    }

    #[test]
    fn quantifier_prefix() {
        let f = parse_formula("forall x. exists y. p(x,y)", &sig()).unwrap();
        let expected = Formula::forall(
            "x",
            Formula::exists("y", Formula::atom("p", vec![Term::var("x"), Term::var("y")])),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn parameters_and_functions() {
        let f = parse_formula("p(@a, f(@a))", &sig()).unwrap();
        let a = Term::param("a");
        assert_eq!(f, Formula::atom("p", vec![a.clone(), Term::app("f", vec![a])]));
    }

    #[test]
    fn bang_is_definedness() {
        let f = parse_formula("f(@a)!", &sig()).unwrap();
        let fa = Term::app("f", vec![Term::param("a")]);
        assert_eq!(f, Formula::exists("y", Formula::eq(Term::var("y"), fa)));
    }

    #[test]
    fn precedence_and_associativity() {
        let s = sig();
        let f = parse_formula("~q(@a) & q(@b) | q(c) -> q(@a) -> false", &s).unwrap();
        let qa = Formula::atom("q", vec![Term::param("a")]);
        let qb = Formula::atom("q", vec![Term::param("b")]);
        let qc = Formula::atom("q", vec![Term::constant("c")]);
        let expected = Formula::implies(
            Formula::or(Formula::and(Formula::not(qa.clone()), qb), qc),
            Formula::implies(qa, Formula::Falsum),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn quantifier_scope_is_maximal() {
        let f = parse_formula("q(@a) & forall x. q(x) & q(@b)", &sig()).unwrap();
        assert!(matches!(f, Formula::And(_, ref r) if matches!(**r, Formula::Forall(..))));
    }

    #[test]
    fn errors_carry_positions() {
        let s = sig();
        let e = parse_formula("p(@a)", &s).unwrap_err();
        assert!(e.msg.contains("expects 2"), "{e}");
        assert_eq!(e.column, 1);
        let e = parse_formula("q(x)", &s).unwrap_err();
        assert_eq!(e.column, 3);
        assert!(e.msg.contains("undeclared symbol"));
        let e = parse_formula("q(@a) &", &s).unwrap_err();
        assert_eq!(e.column, 8);
        assert!(parse_formula("q(@z)", &s).is_err());
        assert!(parse_formula("g(@a) = @a", &s).is_err());
    }

    #[test]
    fn free_variables_on_request() {
        let opts = ParseOptions { free_vars: true, any_param: true };
        let f = parse_formula_with("q(x) -> q(@v0)", &sig(), opts).unwrap();
        assert_eq!(f.free_vars(), vec!["x".to_string()]);
    }

    #[test]
    fn undef_only_when_flagged() {
        let s = sig();
        assert!(parse_term("undef", &s).is_err());
        assert_eq!(parse_term("f(undef)", &s.with_undef()).unwrap(), Term::app("f", vec![Term::undef()]));
    }
}
