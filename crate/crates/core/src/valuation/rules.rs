//! Pattern rules: the small rule language for valuations whose atom table
//! is infinite, e.g. `p(f^n(@a), f^m(@a)) = t if m = n+1`.

use std::collections::BTreeMap;
use std::fmt;

use crate::syntax::{Formula, Signature, Term};

/// `var + offset`, or a constant when `var` is absent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexExpr {
    pub var: Option<String>,
    pub offset: i64,
}

impl IndexExpr {
    pub fn var(name: &str) -> Self {
        IndexExpr { var: Some(name.to_string()), offset: 0 }
    }

    pub fn constant(c: i64) -> Self {
        IndexExpr { var: None, offset: c }
    }

    fn value(&self, env: &BTreeMap<String, i64>) -> Option<i64> {
        match &self.var {
            None => Some(self.offset),
            Some(v) => env.get(v).map(|n| n + self.offset),
        }
    }
}

impl fmt::Display for IndexExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.var, self.offset) {
            (None, c) => write!(f, "{c}"),
            (Some(v), 0) => write!(f, "{v}"),
            (Some(v), c) if c > 0 => write!(f, "{v}+{c}"),
            (Some(v), c) => write!(f, "{v}-{}", -c),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PatTerm {
    Param(String),
    /// `?x`: matches any pure term; repeated occurrences must agree.
    Meta(String),
    App(String, Vec<PatTerm>),
    /// `h^E(base)` for a unary function `h`.
    Tower { func: String, exp: IndexExpr, base: Box<PatTerm> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PatAtom {
    Rel(String, Vec<PatTerm>),
    Eq(PatTerm, PatTerm),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Guard {
    pub lhs: IndexExpr,
    pub op: CmpOp,
    pub rhs: IndexExpr,
}

impl Guard {
    fn holds(&self, env: &BTreeMap<String, i64>) -> bool {
        let (Some(l), Some(r)) = (self.lhs.value(env), self.rhs.value(env)) else {
            return false;
        };
        match self.op {
            CmpOp::Eq => l == r,
            CmpOp::Ne => l != r,
            CmpOp::Lt => l < r,
            CmpOp::Le => l <= r,
            CmpOp::Gt => l > r,
            CmpOp::Ge => l >= r,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternRule {
    pub pattern: PatAtom,
    pub guards: Vec<Guard>,
    pub value: bool,
}

#[derive(Clone, Default)]
struct Env {
    index: BTreeMap<String, i64>,
    meta: BTreeMap<String, Term>,
}

impl PatTerm {
    fn collect_index_vars(&self, out: &mut Vec<String>) {
        match self {
            PatTerm::Param(_) | PatTerm::Meta(_) => {}
            PatTerm::App(_, args) => args.iter().for_each(|a| a.collect_index_vars(out)),
            PatTerm::Tower { exp, base, .. } => {
                if let Some(v) = &exp.var {
                    out.push(v.clone());
                }
                base.collect_index_vars(out);
            }
        }
    }

    fn validate(&self, sig: &Signature) -> Result<(), String> {
        match self {
            PatTerm::Param(a) if !sig.has_param(a) => Err(format!("undeclared parameter `@{a}`")),
            PatTerm::Param(_) | PatTerm::Meta(_) => Ok(()),
            PatTerm::App(f, args) => match sig.function_arity(f) {
                Some(n) if n == args.len() => args.iter().try_for_each(|a| a.validate(sig)),
                Some(n) => Err(format!("`{f}` expects {n} arguments")),
                None => Err(format!("undeclared function `{f}`")),
            },
            PatTerm::Tower { func, base, .. } => match sig.function_arity(func) {
                Some(1) => base.validate(sig),
                _ => Err(format!("towers need a unary function, `{func}` is not one")),
            },
        }
    }

    /// Extend `env` in every way that makes the pattern equal to `t`.
    fn matches(&self, t: &Term, env: Env, out: &mut Vec<Env>) {
        match self {
            PatTerm::Param(a) => {
                if matches!(t, Term::Param(b) if a == b) {
                    out.push(env);
                }
            }
            PatTerm::Meta(x) => match env.meta.get(x) {
                Some(bound) if bound != t => {}
                Some(_) => out.push(env),
                None => {
                    let mut env = env;
                    env.meta.insert(x.clone(), t.clone());
                    out.push(env);
                }
            },
            PatTerm::App(f, pats) => {
                if let Term::App(g, args) = t {
                    if f == g && pats.len() == args.len() {
                        let mut envs = vec![env];
                        for (p, a) in pats.iter().zip(args) {
                            let mut next = Vec::new();
                            for e in envs {
                                p.matches(a, e, &mut next);
                            }
                            envs = next;
                        }
                        out.extend(envs);
                    }
                }
            }
            PatTerm::Tower { func, exp, base } => {
                let mut peeled = 0i64;
                let mut cur = t;
                loop {
                    if let Some(env) = bind_exponent(exp, peeled, &env) {
                        base.matches(cur, env, out);
                    }
                    match cur {
                        Term::App(g, args) if g == func && args.len() == 1 => {
                            cur = &args[0];
                            peeled += 1;
                        }
                        _ => break,
                    }
                }
            }
        }
    }
}

fn bind_exponent(exp: &IndexExpr, k: i64, env: &Env) -> Option<Env> {
    match &exp.var {
        None => (exp.offset == k).then(|| env.clone()),
        Some(v) => {
            let n = k - exp.offset;
            if n < 0 {
                return None;
            }
            match env.index.get(v) {
                Some(&m) if m != n => None,
                Some(_) => Some(env.clone()),
                None => {
                    let mut e = env.clone();
                    e.index.insert(v.clone(), n);
                    Some(e)
                }
            }
        }
    }
}

impl PatternRule {
    pub fn validate(&self, sig: &Signature) -> Result<(), String> {
        let mut vars = Vec::new();
        match &self.pattern {
            PatAtom::Rel(p, args) => {
                match sig.relation_arity(p) {
                    Some(n) if n == args.len() => {}
                    Some(n) => return Err(format!("`{p}` expects {n} arguments")),
                    None => return Err(format!("undeclared relation `{p}`")),
                }
                for a in args {
                    a.validate(sig)?;
                    a.collect_index_vars(&mut vars);
                }
            }
            PatAtom::Eq(l, r) => {
                l.validate(sig)?;
                r.validate(sig)?;
                l.collect_index_vars(&mut vars);
                r.collect_index_vars(&mut vars);
            }
        }
        for g in &self.guards {
            for side in [&g.lhs, &g.rhs] {
                if let Some(v) = &side.var {
                    if !vars.contains(v) {
                        return Err(format!("guard variable `{v}` does not occur in the pattern"));
                    }
                }
            }
        }
        Ok(())
    }

    /// The rule's value if it fires on `atom`.
    pub fn apply(&self, atom: &Formula) -> Option<bool> {
        let mut envs = Vec::new();
        match (&self.pattern, atom) {
            (PatAtom::Rel(p, pats), Formula::Atom(q, args)) if p == q && pats.len() == args.len() => {
                let mut cur = vec![Env::default()];
                for (pt, a) in pats.iter().zip(args) {
                    let mut next = Vec::new();
                    for e in cur {
                        pt.matches(a, e, &mut next);
                    }
                    cur = next;
                }
                envs = cur;
            }
            (PatAtom::Eq(pl, pr), Formula::Equal(l, r)) => {
                let mut left = Vec::new();
                pl.matches(l, Env::default(), &mut left);
                for e in left {
                    pr.matches(r, e, &mut envs);
                }
            }
            _ => {}
        }
        envs.iter().any(|e| self.guards.iter().all(|g| g.holds(&e.index))).then_some(self.value)
    }
}

impl fmt::Display for PatTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatTerm::Param(a) => write!(f, "@{a}"),
            PatTerm::Meta(x) => write!(f, "?{x}"),
            PatTerm::App(g, args) if args.is_empty() => write!(f, "{g}"),
            PatTerm::App(g, args) => {
                write!(f, "{g}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
            PatTerm::Tower { func, exp, base } => {
                if exp.var.is_some() && exp.offset == 0 || exp.var.is_none() {
                    write!(f, "{func}^{exp}({base})")
                } else {
                    write!(f, "{func}^{{{exp}}}({base})")
                }
            }
        }
    }
}

impl fmt::Display for PatternRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = if self.value { "t" } else { "f" };
        match &self.pattern {
            PatAtom::Rel(p, args) => {
                write!(f, "rule {p}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ") = {v}")?;
            }
            PatAtom::Eq(l, r) => write!(f, "rule {l} = {r} : {v}")?,
        }
        for (i, g) in self.guards.iter().enumerate() {
            write!(f, "{} {} {} {}", if i == 0 { " if" } else { "," }, g.lhs, g.op.symbol(), g.rhs)?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Parsing

pub(crate) fn parse_rule(text: &str) -> Result<PatternRule, String> {
    let (body, guards) = match text.split_once(" if ") {
        Some((b, g)) => (b.trim(), parse_guards(g)?),
        None => (text.trim(), Vec::new()),
    };
    let (pattern, value) = if let Some((lhs, v)) = body.rsplit_once(':') {
        let (l, r) = lhs.split_once('=').ok_or("equality rule needs `lhs = rhs : value`")?;
        (PatAtom::Eq(parse_pat_term(l)?, parse_pat_term(r)?), parse_value(v)?)
    } else {
        let (lhs, v) = body.rsplit_once('=').ok_or("rule needs `= t` or `= f`")?;
        match parse_pat_term(lhs)? {
            PatTerm::App(p, args) if !args.is_empty() => (PatAtom::Rel(p, args), parse_value(v)?),
            _ => return Err("rule pattern must be a relation atom".into()),
        }
    };
    Ok(PatternRule { pattern, guards, value })
}

pub(crate) fn parse_value(s: &str) -> Result<bool, String> {
    match s.trim() {
        "t" => Ok(true),
        "f" => Ok(false),
        other => Err(format!("expected `t` or `f`, found `{other}`")),
    }
}

fn parse_guards(text: &str) -> Result<Vec<Guard>, String> {
    text.split([',', '&'])
        .flat_map(|s| s.split(" and "))
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|g| {
            for (sym, op) in [
                ("!=", CmpOp::Ne),
                (">=", CmpOp::Ge),
                ("<=", CmpOp::Le),
                ("=", CmpOp::Eq),
                ("<", CmpOp::Lt),
                (">", CmpOp::Gt),
            ] {
                if let Some((l, r)) = g.split_once(sym) {
                    return Ok(Guard { lhs: parse_index(l)?, op, rhs: parse_index(r)? });
                }
            }
            Err(format!("cannot read guard `{g}`"))
        })
        .collect()
}

fn parse_index(s: &str) -> Result<IndexExpr, String> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let s = s.trim_start_matches(['{', '(']).trim_end_matches(['}', ')']);
    let mut expr = IndexExpr { var: None, offset: 0 };
    let mut sign = 1i64;
    let mut rest = s;
    while !rest.is_empty() {
        let end = rest.find(['+', '-']).unwrap_or(rest.len());
        let piece = &rest[..end];
        if piece.is_empty() {
            return Err(format!("malformed index expression `{s}`"));
        }
        if let Ok(n) = piece.parse::<i64>() {
            expr.offset += sign * n;
        } else if crate::syntax::is_ident(piece) && sign == 1 && expr.var.is_none() {
            expr.var = Some(piece.to_string());
        } else {
            return Err(format!("index expressions are `n`, `n+c` or constants, got `{s}`"));
        }
        if end == rest.len() {
            break;
        }
        sign = if rest.as_bytes()[end] == b'+' { 1 } else { -1 };
        rest = &rest[end + 1..];
    }
    Ok(expr)
}

fn parse_pat_term(s: &str) -> Result<PatTerm, String> {
    let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
    let mut pos = 0;
    let t = pat_term(&chars, &mut pos)?;
    if pos != chars.len() {
        return Err(format!("trailing input in pattern `{}`", s.trim()));
    }
    Ok(t)
}

fn ident(chars: &[char], pos: &mut usize) -> Result<String, String> {
    let start = *pos;
    while *pos < chars.len() && (chars[*pos].is_ascii_alphanumeric() || chars[*pos] == '_' || chars[*pos] == '\'') {
        *pos += 1;
    }
    if start == *pos {
        return Err("expected identifier in pattern".into());
    }
    Ok(chars[start..*pos].iter().collect())
}

fn pat_term(chars: &[char], pos: &mut usize) -> Result<PatTerm, String> {
    match chars.get(*pos) {
        Some('@') => {
            *pos += 1;
            Ok(PatTerm::Param(ident(chars, pos)?))
        }
        Some('?') => {
            *pos += 1;
            Ok(PatTerm::Meta(ident(chars, pos)?))
        }
        Some(_) => {
            let name = ident(chars, pos)?;
            let exp = if chars.get(*pos) == Some(&'^') {
                *pos += 1;
                let start = *pos;
                match chars.get(*pos) {
                    Some('{') => {
                        while *pos < chars.len() && chars[*pos] != '}' {
                            *pos += 1;
                        }
                        *pos += 1;
                    }
                    _ => {
                        while *pos < chars.len() && (chars[*pos].is_ascii_alphanumeric() || chars[*pos] == '_') {
                            *pos += 1;
                        }
                    }
                }
                let text: String = chars[start..(*pos).min(chars.len())].iter().collect();
                Some(parse_index(&text)?)
            } else {
                None
            };
            let mut args = Vec::new();
            if chars.get(*pos) == Some(&'(') {
                *pos += 1;
                loop {
                    args.push(pat_term(chars, pos)?);
                    match chars.get(*pos) {
                        Some(',') => *pos += 1,
                        Some(')') => {
                            *pos += 1;
                            break;
                        }
                        _ => return Err("expected `,` or `)` in pattern".into()),
                    }
                }
            }
            match exp {
                Some(exp) => {
                    if args.len() != 1 {
                        return Err(format!("tower `{name}^..` takes exactly one argument"));
                    }
                    Ok(PatTerm::Tower { func: name, exp, base: Box::new(args.remove(0)) })
                }
                None => Ok(PatTerm::App(name, args)),
            }
        }
        None => Err("unexpected end of pattern".into()),
    }
}
