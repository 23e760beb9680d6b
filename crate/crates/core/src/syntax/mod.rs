//! Abstract syntax of the two-sorted partial-term language.
//!
//! Variables are only ever bound by quantifiers (or left free in general
//! formulae); parameters are free names written with a leading `@`.
//! A term or formula is *pure* when no variable occurs in it free.

pub(crate) mod enumerate;
mod parse;
mod print;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

pub use enumerate::{enumerate_pure_terms, pure_terms_prefix, universe_is_finite};
pub use parse::{parse_formula, parse_formula_with, parse_term, parse_term_with, ParseError, ParseOptions};

/// Name of the reserved 0-ary function standing for the undefined term.
pub const UNDEF: &str = "undef";

const RESERVED: &[&str] = &["=", "false", "forall", "exists", UNDEF];

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Param(String),
    /// Function application; constants are 0-ary applications.
    App(String, Vec<Term>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(String, Vec<Term>),
    Equal(Term, Term),
    Falsum,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

/// Simultaneous binding of variables to terms.
pub type Binding = BTreeMap<String, Term>;

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn param(name: &str) -> Term {
        Term::Param(name.to_string())
    }

    pub fn app(name: &str, args: Vec<Term>) -> Term {
        Term::App(name.to_string(), args)
    }

    pub fn constant(name: &str) -> Term {
        Term::App(name.to_string(), Vec::new())
    }

    pub fn undef() -> Term {
        Term::constant(UNDEF)
    }

    /// True iff no variable occurs in the term.
    pub fn is_pure(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Param(_) => true,
            Term::App(_, args) => args.iter().all(Term::is_pure),
        }
    }

    /// Nesting depth: parameters, variables and constants have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Term::App(_, args) if !args.is_empty() => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
            _ => 0,
        }
    }

    /// Variables in order of first occurrence.
    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Term::Var(x) => {
                if !out.contains(x) {
                    out.push(x.clone());
                }
            }
            Term::Param(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn has_var(&self, x: &str) -> bool {
        match self {
            Term::Var(y) => y == x,
            Term::Param(_) => false,
            Term::App(_, args) => args.iter().any(|a| a.has_var(x)),
        }
    }

    /// Parameters in order of first occurrence.
    pub fn params(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_params(&mut out);
        out
    }

    fn collect_params(&self, out: &mut Vec<String>) {
        match self {
            Term::Param(a) => {
                if !out.contains(a) {
                    out.push(a.clone());
                }
            }
            Term::Var(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.collect_params(out)),
        }
    }

    pub fn has_symbol(&self, name: &str) -> bool {
        match self {
            Term::App(f, args) => f == name || args.iter().any(|a| a.has_symbol(name)),
            _ => false,
        }
    }

    pub fn has_undef(&self) -> bool {
        self.has_symbol(UNDEF)
    }

    pub fn substitute(&self, binding: &Binding) -> Term {
        match self {
            Term::Var(x) => binding.get(x).cloned().unwrap_or_else(|| self.clone()),
            Term::Param(_) => self.clone(),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.substitute(binding)).collect()),
        }
    }

    /// Replace every occurrence of the term `from` by `to`.
    pub fn replace(&self, from: &Term, to: &Term) -> Term {
        if self == from {
            return to.clone();
        }
        match self {
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.replace(from, to)).collect()),
            _ => self.clone(),
        }
    }

    /// All subterms, outermost first, without duplicates.
    pub fn subterms(&self) -> Vec<Term> {
        let mut out = Vec::new();
        self.collect_subterms(&mut out);
        out
    }

    fn collect_subterms(&self, out: &mut Vec<Term>) {
        if !out.contains(self) {
            out.push(self.clone());
        }
        if let Term::App(_, args) = self {
            args.iter().for_each(|a| a.collect_subterms(out));
        }
    }
}

impl Formula {
    pub fn atom(rel: &str, args: Vec<Term>) -> Formula {
        Formula::Atom(rel.to_string(), args)
    }

    pub fn eq(lhs: Term, rhs: Term) -> Formula {
        Formula::Equal(lhs, rhs)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn forall(x: &str, body: Formula) -> Formula {
        Formula::Forall(x.to_string(), Box::new(body))
    }

    pub fn exists(x: &str, body: Formula) -> Formula {
        Formula::Exists(x.to_string(), Box::new(body))
    }

    /// Left-nested conjunction; `None` for an empty list.
    pub fn conj(parts: Vec<Formula>) -> Option<Formula> {
        parts.into_iter().reduce(Formula::and)
    }

    /// Biconditional, expanded into two implications.
    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::and(Formula::implies(a.clone(), b.clone()), Formula::implies(b, a))
    }

    /// Universal closure over `vars`, outermost first.
    pub fn forall_all(vars: &[String], body: Formula) -> Formula {
        vars.iter().rev().fold(body, |acc, x| Formula::forall(x, acc))
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Formula::Atom(..) | Formula::Equal(..) | Formula::Falsum)
    }

    /// True iff no variable occurs free.
    pub fn is_pure(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Free variables in order of first occurrence.
    pub fn free_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut Vec<String>) {
        let push_term = |t: &Term, bound: &Vec<String>, out: &mut Vec<String>| {
            for x in t.vars() {
                if !bound.contains(&x) && !out.contains(&x) {
                    out.push(x);
                }
            }
        };
        match self {
            Formula::Atom(_, args) => args.iter().for_each(|t| push_term(t, bound, out)),
            Formula::Equal(l, r) => {
                push_term(l, bound, out);
                push_term(r, bound, out);
            }
            Formula::Falsum => {}
            Formula::Not(a) => a.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Forall(x, body) | Formula::Exists(x, body) => {
                bound.push(x.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn has_free_var(&self, x: &str) -> bool {
        match self {
            Formula::Atom(_, args) => args.iter().any(|t| t.has_var(x)),
            Formula::Equal(l, r) => l.has_var(x) || r.has_var(x),
            Formula::Falsum => false,
            Formula::Not(a) => a.has_free_var(x),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => a.has_free_var(x) || b.has_free_var(x),
            Formula::Forall(y, body) | Formula::Exists(y, body) => y != x && body.has_free_var(x),
        }
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_terms(&mut |t| out.extend(t.vars()));
        self.visit_binders(&mut |x| {
            out.insert(x.to_string());
        });
        out
    }

    /// Parameters in order of first occurrence.
    pub fn params(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.visit_terms(&mut |t| {
            for a in t.params() {
                if !out.contains(&a) {
                    out.push(a);
                }
            }
        });
        out
    }

    pub fn has_symbol(&self, name: &str) -> bool {
        let mut found = false;
        self.visit_terms(&mut |t| found |= t.has_symbol(name));
        if let Formula::Atom(p, _) = self {
            found |= p == name;
        }
        found || self.subformulas_mention_relation(name)
    }

    fn subformulas_mention_relation(&self, name: &str) -> bool {
        match self {
            Formula::Atom(p, _) => p == name,
            Formula::Equal(..) | Formula::Falsum => false,
            Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => a.subformulas_mention_relation(name),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.subformulas_mention_relation(name) || b.subformulas_mention_relation(name)
            }
        }
    }

    /// Calls `f` on each top-level term of each atom, left to right.
    pub fn visit_terms(&self, f: &mut impl FnMut(&Term)) {
        match self {
            Formula::Atom(_, args) => args.iter().for_each(f),
            Formula::Equal(l, r) => {
                f(l);
                f(r);
            }
            Formula::Falsum => {}
            Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => a.visit_terms(f),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.visit_terms(f);
                b.visit_terms(f);
            }
        }
    }

    fn visit_binders(&self, f: &mut impl FnMut(&str)) {
        match self {
            Formula::Atom(..) | Formula::Equal(..) | Formula::Falsum => {}
            Formula::Not(a) => a.visit_binders(f),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.visit_binders(f);
                b.visit_binders(f);
            }
            Formula::Forall(x, a) | Formula::Exists(x, a) => {
                f(x);
                a.visit_binders(f);
            }
        }
    }

    /// Capture-avoiding simultaneous substitution. Bound variables are
    /// renamed (by appending primes) only when a substituted term would
    /// otherwise be captured.
    pub fn substitute(&self, binding: &Binding) -> Formula {
        if binding.is_empty() {
            return self.clone();
        }
        match self {
            Formula::Atom(p, args) => Formula::Atom(p.clone(), args.iter().map(|t| t.substitute(binding)).collect()),
            Formula::Equal(l, r) => Formula::Equal(l.substitute(binding), r.substitute(binding)),
            Formula::Falsum => Formula::Falsum,
            Formula::Not(a) => Formula::not(a.substitute(binding)),
            Formula::And(a, b) => Formula::and(a.substitute(binding), b.substitute(binding)),
            Formula::Or(a, b) => Formula::or(a.substitute(binding), b.substitute(binding)),
            Formula::Implies(a, b) => Formula::implies(a.substitute(binding), b.substitute(binding)),
            Formula::Forall(x, body) => {
                let (y, body) = subst_under_binder(x, body, binding);
                Formula::Forall(y, Box::new(body))
            }
            Formula::Exists(x, body) => {
                let (y, body) = subst_under_binder(x, body, binding);
                Formula::Exists(y, Box::new(body))
            }
        }
    }

    /// `self{x/t}`.
    pub fn instantiate(&self, x: &str, t: &Term) -> Formula {
        let mut b = Binding::new();
        b.insert(x.to_string(), t.clone());
        self.substitute(&b)
    }

    /// Replace every occurrence of the term `from` (inside atoms) by `to`.
    pub fn replace_term(&self, from: &Term, to: &Term) -> Formula {
        self.map_terms(&|t| t.replace(from, to))
    }

    pub fn map_terms(&self, f: &impl Fn(&Term) -> Term) -> Formula {
        match self {
            Formula::Atom(p, args) => Formula::Atom(p.clone(), args.iter().map(f).collect()),
            Formula::Equal(l, r) => Formula::Equal(f(l), f(r)),
            Formula::Falsum => Formula::Falsum,
            Formula::Not(a) => Formula::not(a.map_terms(f)),
            Formula::And(a, b) => Formula::and(a.map_terms(f), b.map_terms(f)),
            Formula::Or(a, b) => Formula::or(a.map_terms(f), b.map_terms(f)),
            Formula::Implies(a, b) => Formula::implies(a.map_terms(f), b.map_terms(f)),
            Formula::Forall(x, a) => Formula::forall(x, a.map_terms(f)),
            Formula::Exists(x, a) => Formula::exists(x, a.map_terms(f)),
        }
    }

    /// Flatten a left- or right-nested conjunction into its conjuncts.
    pub fn conjuncts(&self) -> Vec<&Formula> {
        match self {
            Formula::And(a, b) => {
                let mut out = a.conjuncts();
                out.extend(b.conjuncts());
                out
            }
            _ => vec![self],
        }
    }

    /// If the formula has the shape `exists y. y = t` with `y` not in `t`,
    /// returns `t`.
    pub fn as_definedness(&self) -> Option<&Term> {
        match self {
            Formula::Exists(y, body) => match body.as_ref() {
                Formula::Equal(Term::Var(z), t) if z == y && !t.has_var(y) => Some(t),
                _ => None,
            },
            _ => None,
        }
    }

    /// Strip leading universal quantifiers, returning the bound names and
    /// the matrix.
    pub fn strip_foralls(&self) -> (Vec<String>, &Formula) {
        let mut vars = Vec::new();
        let mut cur = self;
        while let Formula::Forall(x, body) = cur {
            vars.push(x.clone());
            cur = body;
        }
        (vars, cur)
    }

    /// Equality up to renaming of bound variables.
    pub fn alpha_eq(&self, other: &Formula) -> bool {
        self.canonical(0) == other.canonical(0)
    }

    /// Bound variables renamed `%0`, `%1`, ... by nesting depth; `%` never
    /// occurs in parsed names, so no capture can happen.
    fn canonical(&self, depth: usize) -> Formula {
        let rebind = |x: &str, body: &Formula| {
            let y = format!("%{depth}");
            (y.clone(), body.instantiate(x, &Term::Var(y)).canonical(depth + 1))
        };
        match self {
            Formula::Atom(..) | Formula::Equal(..) | Formula::Falsum => self.clone(),
            Formula::Not(a) => Formula::not(a.canonical(depth)),
            Formula::And(a, b) => Formula::and(a.canonical(depth), b.canonical(depth)),
            Formula::Or(a, b) => Formula::or(a.canonical(depth), b.canonical(depth)),
            Formula::Implies(a, b) => Formula::implies(a.canonical(depth), b.canonical(depth)),
            Formula::Forall(x, body) => {
                let (y, b) = rebind(x, body);
                Formula::Forall(y, Box::new(b))
            }
            Formula::Exists(x, body) => {
                let (y, b) = rebind(x, body);
                Formula::Exists(y, Box::new(b))
            }
        }
    }

    /// Number of connectives and quantifiers.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(..) | Formula::Equal(..) | Formula::Falsum => 1,
            Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => 1 + a.size(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => 1 + a.size() + b.size(),
        }
    }
}

fn subst_under_binder(x: &str, body: &Formula, binding: &Binding) -> (String, Formula) {
    let mut inner: Binding = binding
        .iter()
        .filter(|(k, _)| k.as_str() != x && body.has_free_var(k))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    if inner.is_empty() {
        return (x.to_string(), body.clone());
    }
    let incoming: BTreeSet<String> = inner.values().flat_map(|t| t.vars()).collect();
    if incoming.contains(x) {
        let mut avoid = incoming;
        avoid.extend(body.free_vars());
        let y = fresh_variant(x, &avoid);
        inner.insert(x.to_string(), Term::Var(y.clone()));
        (y, body.substitute(&inner))
    } else {
        (x.to_string(), body.substitute(&inner))
    }
}

/// `base`, `base'`, `base''`, ... : the first one not in `avoid`.
pub fn fresh_variant(base: &str, avoid: &BTreeSet<String>) -> String {
    let mut name = base.to_string();
    while avoid.contains(&name) {
        name.push('\'');
    }
    name
}

/// The formula `t!`, i.e. `exists y. y = t` with `y` not occurring in `t`.
pub fn definedness(t: &Term) -> Formula {
    let avoid: BTreeSet<String> = t.vars().into_iter().collect();
    let y = fresh_variant("y", &avoid);
    Formula::exists(&y, Formula::Equal(Term::Var(y.clone()), t.clone()))
}

/// Substitution of distinct fresh parameters for free variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Theta {
    pub pairs: Vec<(String, String)>,
}

impl Theta {
    pub fn binding(&self) -> Binding {
        self.pairs.iter().map(|(x, a)| (x.clone(), Term::Param(a.clone()))).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Replace the free variables of premises and goal by distinct parameters
/// `@v0, @v1, ...` that occur nowhere in the inputs.
pub fn purify(premises: &[Formula], goal: &Formula) -> (Vec<Formula>, Formula, Theta) {
    let mut vars: Vec<String> = Vec::new();
    let mut used: BTreeSet<String> = BTreeSet::new();
    for f in premises.iter().chain(std::iter::once(goal)) {
        for x in f.free_vars() {
            if !vars.contains(&x) {
                vars.push(x);
            }
        }
        used.extend(f.params());
    }
    let mut theta = Theta::default();
    let mut counter = 0usize;
    for x in vars {
        let name = loop {
            let candidate = format!("v{counter}");
            counter += 1;
            if !used.contains(&candidate) {
                break candidate;
            }
        };
        theta.pairs.push((x, name));
    }
    let b = theta.binding();
    let premises = premises.iter().map(|f| f.substitute(&b)).collect();
    (premises, goal.substitute(&b), theta)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SignatureError {
    #[error("name `{0}` is reserved")]
    Reserved(String),
    #[error("name `{0}` declared twice")]
    Duplicate(String),
    #[error("relation `{0}` must have arity at least 1")]
    NullaryRelation(String),
    #[error("signature declares no parameters")]
    NoParams,
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

/// Declared function and relation symbols with arities, plus the ordered
/// parameter list used for quantification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    functions: Vec<(String, usize)>,
    relations: Vec<(String, usize)>,
    params: Vec<String>,
    undef: bool,
}

impl Signature {
    pub fn new(
        functions: Vec<(String, usize)>,
        relations: Vec<(String, usize)>,
        params: Vec<String>,
    ) -> Result<Self, SignatureError> {
        let sig = Signature { functions, relations, params, undef: false };
        sig.validate()?;
        Ok(sig)
    }

    /// Convenience constructor from string slices.
    pub fn build(functions: &[(&str, usize)], relations: &[(&str, usize)], params: &[&str]) -> Result<Self, SignatureError> {
        Signature::new(
            functions.iter().map(|(n, a)| (n.to_string(), *a)).collect(),
            relations.iter().map(|(n, a)| (n.to_string(), *a)).collect(),
            params.iter().map(|p| p.to_string()).collect(),
        )
    }

    fn validate(&self) -> Result<(), SignatureError> {
        if self.params.is_empty() {
            return Err(SignatureError::NoParams);
        }
        let mut seen = BTreeSet::new();
        let names = self
            .functions
            .iter()
            .map(|(n, _)| n)
            .chain(self.relations.iter().map(|(n, _)| n))
            .chain(self.params.iter());
        for n in names {
            if RESERVED.contains(&n.as_str()) {
                return Err(SignatureError::Reserved(n.clone()));
            }
            if !seen.insert(n.clone()) {
                return Err(SignatureError::Duplicate(n.clone()));
            }
        }
        if let Some((n, _)) = self.relations.iter().find(|(_, a)| *a == 0) {
            return Err(SignatureError::NullaryRelation(n.clone()));
        }
        Ok(())
    }

    /// Parse the line-oriented signature format
    /// (`fun f/1`, `rel p/2`, `params a b`, `#` comments).
    pub fn parse(text: &str) -> Result<Self, SignatureError> {
        let mut functions = Vec::new();
        let mut relations = Vec::new();
        let mut params = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| SignatureError::Syntax { line: i + 1, msg: msg.to_string() };
            let (kw, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            match kw {
                "fun" | "rel" => {
                    for decl in rest.split_whitespace() {
                        let (name, arity) = decl.split_once('/').ok_or_else(|| err("expected name/arity"))?;
                        let arity: usize = arity.parse().map_err(|_| err("arity must be a natural number"))?;
                        if !is_ident(name) {
                            return Err(err(&format!("invalid symbol name `{name}`")));
                        }
                        if kw == "fun" {
                            functions.push((name.to_string(), arity));
                        } else {
                            relations.push((name.to_string(), arity));
                        }
                    }
                }
                "params" => {
                    for p in rest.split_whitespace() {
                        let p = p.strip_prefix('@').unwrap_or(p);
                        if !is_ident(p) {
                            return Err(err(&format!("invalid parameter name `{p}`")));
                        }
                        params.push(p.to_string());
                    }
                }
                other => return Err(err(&format!("unknown declaration `{other}`"))),
            }
        }
        Signature::new(functions, relations, params)
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn has_param(&self, a: &str) -> bool {
        self.params.iter().any(|p| p == a)
    }

    pub fn relations(&self) -> &[(String, usize)] {
        &self.relations
    }

    /// Declared functions followed by `undef` when present.
    pub fn functions(&self) -> Vec<(String, usize)> {
        let mut out = self.functions.clone();
        if self.undef {
            out.push((UNDEF.to_string(), 0));
        }
        out
    }

    pub fn function_arity(&self, name: &str) -> Option<usize> {
        if self.undef && name == UNDEF {
            return Some(0);
        }
        self.functions.iter().find(|(n, _)| n == name).map(|(_, a)| *a)
    }

    pub fn relation_arity(&self, name: &str) -> Option<usize> {
        self.relations.iter().find(|(n, _)| n == name).map(|(_, a)| *a)
    }

    pub fn constants(&self) -> Vec<String> {
        self.functions().into_iter().filter(|(_, a)| *a == 0).map(|(n, _)| n).collect()
    }

    pub fn has_undef(&self) -> bool {
        self.undef
    }

    pub fn declares(&self, name: &str) -> bool {
        self.function_arity(name).is_some() || self.relation_arity(name).is_some() || self.has_param(name)
    }

    pub fn with_undef(&self) -> Signature {
        Signature { undef: true, ..self.clone() }
    }

    pub fn without_undef(&self) -> Signature {
        Signature { undef: false, ..self.clone() }
    }

    pub fn with_params(&self, params: Vec<String>) -> Result<Signature, SignatureError> {
        let sig = Signature { params, ..self.clone() };
        sig.validate()?;
        Ok(sig)
    }

    pub fn with_function(&self, name: &str, arity: usize) -> Result<Signature, SignatureError> {
        let mut sig = self.clone();
        sig.functions.push((name.to_string(), arity));
        sig.validate()?;
        Ok(sig)
    }

    pub fn with_relation(&self, name: &str, arity: usize) -> Result<Signature, SignatureError> {
        let mut sig = self.clone();
        sig.relations.push((name.to_string(), arity));
        sig.validate()?;
        Ok(sig)
    }

    /// Render in the signature file format.
    pub fn to_file(&self) -> String {
        let mut out = String::new();
        for (n, a) in &self.functions {
            out.push_str(&format!("fun {n}/{a}\n"));
        }
        for (n, a) in &self.relations {
            out.push_str(&format!("rel {n}/{a}\n"));
        }
        out.push_str(&format!("params {}\n", self.params.join(" ")));
        out
    }

    /// Checks a term against the declared arities.
    pub fn check_term(&self, t: &Term) -> Result<(), String> {
        match t {
            Term::Var(_) | Term::Param(_) => Ok(()),
            Term::App(f, args) => match self.function_arity(f) {
                None => Err(format!("undeclared function `{f}`")),
                Some(n) if n != args.len() => Err(format!("`{f}` expects {n} arguments, got {}", args.len())),
                Some(_) => args.iter().try_for_each(|a| self.check_term(a)),
            },
        }
    }

    pub fn check_formula(&self, f: &Formula) -> Result<(), String> {
        match f {
            Formula::Atom(p, args) => match self.relation_arity(p) {
                None => Err(format!("undeclared relation `{p}`")),
                Some(n) if n != args.len() => Err(format!("`{p}` expects {n} arguments, got {}", args.len())),
                Some(_) => args.iter().try_for_each(|a| self.check_term(a)),
            },
            Formula::Equal(l, r) => self.check_term(l).and_then(|_| self.check_term(r)),
            Formula::Falsum => Ok(()),
            Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => self.check_formula(a),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                self.check_formula(a).and_then(|_| self.check_formula(b))
            }
        }
    }
}

pub(crate) fn strip_comment(line: &str) -> &str {
    line.split_once('#').map_or(line, |(a, _)| a)
}

pub(crate) fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}
