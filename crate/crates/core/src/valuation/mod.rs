//! Truth-value valuations: total assignments of `t`/`f` to pure atoms,
//! extended to pure formulae by the classical tables and by quantifier
//! clauses that range over parameters (or, in the bounded mode, over pure
//! terms).

mod checks;
mod file;
mod rules;

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::syntax::{enumerate_pure_terms, universe_is_finite, Formula, Signature, Term};

pub use checks::{
    check_equality_valuation, check_equality_valuation_over, check_strict, check_strict_over, is_denoting,
    is_totally_denoting, representative, SchemaReport, Violation,
};
pub use file::ValuationFileError;
pub use rules::{CmpOp, Guard, IndexExpr, PatAtom, PatTerm, PatternRule};

/// Anything that assigns a truth value to every pure atom of its
/// signature and declares a finite quantification domain.
pub trait AtomValuation: Send + Sync {
    fn signature(&self) -> &Signature;

    /// Parameters the quantifiers range over, in enumeration order.
    fn domain(&self) -> &[String];

    /// Value of a pure `Atom` or `Equal` formula.
    fn atom(&self, atom: &Formula) -> bool;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    True,
    False,
    Indeterminate,
}

impl Verdict {
    pub fn from_bool(b: bool) -> Verdict {
        if b {
            Verdict::True
        } else {
            Verdict::False
        }
    }

    pub fn negate(self) -> Verdict {
        match self {
            Verdict::True => Verdict::False,
            Verdict::False => Verdict::True,
            Verdict::Indeterminate => Verdict::Indeterminate,
        }
    }

    fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::False, _) | (_, Verdict::False) => Verdict::False,
            (Verdict::True, Verdict::True) => Verdict::True,
            _ => Verdict::Indeterminate,
        }
    }

    fn or(self, other: Verdict) -> Verdict {
        self.negate().and(other.negate()).negate()
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::True => "t",
            Verdict::False => "f",
            Verdict::Indeterminate => "indeterminate",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalMode {
    /// Quantifiers range over the valuation's domain parameters.
    ParamQuant,
    /// Quantifiers range over all pure terms up to the given depth.
    PureTermQuant(usize),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("formula is not pure: free variable `{0}`")]
    NotPure(String),
    #[error("parameter `@{0}` is outside the valuation domain")]
    ParamOutsideDomain(String),
    #[error("{0}")]
    Signature(String),
}

/// Check that `f` can be evaluated under `v`.
pub fn check_evaluable(v: &dyn AtomValuation, f: &Formula) -> Result<(), EvalError> {
    if let Some(x) = f.free_vars().into_iter().next() {
        return Err(EvalError::NotPure(x));
    }
    if let Some(a) = f.params().into_iter().find(|a| !v.domain().contains(a)) {
        return Err(EvalError::ParamOutsideDomain(a));
    }
    v.signature().check_formula(f).map_err(EvalError::Signature)
}

/// Evaluate a pure formula. In [`EvalMode::ParamQuant`] the result is
/// always `t` or `f`.
pub fn eval(v: &dyn AtomValuation, f: &Formula, mode: EvalMode) -> Result<Verdict, EvalError> {
    check_evaluable(v, f)?;
    let (universe, finite) = match mode {
        EvalMode::ParamQuant => (v.domain().iter().map(|a| Term::Param(a.clone())).collect(), true),
        EvalMode::PureTermQuant(depth) => {
            let sig = v
                .signature()
                .with_params(v.domain().to_vec())
                .map_err(|e| EvalError::Signature(e.to_string()))?;
            (enumerate_pure_terms(&sig, depth), universe_is_finite(&sig))
        }
    };
    let ev = Evaluator { v, universe, finite, cache: RefCell::new(HashMap::new()) };
    Ok(ev.eval(f))
}

/// [`eval`] in parameter mode, as a boolean.
pub fn holds(v: &dyn AtomValuation, f: &Formula) -> Result<bool, EvalError> {
    Ok(eval(v, f, EvalMode::ParamQuant)? == Verdict::True)
}

struct Evaluator<'a> {
    v: &'a dyn AtomValuation,
    universe: Vec<Term>,
    finite: bool,
    cache: RefCell<HashMap<Formula, bool>>,
}

impl Evaluator<'_> {
    fn atom(&self, f: &Formula) -> bool {
        if let Some(b) = self.cache.borrow().get(f) {
            return *b;
        }
        let b = self.v.atom(f);
        self.cache.borrow_mut().insert(f.clone(), b);
        b
    }

    fn eval(&self, f: &Formula) -> Verdict {
        match f {
            Formula::Falsum => Verdict::False,
            Formula::Atom(..) | Formula::Equal(..) => Verdict::from_bool(self.atom(f)),
            Formula::Not(a) => self.eval(a).negate(),
            Formula::And(a, b) => match self.eval(a) {
                Verdict::False => Verdict::False,
                va => va.and(self.eval(b)),
            },
            Formula::Or(a, b) => match self.eval(a) {
                Verdict::True => Verdict::True,
                va => va.or(self.eval(b)),
            },
            Formula::Implies(a, b) => match self.eval(a) {
                Verdict::False => Verdict::True,
                va => va.negate().or(self.eval(b)),
            },
            Formula::Forall(x, body) => {
                let mut acc = Verdict::True;
                for t in &self.universe {
                    match self.eval(&body.instantiate(x, t)) {
                        Verdict::False => return Verdict::False,
                        Verdict::Indeterminate => acc = Verdict::Indeterminate,
                        Verdict::True => {}
                    }
                }
                if self.finite {
                    acc
                } else {
                    Verdict::Indeterminate
                }
            }
            Formula::Exists(x, body) => {
                let mut acc = Verdict::False;
                for t in &self.universe {
                    match self.eval(&body.instantiate(x, t)) {
                        Verdict::True => return Verdict::True,
                        Verdict::Indeterminate => acc = Verdict::Indeterminate,
                        Verdict::False => {}
                    }
                }
                if self.finite {
                    acc
                } else {
                    Verdict::Indeterminate
                }
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ValuationError {
    #[error("valuation domain is empty")]
    EmptyDomain,
    #[error("domain parameter `{0}` is not declared in the signature")]
    UnknownParam(String),
    #[error("`{0}` is not a pure atom")]
    NotAnAtom(String),
    #[error("{0}")]
    Signature(String),
    #[error("invalid rule: {0}")]
    Rule(String),
}

/// A finitely represented tv-valuation: exact atom entries take precedence,
/// then pattern rules top to bottom, then the mandatory default.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TvValuation {
    sig: Signature,
    domain: Vec<String>,
    atoms: BTreeMap<Formula, bool>,
    rules: Vec<PatternRule>,
    default: bool,
}

impl TvValuation {
    pub fn new(sig: Signature, domain: Vec<String>, default: bool) -> Result<Self, ValuationError> {
        if domain.is_empty() {
            return Err(ValuationError::EmptyDomain);
        }
        if let Some(a) = domain.iter().find(|a| !sig.has_param(a)) {
            return Err(ValuationError::UnknownParam(a.clone()));
        }
        Ok(TvValuation { sig, domain, atoms: BTreeMap::new(), rules: Vec::new(), default })
    }

    /// Domain equal to the signature's parameter list.
    pub fn over(sig: Signature, default: bool) -> Self {
        let domain = sig.params().to_vec();
        TvValuation { sig, domain, atoms: BTreeMap::new(), rules: Vec::new(), default }
    }

    pub fn set_atom(&mut self, atom: Formula, value: bool) -> Result<(), ValuationError> {
        if !matches!(atom, Formula::Atom(..) | Formula::Equal(..)) || !atom.is_pure() {
            return Err(ValuationError::NotAnAtom(atom.to_string()));
        }
        self.sig.check_formula(&atom).map_err(ValuationError::Signature)?;
        self.atoms.insert(atom, value);
        Ok(())
    }

    pub fn with_atom(mut self, atom: Formula, value: bool) -> Result<Self, ValuationError> {
        self.set_atom(atom, value)?;
        Ok(self)
    }

    pub fn push_rule(&mut self, rule: PatternRule) -> Result<(), ValuationError> {
        rule.validate(&self.sig).map_err(ValuationError::Rule)?;
        self.rules.push(rule);
        Ok(())
    }

    pub fn default_value(&self) -> bool {
        self.default
    }

    pub fn entries(&self) -> &BTreeMap<Formula, bool> {
        &self.atoms
    }

    pub fn rules(&self) -> &[PatternRule] {
        &self.rules
    }

    /// Copy of this valuation with one exact entry overridden.
    pub fn flipped(&self, atom: &Formula) -> TvValuation {
        let mut out = self.clone();
        let cur = self.atom(atom);
        out.atoms.insert(atom.clone(), !cur);
        out
    }
}

impl AtomValuation for TvValuation {
    fn signature(&self) -> &Signature {
        &self.sig
    }

    fn domain(&self) -> &[String] {
        &self.domain
    }

    fn atom(&self, atom: &Formula) -> bool {
        if let Some(b) = self.atoms.get(atom) {
            return *b;
        }
        self.rules.iter().find_map(|r| r.apply(atom)).unwrap_or(self.default)
    }
}

impl<V: AtomValuation + ?Sized> AtomValuation for &V {
    fn signature(&self) -> &Signature {
        (**self).signature()
    }

    fn domain(&self) -> &[String] {
        (**self).domain()
    }

    fn atom(&self, atom: &Formula) -> bool {
        (**self).atom(atom)
    }
}

impl<V: AtomValuation + ?Sized> AtomValuation for std::sync::Arc<V> {
    fn signature(&self) -> &Signature {
        (**self).signature()
    }

    fn domain(&self) -> &[String] {
        (**self).domain()
    }

    fn atom(&self, atom: &Formula) -> bool {
        (**self).atom(atom)
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    //! The three example valuations used throughout the unit tests.
    use super::*;

    pub const V0_SIG: &str = "rel p/2\nparams a b\n";
    pub const V0: &str = "\
domain a b
default f
atom p(@a,@a) = t
atom p(@b,@b) = t
atom p(@a,@b) = f
atom p(@b,@a) = f
atom @a = @a : t
atom @b = @b : t
atom @a = @b : f
atom @b = @a : f
";

    pub const CONST_SIG: &str = "fun c/0\nrel p/1\nparams a\n";
    pub const CONST_C: &str = "\
domain a
default f
atom p(c) = t
atom p(@a) = f
atom @a = @a : t
atom c = c : t
atom @a = c : f
atom c = @a : f
";

    pub const TOWER_SIG: &str = "fun f/1\nrel p/2\nparams a\n";
    pub const TOWER: &str = "\
domain a
default f
rule p(f^n(@a), f^m(@a)) = t if m = n+1
rule f^n(@a) = f^m(@a) : t if n = m
";

    pub fn load(sig: &str, val: &str) -> (Signature, TvValuation) {
        let sig = Signature::parse(sig).unwrap();
        let v = TvValuation::parse(val, &sig).unwrap();
        (sig, v)
    }

    pub fn v0() -> (Signature, TvValuation) {
        load(V0_SIG, V0)
    }

    pub fn const_c() -> (Signature, TvValuation) {
        load(CONST_SIG, CONST_C)
    }

    pub fn tower() -> (Signature, TvValuation) {
        load(TOWER_SIG, TOWER)
    }
}
