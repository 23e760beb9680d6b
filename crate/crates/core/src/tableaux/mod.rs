//! Signed tableaux for pure sequents, with and without equality.
//!
//! [`decide`] runs a systematic expansion. A closed tableau is returned as a
//! replayable [`Certificate`]; an open branch on which nothing new can be
//! derived is turned into a finite countermodel. Quantifier instances are
//! drawn from the parameters on the branch. The existential rule splits the
//! branch over each parameter already present plus one fresh parameter, so
//! small countermodels are found without an unbounded supply of witnesses.
//!
//! With equality, branches are closed under ground instances of Rfl, Symm,
//! Trans, Cng_p and Cng_f over the terms occurring on them. Each derived
//! literal is recorded in the certificate together with its axiom instance.

mod certificate;
mod equality;
mod model;
mod search;

use std::fmt;

use thiserror::Error;

use crate::syntax::{Formula, Term};

pub use certificate::{verify_certificate, CertNode, Certificate, SplitKind, Step};
pub use model::{extract_countermodel, Branch, CountermodelError};
pub use search::{decide, Budget, DecideOutcome, Stats};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedFormula {
    /// `true` for T, `false` for F.
    pub sign: bool,
    pub formula: Formula,
}

impl SignedFormula {
    pub fn t(formula: Formula) -> Self {
        SignedFormula { sign: true, formula }
    }

    pub fn f(formula: Formula) -> Self {
        SignedFormula { sign: false, formula }
    }

    pub fn conjugate(&self) -> SignedFormula {
        SignedFormula { sign: !self.sign, formula: self.formula.clone() }
    }

    pub fn is_literal(&self) -> bool {
        self.formula.is_atomic()
    }

    fn kind(&self) -> Kind {
        use Formula::*;
        match (self.sign, &self.formula) {
            (_, Atom(..) | Equal(..) | Falsum) => Kind::Literal,
            (true, And(..)) | (false, Or(..)) | (false, Implies(..)) | (_, Not(..)) => Kind::Alpha,
            (false, And(..)) | (true, Or(..)) | (true, Implies(..)) => Kind::Beta,
            (true, Forall(..)) | (false, Exists(..)) => Kind::Gamma,
            (false, Forall(..)) | (true, Exists(..)) => Kind::Delta,
        }
    }

    /// Components of an alpha formula (both hold) or a beta formula (one
    /// holds).
    fn components(&self) -> Vec<SignedFormula> {
        use Formula::*;
        let s = |sign: bool, f: &Formula| SignedFormula { sign, formula: f.clone() };
        match (self.sign, &self.formula) {
            (sign, And(a, b)) | (sign, Or(a, b)) => vec![s(sign, a), s(sign, b)],
            (sign, Implies(a, b)) => vec![s(!sign, a), s(sign, b)],
            (sign, Not(a)) => vec![s(!sign, a)],
            _ => Vec::new(),
        }
    }

    /// The instance of a gamma or delta formula at parameter `a`.
    fn instance(&self, a: &str) -> Option<SignedFormula> {
        match &self.formula {
            Formula::Forall(x, body) | Formula::Exists(x, body) => {
                Some(SignedFormula { sign: self.sign, formula: body.instantiate(x, &Term::param(a)) })
            }
            _ => None,
        }
    }
}

impl fmt::Display for SignedFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", if self.sign { "T" } else { "F" }, self.formula)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Literal,
    Alpha,
    Beta,
    Gamma,
    Delta,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DecideError {
    #[error("{0} is not pure")]
    NotPure(Formula),
    #[error("the tableau procedure supports nc and nceq, not {0}")]
    UnsupportedSystem(crate::deduction::SystemId),
    #[error("{0}")]
    Signature(String),
    #[error("budget must be positive")]
    EmptyBudget,
}

/// Parameters of a formula list in order of first occurrence.
fn params_in<'a>(fs: impl IntoIterator<Item = &'a Formula>) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for f in fs {
        for a in f.params() {
            if !out.contains(&a) {
                out.push(a);
            }
        }
    }
    out
}
