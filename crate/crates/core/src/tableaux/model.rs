use std::collections::HashSet;

use thiserror::Error;

use super::equality::EqClosure;
use super::{params_in, Kind, SignedFormula};
use crate::deduction::SystemId;
use crate::syntax::{Formula, Signature};
use crate::valuation::{PatAtom, PatTerm, PatternRule, TvValuation};

/// A set of signed formulas in insertion order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Branch {
    formulas: Vec<SignedFormula>,
    members: HashSet<SignedFormula>,
    params: Vec<String>,
}

impl Branch {
    pub fn new(formulas: impl IntoIterator<Item = SignedFormula>) -> Branch {
        let mut b = Branch::default();
        for f in formulas {
            b.push(f);
        }
        b
    }

    /// Append `f` unless already present; returns whether it was new.
    pub fn push(&mut self, f: SignedFormula) -> bool {
        if self.members.contains(&f) {
            return false;
        }
        for a in f.formula.params() {
            if !self.params.contains(&a) {
                self.params.push(a);
            }
        }
        self.members.insert(f.clone());
        self.formulas.push(f);
        true
    }

    pub fn contains(&self, f: &SignedFormula) -> bool {
        self.members.contains(f)
    }

    pub fn formulas(&self) -> &[SignedFormula] {
        &self.formulas
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }

    /// Indices of `T false`, or of a pair `T X`, `F X`.
    pub fn closing_pair(&self) -> Option<(usize, usize)> {
        for (j, g) in self.formulas.iter().enumerate() {
            if g.sign && g.formula == Formula::Falsum {
                return Some((j, j));
            }
            if let Some(i) = self.formulas[..j].iter().position(|f| f.formula == g.formula && f.sign != g.sign) {
                return Some((i, j));
            }
        }
        None
    }

    /// A formula whose tableau rule would still add something, judged
    /// against the branch's own parameters.
    pub fn unsatisfied(&self) -> Option<&SignedFormula> {
        self.formulas.iter().find(|sf| match sf.kind() {
            Kind::Literal => false,
            Kind::Alpha => !sf.components().iter().all(|c| self.contains(c)),
            Kind::Beta => !sf.components().iter().any(|c| self.contains(c)),
            Kind::Gamma => {
                self.params.is_empty() || !self.params.iter().all(|a| self.contains(&sf.instance(a).unwrap()))
            }
            Kind::Delta => !self.params.iter().any(|a| self.contains(&sf.instance(a).unwrap())),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CountermodelError {
    #[error("branch is closed by formulas {0} and {1}")]
    Closed(usize, usize),
    #[error("branch is closed under the equality axioms at {0}")]
    EqualityClash(SignedFormula),
    #[error("branch is not saturated: {0}")]
    NotSaturated(SignedFormula),
    #[error("{0}")]
    Unsupported(String),
    #[error("{0}")]
    Invalid(String),
}

fn reflexivity_rule() -> PatternRule {
    let x = || PatTerm::Meta("x".into());
    PatternRule { pattern: PatAtom::Eq(x(), x()), guards: Vec::new(), value: true }
}

/// Read a valuation off an open saturated branch: the domain is the
/// branch's parameters, true literals are `t`, false literals `f`, and
/// everything else is `f`. With equality, the true literals are first
/// closed under the equality axioms and every reflexive equality is `t`.
///
/// With function symbols of positive arity and a proper equality on the
/// branch the closure is infinite; this case is reported as unsupported.
pub fn extract_countermodel(branch: &Branch, sig: &Signature, sys: SystemId) -> Result<TvValuation, CountermodelError> {
    if let Some((i, j)) = branch.closing_pair() {
        return Err(CountermodelError::Closed(i, j));
    }
    if let Some(sf) = branch.unsatisfied() {
        return Err(CountermodelError::NotSaturated(sf.clone()));
    }
    let mut domain = branch.params().to_vec();
    if domain.is_empty() {
        let used = params_in(branch.formulas().iter().map(|sf| &sf.formula));
        let a = sig.params().iter().find(|a| !used.contains(a)).cloned().unwrap_or_else(|| "a".to_string());
        domain.push(a);
    }
    let mut all_params = sig.params().to_vec();
    for a in &domain {
        if !all_params.contains(a) {
            all_params.push(a.clone());
        }
    }
    let vsig = sig.with_params(all_params).map_err(|e| CountermodelError::Invalid(e.to_string()))?;
    let mut v = TvValuation::new(vsig, domain, false).map_err(|e| CountermodelError::Invalid(e.to_string()))?;
    let set = |v: &mut TvValuation, f: &Formula, value: bool| {
        v.set_atom(f.clone(), value).map_err(|e| CountermodelError::Invalid(e.to_string()))
    };
    match sys {
        SystemId::Nc => {
            for sf in branch.formulas().iter().filter(|sf| sf.is_literal() && sf.formula != Formula::Falsum) {
                set(&mut v, &sf.formula, sf.sign)?;
            }
        }
        SystemId::NcEq => {
            let closure = EqClosure::new(branch.formulas(), branch.params());
            if let Some((i, _)) = closure.contradiction(branch.formulas()) {
                return Err(CountermodelError::EqualityClash(branch.formulas()[i].clone()));
            }
            let equalities = closure.proper_equalities();
            if !equalities.is_empty() && sig.functions().iter().any(|(_, n)| *n > 0) {
                let (l, r) = &equalities[0];
                return Err(CountermodelError::Unsupported(format!(
                    "equality {l} = {r} would have to be closed under function application"
                )));
            }
            v.push_rule(reflexivity_rule()).map_err(|e| CountermodelError::Invalid(e.to_string()))?;
            for atom in closure.true_atoms() {
                set(&mut v, atom, true)?;
            }
            for (l, r) in equalities {
                set(&mut v, &Formula::eq(l, r), true)?;
            }
            for sf in branch.formulas().iter().filter(|sf| !sf.sign && sf.is_literal()) {
                set(&mut v, &sf.formula, false)?;
            }
        }
        other => return Err(CountermodelError::Unsupported(format!("no countermodel extraction for {other}"))),
    }
    Ok(v)
}
