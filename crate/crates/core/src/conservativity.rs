//! Selection and description functions over a valuation with equality.
//!
//! Given `D(x1, ..., xn, y)` and a new function symbol `f`, the selection
//! axioms say that `f(x1, ..., xn)` picks a witness for `y` whenever one
//! exists; the description axiom says that `f(x1, ..., xn)` is the unique
//! witness. [`epsilon_extend`] builds an interpretation of `f` making the
//! axioms true and [`verify_conservativity`] checks them exhaustively over
//! the domain parameters.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::extension::{
    extend_valuation, is_congruent, is_strict_interp, lift_undefined, Extended, ExtensionContext, ExtensionError,
    Interpretation,
};
use crate::syntax::{definedness, enumerate::tuples, enumerate_pure_terms, fresh_variant, Binding, Formula, Signature, Term};
use crate::valuation::{
    check_equality_valuation, check_strict, check_strict_over, eval, is_denoting, is_totally_denoting, representative, AtomValuation,
    EvalMode, SchemaReport, Verdict,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConservativityError {
    #[error("invalid selection spec: {0}")]
    Spec(String),
    #[error("not a valuation with equality:\n{0}")]
    NotEquality(String),
    #[error("no non-denoting term found up to depth {0} although the valuation is not totally denoting")]
    NoNonDenotingTerm(usize),
    #[error(transparent)]
    Extension(#[from] ExtensionError),
    #[error("evaluation failed: {0}")]
    Eval(String),
}

/// A formula `D` with distinct free variables `x1, ..., xn, y` and the
/// name of a new `n`-ary function symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelectionSpec {
    pub formula: Formula,
    pub xs: Vec<String>,
    pub y: String,
    pub name: String,
}

impl SelectionSpec {
    /// `vars` lists `x1, ..., xn, y`; the last one is `y`.
    pub fn new(formula: Formula, vars: &[String], name: &str, sig: &Signature) -> Result<Self, ConservativityError> {
        let err = |m: String| Err(ConservativityError::Spec(m));
        let Some((y, xs)) = vars.split_last() else { return err("no variables given".into()) };
        let distinct: BTreeSet<&String> = vars.iter().collect();
        if distinct.len() != vars.len() {
            return err(format!("variables {} are not distinct", vars.join(", ")));
        }
        if let Some(x) = formula.free_vars().into_iter().find(|x| !vars.contains(x)) {
            return err(format!("free variable {x} is not among {}", vars.join(", ")));
        }
        if sig.declares(name) || name == crate::syntax::UNDEF {
            return err(format!("`{name}` is already a symbol of the language"));
        }
        sig.check_formula(&formula).map_err(ConservativityError::Spec)?;
        Ok(SelectionSpec { formula, xs: xs.to_vec(), y: y.clone(), name: name.to_string() })
    }

    pub fn arity(&self) -> usize {
        self.xs.len()
    }

    /// `f(x1, ..., xn)`.
    pub fn application(&self) -> Term {
        Term::App(self.name.clone(), self.xs.iter().map(|x| Term::var(x)).collect())
    }

    fn with_formula(&self, formula: Formula) -> SelectionSpec {
        SelectionSpec { formula, ..self.clone() }
    }
}

/// The two selection axioms, closed over `x1, ..., xn`:
/// `f(x)! -> exists y. D` and `(exists y. D) -> exists y. (y = f(x) & D)`.
pub fn epsilon_axioms(spec: &SelectionSpec) -> (Formula, Formula) {
    let fx = spec.application();
    let some = Formula::exists(&spec.y, spec.formula.clone());
    let e1 = Formula::implies(definedness(&fx), some.clone());
    let e2 = Formula::implies(
        some,
        Formula::exists(&spec.y, Formula::and(Formula::eq(Term::var(&spec.y), fx), spec.formula.clone())),
    );
    (Formula::forall_all(&spec.xs, e1), Formula::forall_all(&spec.xs, e2))
}

fn primed(d: &Formula, y: &str) -> String {
    let mut avoid = d.all_vars();
    avoid.insert(y.to_string());
    fresh_variant(&format!("{y}'"), &avoid)
}

/// `D & forall y'. (D{y/y'} -> y' = y)`.
pub fn bang(d: &Formula, y: &str) -> Formula {
    let y2 = primed(d, y);
    let other = d.instantiate(y, &Term::var(&y2));
    Formula::and(
        d.clone(),
        Formula::forall(&y2, Formula::implies(other, Formula::eq(Term::var(&y2), Term::var(y)))),
    )
}

/// Closure over `x1, ..., xn, y` of `f(x) = y` equivalent to `D!`, written
/// as a conjunction of both implications.
pub fn iota_axiom(spec: &SelectionSpec) -> Formula {
    let lhs = Formula::eq(spec.application(), Term::var(&spec.y));
    let rhs = bang(&spec.formula, &spec.y);
    let mut vars = spec.xs.clone();
    vars.push(spec.y.clone());
    Formula::forall_all(&vars, Formula::iff(lhs, rhs))
}

/// Closure of `D & D{y/y'} -> y' = y`.
pub fn uniqueness(spec: &SelectionSpec) -> Formula {
    let y2 = primed(&spec.formula, &spec.y);
    let body = Formula::implies(
        Formula::and(spec.formula.clone(), spec.formula.instantiate(&spec.y, &Term::var(&y2))),
        Formula::eq(Term::var(&y2), Term::var(&spec.y)),
    );
    let mut vars = spec.xs.clone();
    vars.push(spec.y.clone());
    vars.push(y2);
    Formula::forall_all(&vars, body)
}

/// Maps denoting arguments with representatives `a1, ..., an` to the first
/// domain parameter `b` with `D(a, b)` true, and everything else to `t0`.
pub struct SelectionInterpretation {
    spec: SelectionSpec,
    base: Arc<dyn AtomValuation>,
    t0: Term,
}

impl fmt::Debug for SelectionInterpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SelectionInterpretation").field("spec", &self.spec).field("t0", &self.t0).finish()
    }
}

impl SelectionInterpretation {
    fn witness(&self, reps: &[String]) -> Option<Term> {
        let mut b: Binding = self.spec.xs.iter().cloned().zip(reps.iter().map(|a| Term::param(a))).collect();
        self.base.domain().iter().find_map(|c| {
            b.insert(self.spec.y.clone(), Term::param(c));
            let f = self.spec.formula.substitute(&b);
            (eval(self.base.as_ref(), &f, EvalMode::ParamQuant) == Ok(Verdict::True)).then(|| Term::param(c))
        })
    }

    /// Images of all tuples of domain parameters.
    pub fn table(&self) -> Vec<(Vec<Term>, Term)> {
        let params: Vec<Term> = self.base.domain().iter().map(|a| Term::param(a)).collect();
        tuples(&params, self.spec.arity()).into_iter().map(|args| (args.clone(), self.apply(&args))).collect()
    }

    pub fn t0(&self) -> &Term {
        &self.t0
    }
}

impl Interpretation for SelectionInterpretation {
    fn name(&self) -> &str {
        &self.spec.name
    }

    fn arity(&self) -> usize {
        self.spec.arity()
    }

    fn apply(&self, args: &[Term]) -> Term {
        let reps: Option<Vec<String>> = args.iter().map(|t| representative(self.base.as_ref(), t)).collect();
        reps.and_then(|r| self.witness(&r)).unwrap_or_else(|| self.t0.clone())
    }

    fn describe(&self) -> String {
        let rows: Vec<String> = self
            .table()
            .into_iter()
            .map(|(args, value)| format!("{} = {value}", Term::App(self.spec.name.clone(), args)))
            .collect();
        format!("{}; otherwise {}", rows.join("; "), self.t0)
    }
}

pub struct EpsilonExtension {
    pub base: Arc<dyn AtomValuation>,
    /// Whether `base` is the lift of the input by `undef`.
    pub lifted: bool,
    pub interpretation: Arc<SelectionInterpretation>,
    pub extended: Extended,
}

/// Interpret `spec.name` by the first witness of `spec.formula`. A totally
/// denoting valuation is first lifted by `undef`, which then serves as the
/// default value; otherwise the default is the first non-denoting term up
/// to `depth`.
pub fn epsilon_extend(
    v: Arc<dyn AtomValuation>,
    spec: &SelectionSpec,
    depth: usize,
) -> Result<EpsilonExtension, ConservativityError> {
    let report = check_equality_valuation(v.as_ref(), depth);
    if !report.pass() {
        return Err(ConservativityError::NotEquality(report.to_string()));
    }
    SelectionSpec::new(spec.formula.clone(), &[spec.xs.clone(), vec![spec.y.clone()]].concat(), &spec.name, v.signature())?;
    let (base, lifted, t0): (Arc<dyn AtomValuation>, bool, Term) = if is_totally_denoting(v.as_ref()) {
        (Arc::new(lift_undefined(v)?), true, Term::undef())
    } else {
        let sig = v.signature().with_params(v.domain().to_vec()).unwrap_or_else(|_| v.signature().clone());
        let t0 = enumerate_pure_terms(&sig, depth)
            .into_iter()
            .find(|t| !is_denoting(v.as_ref(), t).unwrap_or(true))
            .ok_or(ConservativityError::NoNonDenotingTerm(depth))?;
        (v, false, t0)
    };
    let interpretation = Arc::new(SelectionInterpretation { spec: spec.clone(), base: base.clone(), t0 });
    let mut ctx = ExtensionContext::new(base.signature());
    ctx.add_function(interpretation.clone())?;
    let extended = extend_valuation(base.clone(), ctx, None)?;
    Ok(EpsilonExtension { base, lifted, interpretation, extended })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Epsilon,
    Iota,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Epsilon => "epsilon",
            Kind::Iota => "iota",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomCheck {
    pub name: String,
    pub formula: Formula,
    pub checked: usize,
    /// Parameter tuples at which the instance is not true.
    pub failures: Vec<String>,
}

impl AxiomCheck {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct ConservativityReport {
    pub kind: Kind,
    pub depth: usize,
    pub base_lifted: bool,
    pub interpretation: String,
    pub axioms: Vec<AxiomCheck>,
    pub congruent: bool,
    pub strict_interp: bool,
    pub equality: SchemaReport,
    /// Strictness of the extension, checked only when the input valuation
    /// and the interpretation are strict. Terms containing `undef` are left
    /// out: the lifted constant is non-denoting on purpose.
    pub strict: Option<SchemaReport>,
}

impl ConservativityReport {
    pub fn pass(&self) -> bool {
        self.axioms.iter().all(AxiomCheck::pass)
            && self.congruent
            && self.equality.pass()
            && self.strict.as_ref().is_none_or(SchemaReport::pass)
    }
}

impl fmt::Display for ConservativityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "kind: {}", self.kind)?;
        writeln!(f, "base lifted: {}", self.base_lifted)?;
        writeln!(f, "interpretation: {}", self.interpretation)?;
        for a in &self.axioms {
            let status = if a.pass() { "pass".to_string() } else { format!("FAIL at {}", a.failures.join(", ")) };
            writeln!(f, "axiom {} ({} instances): {status}", a.name, a.checked)?;
        }
        writeln!(f, "congruent: {}", self.congruent)?;
        writeln!(f, "strict interpretation: {}", self.strict_interp)?;
        writeln!(f, "{}", self.equality)?;
        match &self.strict {
            Some(r) => write!(f, "strictness preserved: {}", r.pass()),
            None => write!(f, "strictness preserved: not checked"),
        }
    }
}

/// Instantiate the leading universal quantifiers of `axiom` at every tuple
/// of domain parameters and evaluate each instance.
fn check_axiom(v: &dyn AtomValuation, name: &str, axiom: &Formula) -> Result<AxiomCheck, ConservativityError> {
    let (vars, body) = axiom.strip_foralls();
    let params: Vec<Term> = v.domain().iter().map(|a| Term::param(a)).collect();
    let mut check = AxiomCheck { name: name.to_string(), formula: axiom.clone(), checked: 0, failures: Vec::new() };
    for args in tuples(&params, vars.len()) {
        let b: Binding = vars.iter().cloned().zip(args.iter().cloned()).collect();
        check.checked += 1;
        let verdict = eval(v, &body.substitute(&b), EvalMode::ParamQuant).map_err(|e| ConservativityError::Eval(e.to_string()))?;
        if verdict != Verdict::True {
            let at: Vec<String> = vars.iter().zip(&args).map(|(x, t)| format!("{x}={t}")).collect();
            check.failures.push(format!("({})", at.join(", ")));
        }
    }
    Ok(check)
}

/// Build the extension for `kind` (the description axiom goes through
/// `D!`) and check its axioms, equality and, for strict input, strictness.
pub fn verify_conservativity(
    v: Arc<dyn AtomValuation>,
    spec: &SelectionSpec,
    kind: Kind,
    depth: usize,
) -> Result<ConservativityReport, ConservativityError> {
    let was_strict = check_strict(v.as_ref(), depth).pass();
    let build_spec = match kind {
        Kind::Epsilon => spec.clone(),
        Kind::Iota => spec.with_formula(bang(&spec.formula, &spec.y)),
    };
    let ext = epsilon_extend(v, &build_spec, depth)?;
    let axioms = match kind {
        Kind::Epsilon => {
            let (e1, e2) = epsilon_axioms(spec);
            vec![check_axiom(&ext.extended, "epsilon1", &e1)?, check_axiom(&ext.extended, "epsilon2", &e2)?]
        }
        Kind::Iota => vec![check_axiom(&ext.extended, "iota", &iota_axiom(spec))?],
    };
    let interp = ext.interpretation.as_ref();
    let strict_interp = is_strict_interp(ext.base.as_ref(), interp, depth);
    Ok(ConservativityReport {
        kind,
        depth,
        base_lifted: ext.lifted,
        interpretation: interp.describe(),
        axioms,
        congruent: is_congruent(ext.base.as_ref(), interp, depth),
        strict_interp,
        equality: check_equality_valuation(&ext.extended, depth),
        strict: (was_strict && strict_interp).then(|| {
            let sig = ext.extended.signature().without_undef();
            check_strict_over(&ext.extended, &sig, depth)
        }),
    })
}
