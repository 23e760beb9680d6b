//! Natural deductions for classical logic of partial terms and a checker
//! for four systems:
//!
//! * `nc`: the propositional rules of Prawitz with quantifier rules that
//!   instantiate only with variables or parameters;
//! * `nceq`: `nc` plus reflexivity and substitutivity axioms;
//! * `nceqs`: `nceq` plus the strictness axioms;
//! * `ncdowneq`: `nceq` plus `forall(t!)`, with unrestricted instantiation.

mod axioms;
mod file;

use std::collections::BTreeMap;
use std::fmt;

use crate::syntax::{Formula, Term};

pub use axioms::{
    generalize, instantiate_equality_axioms, match_axiom, match_equality_schema, strictness_axioms, AxiomClass,
    EqualityAxioms, EqualitySchema,
};
pub use file::{parse_proof, ProofFileError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SystemId {
    Nc,
    NcEq,
    NcEqStrict,
    NcDownEq,
}

impl SystemId {
    pub const ALL: [SystemId; 4] = [SystemId::Nc, SystemId::NcEq, SystemId::NcEqStrict, SystemId::NcDownEq];

    pub fn name(self) -> &'static str {
        match self {
            SystemId::Nc => "nc",
            SystemId::NcEq => "nceq",
            SystemId::NcEqStrict => "nceqs",
            SystemId::NcDownEq => "ncdowneq",
        }
    }

    pub fn from_name(s: &str) -> Option<SystemId> {
        SystemId::ALL.into_iter().find(|id| id.name() == s)
    }
}

impl fmt::Display for SystemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemProfile {
    pub id: SystemId,
    pub allowed: Vec<AxiomClass>,
    pub unrestricted_instantiation: bool,
}

impl SystemProfile {
    pub fn of(id: SystemId) -> SystemProfile {
        use AxiomClass::*;
        let (allowed, unrestricted_instantiation) = match id {
            SystemId::Nc => (vec![], false),
            SystemId::NcEq => (vec![Rfl, Sbst], false),
            SystemId::NcEqStrict => (vec![Rfl, Sbst, StrictConst, StrictFun, StrictRel], false),
            SystemId::NcDownEq => (vec![Rfl, Sbst, Definedness], true),
        };
        SystemProfile { id, allowed, unrestricted_instantiation }
    }

    pub fn allows(&self, class: AxiomClass) -> bool {
        self.allowed.contains(&class)
    }
}

/// Inference rules. Labels name the assumptions a rule discharges; a
/// discharging rule without a label discharges nothing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    Assume(Option<String>),
    AndI,
    AndE1,
    AndE2,
    OrI1,
    OrI2,
    /// Discharges the left and the right disjunct in the second and third
    /// premise respectively.
    OrE(Option<String>, Option<String>),
    ImpI(Option<String>),
    ImpE,
    NotI(Option<String>),
    NotE,
    FalsumE,
    Raa(Option<String>),
    ForallI,
    ForallE,
    ExistsI,
    ExistsE(Option<String>),
    Axiom(AxiomClass),
}

impl Rule {
    pub fn name(&self) -> String {
        match self {
            Rule::Assume(_) => "assume".into(),
            Rule::AndI => "and-i".into(),
            Rule::AndE1 => "and-e1".into(),
            Rule::AndE2 => "and-e2".into(),
            Rule::OrI1 => "or-i1".into(),
            Rule::OrI2 => "or-i2".into(),
            Rule::OrE(..) => "or-e".into(),
            Rule::ImpI(_) => "imp-i".into(),
            Rule::ImpE => "imp-e".into(),
            Rule::NotI(_) => "not-i".into(),
            Rule::NotE => "not-e".into(),
            Rule::FalsumE => "false-e".into(),
            Rule::Raa(_) => "raa".into(),
            Rule::ForallI => "forall-i".into(),
            Rule::ForallE => "forall-e".into(),
            Rule::ExistsI => "exists-i".into(),
            Rule::ExistsE(_) => "exists-e".into(),
            Rule::Axiom(c) => format!("axiom {c}"),
        }
    }

    fn premises(&self) -> usize {
        match self {
            Rule::Assume(_) | Rule::Axiom(_) => 0,
            Rule::AndI | Rule::ImpE | Rule::NotE | Rule::ExistsE(_) => 2,
            Rule::OrE(..) => 3,
            _ => 1,
        }
    }

    /// Labels introduced by this rule, in premise order.
    pub fn discharges(&self) -> Vec<&str> {
        match self {
            Rule::OrE(a, b) => a.iter().chain(b.iter()).map(String::as_str).collect(),
            Rule::ImpI(l) | Rule::NotI(l) | Rule::Raa(l) | Rule::ExistsE(l) => l.iter().map(String::as_str).collect(),
            _ => Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Deduction {
    pub rule: Rule,
    pub conclusion: Formula,
    pub children: Vec<Deduction>,
    /// Proper parameter of `forall-i` and `exists-e`.
    pub param: Option<Term>,
}

impl Deduction {
    pub fn leaf(rule: Rule, conclusion: Formula) -> Deduction {
        Deduction { rule, conclusion, children: Vec::new(), param: None }
    }

    pub fn node(rule: Rule, conclusion: Formula, children: Vec<Deduction>) -> Deduction {
        Deduction { rule, conclusion, children, param: None }
    }

    pub fn with_param(mut self, p: Term) -> Deduction {
        self.param = Some(p);
        self
    }

    pub fn assume(f: Formula, label: Option<&str>) -> Deduction {
        Deduction::leaf(Rule::Assume(label.map(str::to_string)), f)
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Deduction::size).sum::<usize>()
    }

    /// Every conclusion in the tree is pure.
    pub fn is_pure(&self) -> bool {
        self.conclusion.is_pure() && self.children.iter().all(Deduction::is_pure)
    }

    fn walk<'a>(&'a self, out: &mut Vec<&'a Deduction>) {
        out.push(self);
        for c in &self.children {
            c.walk(out);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// Dotted path from the root `0`, e.g. `0.1.0`.
    pub path: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at {}: {}", self.path, self.message)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub ok: bool,
    pub conclusion: Formula,
    pub open_assumptions: Vec<Formula>,
    pub violations: Vec<Violation>,
}

#[derive(Clone, Debug)]
struct Open {
    label: Option<String>,
    formula: Formula,
    path: String,
}

struct Checker<'a> {
    sys: &'a SystemProfile,
    pure: bool,
    violations: Vec<Violation>,
}

pub fn check_deduction(d: &Deduction, sys: &SystemProfile) -> CheckReport {
    let mut checker = Checker { sys, pure: d.is_pure(), violations: Vec::new() };
    checker.check_labels(d);
    let open = checker.check(d, "0");
    let mut open_assumptions: Vec<Formula> = Vec::new();
    for o in open {
        if !open_assumptions.contains(&o.formula) {
            open_assumptions.push(o.formula);
        }
    }
    CheckReport {
        ok: checker.violations.is_empty(),
        conclusion: d.conclusion.clone(),
        open_assumptions,
        violations: checker.violations,
    }
}

/// Where `pattern{x/t}` should equal `target`, find `t` at the first
/// free occurrence of `x`.
fn find_instance(pattern: &Formula, x: &str, target: &Formula) -> Option<Term> {
    fn in_term(p: &Term, x: &str, t: &Term) -> Option<Term> {
        match (p, t) {
            (Term::Var(y), _) if y == x => Some(t.clone()),
            (Term::App(f, ps), Term::App(g, ts)) if f == g && ps.len() == ts.len() => {
                ps.iter().zip(ts).find_map(|(p, t)| in_term(p, x, t))
            }
            _ => None,
        }
    }
    fn terms(ps: &[Term], ts: &[Term], x: &str) -> Option<Term> {
        ps.iter().zip(ts).find_map(|(p, t)| in_term(p, x, t))
    }
    use Formula::*;
    match (pattern, target) {
        (Atom(_, ps), Atom(_, ts)) => terms(ps, ts, x),
        (Equal(p1, p2), Equal(t1, t2)) => in_term(p1, x, t1).or_else(|| in_term(p2, x, t2)),
        (Not(p), Not(t)) => find_instance(p, x, t),
        (And(p1, p2), And(t1, t2)) | (Or(p1, p2), Or(t1, t2)) | (Implies(p1, p2), Implies(t1, t2)) => {
            find_instance(p1, x, t1).or_else(|| find_instance(p2, x, t2))
        }
        (Forall(y, p), Forall(_, t)) | (Exists(y, p), Exists(_, t)) if y != x => find_instance(p, x, t),
        _ => None,
    }
}

/// Is `target` an instance `body{x/t}`? Returns the instantiating term
/// (`None` inside `Some` when `x` does not occur free in `body`).
fn instance_of(body: &Formula, x: &str, target: &Formula) -> Option<Option<Term>> {
    if !body.has_free_var(x) {
        return body.alpha_eq(target).then_some(None);
    }
    let t = find_instance(body, x, target)?;
    body.instantiate(x, &t).alpha_eq(target).then_some(Some(t))
}

fn mentions(f: &Formula, eigen: &Term) -> bool {
    match eigen {
        Term::Param(a) => f.params().contains(a),
        Term::Var(x) => f.has_free_var(x),
        Term::App(..) => false,
    }
}

impl Checker<'_> {
    fn fail(&mut self, path: &str, message: impl Into<String>) {
        self.violations.push(Violation { path: path.to_string(), message: message.into() });
    }

    fn check_labels(&mut self, d: &Deduction) {
        let mut nodes = Vec::new();
        d.walk(&mut nodes);
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for n in nodes {
            for l in n.rule.discharges() {
                *counts.entry(l).or_default() += 1;
            }
        }
        for (l, n) in counts {
            if n > 1 {
                self.fail("0", format!("label {l} is introduced {n} times"));
            }
        }
    }

    /// Remove the assumptions labelled `label` from `open`, reporting any
    /// whose formula differs from `expected`.
    fn discharge(&mut self, open: Vec<Open>, label: &Option<String>, expected: &Formula) -> Vec<Open> {
        let Some(label) = label else { return open };
        let mut rest = Vec::new();
        for o in open {
            if o.label.as_deref() == Some(label) {
                if !o.formula.alpha_eq(expected) {
                    self.fail(&o.path, format!("assumption {label} is {} but its discharge expects {expected}", o.formula));
                }
            } else {
                rest.push(o);
            }
        }
        rest
    }

    fn check_instantiation(&mut self, path: &str, t: &Option<Term>) {
        if let Some(t @ Term::App(..)) = t {
            if !self.sys.unrestricted_instantiation {
                self.fail(path, format!("restricted instantiation: {t} is not a variable or parameter"));
            }
        }
    }

    fn check_eigen(&mut self, path: &str, d: &Deduction, inferred: Option<Term>) -> Option<Term> {
        let eigen = match (&d.param, inferred) {
            (Some(p), Some(t)) if *p != t => {
                self.fail(path, format!("declared proper parameter {p} does not match instance term {t}"));
                return None;
            }
            (Some(p), _) => p.clone(),
            (None, Some(t)) => t,
            (None, None) => return None,
        };
        match &eigen {
            Term::App(..) => {
                self.fail(path, format!("proper parameter {eigen} must be a parameter or variable"));
                return None;
            }
            Term::Var(_) if self.pure => {
                self.fail(path, format!("proper parameter {eigen} must be a parameter in a pure deduction"));
                return None;
            }
            _ => {}
        }
        Some(eigen)
    }

    fn check(&mut self, d: &Deduction, path: &str) -> Vec<Open> {
        let child_paths: Vec<String> = (0..d.children.len()).map(|i| format!("{path}.{i}")).collect();
        let mut opens: Vec<Vec<Open>> =
            d.children.iter().zip(&child_paths).map(|(c, p)| self.check(c, p)).collect();
        let want = d.rule.premises();
        if d.children.len() != want {
            self.fail(path, format!("{} expects {want} premise(s), found {}", d.rule.name(), d.children.len()));
            return opens.into_iter().flatten().collect();
        }
        let c = &d.conclusion;
        let prem: Vec<&Formula> = d.children.iter().map(|ch| &ch.conclusion).collect();
        let shape = |ok: bool, this: &mut Self, msg: &str| {
            if !ok {
                this.fail(path, format!("{}: {msg}", d.rule.name()));
            }
        };
        use Formula::*;
        match &d.rule {
            Rule::Assume(label) => {
                return vec![Open { label: label.clone(), formula: c.clone(), path: path.to_string() }];
            }
            Rule::Axiom(class) => {
                if !self.sys.allows(*class) {
                    self.fail(path, format!("axiom class {class} is not available in {}", self.sys.id));
                } else if !match_axiom(c, *class) {
                    self.fail(path, format!("{c} is not an instance of {class}"));
                }
                return Vec::new();
            }
            Rule::AndI => shape(*c == Formula::and(prem[0].clone(), prem[1].clone()), self, "conclusion must be the conjunction of the premises"),
            Rule::AndE1 => shape(matches!(prem[0], And(a, _) if **a == *c), self, "premise must be a conjunction with the conclusion on the left"),
            Rule::AndE2 => shape(matches!(prem[0], And(_, b) if **b == *c), self, "premise must be a conjunction with the conclusion on the right"),
            Rule::OrI1 => shape(matches!(c, Or(a, _) if **a == *prem[0]), self, "conclusion must be a disjunction with the premise on the left"),
            Rule::OrI2 => shape(matches!(c, Or(_, b) if **b == *prem[0]), self, "conclusion must be a disjunction with the premise on the right"),
            Rule::OrE(l1, l2) => {
                if let Or(a, b) = prem[0] {
                    shape(prem[1] == c && prem[2] == c, self, "minor premises must equal the conclusion");
                    opens[1] = self.discharge(std::mem::take(&mut opens[1]), l1, a);
                    opens[2] = self.discharge(std::mem::take(&mut opens[2]), l2, b);
                } else {
                    shape(false, self, "major premise must be a disjunction");
                }
            }
            Rule::ImpI(l) => {
                if let Implies(a, b) = c {
                    shape(**b == *prem[0], self, "premise must be the consequent");
                    opens[0] = self.discharge(std::mem::take(&mut opens[0]), l, a);
                } else {
                    shape(false, self, "conclusion must be an implication");
                }
            }
            Rule::ImpE => shape(
                matches!(prem[0], Implies(a, b) if **a == *prem[1] && **b == *c),
                self,
                "first premise must be an implication from the second premise to the conclusion",
            ),
            Rule::NotI(l) => {
                if let Not(a) = c {
                    shape(*prem[0] == Falsum, self, "premise must be false");
                    opens[0] = self.discharge(std::mem::take(&mut opens[0]), l, a);
                } else {
                    shape(false, self, "conclusion must be a negation");
                }
            }
            Rule::NotE => shape(
                matches!(prem[0], Not(a) if **a == *prem[1]) && *c == Falsum,
                self,
                "premises must be a negation and its body, concluding false",
            ),
            Rule::FalsumE => shape(*prem[0] == Falsum, self, "premise must be false"),
            Rule::Raa(l) => {
                shape(*prem[0] == Falsum, self, "premise must be false");
                opens[0] = self.discharge(std::mem::take(&mut opens[0]), l, &Formula::not(c.clone()));
            }
            Rule::ForallE | Rule::ExistsI => {
                let (quantified, instance) = if d.rule == Rule::ForallE { (prem[0], c) } else { (c, prem[0]) };
                let body = match (&d.rule, quantified) {
                    (Rule::ForallE, Forall(x, body)) | (Rule::ExistsI, Exists(x, body)) => Some((x, body)),
                    _ => None,
                };
                match body {
                    None => shape(false, self, "quantifier of the wrong kind"),
                    Some((x, body)) => match instance_of(body, x, instance) {
                        None => shape(false, self, &format!("{instance} is not an instance of {quantified}")),
                        Some(t) => self.check_instantiation(path, &t),
                    },
                }
            }
            Rule::ForallI => {
                if let Forall(x, body) = c {
                    match instance_of(body, x, prem[0]) {
                        None => shape(false, self, &format!("{} is not an instance of {c}", prem[0])),
                        Some(t) => {
                            if let Some(a) = self.check_eigen(path, d, t) {
                                if mentions(c, &a) {
                                    self.fail(path, format!("proper parameter {a} occurs in the conclusion"));
                                }
                                if let Some(o) = opens[0].iter().find(|o| mentions(&o.formula, &a)) {
                                    let msg = format!("proper parameter {a} occurs in open assumption {} at {}", o.formula, o.path);
                                    self.fail(path, msg);
                                }
                            }
                        }
                    }
                } else {
                    shape(false, self, "conclusion must be a universal formula");
                }
            }
            Rule::ExistsE(l) => {
                shape(prem[1] == c, self, "minor premise must equal the conclusion");
                if let Exists(x, body) = prem[0] {
                    match d.param.clone() {
                        None => self.fail(path, "exists-e needs param="),
                        Some(p) => {
                            if let Some(a) = self.check_eigen(path, d, Some(p)) {
                                let hyp = body.instantiate(x, &a);
                                opens[1] = self.discharge(std::mem::take(&mut opens[1]), l, &hyp);
                                if mentions(prem[0], &a) {
                                    self.fail(path, format!("proper parameter {a} occurs in the major premise"));
                                }
                                if mentions(c, &a) {
                                    self.fail(path, format!("proper parameter {a} occurs in the conclusion"));
                                }
                                if let Some(o) = opens[1].iter().find(|o| mentions(&o.formula, &a)) {
                                    let msg = format!("proper parameter {a} occurs in open assumption {} at {}", o.formula, o.path);
                                    self.fail(path, msg);
                                }
                            }
                        }
                    }
                } else {
                    shape(false, self, "major premise must be an existential formula");
                }
            }
        }
        opens.into_iter().flatten().collect()
    }
}
