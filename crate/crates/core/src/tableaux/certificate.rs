use std::fmt;

use super::{Branch, Kind, SignedFormula};
use crate::deduction::{match_equality_schema, SystemId};
use crate::syntax::Formula;

/// A non-branching expansion step. `from` indexes the branch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    Alpha { from: usize, added: Vec<SignedFormula> },
    Gamma { from: usize, param: String, added: SignedFormula },
    /// Instance at a parameter not yet on the branch.
    Delta { from: usize, param: String, added: SignedFormula },
    /// `T` of the consequent of a ground equality axiom whose hypotheses
    /// are all true on the branch.
    Equality { instance: Formula, added: SignedFormula },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitKind {
    Beta,
    /// One arm per parameter already on the branch plus a fresh one.
    Delta,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arm {
    pub param: Option<String>,
    pub added: SignedFormula,
    pub node: CertNode,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum End {
    /// Branch indices of `T X` and `F X`, or twice the index of `T false`.
    Close(usize, usize),
    Split { kind: SplitKind, from: usize, arms: Vec<Arm> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertNode {
    pub steps: Vec<Step>,
    pub end: End,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub system: SystemId,
    pub premises: Vec<Formula>,
    pub goal: Formula,
    pub root: CertNode,
}

impl Certificate {
    /// Number of closed branches.
    pub fn leaves(&self) -> usize {
        fn count(n: &CertNode) -> usize {
            match &n.end {
                End::Close(..) => 1,
                End::Split { arms, .. } => arms.iter().map(|a| count(&a.node)).sum(),
            }
        }
        count(&self.root)
    }

    fn initial_branch(premises: &[Formula], goal: &Formula) -> Branch {
        Branch::new(premises.iter().map(|p| SignedFormula::t(p.clone())).chain([SignedFormula::f(goal.clone())]))
    }
}

/// Split an equality axiom instance into its hypotheses and consequent.
fn peel(f: &Formula) -> (Vec<&Formula>, &Formula) {
    let mut hyps = Vec::new();
    let mut cur = f;
    while let Formula::Implies(a, b) = cur {
        hyps.extend(a.conjuncts());
        cur = b;
    }
    (hyps, cur)
}

fn replay_step(step: &Step, b: &mut Branch, system: SystemId) -> bool {
    let get = |i: usize| b.formulas().get(i).cloned();
    match step {
        Step::Alpha { from, added } => {
            let Some(sf) = get(*from) else { return false };
            if sf.kind() != Kind::Alpha {
                return false;
            }
            let comps = sf.components();
            if !added.iter().all(|a| comps.contains(a)) {
                return false;
            }
            for a in added {
                b.push(a.clone());
            }
        }
        Step::Gamma { from, param, added } => {
            let Some(sf) = get(*from) else { return false };
            if sf.kind() != Kind::Gamma || sf.instance(param).as_ref() != Some(added) {
                return false;
            }
            b.push(added.clone());
        }
        Step::Delta { from, param, added } => {
            let Some(sf) = get(*from) else { return false };
            if sf.kind() != Kind::Delta || b.params().contains(param) || sf.instance(param).as_ref() != Some(added) {
                return false;
            }
            b.push(added.clone());
        }
        Step::Equality { instance, added } => {
            if system != SystemId::NcEq || !instance.free_vars().is_empty() || match_equality_schema(instance).is_none() {
                return false;
            }
            let (hyps, concl) = peel(instance);
            if !hyps.iter().all(|h| b.contains(&SignedFormula::t((*h).clone()))) || *added != SignedFormula::t(concl.clone()) {
                return false;
            }
            b.push(added.clone());
        }
    }
    true
}

fn replay(node: &CertNode, mut b: Branch, system: SystemId) -> bool {
    for step in &node.steps {
        if !replay_step(step, &mut b, system) {
            return false;
        }
    }
    match &node.end {
        End::Close(i, j) => {
            let (Some(x), Some(y)) = (b.formulas().get(*i), b.formulas().get(*j)) else { return false };
            if i == j {
                x.sign && x.formula == Formula::Falsum
            } else {
                x.formula == y.formula && x.sign != y.sign
            }
        }
        End::Split { kind, from, arms } => {
            let Some(sf) = b.formulas().get(*from).cloned() else { return false };
            let shape_ok = match kind {
                SplitKind::Beta => {
                    let comps = sf.components();
                    sf.kind() == Kind::Beta
                        && arms.len() == comps.len()
                        && arms.iter().zip(&comps).all(|(arm, c)| arm.param.is_none() && arm.added == *c)
                }
                SplitKind::Delta => {
                    sf.kind() == Kind::Delta
                        && arms.iter().all(|arm| match &arm.param {
                            Some(a) => sf.instance(a).as_ref() == Some(&arm.added),
                            None => false,
                        })
                        && arms.iter().any(|arm| !b.params().contains(arm.param.as_ref().unwrap()))
                }
            };
            shape_ok
                && arms.iter().all(|arm| {
                    let mut nb = b.clone();
                    nb.push(arm.added.clone());
                    replay(&arm.node, nb, system)
                })
        }
    }
}

/// Replay every step of `cert` from the root `T premises, F goal` and
/// confirm that each leaf closes.
pub fn verify_certificate(cert: &Certificate, premises: &[Formula], goal: &Formula) -> bool {
    if cert.premises != premises || cert.goal != *goal {
        return false;
    }
    if !matches!(cert.system, SystemId::Nc | SystemId::NcEq) {
        return false;
    }
    if !premises.iter().chain([goal]).all(Formula::is_pure) {
        return false;
    }
    replay(&cert.root, Certificate::initial_branch(premises, goal), cert.system)
}

fn write_node(f: &mut fmt::Formatter<'_>, node: &CertNode, depth: usize, mut next: usize) -> fmt::Result {
    let pad = "  ".repeat(depth);
    let mut added = |f: &mut fmt::Formatter<'_>, sfs: &[&SignedFormula]| -> fmt::Result {
        let parts: Vec<String> = sfs
            .iter()
            .map(|sf| {
                let s = format!("[{next}] {sf}");
                next += 1;
                s
            })
            .collect();
        writeln!(f, " : {}", parts.join(" ; "))
    };
    for step in &node.steps {
        match step {
            Step::Alpha { from, added: a } => {
                write!(f, "{pad}alpha {from}")?;
                added(f, &a.iter().collect::<Vec<_>>())?;
            }
            Step::Gamma { from, param, added: a } => {
                write!(f, "{pad}gamma {from} @{param}")?;
                added(f, &[a])?;
            }
            Step::Delta { from, param, added: a } => {
                write!(f, "{pad}delta {from} @{param}")?;
                added(f, &[a])?;
            }
            Step::Equality { instance, added: a } => {
                write!(f, "{pad}eq {instance}")?;
                added(f, &[a])?;
            }
        }
    }
    match &node.end {
        End::Close(i, j) => writeln!(f, "{pad}close {i} {j}"),
        End::Split { kind, from, arms } => {
            let name = match kind {
                SplitKind::Beta => "beta",
                SplitKind::Delta => "delta-split",
            };
            writeln!(f, "{pad}{name} {from}")?;
            for arm in arms {
                match &arm.param {
                    Some(a) => write!(f, "{pad}  branch @{a} : [{next}] {}", arm.added)?,
                    None => write!(f, "{pad}  branch : [{next}] {}", arm.added)?,
                }
                writeln!(f)?;
                write_node(f, &arm.node, depth + 2, next + 1)?;
            }
            Ok(())
        }
    }
}

/// Indented expansion tree. Formulas added to a branch are numbered in
/// order; `close i j` names the clashing pair.
impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "certificate {}", self.system)?;
        let root = Certificate::initial_branch(&self.premises, &self.goal);
        for (i, sf) in root.formulas().iter().enumerate() {
            writeln!(f, "  [{i}] {sf}")?;
        }
        write_node(f, &self.root, 0, root.len())
    }
}
