use std::collections::BTreeSet;

use super::certificate::{Arm, End};
use super::equality::EqClosure;
use super::{
    extract_countermodel, verify_certificate, Branch, CertNode, Certificate, DecideError, Kind, SignedFormula,
    SplitKind, Step,
};
use crate::deduction::SystemId;
use crate::syntax::{Formula, Signature};
use crate::valuation::{check_equality_valuation, eval, EvalMode, TvValuation, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Rule applications over the whole tableau.
    pub max_steps: usize,
    /// Distinct parameters on any one branch.
    pub max_params: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_steps: 10_000, max_params: 8 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub steps: usize,
    pub closed_branches: usize,
    pub max_params_seen: usize,
    /// Why the search gave up.
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq)]
pub enum DecideOutcome {
    Proved(Certificate),
    Countermodel(TvValuation),
    Exhausted(Stats),
}

enum Stop {
    Countermodel(Box<TvValuation>),
    /// The whole search is over budget.
    OutOfSteps,
    /// This branch cannot be finished; siblings may still yield a
    /// countermodel.
    Unfinished(String),
}

#[derive(Clone)]
struct State {
    branch: Branch,
    /// Alpha, beta and delta formulas already expanded.
    done: Vec<bool>,
    /// Parameters each gamma formula has been instantiated with.
    gamma: Vec<BTreeSet<String>>,
    /// Branch length when the equality closure was last computed.
    eq_checked: usize,
}

impl State {
    fn push(&mut self, sf: SignedFormula) -> bool {
        let new = self.branch.push(sf);
        if new {
            self.done.push(false);
            self.gamma.push(BTreeSet::new());
        }
        new
    }
}

struct Prover<'a> {
    sig: &'a Signature,
    premises: &'a [Formula],
    goal: &'a Formula,
    system: SystemId,
    budget: Budget,
    stats: Stats,
}

/// Run the systematic tableau for `premises |- goal`.
pub fn decide(
    sig: &Signature,
    premises: &[Formula],
    goal: &Formula,
    system: SystemId,
    budget: Budget,
) -> Result<DecideOutcome, DecideError> {
    if !matches!(system, SystemId::Nc | SystemId::NcEq) {
        return Err(DecideError::UnsupportedSystem(system));
    }
    if budget.max_steps == 0 || budget.max_params == 0 {
        return Err(DecideError::EmptyBudget);
    }
    if let Some(f) = premises.iter().chain([goal]).find(|f| !f.is_pure()) {
        return Err(DecideError::NotPure(f.clone()));
    }
    let mut prover = Prover { sig, premises, goal, system, budget, stats: Stats::default() };
    let branch = Branch::new(premises.iter().map(|p| SignedFormula::t(p.clone())).chain([SignedFormula::f(goal.clone())]));
    let n = branch.len();
    let state = State { branch, done: vec![false; n], gamma: vec![BTreeSet::new(); n], eq_checked: 0 };
    Ok(match prover.expand(state) {
        Ok(root) => {
            let cert = Certificate { system, premises: premises.to_vec(), goal: goal.clone(), root };
            if verify_certificate(&cert, premises, goal) {
                DecideOutcome::Proved(cert)
            } else {
                prover.stats.reason = "internal error: certificate failed to replay".into();
                DecideOutcome::Exhausted(prover.stats)
            }
        }
        Err(Stop::Countermodel(v)) => DecideOutcome::Countermodel(*v),
        Err(Stop::OutOfSteps) => {
            prover.stats.reason = format!("step budget of {} exhausted", budget.max_steps);
            DecideOutcome::Exhausted(prover.stats)
        }
        Err(Stop::Unfinished(reason)) => {
            prover.stats.reason = reason;
            DecideOutcome::Exhausted(prover.stats)
        }
    })
}

impl Prover<'_> {
    fn fresh(&self, b: &Branch) -> String {
        let taken = |a: &str| {
            b.params().iter().any(|p| p == a)
                || self.sig.function_arity(a).is_some()
                || self.sig.relation_arity(a).is_some()
        };
        let declared = self.sig.params().iter().cloned();
        let letters = ('a'..='z').map(|c| c.to_string());
        let numbered = (1..).flat_map(|i| ('a'..='z').map(move |c| format!("{c}{i}")));
        declared.chain(letters).chain(numbered).find(|a| !taken(a)).expect("unbounded supply")
    }

    fn tick(&mut self) -> Result<(), Stop> {
        self.stats.steps += 1;
        if self.stats.steps > self.budget.max_steps {
            return Err(Stop::OutOfSteps);
        }
        Ok(())
    }

    fn first(&self, s: &State, kind: Kind) -> Option<usize> {
        (0..s.branch.len()).find(|&i| !s.done[i] && s.branch.formulas()[i].kind() == kind)
    }

    fn expand(&mut self, mut s: State) -> Result<CertNode, Stop> {
        let mut steps = Vec::new();
        loop {
            self.stats.max_params_seen = self.stats.max_params_seen.max(s.branch.params().len());
            if let Some((i, j)) = s.branch.closing_pair() {
                self.stats.closed_branches += 1;
                return Ok(CertNode { steps, end: End::Close(i, j) });
            }
            if self.system == SystemId::NcEq && s.eq_checked < s.branch.len() {
                s.eq_checked = s.branch.len();
                let closure = EqClosure::new(s.branch.formulas(), s.branch.params());
                if let Some((f_idx, derivation)) = closure.contradiction(s.branch.formulas()) {
                    for (instance, literal) in derivation {
                        self.tick()?;
                        let added = SignedFormula::t(literal);
                        s.push(added.clone());
                        steps.push(Step::Equality { instance, added });
                    }
                    let target = SignedFormula::t(s.branch.formulas()[f_idx].formula.clone());
                    let t_idx = s.branch.formulas().iter().position(|sf| *sf == target).expect("derived");
                    self.stats.closed_branches += 1;
                    return Ok(CertNode { steps, end: End::Close(t_idx, f_idx) });
                }
            }
            if s.branch.params().len() > self.budget.max_params {
                return Err(Stop::Unfinished(format!("parameter budget of {} exhausted", self.budget.max_params)));
            }
            if let Some(i) = self.first(&s, Kind::Alpha) {
                s.done[i] = true;
                let added: Vec<SignedFormula> =
                    s.branch.formulas()[i].components().into_iter().filter(|c| !s.branch.contains(c)).collect();
                if !added.is_empty() {
                    self.tick()?;
                    for a in &added {
                        s.push(a.clone());
                    }
                    steps.push(Step::Alpha { from: i, added });
                }
                continue;
            }
            if let Some(i) = self.first(&s, Kind::Delta) {
                s.done[i] = true;
                let sf = s.branch.formulas()[i].clone();
                let params = s.branch.params().to_vec();
                if params.iter().any(|a| s.branch.contains(&sf.instance(a).unwrap())) {
                    continue;
                }
                let fresh = self.fresh(&s.branch);
                self.tick()?;
                if params.is_empty() {
                    let added = sf.instance(&fresh).unwrap();
                    s.push(added.clone());
                    steps.push(Step::Delta { from: i, param: fresh, added });
                    continue;
                }
                let choices: Vec<String> = params.into_iter().chain([fresh]).collect();
                let arms = self.split(&s, choices.into_iter().map(|a| (Some(a.clone()), sf.instance(&a).unwrap())))?;
                return Ok(CertNode { steps, end: End::Split { kind: SplitKind::Delta, from: i, arms } });
            }
            if let Some(i) = self.first(&s, Kind::Beta) {
                s.done[i] = true;
                let comps = s.branch.formulas()[i].components();
                if comps.iter().any(|c| s.branch.contains(c)) {
                    continue;
                }
                self.tick()?;
                let arms = self.split(&s, comps.into_iter().map(|c| (None, c)))?;
                return Ok(CertNode { steps, end: End::Split { kind: SplitKind::Beta, from: i, arms } });
            }
            if let Some((i, a)) = self.next_gamma(&s) {
                s.gamma[i].insert(a.clone());
                let added = s.branch.formulas()[i].instance(&a).unwrap();
                if !s.branch.contains(&added) {
                    self.tick()?;
                    s.push(added.clone());
                    steps.push(Step::Gamma { from: i, param: a, added });
                }
                continue;
            }
            return Err(self.saturated(&s.branch));
        }
    }

    /// Gamma formulas are instantiated in branch order, each with every
    /// branch parameter in order. A branch without parameters gets one.
    fn next_gamma(&self, s: &State) -> Option<(usize, String)> {
        let gammas: Vec<usize> = (0..s.branch.len()).filter(|&i| s.branch.formulas()[i].kind() == Kind::Gamma).collect();
        if s.branch.params().is_empty() {
            // A vacuous instance adds no parameter, so move on to the next
            // gamma formula rather than repeating it.
            let fresh = self.fresh(&s.branch);
            return gammas.into_iter().find(|&i| !s.gamma[i].contains(&fresh)).map(|i| (i, fresh));
        }
        gammas.into_iter().find_map(|i| {
            s.branch.params().iter().find(|a| !s.gamma[i].contains(*a)).map(|a| (i, a.clone()))
        })
    }

    fn split(
        &mut self,
        s: &State,
        arms: impl Iterator<Item = (Option<String>, SignedFormula)>,
    ) -> Result<Vec<Arm>, Stop> {
        let mut out = Vec::new();
        let mut unfinished = None;
        for (param, added) in arms {
            let mut child = s.clone();
            child.push(added.clone());
            match self.expand(child) {
                Ok(node) => out.push(Arm { param, added, node }),
                Err(Stop::Unfinished(reason)) => {
                    unfinished.get_or_insert(reason);
                }
                Err(stop) => return Err(stop),
            }
        }
        match unfinished {
            Some(reason) => Err(Stop::Unfinished(reason)),
            None => Ok(out),
        }
    }

    fn saturated(&self, branch: &Branch) -> Stop {
        let v = match extract_countermodel(branch, self.sig, self.system) {
            Ok(v) => v,
            Err(e) => return Stop::Unfinished(format!("open branch without a finite countermodel: {e}")),
        };
        let value = |f: &Formula| eval(&v, f, EvalMode::ParamQuant).ok();
        let premises_hold = self.premises.iter().all(|p| value(p) == Some(Verdict::True));
        let goal_fails = value(self.goal) == Some(Verdict::False);
        let equality_ok = self.system != SystemId::NcEq || check_equality_valuation(&v, 1).pass();
        if premises_hold && goal_fails && equality_ok {
            Stop::Countermodel(Box::new(v))
        } else {
            Stop::Unfinished("open branch whose valuation failed re-verification".into())
        }
    }
}
