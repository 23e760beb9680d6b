//! Closure of a branch's true literals under ground equality axioms over
//! the terms occurring on the branch. Every derived literal remembers the
//! axiom instance and the literals it was derived from.

use std::collections::{BTreeMap, HashMap};

use super::SignedFormula;
use crate::syntax::{Formula, Term};

#[derive(Clone, Debug)]
enum Why {
    Given,
    Axiom { instance: Formula, premises: Vec<usize> },
}

#[derive(Clone, Debug)]
struct Fact {
    literal: Formula,
    why: Why,
}

#[derive(Debug)]
pub(crate) struct EqClosure {
    pub terms: Vec<Term>,
    tid: HashMap<Term, usize>,
    facts: Vec<Fact>,
    eq: BTreeMap<(usize, usize), usize>,
    atoms: BTreeMap<Formula, usize>,
}

fn eq(a: &Term, b: &Term) -> Formula {
    Formula::eq(a.clone(), b.clone())
}

impl EqClosure {
    /// Saturate the true literals of `branch` over the subterms of its
    /// literals together with `params`.
    pub fn new(branch: &[SignedFormula], params: &[String]) -> EqClosure {
        let mut c = EqClosure {
            terms: Vec::new(),
            tid: HashMap::new(),
            facts: Vec::new(),
            eq: BTreeMap::new(),
            atoms: BTreeMap::new(),
        };
        for a in params {
            c.term(&Term::param(a));
        }
        for sf in branch.iter().filter(|sf| sf.is_literal()) {
            sf.formula.visit_terms(&mut |t| {
                for s in t.subterms() {
                    c.term(&s);
                }
            });
        }
        for sf in branch.iter().filter(|sf| sf.sign && sf.is_literal()) {
            c.add(sf.formula.clone(), Why::Given);
        }
        c.saturate();
        c
    }

    fn term(&mut self, t: &Term) -> usize {
        if let Some(&i) = self.tid.get(t) {
            return i;
        }
        self.terms.push(t.clone());
        self.tid.insert(t.clone(), self.terms.len() - 1);
        self.terms.len() - 1
    }

    fn add(&mut self, literal: Formula, why: Why) -> bool {
        let key = match &literal {
            Formula::Equal(l, r) => match (self.tid.get(l), self.tid.get(r)) {
                (Some(&i), Some(&j)) => Some((i, j)),
                _ => return false,
            },
            Formula::Atom(..) => None,
            _ => return false,
        };
        let id = self.facts.len();
        match key {
            Some(k) => {
                if self.eq.contains_key(&k) {
                    return false;
                }
                self.eq.insert(k, id);
            }
            None => {
                if self.atoms.contains_key(&literal) {
                    return false;
                }
                self.atoms.insert(literal.clone(), id);
            }
        }
        self.facts.push(Fact { literal, why });
        true
    }

    fn derive(&mut self, literal: Formula, instance: Formula, premises: Vec<usize>) -> bool {
        self.add(literal, Why::Axiom { instance, premises })
    }

    fn neighbours(&self, i: usize) -> Vec<(usize, usize)> {
        self.eq.range((i, 0)..(i + 1, 0)).map(|(&(_, j), &id)| (j, id)).collect()
    }

    fn saturate(&mut self) {
        for i in 0..self.terms.len() {
            let t = self.terms[i].clone();
            self.derive(eq(&t, &t), eq(&t, &t), Vec::new());
        }
        loop {
            let mut changed = false;
            let snapshot: Vec<((usize, usize), usize)> = self.eq.iter().map(|(k, v)| (*k, *v)).collect();
            for &((i, j), id) in &snapshot {
                let (r, s) = (self.terms[i].clone(), self.terms[j].clone());
                changed |= self.derive(eq(&s, &r), Formula::implies(eq(&r, &s), eq(&s, &r)), vec![id]);
            }
            let snapshot: Vec<((usize, usize), usize)> = self.eq.iter().map(|(k, v)| (*k, *v)).collect();
            for &((i, j), id1) in &snapshot {
                for (k, id2) in self.neighbours(j) {
                    let (r, s, u) = (self.terms[i].clone(), self.terms[j].clone(), self.terms[k].clone());
                    let instance = Formula::implies(eq(&r, &s), Formula::implies(eq(&s, &u), eq(&r, &u)));
                    changed |= self.derive(eq(&r, &u), instance, vec![id1, id2]);
                }
            }
            changed |= self.congruence_f();
            changed |= self.congruence_p();
            if !changed {
                break;
            }
        }
    }

    fn congruence_f(&mut self) -> bool {
        let mut changed = false;
        for u in 0..self.terms.len() {
            for v in 0..self.terms.len() {
                if u == v || self.eq.contains_key(&(u, v)) {
                    continue;
                }
                let (Term::App(f, xs), Term::App(g, ys)) = (&self.terms[u], &self.terms[v]) else { continue };
                if f != g || xs.len() != ys.len() || xs.is_empty() {
                    continue;
                }
                let premises: Option<Vec<usize>> =
                    xs.iter().zip(ys).map(|(x, y)| self.eq.get(&(self.tid[x], self.tid[y])).copied()).collect();
                if let Some(premises) = premises {
                    let hyp = Formula::conj(xs.iter().zip(ys).map(|(x, y)| eq(x, y)).collect()).unwrap();
                    let (l, r) = (self.terms[u].clone(), self.terms[v].clone());
                    changed |= self.derive(eq(&l, &r), Formula::implies(hyp, eq(&l, &r)), premises);
                }
            }
        }
        changed
    }

    fn congruence_p(&mut self) -> bool {
        let mut changed = false;
        let snapshot: Vec<(Formula, usize)> = self.atoms.iter().map(|(k, v)| (k.clone(), *v)).collect();
        for (atom, id) in snapshot {
            let Formula::Atom(p, rs) = &atom else { continue };
            let mut partial: Vec<(Vec<Term>, Vec<usize>)> = vec![(Vec::new(), Vec::new())];
            for r in rs {
                let mut next = Vec::new();
                for (ss, ids) in &partial {
                    for (j, eid) in self.neighbours(self.tid[r]) {
                        let mut ss = ss.clone();
                        ss.push(self.terms[j].clone());
                        let mut ids = ids.clone();
                        ids.push(eid);
                        next.push((ss, ids));
                    }
                }
                partial = next;
            }
            for (ss, mut premises) in partial {
                if &ss == rs {
                    continue;
                }
                let target = Formula::Atom(p.clone(), ss.clone());
                let hyp = Formula::conj(rs.iter().zip(&ss).map(|(r, s)| eq(r, s)).collect()).unwrap();
                premises.push(id);
                let instance = Formula::implies(hyp, Formula::implies(atom.clone(), target.clone()));
                changed |= self.derive(target, instance, premises);
            }
        }
        changed
    }

    fn fact_of(&self, literal: &Formula) -> Option<usize> {
        match literal {
            Formula::Equal(l, r) => {
                let (i, j) = (self.tid.get(l)?, self.tid.get(r)?);
                self.eq.get(&(*i, *j)).copied()
            }
            Formula::Atom(..) => self.atoms.get(literal).copied(),
            _ => None,
        }
    }

    #[cfg(test)]
    pub fn holds(&self, literal: &Formula) -> bool {
        self.fact_of(literal).is_some()
    }

    /// First F-literal of `branch` whose formula is derivable, with the
    /// axiom steps (instance, derived literal) needed to derive it.
    pub fn contradiction(&self, branch: &[SignedFormula]) -> Option<(usize, Vec<(Formula, Formula)>)> {
        let (idx, id) = branch
            .iter()
            .enumerate()
            .filter(|(_, sf)| !sf.sign && sf.is_literal())
            .find_map(|(i, sf)| self.fact_of(&sf.formula).map(|id| (i, id)))?;
        Some((idx, self.derivation(id)))
    }

    fn derivation(&self, id: usize) -> Vec<(Formula, Formula)> {
        let mut needed = vec![false; self.facts.len()];
        let mut stack = vec![id];
        while let Some(i) = stack.pop() {
            if needed[i] {
                continue;
            }
            needed[i] = true;
            if let Why::Axiom { premises, .. } = &self.facts[i].why {
                stack.extend(premises);
            }
        }
        (0..self.facts.len())
            .filter(|&i| needed[i])
            .filter_map(|i| match &self.facts[i].why {
                Why::Axiom { instance, .. } => Some((instance.clone(), self.facts[i].literal.clone())),
                Why::Given => None,
            })
            .collect()
    }

    /// True equalities `r = s` with `r != s`.
    pub fn proper_equalities(&self) -> Vec<(Term, Term)> {
        self.eq.keys().filter(|(i, j)| i != j).map(|&(i, j)| (self.terms[i].clone(), self.terms[j].clone())).collect()
    }

    pub fn true_atoms(&self) -> impl Iterator<Item = &Formula> {
        self.atoms.keys()
    }
}
