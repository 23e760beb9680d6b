//! Bounded decision procedures: denotation, the equality schemata and the
//! strictness axioms, all checked over pure terms up to a given depth.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;

use super::{AtomValuation, EvalError};
use crate::syntax::{definedness, enumerate::tuples, enumerate_pure_terms, Formula, Signature, Term};

/// Stored violations are capped; `total` keeps counting.
const MAX_LISTED: usize = 1000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// Schema or axiom name, e.g. `Symm` or `axiom 3`.
    pub schema: String,
    pub instance: Formula,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.schema, self.instance)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemaReport {
    pub check: &'static str,
    pub depth: usize,
    pub terms: usize,
    pub violations: Vec<Violation>,
    pub total: usize,
}

impl SchemaReport {
    fn new(check: &'static str, depth: usize, terms: usize) -> Self {
        SchemaReport { check, depth, terms, violations: Vec::new(), total: 0 }
    }

    pub fn pass(&self) -> bool {
        self.total == 0
    }

    fn record(&mut self, schema: &str, instance: impl FnOnce() -> Formula) {
        self.total += 1;
        if self.violations.len() < MAX_LISTED {
            self.violations.push(Violation { schema: schema.to_string(), instance: instance() });
        }
    }
}

impl fmt::Display for SchemaReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} check at depth {} over {} terms: ", self.check, self.depth, self.terms)?;
        if self.pass() {
            return write!(f, "pass");
        }
        write!(f, "{} violation(s)", self.total)?;
        for v in &self.violations {
            write!(f, "\n  {v}")?;
        }
        if self.total > self.violations.len() {
            write!(f, "\n  ... {} more", self.total - self.violations.len())?;
        }
        Ok(())
    }
}

fn domain_sig(v: &dyn AtomValuation, sig: &Signature) -> Signature {
    sig.with_params(v.domain().to_vec()).unwrap_or_else(|_| sig.clone())
}

/// `t` is denoting iff `v(@a = t) = t` for some domain parameter `a`.
pub fn is_denoting(v: &dyn AtomValuation, t: &Term) -> Result<bool, EvalError> {
    if let Some(x) = t.vars().into_iter().next() {
        return Err(EvalError::NotPure(x));
    }
    Ok(representative(v, t).is_some())
}

/// The first domain parameter equal to `t` under `v`.
pub fn representative(v: &dyn AtomValuation, t: &Term) -> Option<String> {
    v.domain().iter().find(|a| v.atom(&Formula::eq(Term::Param((*a).clone()), t.clone()))).cloned()
}

/// Every constant denotes and every function applied to domain
/// parameters denotes. For a valuation with equality this is equivalent to
/// every pure term denoting.
pub fn is_totally_denoting(v: &dyn AtomValuation) -> bool {
    let params: Vec<Term> = v.domain().iter().map(|a| Term::Param(a.clone())).collect();
    v.signature().functions().iter().all(|(f, n)| {
        tuples(&params, *n).into_iter().all(|args| representative(v, &Term::App(f.clone(), args)).is_some())
    })
}

/// Rfl, Symm, Trans, Cng_f and Cng_p over all pure terms of depth at most
/// `depth`.
pub fn check_equality_valuation(v: &dyn AtomValuation, depth: usize) -> SchemaReport {
    check_equality_valuation_over(v, v.signature(), depth)
}

/// As [`check_equality_valuation`], with terms and schema instances drawn
/// from `sig` instead of the valuation's own signature.
pub fn check_equality_valuation_over(v: &dyn AtomValuation, sig: &Signature, depth: usize) -> SchemaReport {
    let terms = enumerate_pure_terms(&domain_sig(v, sig), depth);
    let n = terms.len();
    let mut report = SchemaReport::new("equality", depth, n);
    let eq: Vec<Vec<bool>> = terms
        .iter()
        .map(|r| terms.iter().map(|s| v.atom(&Formula::eq(r.clone(), s.clone()))).collect())
        .collect();
    let e = |i: usize, j: usize| Formula::eq(terms[i].clone(), terms[j].clone());
    for i in 0..n {
        if !eq[i][i] {
            report.record("Rfl", || e(i, i));
        }
    }
    for i in 0..n {
        for j in 0..n {
            if eq[i][j] && !eq[j][i] {
                report.record("Symm", || Formula::implies(e(i, j), e(j, i)));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if !eq[i][j] {
                continue;
            }
            for k in 0..n {
                if eq[j][k] && !eq[i][k] {
                    report.record("Trans", || Formula::implies(e(i, j), Formula::implies(e(j, k), e(i, k))));
                }
            }
        }
    }
    // neighbours[i] = indices j with v(t_i = t_j)
    let neighbours: Vec<Vec<usize>> = eq.iter().map(|row| (0..n).filter(|&j| row[j]).collect()).collect();
    let indices: Vec<usize> = (0..n).collect();
    let index_tuples = |arity: usize| -> Vec<Vec<usize>> { tuples(&indices, arity) };
    let congruent_partners = |rs: &[usize]| -> Vec<Vec<usize>> {
        let mut acc: Vec<Vec<usize>> = vec![Vec::new()];
        for &r in rs {
            acc = acc
                .into_iter()
                .flat_map(|prefix| {
                    neighbours[r].iter().map(move |&s| {
                        let mut p = prefix.clone();
                        p.push(s);
                        p
                    })
                })
                .collect();
        }
        acc
    };
    let hyp = |rs: &[usize], ss: &[usize]| Formula::conj(rs.iter().zip(ss).map(|(&r, &s)| e(r, s)).collect());
    let app = |f: &str, idx: &[usize]| Term::App(f.to_string(), idx.iter().map(|&i| terms[i].clone()).collect());
    for (f, arity) in sig.functions().into_iter().filter(|(_, a)| *a > 0) {
        for rs in index_tuples(arity) {
            let lhs = app(&f, &rs);
            for ss in congruent_partners(&rs) {
                let rhs = app(&f, &ss);
                if !v.atom(&Formula::eq(lhs.clone(), rhs.clone())) {
                    report.record("Cng_f", || {
                        Formula::implies(hyp(&rs, &ss).unwrap_or(Formula::Falsum), Formula::eq(lhs.clone(), rhs))
                    });
                }
            }
        }
    }
    for (p, arity) in sig.relations() {
        let atom = |idx: &[usize]| Formula::Atom(p.clone(), idx.iter().map(|&i| terms[i].clone()).collect());
        for rs in index_tuples(*arity) {
            if !v.atom(&atom(&rs)) {
                continue;
            }
            for ss in congruent_partners(&rs) {
                if !v.atom(&atom(&ss)) {
                    report.record("Cng_p", || {
                        Formula::implies(
                            hyp(&rs, &ss).unwrap_or(Formula::Falsum),
                            Formula::implies(atom(&rs), atom(&ss)),
                        )
                    });
                }
            }
        }
    }
    report
}

/// Strictness axioms over pure terms up to `depth`:
/// 1) constants denote; 2) `f(t..)!` implies each `t!`;
/// 3) `p(t..)` implies each `t!` for relations other than equality.
pub fn check_strict(v: &dyn AtomValuation, depth: usize) -> SchemaReport {
    check_strict_over(v, v.signature(), depth)
}

pub fn check_strict_over(v: &dyn AtomValuation, sig: &Signature, depth: usize) -> SchemaReport {
    let terms = enumerate_pure_terms(&domain_sig(v, sig), depth);
    let mut report = SchemaReport::new("strictness", depth, terms.len());
    let memo: RefCell<HashMap<Term, bool>> = RefCell::new(HashMap::new());
    let denotes = |t: &Term| -> bool {
        if let Some(b) = memo.borrow().get(t) {
            return *b;
        }
        let b = representative(v, t).is_some();
        memo.borrow_mut().insert(t.clone(), b);
        b
    };
    let all_defined = |args: &[Term]| Formula::conj(args.iter().map(definedness).collect());
    for c in sig.constants() {
        let t = Term::App(c, Vec::new());
        if !denotes(&t) {
            report.record("axiom 1", || definedness(&t));
        }
    }
    for (f, arity) in sig.functions().into_iter().filter(|(_, a)| *a > 0) {
        for args in tuples(&terms, arity) {
            let t = Term::App(f.clone(), args.clone());
            if denotes(&t) && !args.iter().all(&denotes) {
                report.record("axiom 2", || Formula::implies(definedness(&t), all_defined(&args).unwrap()));
            }
        }
    }
    for (p, arity) in sig.relations() {
        for args in tuples(&terms, *arity) {
            let atom = Formula::Atom(p.clone(), args.clone());
            if v.atom(&atom) && !args.iter().all(&denotes) {
                report.record("axiom 3", || Formula::implies(atom.clone(), all_defined(&args).unwrap()));
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::{holds, TvValuation};
    use super::*;
    use crate::syntax::enumerate::for_each_tuple;

    #[test]
    fn denotation_examples() {
        let (_, v0) = v0();
        assert!(is_denoting(&v0, &Term::param("a")).unwrap());
        assert_eq!(representative(&v0, &Term::param("b")), Some("b".into()));
        assert_eq!(representative(&v0, &Term::param("a")), Some("a".into()));
        let (_, c) = const_c();
        assert!(!is_denoting(&c, &Term::constant("c")).unwrap());
        assert_eq!(representative(&c, &Term::constant("c")), None);
        let (_, t) = tower();
        assert!(!is_denoting(&t, &Term::app("f", vec![Term::param("a")])).unwrap());
        assert!(is_denoting(&t, &Term::var("x")).is_err());
    }

    #[test]
    fn total_denotation() {
        assert!(is_totally_denoting(&v0().1));
        assert!(!is_totally_denoting(&const_c().1));
        assert!(!is_totally_denoting(&tower().1));
    }

    #[test]
    fn equality_examples() {
        assert!(check_equality_valuation(&v0().1, 3).pass());
        assert!(check_equality_valuation(&tower().1, 3).pass());
        assert!(check_equality_valuation(&const_c().1, 2).pass());
        let sig = Signature::parse(V0_SIG).unwrap();
        let broken = TvValuation::parse(
            "domain a b\ndefault f\natom @a = @a : t\natom @b = @b : t\natom @a = @b : t\natom @b = @a : f\n",
            &sig,
        )
        .unwrap();
        let r = check_equality_valuation(&broken, 1);
        assert!(!r.pass());
        assert!(r.violations.iter().any(|v| v.schema == "Symm" && v.instance.to_string() == "@a = @b -> @b = @a"));
    }

    #[test]
    fn congruence_failures_are_found() {
        // a = b but p(a,a) and not p(b,a)
        let sig = Signature::parse(V0_SIG).unwrap();
        let v = TvValuation::parse("domain a b\ndefault t\natom p(@b,@a) = f\n", &sig).unwrap();
        let r = check_equality_valuation(&v, 0);
        assert!(r.violations.iter().any(|v| v.schema == "Cng_p"));
    }

    #[test]
    fn strictness_examples() {
        assert!(check_strict(&v0().1, 2).pass());
        let r = check_strict(&const_c().1, 1);
        assert!(r.violations.iter().any(|v| v.schema == "axiom 1"));
        assert!(r.violations.iter().any(|v| v.schema == "axiom 3" && v.instance.to_string().starts_with("p(c)")));
        let r = check_strict(&tower().1, 2);
        assert!(r
            .violations
            .iter()
            .any(|v| v.schema == "axiom 3" && v.instance.to_string().starts_with("p(@a, f(@a)) ->")));
    }

    /// Every substitutivity instance `r = s -> (A{v/r} -> A{v/s})` over
    /// atoms of the signature holds in a valuation passing the equality
    /// check one level deeper.
    fn sbst_instances_hold(v: &dyn AtomValuation, depth: usize) {
        assert!(check_equality_valuation(v, depth + 1).pass());
        let sig = domain_sig(v, v.signature());
        let terms = enumerate_pure_terms(&sig, depth);
        let x = Term::var("v");
        let mut templates: Vec<Formula> = Vec::new();
        let slots: Vec<Term> = terms.iter().cloned().chain(std::iter::once(x.clone())).collect();
        for (p, arity) in sig.relations() {
            for_each_tuple(slots.len(), *arity, |idx| {
                let args: Vec<Term> = idx.iter().map(|&i| slots[i].clone()).collect();
                if args.contains(&x) {
                    templates.push(Formula::Atom(p.clone(), args));
                }
            });
        }
        for l in &slots {
            for r in &slots {
                if l == &x || r == &x {
                    templates.push(Formula::eq(l.clone(), r.clone()));
                }
            }
        }
        for g in &templates {
            for r in &terms {
                for s in &terms {
                    let inst = Formula::implies(
                        Formula::eq(r.clone(), s.clone()),
                        Formula::implies(g.instantiate("v", r), g.instantiate("v", s)),
                    );
                    assert!(holds(v, &inst).unwrap(), "{inst}");
                }
            }
        }
    }

    #[test]
    fn substitutivity_follows_from_the_equality_check() {
        sbst_instances_hold(&v0().1, 2);
        sbst_instances_hold(&tower().1, 2);
        sbst_instances_hold(&const_c().1, 1);
    }

    #[test]
    fn totally_denoting_means_every_enumerated_term_denotes() {
        let v = v0().1;
        assert!(is_totally_denoting(&v));
        for t in enumerate_pure_terms(v.signature(), 3) {
            assert!(is_denoting(&v, &t).unwrap());
        }
    }
}
