//! Recognition of axiom schemata and a fair enumeration of ground equality
//! axioms.

use std::collections::BTreeSet;
use std::fmt;

use crate::syntax::{
    definedness, enumerate::for_each_tuple, pure_terms_prefix, Formula, Signature, Term,
};

/// Axiom schemata that a system may admit as discharged assumptions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AxiomClass {
    Rfl,
    Sbst,
    Definedness,
    StrictConst,
    StrictFun,
    StrictRel,
}

impl AxiomClass {
    pub const ALL: [AxiomClass; 6] = [
        AxiomClass::Rfl,
        AxiomClass::Sbst,
        AxiomClass::Definedness,
        AxiomClass::StrictConst,
        AxiomClass::StrictFun,
        AxiomClass::StrictRel,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AxiomClass::Rfl => "rfl",
            AxiomClass::Sbst => "sbst",
            AxiomClass::Definedness => "defined",
            AxiomClass::StrictConst => "strict-const",
            AxiomClass::StrictFun => "strict-fun",
            AxiomClass::StrictRel => "strict-rel",
        }
    }

    pub fn from_name(s: &str) -> Option<AxiomClass> {
        AxiomClass::ALL.into_iter().find(|c| c.name() == s)
    }
}

impl fmt::Display for AxiomClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Does `f` instantiate the schema `class`? Schemata are read under a
/// universal closure: `f` must be closed, and its leading universal
/// quantifiers are stripped before the matrix is inspected.
pub fn match_axiom(f: &Formula, class: AxiomClass) -> bool {
    if !f.free_vars().is_empty() {
        return false;
    }
    let (_, m) = f.strip_foralls();
    match class {
        AxiomClass::Rfl => matches!(m, Formula::Equal(l, r) if l == r && l.params().is_empty()),
        AxiomClass::Sbst => m.params().is_empty() && is_sbst_matrix(m),
        AxiomClass::Definedness => m.as_definedness().is_some(),
        AxiomClass::StrictConst => {
            matches!(m.as_definedness(), Some(Term::App(_, args)) if args.is_empty())
        }
        AxiomClass::StrictFun => match m {
            Formula::Implies(a, b) => match a.as_definedness() {
                Some(Term::App(_, args)) if !args.is_empty() => defines_each(b, args),
                _ => false,
            },
            _ => false,
        },
        AxiomClass::StrictRel => match m {
            Formula::Implies(a, b) => match a.as_ref() {
                Formula::Atom(_, args) => defines_each(b, args),
                _ => false,
            },
            _ => false,
        },
    }
}

/// `b` is `t1! & ... & tn!` for the given terms, in order.
fn defines_each(b: &Formula, terms: &[Term]) -> bool {
    let parts = b.conjuncts();
    parts.len() == terms.len() && parts.iter().zip(terms).all(|(p, t)| p.as_definedness() == Some(t))
}

/// `r = s -> (G{v/r} -> G{v/s})` for some `G` and `v`.
fn is_sbst_matrix(m: &Formula) -> bool {
    let Formula::Implies(hyp, rest) = m else { return false };
    let (Formula::Equal(r, s), Formula::Implies(g1, g2)) = (hyp.as_ref(), rest.as_ref()) else {
        return false;
    };
    let mut free: BTreeSet<String> = r.vars().into_iter().collect();
    free.extend(s.vars());
    anti_unify(g1, g2, r, s, &free, &mut Vec::new())
}

/// Walk `a` and `b` in parallel. Wherever they differ, the pair must be
/// `(r, s)` at a position where no variable of `r` or `s` is bound.
fn anti_unify(a: &Formula, b: &Formula, r: &Term, s: &Term, free: &BTreeSet<String>, bound: &mut Vec<String>) -> bool {
    use Formula::*;
    match (a, b) {
        (Atom(p, xs), Atom(q, ys)) => p == q && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| anti_unify_term(x, y, r, s, free, bound)),
        (Equal(x1, x2), Equal(y1, y2)) => {
            anti_unify_term(x1, y1, r, s, free, bound) && anti_unify_term(x2, y2, r, s, free, bound)
        }
        (Falsum, Falsum) => true,
        (Not(x), Not(y)) => anti_unify(x, y, r, s, free, bound),
        (And(x1, x2), And(y1, y2)) | (Or(x1, x2), Or(y1, y2)) | (Implies(x1, x2), Implies(y1, y2)) => {
            anti_unify(x1, y1, r, s, free, bound) && anti_unify(x2, y2, r, s, free, bound)
        }
        (Forall(x, p), Forall(y, q)) | (Exists(x, p), Exists(y, q)) if x == y => {
            bound.push(x.clone());
            let ok = anti_unify(p, q, r, s, free, bound);
            bound.pop();
            ok
        }
        _ => false,
    }
}

fn anti_unify_term(a: &Term, b: &Term, r: &Term, s: &Term, free: &BTreeSet<String>, bound: &[String]) -> bool {
    if a == b {
        return true;
    }
    if a == r && b == s && !bound.iter().any(|x| free.contains(x)) {
        return true;
    }
    match (a, b) {
        (Term::App(f, xs), Term::App(g, ys)) if f == g && xs.len() == ys.len() => {
            xs.iter().zip(ys).all(|(x, y)| anti_unify_term(x, y, r, s, free, bound))
        }
        _ => false,
    }
}

/// The equality schemata with ground instances enumerated by
/// [`EqualityAxioms`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EqualitySchema {
    Rfl,
    Symm,
    Trans,
    CngP,
    CngF,
}

/// Recognise a (closed) instance of one of the equality schemata.
pub fn match_equality_schema(f: &Formula) -> Option<EqualitySchema> {
    if !f.free_vars().is_empty() {
        return None;
    }
    let (_, m) = f.strip_foralls();
    let eq = |f: &Formula| match f {
        Formula::Equal(l, r) => Some((l.clone(), r.clone())),
        _ => None,
    };
    if let Some((l, r)) = eq(m) {
        return (l == r).then_some(EqualitySchema::Rfl);
    }
    let Formula::Implies(hyp, concl) = m else { return None };
    let hyps: Option<Vec<(Term, Term)>> = hyp.conjuncts().into_iter().map(eq).collect();
    let hyps = hyps?;
    let lefts: Vec<Term> = hyps.iter().map(|(l, _)| l.clone()).collect();
    let rights: Vec<Term> = hyps.iter().map(|(_, r)| r.clone()).collect();
    match concl.as_ref() {
        Formula::Equal(a, b) if hyps.len() == 1 && a == &rights[0] && b == &lefts[0] => Some(EqualitySchema::Symm),
        Formula::Equal(Term::App(f, xs), Term::App(g, ys)) if f == g && xs == &lefts && ys == &rights => {
            Some(EqualitySchema::CngF)
        }
        Formula::Implies(p1, p2) => match (p1.as_ref(), p2.as_ref()) {
            (Formula::Atom(p, xs), Formula::Atom(q, ys)) if p == q && xs == &lefts && ys == &rights => {
                Some(EqualitySchema::CngP)
            }
            (Formula::Equal(s, u), Formula::Equal(r, u2))
                if hyps.len() == 1 && s == &rights[0] && r == &lefts[0] && u == u2 =>
            {
                Some(EqualitySchema::Trans)
            }
            _ => None,
        },
        _ => None,
    }
}

/// Replace each parameter by a variable of the same name and close
/// universally, e.g. `@a = @a` becomes `forall a. a = a`.
pub fn generalize(f: &Formula) -> Formula {
    let params = f.params();
    let body = f.map_terms(&|t| unparam(t));
    Formula::forall_all(&params, body)
}

fn unparam(t: &Term) -> Term {
    match t {
        Term::Param(a) => Term::Var(a.clone()),
        Term::Var(_) => t.clone(),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(unparam).collect()),
    }
}

/// Ground instances of Rfl, Symm, Trans, Cng_p and Cng_f over the pure
/// terms of a signature, in stages: stage `n` holds exactly the instances
/// whose largest term index is `n`. Within a stage the schemata come in the
/// order Rfl, Symm, Trans, Cng_p per relation, Cng_f per function, each over
/// index tuples in lexicographic order.
pub struct EqualityAxioms {
    sig: Signature,
    terms: Vec<Term>,
    stage: usize,
    buffer: std::collections::VecDeque<Formula>,
}

impl EqualityAxioms {
    pub fn new(sig: &Signature) -> Self {
        EqualityAxioms {
            sig: sig.clone(),
            terms: Vec::new(),
            stage: 0,
            buffer: Default::default(),
        }
    }

    fn fill_stage(&mut self) -> bool {
        let n = self.stage;
        if self.terms.len() <= n {
            self.terms = pure_terms_prefix(&self.sig, (2 * n).max(n + 1));
            if self.terms.len() <= n {
                return false;
            }
        }
        let terms = &self.terms[..=n];
        let mut out = Vec::new();
        let each = |arity: usize, out: &mut Vec<Formula>, mk: &dyn Fn(&[&Term]) -> Formula| {
            for_each_tuple(n + 1, arity, |idx| {
                if idx.contains(&n) {
                    let ts: Vec<&Term> = idx.iter().map(|&i| &terms[i]).collect();
                    out.push(mk(&ts));
                }
            });
        };
        let eq = |a: &Term, b: &Term| Formula::eq(a.clone(), b.clone());
        each(1, &mut out, &|t| eq(t[0], t[0]));
        each(2, &mut out, &|t| Formula::implies(eq(t[0], t[1]), eq(t[1], t[0])));
        each(3, &mut out, &|t| Formula::implies(eq(t[0], t[1]), Formula::implies(eq(t[1], t[2]), eq(t[0], t[2]))));
        let hyp = |t: &[&Term], k: usize| Formula::conj((0..k).map(|i| eq(t[i], t[k + i])).collect()).unwrap();
        let args = |t: &[&Term]| t.iter().map(|x| (*x).clone()).collect::<Vec<Term>>();
        for (p, k) in self.sig.relations().to_vec() {
            each(2 * k, &mut out, &|t| {
                Formula::implies(
                    hyp(t, k),
                    Formula::implies(Formula::Atom(p.clone(), args(&t[..k])), Formula::Atom(p.clone(), args(&t[k..]))),
                )
            });
        }
        for (f, k) in self.sig.functions().into_iter().filter(|(_, k)| *k > 0) {
            each(2 * k, &mut out, &|t| {
                Formula::implies(hyp(t, k), eq(&Term::App(f.clone(), args(&t[..k])), &Term::App(f.clone(), args(&t[k..]))))
            });
        }
        self.buffer.extend(out);
        self.stage += 1;
        true
    }
}

impl Iterator for EqualityAxioms {
    type Item = Formula;

    fn next(&mut self) -> Option<Formula> {
        while self.buffer.is_empty() {
            if !self.fill_stage() {
                return None;
            }
        }
        self.buffer.pop_front()
    }
}

/// The `index`-th ground equality axiom of [`EqualityAxioms`], or `None`
/// past the end of a finite enumeration.
pub fn instantiate_equality_axioms(sig: &Signature, index: usize) -> Option<Formula> {
    EqualityAxioms::new(sig).nth(index)
}

/// The first `count` ground strictness axioms: `c!` for each constant,
/// then `f(t..)! -> t1! & ...` and `p(t..) -> t1! & ...` in stages by
/// largest term index, like [`EqualityAxioms`].
pub fn strictness_axioms(sig: &Signature, count: usize) -> Vec<Formula> {
    let mut out: Vec<Formula> = sig.constants().iter().map(|c| definedness(&Term::constant(c))).collect();
    let all_defined = |ts: &[Term]| Formula::conj(ts.iter().map(definedness).collect()).unwrap();
    let mut n = 0;
    while out.len() < count {
        let terms = pure_terms_prefix(sig, n + 1);
        if terms.len() <= n {
            break;
        }
        for (f, k) in sig.functions().into_iter().filter(|(_, k)| *k > 0) {
            for_each_tuple(n + 1, k, |idx| {
                if idx.contains(&n) {
                    let ts: Vec<Term> = idx.iter().map(|&i| terms[i].clone()).collect();
                    out.push(Formula::implies(definedness(&Term::App(f.clone(), ts.clone())), all_defined(&ts)));
                }
            });
        }
        for (p, k) in sig.relations() {
            for_each_tuple(n + 1, *k, |idx| {
                if idx.contains(&n) {
                    let ts: Vec<Term> = idx.iter().map(|&i| terms[i].clone()).collect();
                    out.push(Formula::implies(Formula::Atom(p.clone(), ts.clone()), all_defined(&ts)));
                }
            });
        }
        n += 1;
    }
    out.truncate(count);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn f(sig: &Signature, s: &str) -> Formula {
        parse_formula(s, sig).unwrap()
    }

    fn sig() -> Signature {
        Signature::parse("fun c/0\nfun g/1\nrel p/1\nrel q/2\nparams a b").unwrap()
    }

    #[test]
    fn schema_examples() {
        let s = sig();
        assert!(match_axiom(&f(&s, "forall x. x = x"), AxiomClass::Rfl));
        assert!(match_axiom(&f(&s, "c = c"), AxiomClass::Rfl));
        assert!(!match_axiom(&f(&s, "@a = @a"), AxiomClass::Rfl));
        assert!(match_axiom(&f(&s, "forall x. forall y. (x = y -> (p(x) -> p(y)))"), AxiomClass::Sbst));
        assert!(match_axiom(&f(&s, "p(c) -> c!"), AxiomClass::StrictRel));
        assert!(!match_axiom(&f(&s, "c = c -> c!"), AxiomClass::StrictRel));
        assert!(match_axiom(&f(&s, "c!"), AxiomClass::StrictConst));
        assert!(match_axiom(&f(&s, "forall x. (g(x)! -> x!)"), AxiomClass::StrictFun));
        assert!(match_axiom(&f(&s, "forall x. forall y. (q(x, y) -> x! & y!)"), AxiomClass::StrictRel));
        assert!(!match_axiom(&f(&s, "forall x. forall y. (q(x, y) -> y! & x!)"), AxiomClass::StrictRel));
        assert!(match_axiom(&f(&s, "forall x. g(x)!"), AxiomClass::Definedness));
        assert!(!match_axiom(&f(&s, "forall x. g(x)!"), AxiomClass::StrictConst));
    }

    #[test]
    fn sbst_variants() {
        let s = sig();
        let yes = [
            "forall x. forall y. (x = y -> (q(x, x) -> q(x, y)))",
            "forall x. forall y. (x = y -> (q(x, x) -> q(y, y)))",
            "forall x. forall y. (x = y -> (g(x) = c -> g(y) = c))",
            "forall x. forall y. (x = y -> (x = x -> y = x))",
            "forall x. forall y. (x = y -> ((exists z. q(z, x)) -> exists z. q(z, y)))",
            "forall x. (x = g(x) -> (p(x) -> p(g(x))))",
            "forall x. (x = x -> (p(x) -> p(x)))",
        ];
        for s_ in yes {
            assert!(match_axiom(&f(&s, s_), AxiomClass::Sbst), "{s_}");
        }
        let no = [
            // captured: the bound z would be the substituted variable
            "forall x. forall z. (x = z -> ((exists z. q(z, x)) -> exists z. q(z, z)))",
            "forall x. forall y. (x = y -> (p(x) -> p(c)))",
            "forall x. forall y. (x = y -> (p(y) -> p(x)))",
            "forall x. (x = @a -> (p(x) -> p(@a)))",
            "forall x. forall y. (x = y -> (p(x) -> q(x, y)))",
        ];
        for s_ in no {
            assert!(!match_axiom(&f(&s, s_), AxiomClass::Sbst), "{s_}");
        }
    }

    #[test]
    fn enumeration_starts_with_reflexivity_of_the_first_term() {
        let s = sig();
        assert_eq!(instantiate_equality_axioms(&s, 0).unwrap().to_string(), "@a = @a");
        assert_eq!(generalize(&instantiate_equality_axioms(&s, 0).unwrap()).to_string(), "forall a. a = a");
    }

    #[test]
    fn enumeration_is_injective_and_well_formed() {
        let s = sig();
        let first: Vec<Formula> = EqualityAxioms::new(&s).take(100).collect();
        assert_eq!(first.len(), 100);
        let distinct: BTreeSet<&Formula> = first.iter().collect();
        assert_eq!(distinct.len(), 100);
        for (i, ax) in first.iter().enumerate() {
            assert_eq!(instantiate_equality_axioms(&s, i).as_ref(), Some(ax));
            let g = generalize(ax);
            assert!(
                match_axiom(&g, AxiomClass::Rfl) || match_axiom(&g, AxiomClass::Sbst) || match_equality_schema(&g).is_some(),
                "{g}"
            );
        }
    }

    /// Stage sizes follow the count of index tuples with maximum `n`.
    #[test]
    fn stage_sizes() {
        let s = Signature::parse("rel p/1\nparams a b c").unwrap();
        let all: Vec<Formula> = EqualityAxioms::new(&s).collect();
        // tuples over 3 terms of arities 1 (Rfl), 2 (Symm), 3 (Trans), 2 (Cng_p)
        assert_eq!(all.len(), 3 + 9 + 27 + 9);
        assert_eq!(instantiate_equality_axioms(&s, all.len()), None);
    }

    #[test]
    fn every_schema_kind_appears() {
        let s = sig();
        let kinds: Vec<EqualitySchema> = EqualityAxioms::new(&s).take(3000).filter_map(|f| match_equality_schema(&f)).collect();
        for k in [EqualitySchema::Rfl, EqualitySchema::Symm, EqualitySchema::Trans, EqualitySchema::CngP, EqualitySchema::CngF] {
            assert!(kinds.contains(&k), "{k:?}");
        }
    }

    #[test]
    fn strictness_instances_match_their_classes() {
        let s = sig();
        let all = strictness_axioms(&s, 200);
        assert_eq!(all.len(), 200);
        assert_eq!(all[0].to_string(), "c!");
        for f in &all {
            let ok = [AxiomClass::StrictConst, AxiomClass::StrictFun, AxiomClass::StrictRel].iter().any(|c| match_axiom(f, *c));
            assert!(ok, "{f}");
        }
        let finite = Signature::parse("rel p/1\nparams a b").unwrap();
        assert_eq!(strictness_axioms(&finite, 100).len(), 2);
    }
}
