//! Extending a valuation of a language `L` to a larger language `L'`.
//!
//! Each new function symbol gets an interpretation mapping tuples of pure
//! `L`-terms to a pure `L`-term. The projection [`phi`] rewrites a pure
//! `L'`-term into an `L`-term, and the extended valuation reads every atom
//! through it. New relation symbols are false everywhere.

mod file;
mod lift;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::syntax::{enumerate::tuples, enumerate_pure_terms, Formula, Signature, Term};
use crate::valuation::{eval, is_denoting, representative, AtomValuation, EvalMode};

pub use file::{parse_extension, ExtensionFileError};
pub use lift::{lift_undefined, Lifted};

/// The function chosen for a new symbol, on pure terms of the base
/// language.
pub trait Interpretation: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;
    fn arity(&self) -> usize;
    fn apply(&self, args: &[Term]) -> Term;
    /// One-line summary for reports.
    fn describe(&self) -> String;
}

/// A finite table of exceptions plus a constant default.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableInterpretation {
    pub name: String,
    pub arity: usize,
    pub table: BTreeMap<Vec<Term>, Term>,
    pub default: Term,
}

impl TableInterpretation {
    pub fn constant(name: &str, arity: usize, value: Term) -> Self {
        TableInterpretation { name: name.to_string(), arity, table: BTreeMap::new(), default: value }
    }

    pub fn with_entry(mut self, args: Vec<Term>, value: Term) -> Self {
        self.table.insert(args, value);
        self
    }
}

impl Interpretation for TableInterpretation {
    fn name(&self) -> &str {
        &self.name
    }

    fn arity(&self) -> usize {
        self.arity
    }

    fn apply(&self, args: &[Term]) -> Term {
        self.table.get(args).unwrap_or(&self.default).clone()
    }

    fn describe(&self) -> String {
        let mut s = format!("{}/{} default {}", self.name, self.arity, self.default);
        for (args, value) in &self.table {
            let args: Vec<String> = args.iter().map(Term::to_string).collect();
            s.push_str(&format!("; ({}) -> {value}", args.join(", ")));
        }
        s
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExtensionError {
    #[error("{0}")]
    Signature(String),
    #[error("symbol `{0}` is neither in the base language nor interpreted")]
    UnknownSymbol(String),
    #[error("interpretation of `{0}` is not congruent with the valuation's equality")]
    NotCongruent(String),
    #[error("the valuation is not totally denoting")]
    NotTotallyDenoting,
}

/// Base signature, extended signature and the interpretations of the new
/// function symbols.
#[derive(Clone, Debug)]
pub struct ExtensionContext {
    base: Signature,
    extended: Signature,
    interps: Vec<Arc<dyn Interpretation>>,
    new_relations: Vec<(String, usize)>,
}

impl ExtensionContext {
    pub fn new(base: &Signature) -> Self {
        ExtensionContext { base: base.clone(), extended: base.clone(), interps: Vec::new(), new_relations: Vec::new() }
    }

    pub fn add_function(&mut self, interp: Arc<dyn Interpretation>) -> Result<(), ExtensionError> {
        self.extended = self
            .extended
            .with_function(interp.name(), interp.arity())
            .map_err(|e| ExtensionError::Signature(e.to_string()))?;
        self.interps.push(interp);
        Ok(())
    }

    pub fn with_function(mut self, interp: impl Interpretation + 'static) -> Result<Self, ExtensionError> {
        self.add_function(Arc::new(interp))?;
        Ok(self)
    }

    pub fn add_relation(&mut self, name: &str, arity: usize) -> Result<(), ExtensionError> {
        self.extended = self.extended.with_relation(name, arity).map_err(|e| ExtensionError::Signature(e.to_string()))?;
        self.new_relations.push((name.to_string(), arity));
        Ok(())
    }

    pub fn with_relation(mut self, name: &str, arity: usize) -> Result<Self, ExtensionError> {
        self.add_relation(name, arity)?;
        Ok(self)
    }

    pub fn base(&self) -> &Signature {
        &self.base
    }

    pub fn extended(&self) -> &Signature {
        &self.extended
    }

    pub fn interpretations(&self) -> &[Arc<dyn Interpretation>] {
        &self.interps
    }

    pub fn interpretation(&self, name: &str) -> Option<&Arc<dyn Interpretation>> {
        self.interps.iter().find(|i| i.name() == name)
    }

    pub fn new_relations(&self) -> &[(String, usize)] {
        &self.new_relations
    }

    fn is_new_relation(&self, p: &str) -> bool {
        self.new_relations.iter().any(|(q, _)| q == p)
    }

    pub fn describe(&self) -> Vec<String> {
        let mut out: Vec<String> = self.interps.iter().map(|i| format!("fun {}", i.describe())).collect();
        out.extend(self.new_relations.iter().map(|(q, n)| format!("rel {q}/{n} false everywhere")));
        out
    }
}

/// Project a pure term of the extended language onto the base language.
pub fn phi(ctx: &ExtensionContext, t: &Term) -> Result<Term, ExtensionError> {
    match t {
        Term::Var(_) | Term::Param(_) => Ok(t.clone()),
        Term::App(f, args) => {
            let args = args.iter().map(|a| phi(ctx, a)).collect::<Result<Vec<_>, _>>()?;
            if ctx.base.function_arity(f) == Some(args.len()) {
                Ok(Term::App(f.clone(), args))
            } else if let Some(i) = ctx.interpretation(f).filter(|i| i.arity() == args.len()) {
                Ok(i.apply(&args))
            } else {
                Err(ExtensionError::UnknownSymbol(f.clone()))
            }
        }
    }
}

fn phi_formula(ctx: &ExtensionContext, f: &Formula) -> Result<Formula, ExtensionError> {
    let mut err = None;
    let out = f.map_terms(&|t| match phi(ctx, t) {
        Ok(t) => t,
        Err(_) => t.clone(),
    });
    f.visit_terms(&mut |t| {
        if err.is_none() {
            err = phi(ctx, t).err();
        }
    });
    err.map_or(Ok(out), Err)
}

/// The valuation of the extended language read through [`phi`].
#[derive(Clone)]
pub struct Extended {
    base: Arc<dyn AtomValuation>,
    ctx: Arc<ExtensionContext>,
    sig: Signature,
}

impl fmt::Debug for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Extended").field("ctx", &self.ctx).finish()
    }
}

impl Extended {
    pub fn context(&self) -> &ExtensionContext {
        &self.ctx
    }

    pub fn base(&self) -> &Arc<dyn AtomValuation> {
        &self.base
    }
}

impl AtomValuation for Extended {
    fn signature(&self) -> &Signature {
        &self.sig
    }

    fn domain(&self) -> &[String] {
        self.base.domain()
    }

    fn atom(&self, f: &Formula) -> bool {
        match f {
            Formula::Atom(p, _) if self.ctx.is_new_relation(p) => false,
            Formula::Atom(..) | Formula::Equal(..) => match phi_formula(&self.ctx, f) {
                Ok(g) => self.base.atom(&g),
                Err(_) => false,
            },
            _ => false,
        }
    }
}

/// Extend `v` along `ctx`. With `congruence_depth`, every interpretation
/// is first checked for congruence up to that term depth.
pub fn extend_valuation(
    v: Arc<dyn AtomValuation>,
    ctx: ExtensionContext,
    congruence_depth: Option<usize>,
) -> Result<Extended, ExtensionError> {
    if let Some(d) = congruence_depth {
        if let Some(i) = ctx.interps.iter().find(|i| !is_congruent(v.as_ref(), i.as_ref(), d)) {
            return Err(ExtensionError::NotCongruent(i.name().to_string()));
        }
    }
    let sig = ctx
        .extended
        .with_params(v.signature().params().to_vec())
        .map_err(|e| ExtensionError::Signature(e.to_string()))?;
    Ok(Extended { base: v, ctx: Arc::new(ctx), sig })
}

fn base_terms(v: &dyn AtomValuation, depth: usize) -> Vec<Term> {
    let sig = v.signature().with_params(v.domain().to_vec()).unwrap_or_else(|_| v.signature().clone());
    enumerate_pure_terms(&sig, depth)
}

/// Componentwise `=^v`-equal argument tuples (over terms up to `depth`)
/// give `=^v`-equal results.
pub fn is_congruent(v: &dyn AtomValuation, interp: &dyn Interpretation, depth: usize) -> bool {
    let n = interp.arity();
    if n == 0 {
        return true;
    }
    let terms = base_terms(v, depth);
    let neighbours: Vec<Vec<&Term>> = terms
        .iter()
        .map(|r| terms.iter().filter(|s| v.atom(&Formula::eq(r.clone(), (*s).clone()))).collect())
        .collect();
    let index: BTreeMap<&Term, usize> = terms.iter().enumerate().map(|(i, t)| (t, i)).collect();
    tuples(&terms, n).into_iter().all(|rs| {
        let image = interp.apply(&rs);
        let mut partners: Vec<Vec<Term>> = vec![Vec::new()];
        for r in &rs {
            partners = partners
                .into_iter()
                .flat_map(|p| {
                    neighbours[index[r]].iter().map(move |s| {
                        let mut p = p.clone();
                        p.push((*s).clone());
                        p
                    })
                })
                .collect();
        }
        partners.iter().all(|ss| v.atom(&Formula::eq(image.clone(), interp.apply(ss))))
    })
}

/// If the image of a tuple denotes, every argument denotes. For a new
/// constant this asks that its image denote.
pub fn is_strict_interp(v: &dyn AtomValuation, interp: &dyn Interpretation, depth: usize) -> bool {
    if interp.arity() == 0 {
        return is_denoting(v, &interp.apply(&[])).unwrap_or(false);
    }
    let terms = base_terms(v, depth);
    tuples(&terms, interp.arity()).into_iter().all(|rs| {
        representative(v, &interp.apply(&rs)).is_none() || rs.iter().all(|r| representative(v, r).is_some())
    })
}

const MAX_LISTED: usize = 50;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExtensionReport {
    pub depth: usize,
    /// Pure terms of the extended language that were substituted.
    pub terms: usize,
    pub clause1_checked: usize,
    pub clause2_checked: usize,
    pub failures: Vec<String>,
    pub total_failures: usize,
}

impl ExtensionReport {
    pub fn pass(&self) -> bool {
        self.total_failures == 0
    }

    fn fail(&mut self, msg: impl FnOnce() -> String) {
        self.total_failures += 1;
        if self.failures.len() < MAX_LISTED {
            self.failures.push(msg());
        }
    }
}

impl fmt::Display for ExtensionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "extension check at depth {} over {} terms: {} term instances, {} formula instances, ",
            self.depth, self.terms, self.clause1_checked, self.clause2_checked
        )?;
        if self.pass() {
            return write!(f, "pass");
        }
        write!(f, "{} failure(s)", self.total_failures)?;
        for m in &self.failures {
            write!(f, "\n  {m}")?;
        }
        Ok(())
    }
}

/// Term templates for the substitution clause: a bare variable, every base
/// function applied to distinct variables, and the open subterms of the
/// samples.
fn templates(base: &Signature, samples: &[Formula]) -> Vec<Term> {
    let mut out = vec![Term::var("x")];
    for (g, n) in base.functions() {
        if n > 0 {
            out.push(Term::App(g.clone(), (1..=n).map(|i| Term::var(&format!("x{i}"))).collect()));
        }
    }
    for s in samples {
        s.visit_terms(&mut |t| {
            for u in t.subterms() {
                if !u.is_pure() && !out.contains(&u) {
                    out.push(u);
                }
            }
        });
    }
    out
}

/// Check both clauses of the extension property for `v` extended along
/// `ctx`, substituting pure terms of the extended language up to `depth`.
pub fn check_extension_property(
    v: Arc<dyn AtomValuation>,
    ctx: ExtensionContext,
    samples: &[Formula],
    depth: usize,
) -> Result<ExtensionReport, ExtensionError> {
    let ext = extend_valuation(v.clone(), ctx, None)?;
    let ctx = ext.ctx.clone();
    Ok(check_extension_property_against(v.as_ref(), &ext, &ctx, samples, depth))
}

/// As [`check_extension_property`], against a given candidate `v_ext`.
pub fn check_extension_property_against(
    v: &dyn AtomValuation,
    v_ext: &dyn AtomValuation,
    ctx: &ExtensionContext,
    samples: &[Formula],
    depth: usize,
) -> ExtensionReport {
    let ext_sig = ctx.extended.with_params(v.domain().to_vec()).unwrap_or_else(|_| ctx.extended.clone());
    let ext_terms = enumerate_pure_terms(&ext_sig, depth);
    let mut report = ExtensionReport { depth, terms: ext_terms.len(), ..Default::default() };
    for t in base_terms(v, depth) {
        report.clause1_checked += 1;
        match phi(ctx, &t) {
            Ok(u) if u == t => {}
            other => report.fail(|| format!("clause 1: base term {t} projects to {other:?}")),
        }
    }
    let projected: Vec<Result<Term, ExtensionError>> = ext_terms.iter().map(|t| phi(ctx, t)).collect();
    for tpl in templates(&ctx.base, samples) {
        let vars = tpl.vars();
        for idx in tuples(&(0..ext_terms.len()).collect::<Vec<_>>(), vars.len()) {
            report.clause1_checked += 1;
            let bind = |terms: &dyn Fn(usize) -> Option<Term>| -> Option<BTreeMap<String, Term>> {
                vars.iter().zip(&idx).map(|(x, &i)| terms(i).map(|t| (x.clone(), t))).collect()
            };
            let lhs = bind(&|i| Some(ext_terms[i].clone())).and_then(|b| phi(ctx, &tpl.substitute(&b)).ok());
            let rhs = bind(&|i| projected[i].clone().ok()).map(|b| tpl.substitute(&b));
            if lhs.is_none() || lhs != rhs {
                report.fail(|| format!("clause 1: {tpl} at {idx:?}: {lhs:?} vs {rhs:?}"));
            }
        }
    }
    for sample in samples {
        let vars = sample.free_vars();
        for idx in tuples(&(0..ext_terms.len()).collect::<Vec<_>>(), vars.len()) {
            report.clause2_checked += 1;
            let mut b_ext = BTreeMap::new();
            let mut b_base = BTreeMap::new();
            for (x, &i) in vars.iter().zip(&idx) {
                b_ext.insert(x.clone(), ext_terms[i].clone());
                if let Ok(t) = &projected[i] {
                    b_base.insert(x.clone(), t.clone());
                }
            }
            let f_ext = sample.substitute(&b_ext);
            let f_base = sample.substitute(&b_base);
            let l = eval(v_ext, &f_ext, EvalMode::ParamQuant);
            let r = eval(v, &f_base, EvalMode::ParamQuant);
            match (&l, &r) {
                (Ok(a), Ok(b)) if a == b => {}
                _ => report.fail(|| format!("clause 2: extended {f_ext} is {l:?}, base {f_base} is {r:?}")),
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula_with;
    use crate::syntax::ParseOptions;
    use crate::valuation::{check_equality_valuation, check_strict, holds, is_totally_denoting, TvValuation};

    const V0_SIG: &str = "rel p/2\nparams a b\n";
    const V0: &str = "domain a b\ndefault f\natom p(@a,@a) = t\natom p(@b,@b) = t\n\
                      atom @a = @a : t\natom @b = @b : t\n";

    fn v0() -> Arc<dyn AtomValuation> {
        let sig = Signature::parse(V0_SIG).unwrap();
        Arc::new(TvValuation::parse(V0, &sig).unwrap())
    }

    fn v0_ctx() -> ExtensionContext {
        let sig = Signature::parse(V0_SIG).unwrap();
        ExtensionContext::new(&sig)
            .with_function(TableInterpretation::constant("c'", 0, Term::param("a")))
            .unwrap()
            .with_function(TableInterpretation::constant("g", 1, Term::param("b")))
            .unwrap()
    }

    fn open(sig: &Signature, s: &str) -> Formula {
        parse_formula_with(s, sig, ParseOptions { free_vars: true, any_param: false }).unwrap()
    }

    #[test]
    fn projection_examples() {
        let sig = Signature::parse("fun f/1\nrel p/1\nparams a b").unwrap();
        let ctx = ExtensionContext::new(&sig)
            .with_function(TableInterpretation::constant("c'", 0, Term::param("a")))
            .unwrap();
        let fa = Term::app("f", vec![Term::param("a")]);
        assert_eq!(phi(&ctx, &fa).unwrap(), fa);
        assert_eq!(phi(&ctx, &Term::constant("c'")).unwrap(), Term::param("a"));
        assert_eq!(phi(&ctx, &Term::app("f", vec![Term::constant("c'")])).unwrap(), fa);
        assert!(phi(&ctx, &Term::constant("zz")).is_err());
    }

    #[test]
    fn extended_atoms_read_through_the_projection() {
        let ext = extend_valuation(v0(), v0_ctx(), Some(2)).unwrap();
        let s = ext.signature().clone();
        assert!(holds(&ext, &open(&s, "p(c', @a)")).unwrap());
        assert!(!holds(&ext, &open(&s, "c' = @b")).unwrap());
        assert!(holds(&ext, &open(&s, "p(g(c'), @b)")).unwrap());
        for f in ["forall x. exists y. p(x, y)", "exists x. forall y. p(x, y)", "forall x. x = x"] {
            assert_eq!(holds(&ext, &open(&s, f)).unwrap(), holds(v0().as_ref(), &open(&s, f)).unwrap(), "{f}");
        }
    }

    #[test]
    fn new_relations_are_false() {
        let ctx = v0_ctx().with_relation("q", 1).unwrap();
        let ext = extend_valuation(v0(), ctx, None).unwrap();
        assert!(!ext.atom(&Formula::atom("q", vec![Term::param("a")])));
    }

    #[test]
    fn congruence() {
        let v = v0();
        let constant = TableInterpretation::constant("g", 1, Term::param("a"));
        assert!(is_congruent(v.as_ref(), &constant, 2));
        let identity = TableInterpretation::constant("g", 1, Term::param("a"))
            .with_entry(vec![Term::param("b")], Term::param("b"));
        assert!(is_congruent(v.as_ref(), &identity, 2));
        // with a = b, sending @b to the non-denoting `k` breaks congruence
        let sig2 = Signature::parse("fun k/0\nrel p/2\nparams a b").unwrap();
        let v2: Arc<dyn AtomValuation> = Arc::new(
            TvValuation::parse(
                "domain a b\ndefault f\natom @a = @a : t\natom @b = @b : t\natom @a = @b : t\natom @b = @a : t\n",
                &sig2,
            )
            .unwrap(),
        );
        let split = TableInterpretation::constant("g", 1, Term::param("a"))
            .with_entry(vec![Term::param("b")], Term::constant("k"));
        assert!(!is_congruent(v2.as_ref(), &split, 0));
        assert!(matches!(
            extend_valuation(v2, ExtensionContext::new(&sig2).with_function(split).unwrap(), Some(0)),
            Err(ExtensionError::NotCongruent(_))
        ));
    }

    #[test]
    fn strict_interpretations() {
        let sig = Signature::parse("fun c/0\nrel p/1\nparams a").unwrap();
        let v: Arc<dyn AtomValuation> =
            Arc::new(TvValuation::parse("domain a\ndefault f\natom @a = @a : t\natom c = c : t\n", &sig).unwrap());
        // constant non-denoting result: vacuous
        assert!(is_strict_interp(v.as_ref(), &TableInterpretation::constant("g", 1, Term::constant("c")), 1));
        // constant denoting result while `c` does not denote
        assert!(!is_strict_interp(v.as_ref(), &TableInterpretation::constant("g", 1, Term::param("a")), 1));
        assert!(is_strict_interp(v.as_ref(), &TableInterpretation::constant("d", 0, Term::param("a")), 1));
        assert!(!is_strict_interp(v.as_ref(), &TableInterpretation::constant("d", 0, Term::constant("c")), 1));
    }

    #[test]
    fn property_holds_for_v0() {
        let sig = v0_ctx().extended().clone();
        let samples: Vec<Formula> =
            ["p(x, y)", "x = y", "exists y. p(x, y)"].iter().map(|s| open(&sig, s)).collect();
        let r = check_extension_property(v0(), v0_ctx(), &samples, 2).unwrap();
        assert!(r.pass(), "{r}");
        assert!(r.clause2_checked > 0);
    }

    #[test]
    fn corrupted_extension_is_caught() {
        let ctx = v0_ctx();
        let ext = extend_valuation(v0(), ctx.clone(), None).unwrap();
        // the same extension, except one atom is flipped
        #[derive(Debug)]
        struct Flip(Extended, Formula);
        impl AtomValuation for Flip {
            fn signature(&self) -> &Signature {
                self.0.signature()
            }
            fn domain(&self) -> &[String] {
                self.0.domain()
            }
            fn atom(&self, f: &Formula) -> bool {
                self.0.atom(f) != (*f == self.1)
            }
        }
        let target = Formula::atom("p", vec![Term::constant("c'"), Term::param("a")]);
        let flipped = Flip(ext, target);
        let samples = vec![open(ctx.extended(), "p(x, y)")];
        let r = check_extension_property_against(v0().as_ref(), &flipped, &ctx, &samples, 1);
        assert!(!r.pass());
        assert!(r.failures[0].contains("p(c', @a)"), "{}", r.failures[0]);
    }

    #[test]
    fn total_denotation_and_strictness_are_preserved() {
        let ext = extend_valuation(v0(), v0_ctx(), Some(2)).unwrap();
        assert!(is_totally_denoting(v0().as_ref()));
        assert!(is_totally_denoting(&ext));
        for t in enumerate_pure_terms(ext.signature(), 2) {
            assert!(is_denoting(&ext, &t).unwrap(), "{t}");
        }
        assert!(check_strict(v0().as_ref(), 2).pass());
        assert!(check_strict(&ext, 2).pass());
        assert!(check_equality_valuation(&ext, 2).pass());
    }
}
