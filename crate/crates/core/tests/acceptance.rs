//! End-to-end acceptance checks, one line per criterion.
//!
//! Runs without the libtest harness so that every line is printed even when
//! the run succeeds.

mod common;

use std::sync::Arc;
use std::time::{Duration, Instant};

use common::{cli, proofs, result_line, sig, val, VALUATIONS};
use plt_core::conservativity::{verify_conservativity, Kind, SelectionSpec};
use plt_core::deduction::{check_deduction, SystemId, SystemProfile};
use plt_core::extension::{
    check_extension_property, extend_valuation, lift_undefined, parse_extension, ExtensionContext, TableInterpretation,
};
use plt_core::syntax::{enumerate_pure_terms, parse_formula_with, Formula, ParseOptions, Term};
use plt_core::tableaux::{decide, Budget, DecideOutcome};
use plt_core::valuation::{
    check_equality_valuation, check_strict, eval, is_denoting, is_totally_denoting, AtomValuation, EvalMode,
    TvValuation, Verdict,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn verdict(v: &dyn AtomValuation, f: &Formula, mode: EvalMode) -> Result<Verdict, String> {
    eval(v, f, mode).map_err(|e| format!("{f}: {e}"))
}

fn formula(sig_name: &str, text: &str) -> Formula {
    let opts = ParseOptions { free_vars: true, any_param: false };
    parse_formula_with(text, &sig(sig_name), opts).unwrap()
}

/// Decide `premise |- goal` and check that the countermodel reproduces
/// `t` for the premise and `f` for the goal.
fn countermodel(sig_name: &str, premise: &Formula, goal: &Formula) -> Result<TvValuation, String> {
    let s = sig(sig_name);
    match decide(&s, std::slice::from_ref(premise), goal, SystemId::NcEq, Budget::default()) {
        Ok(DecideOutcome::Countermodel(m)) => {
            ensure(verdict(&m, premise, EvalMode::ParamQuant)? == Verdict::True, || format!("countermodel falsifies {premise}"))?;
            ensure(verdict(&m, goal, EvalMode::ParamQuant)? == Verdict::False, || format!("countermodel satisfies {goal}"))?;
            Ok(m)
        }
        other => Err(format!("expected a countermodel, got {other:?}")),
    }
}

fn criterion_1() -> Outcome {
    let v0 = val("v0", "v0");
    let a = formula("v0", "forall x. exists y. p(x, y)");
    let b = formula("v0", "exists y. forall x. p(x, y)");
    ensure(verdict(&v0, &a, EvalMode::ParamQuant)? == Verdict::True, || "v0 falsifies the premise".into())?;
    ensure(verdict(&v0, &b, EvalMode::ParamQuant)? == Verdict::False, || "v0 satisfies the goal".into())?;
    let m = countermodel("v0", &a, &b)?;

    let (code, out, err) = cli(&["decide", "--sig", "v0.sig", "forall x. exists y. p(x, y) |- exists y. forall x. p(x, y)"]);
    ensure(code == 1 && result_line(&out) == "RESULT: countermodel", || format!("decide exited {code}: {out}{err}"))?;
    let text: String = out.lines().filter(|l| !l.starts_with("RESULT")).map(|l| format!("{l}\n")).collect();
    let read_back = TvValuation::parse(&text, &sig("v0").with_params(m.domain().to_vec()).unwrap()).map_err(|e| e.to_string())?;
    ensure(verdict(&read_back, &b, EvalMode::ParamQuant)? == Verdict::False, || "printed countermodel does not read back".into())?;
    Ok(format!("countermodel over {} parameters", m.domain().len()))
}

fn criterion_2() -> Outcome {
    let premise = formula("const", "p(c)");
    let goal = formula("const", "exists x. p(x)");
    countermodel("const", &premise, &goal)?;
    let v = val("const", "const_c");
    ensure(!is_totally_denoting(&v), || "const_c is totally denoting".into())?;
    ensure(!is_denoting(&v, &Term::constant("c")).map_err(|e| e.to_string())?, || "c denotes".into())?;
    ensure(verdict(&v, &goal, EvalMode::PureTermQuant(1))? == Verdict::True, || "pure-term mode does not reach c".into())?;
    ensure(verdict(&v, &goal, EvalMode::ParamQuant)? == Verdict::False, || "parameter mode reaches c".into())?;
    Ok("countermodel found, c does not denote".into())
}

fn criterion_3() -> Outcome {
    let v = val("tower", "tower");
    let a = formula("tower", "forall x. p(x, f(x))");
    let b = formula("tower", "forall x. exists y. p(x, y)");
    ensure(verdict(&v, &a, EvalMode::ParamQuant)? == Verdict::True, || "forall x. p(x, f(x)) is not t".into())?;
    ensure(verdict(&v, &b, EvalMode::ParamQuant)? == Verdict::False, || "forall x. exists y. p(x, y) is not f".into())?;
    let eq = check_equality_valuation(&v, 3);
    ensure(eq.pass(), || format!("equality check failed: {eq}"))?;
    let strict = check_strict(&v, 3);
    ensure(!strict.pass(), || "tower passed the strictness check".into())?;
    let first = strict.violations.first().map(|x| x.to_string()).unwrap_or_default();
    ensure(first.contains("axiom 3") && first.contains("p(@a, f(@a))"), || format!("unexpected first violation: {first}"))?;
    Ok(first)
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let all = proofs();
    let mut checked = 0;
    for p in &all {
        let report = check_deduction(&p.deduction, &SystemProfile::of(p.system));
        checked += 1;
        let accepted = report.ok;
        ensure(accepted == p.expect_ok, || {
            let why: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
            format!("{} under {}: expected {}, violations {why:?}", p.name, p.system, if p.expect_ok { "ok" } else { "fail" })
        })?;
        if !p.expect_ok {
            ensure(report.violations.iter().all(|v| v.path.starts_with('0')), || format!("{}: violation without a path", p.name))?;
        }
    }
    let named = |n: &str| all.iter().find(|p| p.name == n).unwrap_or_else(|| panic!("missing {n}"));
    for n in ["symm.nd", "trans.nd", "cng_p.nd", "cng_f.nd"] {
        ensure(named(n).system == SystemId::NcEq && named(n).expect_ok, || format!("{n} is not an nceq proof"))?;
    }
    let restricted = named("forall_e_f.nd");
    for sys in [SystemId::Nc, SystemId::NcEq] {
        let r = check_deduction(&restricted.deduction, &SystemProfile::of(sys));
        ensure(!r.ok, || format!("instantiation at f(@a) accepted under {sys}"))?;
    }
    let r = check_deduction(&named("eigen_open.nd").deduction, &SystemProfile::of(SystemId::Nc));
    ensure(r.violations.iter().any(|v| v.path == "0" && v.message.contains("open assumption")), || format!("{:?}", r.violations))?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("{checked} proofs in {} ms", elapsed.as_millis()))
}

/// Does `v` belong to the semantic class matching `system`?
fn in_class(v: &TvValuation, system: SystemId) -> bool {
    let eq = || check_equality_valuation(v, 2).pass();
    match system {
        SystemId::Nc => true,
        SystemId::NcEq => eq(),
        SystemId::NcEqStrict => eq() && check_strict(v, 2).pass(),
        SystemId::NcDownEq => eq() && is_totally_denoting(v),
    }
}

fn criterion_5() -> Outcome {
    let mut pairs = 0;
    for p in proofs().into_iter().filter(|p| p.expect_ok) {
        let report = check_deduction(&p.deduction, &SystemProfile::of(p.system));
        ensure(report.ok, || format!("{} does not check", p.name))?;
        let vals = VALUATIONS.iter().find(|(s, _)| *s == p.sig_name).map(|(_, v)| *v).unwrap_or(&[]);
        for name in vals {
            let v = val(&p.sig_name, name);
            let fs: Vec<&Formula> = report.open_assumptions.iter().chain([&report.conclusion]).collect();
            let covered = fs.iter().all(|f| f.params().iter().all(|a| v.domain().contains(a)));
            if !covered || !in_class(&v, p.system) {
                continue;
            }
            pairs += 1;
            let premises_true = report
                .open_assumptions
                .iter()
                .map(|f| verdict(&v, f, EvalMode::ParamQuant))
                .collect::<Result<Vec<_>, _>>()?
                .into_iter()
                .all(|x| x == Verdict::True);
            if premises_true {
                ensure(verdict(&v, &report.conclusion, EvalMode::ParamQuant)? == Verdict::True, || {
                    format!("{} under {name}: assumptions t, conclusion f", p.name)
                })?;
            }
        }
    }
    ensure(pairs >= 20, || format!("only {pairs} proof/valuation pairs"))?;
    Ok(format!("{pairs} proof/valuation pairs"))
}

/// A fresh constant and a fresh unary function, both mapped to the first
/// domain parameter.
fn simple_extension(v: &TvValuation) -> ExtensionContext {
    let a = Term::param(&v.domain()[0]);
    ExtensionContext::new(v.signature())
        .with_function(TableInterpretation::constant("k'", 0, a.clone()))
        .and_then(|c| c.with_function(TableInterpretation::constant("g'", 1, a)))
        .unwrap()
}

const STRICT: &[(&str, &str)] =
    &[("v0", "v0"), ("v0", "one_loop"), ("const", "strict_c"), ("three", "cycle"), ("logic", "c_is_a"), ("func", "f_ident")];

fn criterion_6() -> Outcome {
    let v: Arc<dyn AtomValuation> = Arc::new(val("v0", "v0"));
    let ctx = parse_extension(&common::read("ext/v0.ext"), v.signature(), v.domain()).map_err(|e| e.to_string())?;
    let samples: Vec<Formula> =
        ["p(x, y)", "x = y", "exists y. p(x, y)"].iter().map(|s| formula("v0", s)).collect();
    let report = check_extension_property(v, ctx, &samples, 2).map_err(|e| e.to_string())?;
    ensure(report.pass(), || report.to_string())?;
    for (s, n) in STRICT {
        let base = val(s, n);
        let ctx = simple_extension(&base);
        let ext = extend_valuation(Arc::new(base.clone()), ctx, Some(2)).map_err(|e| e.to_string())?;
        if is_totally_denoting(&base) {
            ensure(is_totally_denoting(&ext), || format!("{n}: total denotation lost"))?;
        }
        let strict = check_strict(&ext, 2);
        ensure(strict.pass(), || format!("{n}: strictness lost: {strict}"))?;
    }
    Ok(format!("{} instances checked, {} strict fixtures preserved", report.clause1_checked + report.clause2_checked, STRICT.len()))
}

const TOTAL: &[(&str, &str)] = &[
    ("v0", "v0"),
    ("v0", "one_loop"),
    ("const", "strict_c"),
    ("three", "cycle"),
    ("logic", "c_is_a"),
    ("logic", "all_true"),
    ("func", "f_ident"),
    ("func", "all_true"),
];

fn criterion_7() -> Outcome {
    let depth = 3;
    let mut atoms = 0;
    for (s, n) in TOTAL {
        let base = val(s, n);
        ensure(is_totally_denoting(&base), || format!("{n} is not totally denoting"))?;
        let lifted = lift_undefined(Arc::new(base.clone())).map_err(|e| e.to_string())?;
        let eq = check_equality_valuation(&lifted, depth);
        ensure(eq.pass(), || format!("{n}: lifted equality fails: {eq}"))?;
        ensure(!is_denoting(&lifted, &Term::undef()).map_err(|e| e.to_string())?, || format!("{n}: undef denotes"))?;

        let base_sig = base.signature().with_params(base.domain().to_vec()).unwrap();
        let base_terms = enumerate_pure_terms(&base_sig, depth);
        for r in &base_terms {
            for t in &base_terms {
                let mut same = vec![Formula::eq(r.clone(), t.clone())];
                for (rel, arity) in base.signature().relations() {
                    match arity {
                        1 => same.push(Formula::atom(rel, vec![r.clone()])),
                        2 => same.push(Formula::atom(rel, vec![r.clone(), t.clone()])),
                        _ => {}
                    }
                }
                for a in same {
                    ensure(lifted.atom(&a) == base.atom(&a), || format!("{n}: {a} changed"))?;
                    atoms += 1;
                }
            }
        }
        let all_terms = enumerate_pure_terms(&lifted.signature().with_params(base.domain().to_vec()).unwrap(), depth);
        for r in &all_terms {
            for t in &all_terms {
                if lifted.eq_up(r, t) {
                    ensure(r.has_undef() == t.has_undef(), || format!("{n}: {r} = {t} mixes undef"))?;
                }
            }
        }
    }
    Ok(format!("{} valuations, {atoms} base atoms unchanged", TOTAL.len()))
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let cases: &[(&str, &str, &str, &[&str], bool)] = &[
        ("v0", "one_loop", "p(x, y)", &["x", "y"], true),
        ("const", "const_c", "p(y)", &["y"], false),
        ("three", "cycle", "p(x, y)", &["x", "y"], true),
        ("const", "strict_c", "p(y)", &["y"], true),
    ];
    let mut runs = 0;
    for (s, n, d, vars, lifted) in cases {
        let v = val(s, n);
        let was_strict = check_strict(&v, 2).pass();
        let vars: Vec<String> = vars.iter().map(|x| x.to_string()).collect();
        let spec = SelectionSpec::new(formula(s, d), &vars, "h", v.signature()).map_err(|e| e.to_string())?;
        for kind in [Kind::Epsilon, Kind::Iota] {
            let report = verify_conservativity(Arc::new(v.clone()), &spec, kind, 2).map_err(|e| format!("{n}/{kind}: {e}"))?;
            ensure(report.pass(), || format!("{n}/{kind}:\n{report}"))?;
            ensure(report.base_lifted == *lifted, || format!("{n}/{kind}: lifted = {}", report.base_lifted))?;
            if was_strict && report.strict_interp {
                ensure(report.strict.as_ref().is_some_and(|r| r.pass()), || format!("{n}/{kind}: strictness not preserved"))?;
            }
            runs += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;
    Ok(format!("{runs} extensions in {} ms", elapsed.as_millis()))
}

fn criterion_9() -> Outcome {
    let commands: &[&[&str]] = &[
        &["decide", "--sig", "v0.sig", "forall x. exists y. p(x, y) |- exists y. forall x. p(x, y)"],
        &["decide", "--sig", "const.sig", "p(c) |- exists x. p(x)"],
        &["decide", "--sig", "logic.sig", "forall x. p(x) |- exists x. p(x)"],
        &["decide", "--sig", "logic.sig", "--system", "nceq", "q(@a, @b) ; @a = @b |- q(@b, @a)"],
        &["check", "--sig", "logic.sig", "--system", "nceq", "proofs/trans.nd"],
        &["eval", "--sig", "tower.sig", "--val", "tower.val", "--formula", "forall x. p(x, f(x))"],
        &["verify-valuation", "--sig", "tower.sig", "--val", "tower.val"],
        &["epsilon", "--sig", "v0.sig", "--val", "one_loop.val", "--formula", "p(x, y)", "--vars", "x,y"],
    ];
    for args in commands {
        let first = cli(args);
        let second = cli(args);
        ensure(first == second, || format!("{args:?} differs between runs"))?;
        ensure(first.0 != 3, || format!("{args:?} failed: {}", first.2))?;
    }
    let s = sig("logic");
    let premise = formula("logic", "forall x. (p(x) -> q(x, x))");
    let goal = formula("logic", "p(@a) -> exists y. q(@a, y)");
    let run = || decide(&s, std::slice::from_ref(&premise), &goal, SystemId::Nc, Budget::default()).unwrap();
    let (one, two) = (run(), run());
    ensure(matches!(one, DecideOutcome::Proved(_)), || format!("expected a proof, got {one:?}"))?;
    ensure(one == two, || "certificates differ".into())?;
    Ok(format!("{} commands repeated byte for byte", commands.len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("countermodel for the quantifier swap", criterion_1),
        ("non-denoting constant", criterion_2),
        ("tower valuation", criterion_3),
        ("deduction checker", criterion_4),
        ("soundness on the proof corpus", criterion_5),
        ("extension property", criterion_6),
        ("lifting by undef", criterion_7),
        ("selection extensions", criterion_8),
        ("determinism", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {}: pass ({name}: {detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL ({name}: {why})", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
