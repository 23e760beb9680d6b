//! The `plt` command line.
//!
//! Every command prints a report followed by a last line `RESULT: <word>`.
//! The exit code is determined by that word: `t`, `ok` and `proved` give 0;
//! `f`, `fail` and `countermodel` give 1; `indeterminate` and `exhausted`
//! give 2; input errors print `RESULT: error` and give 3.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::conservativity::{
    bang, epsilon_axioms, epsilon_extend, iota_axiom, verify_conservativity, Kind, SelectionSpec,
};
use crate::deduction::{check_deduction, parse_proof, strictness_axioms, EqualityAxioms, SystemId, SystemProfile};
use crate::extension::{check_extension_property, extend_valuation, lift_undefined, parse_extension, Interpretation};
use crate::syntax::{
    enumerate::tuples, enumerate_pure_terms, parse_formula, parse_formula_with, parse_term_with, purify, Formula,
    ParseOptions, Signature, Term,
};
use crate::tableaux::{decide, Budget, DecideOutcome};
use crate::valuation::{
    check_equality_valuation, check_strict, eval, is_denoting, is_totally_denoting, representative, AtomValuation,
    EvalMode, TvValuation,
};

#[derive(Parser, Debug)]
#[command(name = "plt", version, about = "Classical logic of partial terms: evaluation, proof checking and tableaux")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug)]
struct SigArg {
    /// Signature file.
    #[arg(long)]
    sig: PathBuf,
}

#[derive(Args, Debug)]
struct ValArgs {
    #[command(flatten)]
    sig: SigArg,
    /// Valuation file.
    #[arg(long)]
    val: PathBuf,
}

#[derive(Args, Debug)]
struct SelectionArgs {
    #[command(flatten)]
    val: ValArgs,
    /// The formula D.
    #[arg(long)]
    formula: String,
    /// Free variables of D, comma separated; the last one is y.
    #[arg(long)]
    vars: String,
    /// Name of the new function symbol.
    #[arg(long, default_value = "f")]
    name: String,
    #[arg(long, default_value_t = 2)]
    depth: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Param,
    Pureterm,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SystemArg {
    Nc,
    Nceq,
    Nceqs,
    Ncdowneq,
}

impl From<SystemArg> for SystemId {
    fn from(s: SystemArg) -> SystemId {
        match s {
            SystemArg::Nc => SystemId::Nc,
            SystemArg::Nceq => SystemId::NcEq,
            SystemArg::Nceqs => SystemId::NcEqStrict,
            SystemArg::Ncdowneq => SystemId::NcDownEq,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AxiomKind {
    Equality,
    Strictness,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ConsKind {
    Epsilon,
    Iota,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Parse a formula (or a term) and print it back.
    Parse {
        #[command(flatten)]
        sig: SigArg,
        #[arg(long)]
        term: bool,
        text: String,
    },
    /// Evaluate a pure formula under a valuation.
    Eval {
        #[command(flatten)]
        val: ValArgs,
        #[arg(long)]
        formula: String,
        #[arg(long, value_enum, default_value = "param")]
        mode: ModeArg,
        /// Term depth for `--mode pureterm`.
        #[arg(long, default_value_t = 1)]
        depth: usize,
    },
    /// Check a proof file in one of the deduction systems.
    Check {
        #[command(flatten)]
        sig: SigArg,
        #[arg(long, value_enum)]
        system: SystemArg,
        proof: PathBuf,
    },
    /// Search for a tableau proof or a countermodel of `G1 ; G2 |- F`.
    Decide {
        #[command(flatten)]
        sig: SigArg,
        #[arg(long, value_enum, default_value = "nceq")]
        system: SystemArg,
        #[arg(long, default_value_t = 10_000)]
        max_steps: usize,
        #[arg(long, default_value_t = 8)]
        max_params: usize,
        sequent: String,
    },
    /// List ground axiom instances.
    Axioms {
        #[command(flatten)]
        sig: SigArg,
        #[arg(long, value_enum)]
        kind: AxiomKind,
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
    /// Extend a valuation by new symbols and check the extension.
    Extend {
        #[command(flatten)]
        val: ValArgs,
        /// Extension file.
        #[arg(long)]
        ext: PathBuf,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        /// Sample formulas with free variables; defaults to one atom per
        /// relation and `x = y`.
        #[arg(long)]
        sample: Vec<String>,
        /// A pure formula of the extended language to evaluate.
        #[arg(long)]
        formula: Option<String>,
    },
    /// Add the non-denoting constant `undef` to a totally denoting valuation.
    Lift {
        #[command(flatten)]
        val: ValArgs,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// A pure formula, possibly mentioning `undef`, to evaluate.
        #[arg(long)]
        formula: Option<String>,
    },
    /// Interpret a new function symbol as a selection function for D.
    Epsilon(SelectionArgs),
    /// Interpret a new function symbol as a description function for D.
    Iota(SelectionArgs),
    /// Check equality, strictness and total denotation of a valuation.
    VerifyValuation {
        #[command(flatten)]
        val: ValArgs,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long)]
        equality: bool,
        #[arg(long)]
        strict: bool,
        #[arg(long)]
        total: bool,
    },
    /// Build the selection or description extension and check its axioms.
    VerifyConservativity {
        #[command(flatten)]
        sel: SelectionArgs,
        #[arg(long, value_enum)]
        kind: ConsKind,
    },
}

struct Report {
    body: String,
    result: &'static str,
}

impl Report {
    fn new(result: &'static str) -> Self {
        Report { body: String::new(), result }
    }

    fn line(&mut self, s: impl std::fmt::Display) {
        let _ = writeln!(self.body, "{s}");
    }
}

pub fn exit_code(result: &str) -> i32 {
    match result {
        "t" | "ok" | "proved" => 0,
        "f" | "fail" | "countermodel" => 1,
        "indeterminate" | "exhausted" => 2,
        _ => 3,
    }
}

fn paint(result: &str) -> String {
    if std::env::var("PLT_COLOR").as_deref() != Ok("1") {
        return result.to_string();
    }
    let code = match exit_code(result) {
        0 => "32",
        1 => "31",
        2 => "33",
        _ => "35",
    };
    format!("\x1b[{code}m{result}\x1b[0m")
}

type CliResult = Result<Report, String>;

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_sig(arg: &SigArg) -> Result<Signature, String> {
    Signature::parse(&read(&arg.sig)?).map_err(|e| format!("{}: {e}", arg.sig.display()))
}

/// Add the parameters named on the file's `domain` line to the signature,
/// so that valuations printed by `decide` can be read back against the
/// original signature.
fn load_val(args: &ValArgs) -> Result<TvValuation, String> {
    let sig = load_sig(&args.sig)?;
    let text = read(&args.val)?;
    let mut params = sig.params().to_vec();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if let Some(rest) = line.strip_prefix("domain") {
            for a in rest.split_whitespace().map(|a| a.trim_start_matches('@')) {
                if !params.iter().any(|p| p == a) {
                    params.push(a.to_string());
                }
            }
        }
    }
    let sig = sig.with_params(params).map_err(|e| format!("{}: {e}", args.sig.sig.display()))?;
    TvValuation::parse(&text, &sig).map_err(|e| format!("{}: {e}", args.val.display()))
}

fn formula_arg(text: &str, sig: &Signature) -> Result<Formula, String> {
    parse_formula(text, sig).map_err(|e| format!("formula `{text}`: {e}"))
}

fn open_formula(text: &str, sig: &Signature) -> Result<Formula, String> {
    parse_formula_with(text, sig, ParseOptions { free_vars: true, any_param: false })
        .map_err(|e| format!("formula `{text}`: {e}"))
}

fn verdict_report(v: &dyn AtomValuation, f: &Formula, mode: EvalMode) -> CliResult {
    let verdict = eval(v, f, mode).map_err(|e| e.to_string())?;
    let mut r = Report::new(match verdict.to_string().as_str() {
        "t" => "t",
        "f" => "f",
        _ => "indeterminate",
    });
    r.line(format!("{f} : {verdict}"));
    Ok(r)
}

fn cmd_parse(sig: &SigArg, term: bool, text: &str) -> CliResult {
    let sig = load_sig(sig)?;
    let opts = ParseOptions { free_vars: true, any_param: true };
    let mut r = Report::new("ok");
    if term {
        let t = parse_term_with(text, &sig, opts).map_err(|e| format!("term `{text}`: {e}"))?;
        r.line(&t);
        r.line(format!("pure: {}", if t.is_pure() { "yes" } else { "no" }));
    } else {
        let f = parse_formula_with(text, &sig, opts).map_err(|e| format!("formula `{text}`: {e}"))?;
        r.line(&f);
        let free = f.free_vars();
        r.line(format!("pure: {}", if free.is_empty() { "yes" } else { "no" }));
        if !free.is_empty() {
            r.line(format!("free variables: {}", free.join(", ")));
        }
    }
    Ok(r)
}

fn cmd_eval(val: &ValArgs, formula: &str, mode: ModeArg, depth: usize) -> CliResult {
    let v = load_val(val)?;
    let f = formula_arg(formula, v.signature())?;
    let mode = match mode {
        ModeArg::Param => EvalMode::ParamQuant,
        ModeArg::Pureterm => EvalMode::PureTermQuant(depth),
    };
    verdict_report(&v, &f, mode)
}

fn cmd_check(sig: &SigArg, system: SystemArg, proof: &Path) -> CliResult {
    let sig = load_sig(sig)?;
    let d = parse_proof(&read(proof)?, &sig).map_err(|e| format!("{}: {e}", proof.display()))?;
    let report = check_deduction(&d, &SystemProfile::of(system.into()));
    let mut r = Report::new(if report.ok { "ok" } else { "fail" });
    r.line(format!("system: {}", SystemId::from(system)));
    r.line(format!("conclusion: {}", report.conclusion));
    if report.open_assumptions.is_empty() {
        r.line("open assumptions: none");
    }
    for a in &report.open_assumptions {
        r.line(format!("open assumption: {a}"));
    }
    for v in &report.violations {
        r.line(format!("violation {v}"));
    }
    Ok(r)
}

fn parse_sequent(text: &str, sig: &Signature) -> Result<(Vec<Formula>, Formula), String> {
    let (lhs, rhs) = text.split_once("|-").ok_or_else(|| format!("sequent `{text}`: expected `|-`"))?;
    let opts = ParseOptions { free_vars: true, any_param: true };
    let parse = |s: &str| parse_formula_with(s.trim(), sig, opts).map_err(|e| format!("sequent formula `{}`: {e}", s.trim()));
    let premises = lhs.split(';').filter(|s| !s.trim().is_empty()).map(parse).collect::<Result<Vec<_>, _>>()?;
    Ok((premises, parse(rhs)?))
}

fn cmd_decide(sig: &SigArg, system: SystemArg, budget: Budget, sequent: &str) -> CliResult {
    let sig = load_sig(sig)?;
    let (premises, goal) = parse_sequent(sequent, &sig)?;
    let (premises, goal, theta) = purify(&premises, &goal);
    let mut params = sig.params().to_vec();
    for f in premises.iter().chain([&goal]) {
        for a in f.params() {
            if !params.contains(&a) {
                params.push(a);
            }
        }
    }
    let sig = sig.with_params(params).map_err(|e| e.to_string())?;
    let mut r = Report::new("ok");
    for (x, a) in &theta.pairs {
        r.line(format!("# free variable {x} read as @{a}"));
    }
    match decide(&sig, &premises, &goal, system.into(), budget).map_err(|e| e.to_string())? {
        DecideOutcome::Proved(cert) => {
            r.result = "proved";
            r.body.push_str(&cert.to_string());
        }
        DecideOutcome::Countermodel(v) => {
            r.result = "countermodel";
            r.line("# countermodel");
            r.body.push_str(&v.to_file());
        }
        DecideOutcome::Exhausted(stats) => {
            r.result = "exhausted";
            r.line(format!(
                "# gave up after {} steps, {} closed branches, {} parameters: {}",
                stats.steps, stats.closed_branches, stats.max_params_seen, stats.reason
            ));
        }
    }
    Ok(r)
}

fn cmd_axioms(sig: &SigArg, kind: AxiomKind, count: usize) -> CliResult {
    let sig = load_sig(sig)?;
    let axioms: Vec<Formula> = match kind {
        AxiomKind::Equality => EqualityAxioms::new(&sig).take(count).collect(),
        AxiomKind::Strictness => strictness_axioms(&sig, count),
    };
    let mut r = Report::new("ok");
    for (i, a) in axioms.iter().enumerate() {
        r.line(format!("{i}: {a}"));
    }
    Ok(r)
}

fn default_samples(sig: &Signature) -> Vec<Formula> {
    let mut out: Vec<Formula> = sig
        .relations()
        .iter()
        .map(|(p, n)| Formula::atom(p, (1..=*n).map(|i| Term::var(&format!("x{i}"))).collect()))
        .collect();
    out.push(Formula::eq(Term::var("x"), Term::var("y")));
    out
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn cmd_extend(val: &ValArgs, ext: &Path, depth: usize, samples: &[String], formula: Option<&str>) -> CliResult {
    let v = load_val(val)?;
    let ctx = parse_extension(&read(ext)?, v.signature(), v.domain()).map_err(|e| format!("{}: {e}", ext.display()))?;
    let samples = if samples.is_empty() {
        default_samples(v.signature())
    } else {
        samples.iter().map(|s| open_formula(s, v.signature())).collect::<Result<Vec<_>, _>>()?
    };
    let base: Arc<dyn AtomValuation> = Arc::new(v);
    let extended = match extend_valuation(base.clone(), ctx.clone(), Some(depth)) {
        Ok(e) => e,
        Err(e) => {
            let mut r = Report::new("fail");
            r.line(e);
            return Ok(r);
        }
    };
    let mut r = Report::new("ok");
    for d in ctx.describe() {
        r.line(format!("extend {d}"));
    }
    let report = check_extension_property(base.clone(), ctx, &samples, depth).map_err(|e| e.to_string())?;
    r.line(&report);
    let base_total = is_totally_denoting(base.as_ref());
    r.line(format!("totally denoting: base {}, extension {}", yes_no(base_total), yes_no(is_totally_denoting(&extended))));
    let base_strict = check_strict(base.as_ref(), depth).pass();
    let strict_interps =
        extended.context().interpretations().iter().all(|i| crate::extension::is_strict_interp(base.as_ref(), i.as_ref(), depth));
    let ext_strict = check_strict(&extended, depth).pass();
    r.line(format!(
        "strict: base {}, interpretations {}, extension {}",
        yes_no(base_strict),
        yes_no(strict_interps),
        yes_no(ext_strict)
    ));
    let mut ok = report.pass();
    ok &= !base_total || is_totally_denoting(&extended);
    ok &= !(base_strict && strict_interps) || ext_strict;
    if let Some(text) = formula {
        let f = formula_arg(text, extended.signature())?;
        let verdict = eval(&extended, &f, EvalMode::ParamQuant).map_err(|e| e.to_string())?;
        r.line(format!("{f} : {verdict}"));
    }
    if !ok {
        r.result = "fail";
    }
    Ok(r)
}

fn cmd_lift(val: &ValArgs, depth: usize, formula: Option<&str>) -> CliResult {
    let v: Arc<dyn AtomValuation> = Arc::new(load_val(val)?);
    let lifted = match lift_undefined(v.clone()) {
        Ok(l) => l,
        Err(e) => {
            let mut r = Report::new("fail");
            r.line(e);
            return Ok(r);
        }
    };
    let mut r = Report::new("ok");
    let eq = check_equality_valuation(&lifted, depth);
    r.line(&eq);
    let base_terms = enumerate_pure_terms(v.signature(), depth);
    let mut disagreements = 0usize;
    let mut atoms = 0usize;
    for (p, n) in v.signature().relations() {
        for args in tuples(&base_terms, *n) {
            atoms += 1;
            let a = Formula::Atom(p.clone(), args);
            disagreements += usize::from(v.atom(&a) != lifted.atom(&a));
        }
    }
    for args in tuples(&base_terms, 2) {
        atoms += 1;
        let a = Formula::eq(args[0].clone(), args[1].clone());
        disagreements += usize::from(v.atom(&a) != lifted.atom(&a));
    }
    r.line(format!("agreement with base on {atoms} atoms up to depth {depth}: {} disagreement(s)", disagreements));
    let undef_denotes = is_denoting(&lifted, &Term::undef()).unwrap_or(true);
    r.line(format!("undef denoting: {}", yes_no(undef_denotes)));
    if let Some(text) = formula {
        let f = formula_arg(text, lifted.signature())?;
        let verdict = eval(&lifted, &f, EvalMode::ParamQuant).map_err(|e| e.to_string())?;
        r.line(format!("{f} : {verdict}"));
    }
    if !eq.pass() || disagreements > 0 || undef_denotes {
        r.result = "fail";
    }
    Ok(r)
}

fn selection_spec(args: &SelectionArgs) -> Result<(TvValuation, SelectionSpec), String> {
    let v = load_val(&args.val)?;
    let d = open_formula(&args.formula, v.signature())?;
    let vars: Vec<String> = args.vars.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
    let spec = SelectionSpec::new(d, &vars, &args.name, v.signature()).map_err(|e| e.to_string())?;
    Ok((v, spec))
}

fn cmd_selection(args: &SelectionArgs, kind: Kind) -> CliResult {
    let (v, spec) = selection_spec(args)?;
    let (axioms, build) = match kind {
        Kind::Epsilon => {
            let (e1, e2) = epsilon_axioms(&spec);
            (vec![e1, e2], spec.clone())
        }
        Kind::Iota => {
            let d = bang(&spec.formula, &spec.y);
            (vec![iota_axiom(&spec)], SelectionSpec { formula: d, ..spec.clone() })
        }
    };
    let ext = epsilon_extend(Arc::new(v), &build, args.depth).map_err(|e| e.to_string())?;
    let mut r = Report::new("ok");
    for a in &axioms {
        r.line(format!("axiom: {a}"));
    }
    r.line(format!("base lifted: {}", yes_no(ext.lifted)));
    r.line(format!("default: {}", ext.interpretation.t0()));
    for (args, value) in ext.interpretation.table() {
        r.line(format!("{} = {value}", Term::App(ext.interpretation.name().to_string(), args)));
    }
    Ok(r)
}

fn cmd_verify_valuation(val: &ValArgs, depth: usize, equality: bool, strict: bool, total: bool) -> CliResult {
    let v = load_val(val)?;
    let all = !(equality || strict || total);
    let mut r = Report::new("ok");
    let mut ok = true;
    if all || equality {
        let rep = check_equality_valuation(&v, depth);
        ok &= rep.pass();
        r.line(&rep);
    }
    if all || strict {
        let rep = check_strict(&v, depth);
        ok &= rep.pass();
        r.line(&rep);
    }
    if all || total {
        let witness = non_denoting_witness(&v);
        match &witness {
            None => r.line("totally denoting: yes"),
            Some(t) => r.line(format!("totally denoting: no ({t} does not denote)")),
        }
        ok &= witness.is_none();
    }
    if !ok {
        r.result = "fail";
    }
    Ok(r)
}

/// A function applied to domain parameters with no representative.
fn non_denoting_witness(v: &dyn AtomValuation) -> Option<Term> {
    if is_totally_denoting(v) {
        return None;
    }
    let params: Vec<Term> = v.domain().iter().map(|a| Term::param(a)).collect();
    v.signature().functions().into_iter().find_map(|(f, n)| {
        tuples(&params, n).into_iter().map(|args| Term::App(f.clone(), args)).find(|t| representative(v, t).is_none())
    })
}

fn cmd_verify_conservativity(args: &SelectionArgs, kind: Kind) -> CliResult {
    let (v, spec) = selection_spec(args)?;
    let report = verify_conservativity(Arc::new(v), &spec, kind, args.depth).map_err(|e| e.to_string())?;
    let mut r = Report::new(if report.pass() { "ok" } else { "fail" });
    r.line(&report);
    Ok(r)
}

fn dispatch(cmd: &Cmd) -> CliResult {
    match cmd {
        Cmd::Parse { sig, term, text } => cmd_parse(sig, *term, text),
        Cmd::Eval { val, formula, mode, depth } => cmd_eval(val, formula, *mode, *depth),
        Cmd::Check { sig, system, proof } => cmd_check(sig, *system, proof),
        Cmd::Decide { sig, system, max_steps, max_params, sequent } => {
            cmd_decide(sig, *system, Budget { max_steps: *max_steps, max_params: *max_params }, sequent)
        }
        Cmd::Axioms { sig, kind, count } => cmd_axioms(sig, *kind, *count),
        Cmd::Extend { val, ext, depth, sample, formula } => cmd_extend(val, ext, *depth, sample, formula.as_deref()),
        Cmd::Lift { val, depth, formula } => cmd_lift(val, *depth, formula.as_deref()),
        Cmd::Epsilon(args) => cmd_selection(args, Kind::Epsilon),
        Cmd::Iota(args) => cmd_selection(args, Kind::Iota),
        Cmd::VerifyValuation { val, depth, equality, strict, total } => {
            cmd_verify_valuation(val, *depth, *equality, *strict, *total)
        }
        Cmd::VerifyConservativity { sel, kind } => cmd_verify_conservativity(
            sel,
            match kind {
                ConsKind::Epsilon => Kind::Epsilon,
                ConsKind::Iota => Kind::Iota,
            },
        ),
    }
}

/// Run with explicit output streams; returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = write!(out, "{e}");
            return 0;
        }
        Err(e) => {
            let _ = write!(err, "{e}");
            let _ = writeln!(out, "RESULT: {}", paint("error"));
            return 3;
        }
    };
    match dispatch(&cli.cmd) {
        Ok(r) => {
            let _ = write!(out, "{}", r.body);
            let _ = writeln!(out, "RESULT: {}", paint(r.result));
            exit_code(r.result)
        }
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            let _ = writeln!(out, "RESULT: {}", paint("error"));
            3
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}
