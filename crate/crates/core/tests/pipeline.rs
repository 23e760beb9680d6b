mod common;

use std::path::PathBuf;

use common::{cli, fixture, proofs, result_line, sig};
use plt_core::deduction::{check_deduction, SystemId, SystemProfile};
use plt_core::tableaux::{decide, verify_certificate, Budget, DecideOutcome};

fn scratch_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("plt-pipeline-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

/// Decide a sequent with no valid proof, save the printed countermodel and
/// evaluate both sides of the sequent in it.
#[test]
fn printed_countermodels_evaluate_as_claimed() {
    let cases = [
        ("v0.sig", "nceq", "forall x. exists y. p(x, y)", "exists y. forall x. p(x, y)"),
        ("const.sig", "nceq", "p(c)", "exists x. p(x)"),
        ("logic.sig", "nc", "exists x. p(x)", "forall x. p(x)"),
        ("logic.sig", "nceq", "q(@a, @b)", "q(@b, @a)"),
        ("logic.sig", "nc", "forall x. (p(x) | q(x, x))", "(forall x. p(x)) | (forall x. q(x, x))"),
        ("three.sig", "nceq", "forall x. exists y. p(x, y)", "exists x. p(x, x)"),
    ];
    let dir = scratch_dir();
    for (i, (sig_file, system, premise, goal)) in cases.iter().enumerate() {
        let sequent = format!("{premise} |- {goal}");
        let (code, out, err) = cli(&["decide", "--sig", sig_file, "--system", system, &sequent]);
        assert_eq!((code, result_line(&out)), (1, "RESULT: countermodel"), "{sequent}: {out}{err}");
        let model: String = out.lines().filter(|l| !l.starts_with("RESULT:")).map(|l| format!("{l}\n")).collect();
        let path = dir.join(format!("model{i}.val"));
        std::fs::write(&path, model).unwrap();
        let sig_path = fixture(sig_file).display().to_string();
        let val_path = path.display().to_string();
        for (f, want) in [(premise, "RESULT: t"), (goal, "RESULT: f")] {
            let (_, out, err) = cli(&["eval", "--sig", &sig_path, "--val", &val_path, "--formula", f]);
            assert_eq!(result_line(&out), want, "{f} in the countermodel to {sequent}: {out}{err}");
        }
        if *system == "nceq" {
            let (code, out, _) = cli(&["verify-valuation", "--sig", &sig_path, "--val", &val_path, "--equality"]);
            assert_eq!(code, 0, "{sequent}: {out}");
        }
    }
    std::fs::remove_dir_all(&dir).ok();
}

/// A conclusion the checker accepts from its open assumptions never gets a
/// countermodel from the tableau, and a proof found by the tableau replays.
#[test]
fn checker_and_tableau_agree_on_the_corpus() {
    let mut proved = 0;
    for p in proofs() {
        if !matches!(p.system, SystemId::Nc | SystemId::NcEq) {
            continue;
        }
        let report = check_deduction(&p.deduction, &SystemProfile::of(p.system));
        if !report.ok {
            continue;
        }
        let s = sig(&p.sig_name);
        let out = decide(&s, &report.open_assumptions, &report.conclusion, p.system, Budget::default()).unwrap();
        match out {
            DecideOutcome::Countermodel(v) => panic!("{}: countermodel {}", p.name, v.to_file()),
            DecideOutcome::Proved(cert) => {
                assert!(verify_certificate(&cert, &report.open_assumptions, &report.conclusion), "{}", p.name);
                proved += 1;
            }
            DecideOutcome::Exhausted(_) => {}
        }
    }
    assert!(proved >= 8, "only {proved} corpus conclusions proved");
}

/// The restricted instantiation that the checker rejects in nceq is not
/// valid there either.
#[test]
fn rejected_inference_has_a_countermodel() {
    let (code, out, _) = cli(&["decide", "--sig", "func.sig", "--system", "nceq", "forall x. p(x) |- p(f(@a))"]);
    assert_eq!(code, 1, "{out}");
    assert_eq!(result_line(&out), "RESULT: countermodel");
}
