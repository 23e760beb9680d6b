#![allow(dead_code)]

use std::path::PathBuf;

use plt_core::deduction::{parse_proof, Deduction, SystemId};
use plt_core::syntax::Signature;
use plt_core::valuation::TvValuation;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn read(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn sig(name: &str) -> Signature {
    Signature::parse(&read(&format!("{name}.sig"))).unwrap()
}

pub fn val(sig_name: &str, val_name: &str) -> TvValuation {
    TvValuation::parse(&read(&format!("{val_name}.val")), &sig(sig_name)).unwrap()
}

/// Run the command line with arguments relative to the fixtures directory.
pub fn cli(args: &[&str]) -> (i32, String, String) {
    let dir = fixture("");
    let mut full: Vec<String> = vec!["plt".into()];
    for a in args {
        let p = dir.join(a);
        let looks_like_file = a.ends_with(".sig") || a.ends_with(".val") || a.ends_with(".nd") || a.ends_with(".ext");
        full.push(if looks_like_file && p.exists() { p.display().to_string() } else { a.to_string() });
    }
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = plt_core::cli::run_with(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

pub fn result_line(stdout: &str) -> &str {
    stdout.lines().last().unwrap_or("")
}

pub struct ProofFixture {
    pub name: String,
    pub sig_name: String,
    pub system: SystemId,
    pub expect_ok: bool,
    pub deduction: Deduction,
}

/// Every proof under `fixtures/proofs`, with the header line
/// `# sig: <file> system: <id> expect: ok|fail`.
pub fn proofs() -> Vec<ProofFixture> {
    let mut names: Vec<PathBuf> = std::fs::read_dir(fixture("proofs"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "nd"))
        .collect();
    names.sort();
    names
        .into_iter()
        .map(|path| {
            let text = std::fs::read_to_string(&path).unwrap();
            let header = text.lines().next().unwrap();
            let field = |key: &str| {
                let rest = header.split(key).nth(1).unwrap_or_else(|| panic!("{} lacks {key}", path.display()));
                rest.split_whitespace().next().unwrap().to_string()
            };
            let sig_name = field("sig:").trim_end_matches(".sig").to_string();
            let system = SystemId::from_name(&field("system:")).unwrap();
            let expect_ok = field("expect:") == "ok";
            let deduction = parse_proof(&text, &sig(&sig_name)).unwrap();
            let name = path.file_name().unwrap().to_string_lossy().into_owned();
            ProofFixture { name, sig_name, system, expect_ok, deduction }
        })
        .collect()
}

/// Valuation fixtures grouped by signature.
pub const VALUATIONS: &[(&str, &[&str])] = &[
    ("v0", &["v0", "one_loop"]),
    ("const", &["const_c", "strict_c"]),
    ("tower", &["tower"]),
    ("three", &["cycle"]),
    ("logic", &["ident", "c_is_a", "no_eq", "all_true"]),
    ("func", &["partial_f", "f_ident", "all_true"]),
];
