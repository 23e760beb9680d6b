use std::fmt;

use thiserror::Error;

use super::{AxiomClass, Deduction, Rule};
use crate::syntax::{parse_formula_with, parse_term_with, strip_comment, ParseOptions, Signature, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {msg}")]
pub struct ProofFileError {
    pub line: usize,
    pub msg: String,
}

struct Line {
    number: usize,
    depth: usize,
    node: Deduction,
}

const OPTS: ParseOptions = ParseOptions { free_vars: true, any_param: true };

/// Parse an indented proof tree, one node per line, children indented two
/// spaces below their parent:
///
/// ```text
/// imp-i label=h : p(@a) -> p(@a)
///   assume label=h : p(@a)
/// ```
pub fn parse_proof(text: &str, sig: &Signature) -> Result<Deduction, ProofFileError> {
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let number = i + 1;
        let content = strip_comment(raw).trim_end();
        if content.trim().is_empty() {
            continue;
        }
        let indent = content.len() - content.trim_start().len();
        if content[..indent].contains('\t') || !indent.is_multiple_of(2) {
            return Err(ProofFileError { line: number, msg: "indent with a multiple of two spaces".into() });
        }
        let node = parse_line(content.trim(), sig).map_err(|msg| ProofFileError { line: number, msg })?;
        lines.push(Line { number, depth: indent / 2, node });
    }
    if lines.is_empty() {
        return Err(ProofFileError { line: 0, msg: "empty proof".into() });
    }
    if lines[0].depth != 0 {
        return Err(ProofFileError { line: lines[0].number, msg: "the root must not be indented".into() });
    }
    let mut iter = lines.into_iter().peekable();
    let root = build(&mut iter, 0)?;
    if let Some(extra) = iter.next() {
        return Err(ProofFileError { line: extra.number, msg: "a proof has exactly one root".into() });
    }
    Ok(root)
}

fn build(lines: &mut std::iter::Peekable<std::vec::IntoIter<Line>>, depth: usize) -> Result<Deduction, ProofFileError> {
    let Line { mut node, .. } = lines.next().expect("caller peeked");
    while let Some(next) = lines.peek() {
        if next.depth <= depth {
            break;
        }
        if next.depth > depth + 1 {
            return Err(ProofFileError { line: next.number, msg: "indented more than one level below its parent".into() });
        }
        node.children.push(build(lines, depth + 1)?);
    }
    Ok(node)
}

fn parse_line(line: &str, sig: &Signature) -> Result<Deduction, String> {
    let (head, formula) = line.split_once(':').ok_or("expected `<rule> : <formula>`")?;
    let conclusion = parse_formula_with(formula.trim(), sig, OPTS).map_err(|e| e.to_string())?;
    let mut words = head.split_whitespace();
    let rule_name = words.next().ok_or("missing rule name")?;
    let mut label: Option<String> = None;
    let mut param: Option<Term> = None;
    let mut class = None;
    for w in words {
        if let Some(l) = w.strip_prefix("label=") {
            label = Some(l.to_string());
        } else if let Some(p) = w.strip_prefix("param=") {
            param = Some(parse_term_with(p, sig, OPTS).map_err(|e| format!("param: {e}"))?);
        } else if rule_name == "axiom" && class.is_none() {
            class = Some(AxiomClass::from_name(w).ok_or_else(|| format!("unknown axiom class `{w}`"))?);
        } else {
            return Err(format!("unexpected `{w}`"));
        }
    }
    let single = |l: &Option<String>| -> Result<Option<String>, String> {
        match l {
            Some(l) if l.contains(',') => Err(format!("{rule_name} takes one label")),
            other => Ok(other.clone()),
        }
    };
    let rule = match rule_name {
        "assume" => Rule::Assume(single(&label)?),
        "and-i" => Rule::AndI,
        "and-e1" => Rule::AndE1,
        "and-e2" => Rule::AndE2,
        "or-i1" => Rule::OrI1,
        "or-i2" => Rule::OrI2,
        "or-e" => {
            let l = label.take().unwrap_or_default();
            let (a, b) = l.split_once(',').unwrap_or((&l, ""));
            let opt = |s: &str| (!s.is_empty()).then(|| s.to_string());
            Rule::OrE(opt(a), opt(b))
        }
        "imp-i" => Rule::ImpI(single(&label)?),
        "imp-e" => Rule::ImpE,
        "not-i" => Rule::NotI(single(&label)?),
        "not-e" => Rule::NotE,
        "false-e" => Rule::FalsumE,
        "raa" => Rule::Raa(single(&label)?),
        "forall-i" => Rule::ForallI,
        "forall-e" => Rule::ForallE,
        "exists-i" => Rule::ExistsI,
        "exists-e" => Rule::ExistsE(single(&label)?),
        "axiom" => Rule::Axiom(class.ok_or("axiom needs a class")?),
        other => return Err(format!("unknown rule `{other}`")),
    };
    if label.is_some() && rule.discharges().is_empty() && !matches!(rule, Rule::Assume(_)) {
        return Err(format!("{rule_name} takes no label"));
    }
    if param.is_some() && !matches!(rule, Rule::ForallI | Rule::ExistsE(_)) {
        return Err(format!("{rule_name} takes no param"));
    }
    Ok(Deduction { rule, conclusion, children: Vec::new(), param })
}

impl Deduction {
    fn write_indented(&self, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
        write!(f, "{:width$}{}", "", self.rule.name(), width = 2 * depth)?;
        match &self.rule {
            Rule::OrE(a, b) if a.is_some() || b.is_some() => {
                write!(f, " label={},{}", a.as_deref().unwrap_or(""), b.as_deref().unwrap_or(""))?
            }
            Rule::Assume(Some(l))
            | Rule::ImpI(Some(l))
            | Rule::NotI(Some(l))
            | Rule::Raa(Some(l))
            | Rule::ExistsE(Some(l)) => write!(f, " label={l}")?,
            _ => {}
        }
        if let Some(p) = &self.param {
            write!(f, " param={p}")?;
        }
        writeln!(f, " : {}", self.conclusion)?;
        for c in &self.children {
            c.write_indented(f, depth + 1)?;
        }
        Ok(())
    }
}

/// The proof file format read by [`parse_proof`].
impl fmt::Display for Deduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_indented(f, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::super::{check_deduction, SystemId, SystemProfile};
    use super::*;

    const SIG: &str = "rel p/1\nrel q/2\nparams a b\n";

    const SYMM: &str = "\
# symmetry from reflexivity and substitutivity
forall-i param=@a : forall x. forall y. (x = y -> y = x)
  forall-i param=@b : forall y. (@a = y -> y = @a)
    imp-i label=h : @a = @b -> @b = @a
      imp-e : @b = @a
        imp-e : @a = @a -> @b = @a
          forall-e : @a = @b -> (@a = @a -> @b = @a)
            forall-e : forall y. (@a = y -> (@a = @a -> y = @a))
              axiom sbst : forall x. forall y. (x = y -> (x = x -> y = x))
          assume label=h : @a = @b
        forall-e : @a = @a
          axiom rfl : forall x. x = x
";

    #[test]
    fn parses_and_checks() {
        let sig = Signature::parse(SIG).unwrap();
        let d = parse_proof(SYMM, &sig).unwrap();
        assert_eq!(d.size(), 11);
        let r = check_deduction(&d, &SystemProfile::of(SystemId::NcEq));
        assert!(r.ok, "{:?}", r.violations);
        assert!(r.open_assumptions.is_empty());
        assert!(!check_deduction(&d, &SystemProfile::of(SystemId::Nc)).ok);
    }

    #[test]
    fn display_round_trips() {
        let sig = Signature::parse(SIG).unwrap();
        let d = parse_proof(SYMM, &sig).unwrap();
        assert_eq!(parse_proof(&d.to_string(), &sig).unwrap(), d);
        let or_e = "or-e label=l,r : p(@a)\n  assume : p(@a) | p(@a)\n  assume label=l : p(@a)\n  assume label=r : p(@a)\n";
        let d = parse_proof(or_e, &sig).unwrap();
        assert_eq!(d.to_string(), or_e);
        assert!(check_deduction(&d, &SystemProfile::of(SystemId::Nc)).ok);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let sig = Signature::parse(SIG).unwrap();
        let cases = [
            ("imp-i : p(@a) -> p(@a)\n   assume : p(@a)\n", 2),
            ("imp-i : p(@a) -> p(@a)\n    assume : p(@a)\n", 2),
            ("assume : p(@a)\nassume : p(@a)\n", 2),
            ("frobnicate : p(@a)\n", 1),
            ("# c\nassume : p(@a, @a)\n", 2),
            ("axiom : p(@a)\n", 1),
            ("and-i label=h : p(@a)\n", 1),
            ("imp-e param=@a : p(@a)\n", 1),
        ];
        for (text, line) in cases {
            assert_eq!(parse_proof(text, &sig).unwrap_err().line, line, "{text}");
        }
    }
}
