use thiserror::Error;

use super::rules::{parse_rule, parse_value};
use super::{TvValuation, ValuationError};
use crate::syntax::{parse_formula, strip_comment, Formula, Signature};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {msg}")]
pub struct ValuationFileError {
    pub line: usize,
    pub msg: String,
}

impl TvValuation {
    /// Read the line-oriented valuation format:
    ///
    /// ```text
    /// domain a b
    /// default f
    /// atom p(@a,@a) = t
    /// atom @a = @b : f
    /// rule p(f^n(@a), f^m(@a)) = t if m = n+1
    /// ```
    pub fn parse(text: &str, sig: &Signature) -> Result<TvValuation, ValuationFileError> {
        let mut domain: Option<(usize, Vec<String>)> = None;
        let mut default = None;
        let mut atoms = Vec::new();
        let mut rules = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let err = |msg: String| ValuationFileError { line: line_no, msg };
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let (kw, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            match kw {
                "domain" => {
                    let names = rest.split_whitespace().map(|p| p.trim_start_matches('@').to_string()).collect();
                    domain = Some((line_no, names));
                }
                "default" => default = Some(parse_value(rest).map_err(err)?),
                "atom" => {
                    let (formula, value) = split_atom_line(rest).map_err(err)?;
                    let f = parse_formula(formula, sig).map_err(|e| err(e.to_string()))?;
                    atoms.push((line_no, f, value));
                }
                "rule" => rules.push((line_no, parse_rule(rest).map_err(err)?)),
                other => return Err(err(format!("unknown directive `{other}`"))),
            }
        }
        let default = default.ok_or(ValuationFileError { line: 0, msg: "missing `default` line".into() })?;
        let (line, domain) = domain.unwrap_or((0, sig.params().to_vec()));
        let mut v = TvValuation::new(sig.clone(), domain, default).map_err(|e| ValuationFileError {
            line,
            msg: e.to_string(),
        })?;
        for (line, f, value) in atoms {
            v.set_atom(f, value).map_err(|e| ValuationFileError { line, msg: e.to_string() })?;
        }
        for (line, r) in rules {
            v.push_rule(r).map_err(|e: ValuationError| ValuationFileError { line, msg: e.to_string() })?;
        }
        Ok(v)
    }

    /// Render in the valuation file format; `parse(to_file(v)) == v`.
    pub fn to_file(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("domain {}\n", self.domain.join(" ")));
        out.push_str(&format!("default {}\n", if self.default { "t" } else { "f" }));
        for (atom, value) in &self.atoms {
            let v = if *value { "t" } else { "f" };
            match atom {
                Formula::Equal(..) => out.push_str(&format!("atom {atom} : {v}\n")),
                _ => out.push_str(&format!("atom {atom} = {v}\n")),
            }
        }
        for r in &self.rules {
            out.push_str(&format!("{r}\n"));
        }
        out
    }
}

/// `p(@a) = t` or `@a = @b : t`.
fn split_atom_line(rest: &str) -> Result<(&str, bool), String> {
    if let Some((f, v)) = rest.rsplit_once(':') {
        Ok((f.trim(), parse_value(v)?))
    } else {
        let (f, v) = rest.rsplit_once('=').ok_or("atom line needs `= t|f`")?;
        Ok((f.trim(), parse_value(v)?))
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::AtomValuation;
    use super::*;

    #[test]
    fn fixtures_round_trip() {
        for (s, v) in [(V0_SIG, V0), (CONST_SIG, CONST_C), (TOWER_SIG, TOWER)] {
            let (sig, val) = load(s, v);
            assert_eq!(TvValuation::parse(&val.to_file(), &sig).unwrap(), val);
        }
    }

    #[test]
    fn errors_name_the_line() {
        let sig = Signature::parse(V0_SIG).unwrap();
        let e = TvValuation::parse("domain a\natom p(@a,@a) = t\n", &sig).unwrap_err();
        assert!(e.msg.contains("default"));
        let e = TvValuation::parse("default f\natom p(@a) = t\n", &sig).unwrap_err();
        assert_eq!(e.line, 2);
        let e = TvValuation::parse("default f\ndomain a z\n", &sig).unwrap_err();
        assert_eq!(e.line, 2);
        let e = TvValuation::parse("default maybe\n", &sig).unwrap_err();
        assert_eq!(e.line, 1);
        let e = TvValuation::parse("default f\nrule p(@a, ?x) = t if n = 1\n", &sig).unwrap_err();
        assert_eq!(e.line, 2);
    }

    #[test]
    fn exact_atoms_shadow_rules() {
        let sig = Signature::parse(TOWER_SIG).unwrap();
        let v = TvValuation::parse(&format!("{TOWER}atom p(@a, f(@a)) = f\n"), &sig).unwrap();
        let fa = crate::syntax::Term::app("f", vec![crate::syntax::Term::param("a")]);
        assert!(!v.atom(&Formula::atom("p", vec![crate::syntax::Term::param("a"), fa])));
    }
}
