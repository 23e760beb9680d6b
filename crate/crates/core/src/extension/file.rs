use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use super::{ExtensionContext, TableInterpretation};
use crate::syntax::{parse_term, strip_comment, Signature, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {msg}")]
pub struct ExtensionFileError {
    pub line: usize,
    pub msg: String,
}

/// Split `(t1, t2, ...)` at its top-level commas.
fn split_tuple(text: &str) -> Option<Vec<&str>> {
    let inner = text.trim().strip_prefix('(')?.strip_suffix(')')?;
    if inner.trim().is_empty() {
        return Some(Vec::new());
    }
    let mut parts = Vec::new();
    let (mut depth, mut start) = (0usize, 0);
    for (i, ch) in inner.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.checked_sub(1)?,
            ',' if depth == 0 => {
                parts.push(inner[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(inner[start..].trim());
    Some(parts)
}

fn parse_name_arity(s: &str) -> Result<(String, usize), String> {
    let (name, n) = s.split_once('/').ok_or_else(|| format!("expected name/arity, got `{s}`"))?;
    let n = n.parse().map_err(|_| format!("bad arity in `{s}`"))?;
    Ok((name.to_string(), n))
}

/// Name, arity, default value and explicit table of a new function.
type FunDecl = (String, usize, Option<Term>, BTreeMap<Vec<Term>, Term>);

/// Read an extension file against the base signature:
///
/// ```text
/// extend fun f/2 default @a
/// extend fun f/2 map (f(@a), @b) -> @a
/// extend const c' -> @a
/// extend rel q/1
/// ```
///
/// Repeated lines for the same function accumulate table entries. A
/// function or constant without an explicit default uses the first domain
/// parameter.
pub fn parse_extension(text: &str, base: &Signature, domain: &[String]) -> Result<ExtensionContext, ExtensionFileError> {
    let fallback = domain.first().or(base.params().first()).map(|a| Term::param(a));
    let mut funs: Vec<FunDecl> = Vec::new();
    let mut rels: Vec<(usize, String, usize)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |msg: String| ExtensionFileError { line, msg };
        let text = strip_comment(raw).trim();
        if text.is_empty() {
            continue;
        }
        let rest = text.strip_prefix("extend ").ok_or_else(|| err(format!("expected `extend`, got `{text}`")))?.trim();
        let (kind, rest) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
        let term = |s: &str| parse_term(s.trim(), base).map_err(|e| err(e.to_string()));
        let mut entry = |name: String, arity: usize| -> Result<usize, ExtensionFileError> {
            match funs.iter().position(|(f, _, _, _)| *f == name) {
                Some(k) if funs[k].1 == arity => Ok(k),
                Some(k) => Err(err(format!("`{name}` declared with arity {} and {arity}", funs[k].1))),
                None => {
                    funs.push((name, arity, None, BTreeMap::new()));
                    Ok(funs.len() - 1)
                }
            }
        };
        match kind {
            "fun" => {
                let (sym, clause) = rest.trim().split_once(char::is_whitespace).unwrap_or((rest.trim(), ""));
                let (name, arity) = parse_name_arity(sym).map_err(&err)?;
                let k = entry(name, arity)?;
                let clause = clause.trim();
                if let Some(t) = clause.strip_prefix("default") {
                    funs[k].2 = Some(term(t)?);
                } else if let Some(m) = clause.strip_prefix("map") {
                    let (args, value) = m.split_once("->").ok_or_else(|| err("expected `map (args) -> term`".into()))?;
                    let args = split_tuple(args).ok_or_else(|| err(format!("bad argument tuple `{}`", args.trim())))?;
                    if args.len() != arity {
                        return Err(err(format!("{} arguments for arity {arity}", args.len())));
                    }
                    let args = args.into_iter().map(term).collect::<Result<Vec<_>, _>>()?;
                    funs[k].3.insert(args, term(value)?);
                } else if !clause.is_empty() {
                    return Err(err(format!("unknown clause `{clause}`")));
                }
            }
            "const" => {
                let (name, value) = match rest.split_once("->") {
                    Some((n, v)) => (n.trim(), Some(term(v)?)),
                    None => (rest.trim(), None),
                };
                let k = entry(name.to_string(), 0)?;
                if value.is_some() {
                    funs[k].2 = value;
                }
            }
            "rel" => {
                let (name, arity) = parse_name_arity(rest.trim()).map_err(&err)?;
                rels.push((line, name, arity));
            }
            other => return Err(err(format!("unknown extension kind `{other}`"))),
        }
    }
    let mut ctx = ExtensionContext::new(base);
    for (name, arity, default, table) in funs {
        let default = default
            .or_else(|| fallback.clone())
            .ok_or_else(|| ExtensionFileError { line: 0, msg: format!("no default for `{name}` and no parameters") })?;
        ctx.add_function(Arc::new(TableInterpretation { name, arity, table, default }))
            .map_err(|e| ExtensionFileError { line: 0, msg: e.to_string() })?;
    }
    for (line, name, arity) in rels {
        ctx.add_relation(&name, arity).map_err(|e| ExtensionFileError { line, msg: e.to_string() })?;
    }
    Ok(ctx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::phi;

    #[test]
    fn all_forms() {
        let sig = Signature::parse("fun f/1\nrel p/2\nparams a b").unwrap();
        let text = "# new symbols\nextend fun g/2 default @b\nextend fun g/2 map (f(@a), @b) -> @a\n\
                    extend const c'\nextend const d -> f(@b)\nextend rel q/1\n";
        let ctx = parse_extension(text, &sig, &["a".into(), "b".into()]).unwrap();
        assert_eq!(ctx.interpretations().len(), 3);
        assert_eq!(ctx.new_relations(), &[("q".to_string(), 1)]);
        let t = |s: &str| crate::syntax::parse_term(s, ctx.extended()).unwrap();
        assert_eq!(phi(&ctx, &t("g(f(@a), @b)")).unwrap(), t("@a"));
        assert_eq!(phi(&ctx, &t("g(f(c'), d)")).unwrap(), t("@b"));
        assert_eq!(phi(&ctx, &t("f(d)")).unwrap(), t("f(f(@b))"));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let sig = Signature::parse("fun f/1\nrel p/2\nparams a b").unwrap();
        let e = parse_extension("extend rel q/1\nextend fun g/2 map (@a) -> @a\n", &sig, &[]).unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_extension("extend fun f/1 default @a\n", &sig, &[]).unwrap_err();
        assert!(e.msg.contains('f'), "{e}");
        assert!(parse_extension("extend fun h/1 default nope(@a)\n", &sig, &[]).is_err());
    }
}
