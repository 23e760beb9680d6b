use std::fmt;

use super::{definedness, Formula, Term};

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) => write!(f, "{x}"),
            Term::Param(a) => write!(f, "@{a}"),
            Term::App(g, args) if args.is_empty() => write!(f, "{g}"),
            Term::App(g, args) => {
                write!(f, "{g}(")?;
                write_list(f, args)?;
                write!(f, ")")
            }
        }
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, args: &[Term]) -> fmt::Result {
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{a}")?;
    }
    Ok(())
}

// Binding strength: -> 1, | 2, & 3, ~ and atoms 4. Quantifiers extend as
// far right as possible, so they are parenthesised in any operand position.
const IMP: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const UNARY: u8 = 4;

fn write_formula(f: &mut fmt::Formatter<'_>, phi: &Formula, ctx: u8) -> fmt::Result {
    let paren = |f: &mut fmt::Formatter<'_>, needed: bool, body: &dyn Fn(&mut fmt::Formatter<'_>) -> fmt::Result| {
        if needed {
            write!(f, "(")?;
            body(f)?;
            write!(f, ")")
        } else {
            body(f)
        }
    };
    if let Some(t) = phi.as_definedness() {
        if definedness(t) == *phi {
            return write!(f, "{t}!");
        }
    }
    match phi {
        Formula::Atom(p, args) => {
            write!(f, "{p}(")?;
            write_list(f, args)?;
            write!(f, ")")
        }
        Formula::Equal(l, r) => write!(f, "{l} = {r}"),
        Formula::Falsum => write!(f, "false"),
        Formula::Not(a) => {
            write!(f, "~")?;
            write_formula(f, a, UNARY)
        }
        Formula::And(a, b) => paren(f, ctx > AND, &|f| {
            write_formula(f, a, AND)?;
            write!(f, " & ")?;
            write_formula(f, b, UNARY)
        }),
        Formula::Or(a, b) => paren(f, ctx > OR, &|f| {
            write_formula(f, a, OR)?;
            write!(f, " | ")?;
            write_formula(f, b, AND)
        }),
        Formula::Implies(a, b) => paren(f, ctx > IMP, &|f| {
            write_formula(f, a, OR)?;
            write!(f, " -> ")?;
            write_formula(f, b, IMP)
        }),
        Formula::Forall(x, body) | Formula::Exists(x, body) => {
            let kw = if matches!(phi, Formula::Forall(..)) { "forall" } else { "exists" };
            paren(f, ctx > 0, &|f| {
                write!(f, "{kw} {x}. ")?;
                write_formula(f, body, 0)
            })
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self, 0)
    }
}
